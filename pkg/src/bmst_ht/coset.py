"""Multiple-rate Hadamard-transform coset codes.

A code ``[N, K]`` pads ``K`` information bits with ``N - K`` frozen zeros,
places them on the rows of ``H_N`` given by a fixed row order, and encodes with
the fast Hadamard transform. All dimensions ``K`` of a given ``N`` share one
encoder and one decoder.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .hadamard import CapabilityError, as_bits, fht, hadamard_matrix, log2_length, siso_fht_llr
from .messages import LLR_CLAMP, from_llr, logsumexp_pair, normalize, to_llr

MAP_MAX_K = 20


@lru_cache(maxsize=None)
def _rm_order(p: int) -> tuple[int, ...]:
    weights = hadamard_matrix(p).sum(axis=1)
    # stable sort, heaviest rows first
    return tuple(int(i) for i in np.argsort(-weights, kind="stable"))


def rm_permutation(p: int) -> np.ndarray:
    """Row order of ``H_{2^p}`` by descending Hamming weight, ties kept in index order."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return np.array(_rm_order(p), dtype=np.int64)


@dataclass(frozen=True)
class HtCode:
    """An ``[N, K]`` HT-coset code.

    ``perm[i]`` is the row of ``H_N`` carrying padded input position ``i``; the
    first ``K`` positions carry information, the rest are frozen to zero.
    """

    N: int
    K: int
    perm: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        p = log2_length(self.N)
        if not 1 <= self.K <= self.N - 1:
            raise ValueError(f"K must satisfy 1 <= K <= N-1, got K={self.K} for N={self.N}")
        if self.perm is None:
            object.__setattr__(self, "perm", _rm_order(p))
        else:
            perm = tuple(int(i) for i in self.perm)
            if sorted(perm) != list(range(self.N)):
                raise ValueError("perm must be a permutation of 0..N-1")
            object.__setattr__(self, "perm", perm)

    @property
    def p(self) -> int:
        return self.N.bit_length() - 1

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def info_rows(self) -> np.ndarray:
        return np.asarray(self.perm[: self.K], dtype=np.int64)

    @property
    def frozen_rows(self) -> np.ndarray:
        return np.asarray(self.perm[self.K:], dtype=np.int64)

    def generator_matrix(self) -> np.ndarray:
        """``K x N`` generator: the information rows of ``Pi_N H_N``."""
        return hadamard_matrix(self.p)[self.info_rows]

    def __str__(self):
        return f"[{self.N},{self.K}]"


def encode(code: HtCode, u) -> np.ndarray:
    """Encode ``K`` information bits (or a batch, last axis) into an ``N``-bit codeword."""
    bits = as_bits(u, code.K)
    padded = np.zeros(bits.shape[:-1] + (code.N,), dtype=np.uint8)
    padded[..., code.info_rows] = bits
    return fht(padded)


def siso_decode_llr(code: HtCode, prior_v, prior_u=None, iterations: int = 3):
    """SISO decoding in LLR form; batched over leading axes.

    Frozen inputs get a saturated prior on 0. Returns ``(ext_u, ext_v)`` with
    shapes ``(..., K)`` and ``(..., N)``.
    """
    lv = np.asarray(prior_v, dtype=float)
    if lv.shape[-1] != code.N:
        raise ValueError(f"prior_v must have length {code.N}")
    lu0 = np.zeros(lv.shape)
    lu0[..., code.frozen_rows] = LLR_CLAMP
    if prior_u is not None:
        lu = np.asarray(prior_u, dtype=float)
        if lu.shape[-1] != code.K:
            raise ValueError(f"prior_u must have length {code.K}")
        lu0[..., code.info_rows] = lu
    ext0, extv = siso_fht_llr(lu0, lv, iterations)
    return ext0[..., code.info_rows], extv


def siso_decode(code: HtCode, prior_v, prior_u=None, iterations: int = 3):
    """SISO decoding on probability messages: ``prior_v`` is ``(N, 2)``, ``prior_u`` is ``(K, 2)``."""
    lu = None if prior_u is None else to_llr(prior_u)
    ext_u, ext_v = siso_decode_llr(code, to_llr(prior_v), lu, iterations)
    return from_llr(ext_u), from_llr(ext_v)


@lru_cache(maxsize=64)
def _codebook(code: HtCode) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1 << code.K, dtype=np.int64)
    info = ((idx[:, None] >> np.arange(code.K)) & 1).astype(np.uint8)
    return info, encode(code, info)


def codebook(code: HtCode) -> tuple[np.ndarray, np.ndarray]:
    """All ``2^K`` information words and their codewords (row ``i`` has info bits of ``i``)."""
    if code.K > MAP_MAX_K:
        raise CapabilityError(f"codebook enumeration limited to K <= {MAP_MAX_K}")
    return _codebook(code)


def map_decode_llr(code: HtCode, prior_v) -> np.ndarray:
    """Bitwise MAP a posteriori LLRs on the information bits (uniform information prior)."""
    info, words = codebook(code)
    lv = np.asarray(prior_v, dtype=float)
    # log P(v) up to a constant: sum over positions where v_j = 1 of -llr_j
    metric = -lv @ words.T.astype(float)  # (..., 2^K)
    out = np.empty(lv.shape[:-1] + (code.K,))
    for i in range(code.K):
        ones = info[:, i] == 1
        out[..., i] = logsumexp_pair(metric[..., ~ones], metric[..., ones])
    return out


def map_decode_oracle(code: HtCode, prior_v) -> np.ndarray:
    """Exact bitwise posteriors ``(K, 2)`` on the information bits by codebook enumeration."""
    pv = np.asarray(prior_v, dtype=float)
    if pv.shape != (code.N, 2):
        raise ValueError(f"prior_v must have shape ({code.N}, 2)")
    info, words = codebook(code)
    like = np.prod(pv[np.arange(code.N)[None, :], words], axis=1)
    post = np.empty((code.K, 2))
    for i in range(code.K):
        ones = info[:, i] == 1
        post[i] = like[~ones].sum(), like[ones].sum()
    if np.any(post.sum(axis=1) <= 0):
        raise ValueError("prior_v assigns zero likelihood to every codeword")
    return normalize(post)
