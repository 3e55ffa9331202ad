"""Binary Hadamard transform and soft-in soft-out processing on its butterfly graph."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .messages import LLR_CLAMP, boxplus, from_llr, to_llr

EXACT_EXTRINSIC_MAX_N = 16


class CapabilityError(RuntimeError):
    """Raised when an exhaustive computation would exceed its size guard."""


class ButterflyPair(NamedTuple):
    j: int
    j_prime: int
    stage: int


def log2_length(n: int) -> int:
    """Return ``p`` with ``n == 2**p`` (p >= 1), or raise ``ValueError``."""
    n = int(n)
    if n < 2 or n & (n - 1):
        raise ValueError(f"length must be a power of two >= 2, got {n}")
    return n.bit_length() - 1


def as_bits(u, length: int | None = None) -> np.ndarray:
    """Validate a binary vector (or batch of them) and return it as uint8."""
    arr = np.asarray(u)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("binary vector entries must be 0 or 1")
    arr = arr.astype(np.uint8)
    if length is not None and arr.shape[-1:] != (length,):
        raise ValueError(f"expected length {length}, got shape {arr.shape}")
    return arr


def complementary_pairs(p: int, s: int) -> list[ButterflyPair]:
    """All ``(j, j')`` index pairs whose binary expansions differ only in bit ``s``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if not 0 <= s < p:
        raise ValueError(f"stage s must satisfy 0 <= s < {p}, got {s}")
    step = 1 << s
    return [ButterflyPair(j, j + step, s) for j in range(1 << p) if not j & step]


def hadamard_matrix(p: int) -> np.ndarray:
    """The ``2**p`` square binary Hadamard matrix, ``H_{2N} = [[H_N, H_N], [0, H_N]]``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    h2 = np.array([[1, 1], [0, 1]], dtype=np.uint8)
    h = h2
    for _ in range(p - 1):
        h = np.kron(h2, h)
    return h


def _stage_view(x: np.ndarray, s: int) -> np.ndarray:
    # (..., N) -> (..., N / 2^(s+1), 2, 2^s); [..., 0, :] holds j, [..., 1, :] holds j + 2^s
    n = x.shape[-1]
    return x.reshape(x.shape[:-1] + (n >> (s + 1), 2, 1 << s))


def fht(u) -> np.ndarray:
    """Fast Hadamard transform ``u H_N`` over GF(2) along the last axis.

    Runs ``p`` stages of in-place butterflies ``(a, b) -> (a, a ^ b)``.
    """
    x = as_bits(u).copy()
    p = log2_length(x.shape[-1])
    for s in range(p):
        v = _stage_view(x, s)
        v[..., 1, :] ^= v[..., 0, :]
    return x


def _all_vectors(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def exact_extrinsic(prior_u0, prior_up, clip: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Exact extrinsic messages on both sides of ``U_p = U_0 H_N`` by enumeration.

    ``prior_u0`` and ``prior_up`` are ``(N, 2)`` probability arrays. The cost is
    ``O(N 2^N)``, so ``N`` is limited to 16.
    """
    pu0 = np.asarray(prior_u0, dtype=float)
    pup = np.asarray(prior_up, dtype=float)
    n = pu0.shape[0]
    log2_length(n)
    if n > EXACT_EXTRINSIC_MAX_N:
        raise CapabilityError(f"exact extrinsic enumeration limited to N <= {EXACT_EXTRINSIC_MAX_N}")
    if pup.shape != (n, 2) or pu0.shape != (n, 2):
        raise ValueError("priors must both have shape (N, 2)")
    vec = _all_vectors(n)
    img = fht(vec)
    # side 0: sum over u0, weight P_Up(u0 H) * prod_{k != j} P_U0,k
    ext0 = _extrinsic_side_pair(vec, img, pu0, pup)
    extp = _extrinsic_side_pair(vec, img, pup, pu0)
    return _finish(ext0, clip), _finish(extp, clip)


def _extrinsic_side_pair(vec, img, own_prior, other_prior):
    n = vec.shape[1]
    cols = np.arange(n)[None, :]
    like = np.prod(other_prior[cols, img], axis=1)
    own = own_prior[cols, vec]
    out = np.empty((n, 2))
    for j in range(n):
        rest = np.prod(np.delete(own, j, axis=1), axis=1) * like
        ones = vec[:, j] == 1
        out[j, 0] = rest[~ones].sum()
        out[j, 1] = rest[ones].sum()
    return out


def _finish(unnorm, clip):
    total = unnorm.sum(axis=1, keepdims=True)
    if np.any(total <= 0):
        raise ValueError("priors are inconsistent: zero total likelihood")
    p = unnorm / total
    if clip > 0:
        p = np.clip(p, clip, None)
        p /= p.sum(axis=1, keepdims=True)
    return p


def siso_fht_llr(prior_u0, prior_up, iterations: int) -> tuple[np.ndarray, np.ndarray]:
    """Forward-backward SISO over the FHT butterfly graph, in LLR form.

    Inputs are LLR arrays of shape ``(..., N)``; leading axes are independent
    batches. Each edge of the graph keeps a forward and a backward message.
    One iteration is a backward sweep (stages ``p-1 .. 0``) followed by a
    forward sweep (stages ``0 .. p-1``). Returns the extrinsic LLRs on ``U_0``
    and ``U_p``.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    a0 = np.clip(np.asarray(prior_u0, dtype=float), -LLR_CLAMP, LLR_CLAMP)
    ap = np.clip(np.asarray(prior_up, dtype=float), -LLR_CLAMP, LLR_CLAMP)
    if a0.shape != ap.shape:
        raise ValueError("prior shapes differ")
    p = log2_length(a0.shape[-1])
    fwd = [a0] + [np.zeros_like(a0) for _ in range(p)]
    bwd = [np.zeros_like(a0) for _ in range(p)] + [ap]
    for _ in range(iterations):
        for s in range(p - 1, -1, -1):
            r = _stage_view(fwd[s], s)
            b = _stage_view(bwd[s + 1], s)
            out = _stage_view(bwd[s], s)
            lo, hi = r[..., 0, :], r[..., 1, :]
            top, bot = b[..., 0, :], b[..., 1, :]
            new_lo = top + boxplus(hi, bot)
            new_hi = boxplus(lo + top, bot)
            out[..., 0, :] = new_lo
            out[..., 1, :] = new_hi
        for s in range(p):
            r = _stage_view(fwd[s], s)
            b = _stage_view(bwd[s + 1], s)
            out = _stage_view(fwd[s + 1], s)
            lo, hi = r[..., 0, :], r[..., 1, :]
            top, bot = b[..., 0, :], b[..., 1, :]
            new_lo = lo + boxplus(hi, bot)
            new_hi = boxplus(lo + top, hi)
            out[..., 0, :] = new_lo
            out[..., 1, :] = new_hi
    ext0 = np.clip(bwd[0], -LLR_CLAMP, LLR_CLAMP)
    extp = np.clip(fwd[p], -LLR_CLAMP, LLR_CLAMP)
    return ext0, extp


def siso_fht(prior_u0, prior_up, iterations: int) -> tuple[np.ndarray, np.ndarray]:
    """Probability-domain wrapper of :func:`siso_fht_llr` for ``(N, 2)`` message arrays."""
    e0, ep = siso_fht_llr(to_llr(prior_u0), to_llr(prior_up), iterations)
    return from_llr(e0), from_llr(ep)
