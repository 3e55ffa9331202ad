"""Input-output weight enumeration and union bounds for HT-coset codes."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .coset import HtCode
from .hadamard import CapabilityError, hadamard_matrix

IOWEF_MAX_K = 24
_CHUNK = 1 << 16


class NumericError(RuntimeError):
    """A root search failed to bracket or converge."""


@dataclass(frozen=True)
class Iowef:
    """Sparse input-output weight enumerator ``{(w, d): A_wd}``."""

    N: int
    K: int
    terms: dict

    @property
    def total(self) -> int:
        return sum(self.terms.values())

    @property
    def min_distance(self) -> int:
        return min(d for (w, d), a in self.terms.items() if w > 0 and a > 0)

    def sorted_terms(self) -> list[tuple[int, int, int]]:
        return [(w, d, self.terms[w, d]) for w, d in sorted(self.terms)]

    def polynomial(self) -> str:
        """Render as ``1 + XY^4 + 3X^2Y^4 ...`` ordered by input then output weight."""
        parts = []
        for w, d, a in self.sorted_terms():
            if w == 0 and d == 0:
                parts.append(str(a))
                continue
            coef = "" if a == 1 else str(a)
            x = "" if w == 0 else ("X" if w == 1 else f"X^{w}")
            y = "" if d == 0 else ("Y" if d == 1 else f"Y^{d}")
            parts.append(f"{coef}{x}{y}")
        return " + ".join(parts)


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).astype(np.int64)


def iowef(code: HtCode) -> Iowef:
    """Exhaustive IOWEF over all ``2^K`` information words."""
    if code.K > IOWEF_MAX_K:
        raise CapabilityError(f"IOWEF enumeration limited to K <= {IOWEF_MAX_K}")
    rows = hadamard_matrix(code.p)[code.info_rows].astype(np.int64)
    row_ints = rows @ (np.int64(1) << np.arange(code.N, dtype=np.int64))
    counts: Counter = Counter()
    total = 1 << code.K
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        cw = np.zeros_like(idx)
        for i in range(code.K):
            cw ^= np.where((idx >> i) & 1, row_ints[i], 0)
        w = _popcount(idx)
        d = _popcount(cw)
        pairs, mult = np.unique(w * (code.N + 1) + d, return_counts=True)
        for key, a in zip(pairs.tolist(), mult.tolist()):
            counts[divmod(key, code.N + 1)] += a
    return Iowef(code.N, code.K, dict(counts))


def qfunc(x):
    """Gaussian tail probability ``Q(x) = erfc(x / sqrt 2) / 2``."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def union_bound_ber(weights: Iowef, ebn0_db, K: int | None = None, N: int | None = None):
    """Union bound on the bit error rate of BPSK over AWGN.

    ``(1/K) sum w A_wd Q(sqrt(2 d (K/N) Eb/N0))``; unclamped, so values above
    one can appear at low SNR.
    """
    K = weights.K if K is None else K
    N = weights.N if N is None else N
    gamma = 10.0 ** (np.asarray(ebn0_db, dtype=float) / 10.0)
    rate = K / N
    total = np.zeros_like(gamma)
    for (w, d), a in weights.terms.items():
        if w == 0 and d == 0:
            continue
        total = total + w * a * qfunc(np.sqrt(2.0 * d * rate * gamma))
    out = total / K
    return float(out) if np.ndim(out) == 0 else out


def required_ebn0(weights: Iowef, target_ber: float, lo: float = -2.0, hi: float = 15.0,
                  max_iter: int = 100, rtol: float = 1e-6) -> float:
    """Eb/N0 (dB) at which the union bound equals ``target_ber``, by bisection."""
    if not 0 < target_ber < 0.5:
        raise ValueError("target BER must lie in (0, 0.5)")

    def f(x):
        return union_bound_ber(weights, x) - target_ber

    flo, fhi = f(lo), f(hi)
    if flo < 0 or fhi > 0:
        raise NumericError(f"union bound does not bracket target {target_ber:g} on [{lo}, {hi}] dB "
                           f"(bound = {flo + target_ber:.3g} .. {fhi + target_ber:.3g})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) / target_ber < rtol:
            return mid
        if fm > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
