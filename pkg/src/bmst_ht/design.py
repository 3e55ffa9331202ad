"""BI-AWGN Shannon limits and encoding-memory design for BMST of HT-coset codes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coset import HtCode
from .hadamard import log2_length
from .weights import iowef, required_ebn0

_GH_NODES = 128
_gh_x, _gh_w = np.polynomial.hermite.hermgauss(_GH_NODES)


def biawgn_capacity(snr) -> float:
    """Capacity (bits/use) of BPSK over AWGN at symbol SNR ``Es/N0`` (linear).

    With ``y = 1 + sigma z`` and ``sigma^2 = 1 / (2 Es/N0)`` the capacity is
    ``1 - E[log2(1 + exp(-2 y / sigma^2))]``, evaluated by Gauss-Hermite quadrature.
    """
    snr = float(snr)
    if not snr > 0:
        raise ValueError("SNR must be positive")
    sigma = math.sqrt(1.0 / (2.0 * snr))
    y = 1.0 + sigma * math.sqrt(2.0) * _gh_x
    llr = 2.0 * y / sigma**2
    loss = np.logaddexp(0.0, -llr) / math.log(2.0)
    return float(1.0 - np.dot(_gh_w, loss) / math.sqrt(math.pi))


def shannon_limit(rate: float, tol: float = 1e-4) -> float:
    """Smallest Eb/N0 (dB) at which BI-AWGN capacity reaches ``rate``."""
    if not 0 < rate < 1:
        raise ValueError("rate must lie in (0, 1)")
    lo, hi = -1.6, 12.0

    def excess(ebn0_db):
        return biawgn_capacity(rate * 10.0 ** (ebn0_db / 10.0)) - rate

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def required_memory(gamma_db: float, gamma_star_db: float) -> int:
    """Encoding memory whose extra gain ``10 log10(m + 1)`` best covers the gap.

    Rounds ``10^(gap/10) - 1`` half away from zero; zero when the gap is negative.
    """
    gap = gamma_db - gamma_star_db
    if gap <= 0:
        return 0
    return int(math.floor(10.0 ** (gap / 10.0) - 1.0 + 0.5))


@dataclass(frozen=True)
class DesignRow:
    K: int
    rate: float
    gamma_star_db: float
    gamma_db: float
    gap_db: float
    memory: int


def design_table(N: int, target_ber: float = 1e-5) -> list[DesignRow]:
    """Per-dimension memory design for ``[N, K]``, ``K = 1 .. N-1``."""
    log2_length(N)
    rows = []
    for K in range(1, N):
        code = HtCode(N, K)
        gamma = required_ebn0(iowef(code), target_ber)
        gamma_star = shannon_limit(K / N)
        rows.append(DesignRow(K, K / N, gamma_star, gamma, gamma - gamma_star,
                              required_memory(gamma, gamma_star)))
    return rows


def max_memory(rows: list[DesignRow]) -> int:
    """Number of interleavers the shared encoder needs: the largest per-rate memory."""
    return max((r.memory for r in rows), default=0)
