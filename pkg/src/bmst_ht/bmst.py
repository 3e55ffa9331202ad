"""Block Markov superposition transmission over a product of HT-coset codes."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .coset import HtCode, encode
from .hadamard import as_bits


@dataclass(frozen=True)
class BasicCode:
    """Cartesian product of HT-coset codes, each repeated ``multiplicity`` times.

    Copies are laid out in declaration order: all copies of the first component,
    then all copies of the second, and so on.
    """

    components: tuple[tuple[HtCode, int], ...]

    def __post_init__(self):
        comps = tuple((c, int(b)) for c, b in self.components)
        if not comps or any(b < 1 for _, b in comps):
            raise ValueError("basic code needs at least one component with multiplicity >= 1")
        object.__setattr__(self, "components", comps)

    @classmethod
    def homogeneous(cls, N: int, K: int, B: int = 1) -> "BasicCode":
        return cls(((HtCode(N, K), B),))

    @classmethod
    def parse(cls, text: str, B: int = 1) -> "BasicCode":
        """Parse ``"4:1,4:1,4:2"`` (``N:K`` items) into a product repeated ``B`` times."""
        items = []
        for token in text.split(","):
            n_str, k_str = token.strip().split(":")
            items.append(HtCode(int(n_str), int(k_str)))
        return cls(tuple((c, 1) for c in items * B))

    @property
    def n(self) -> int:
        return sum(c.N * b for c, b in self.components)

    @property
    def k(self) -> int:
        return sum(c.K * b for c, b in self.components)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @cached_property
    def groups(self) -> list[tuple[HtCode, int, int, int]]:
        """``(code, copies, info_offset, coded_offset)`` for each run of copies."""
        out, ki, ni = [], 0, 0
        for code, b in self.components:
            out.append((code, b, ki, ni))
            ki += code.K * b
            ni += code.N * b
        return out

    def describe(self) -> str:
        return " x ".join(f"{c}^{b}" if b > 1 else str(c) for c, b in self.components)


def basic_encode(basic: BasicCode, u) -> np.ndarray:
    """Encode ``k`` bits (batched on leading axes) into ``n`` bits, component by component."""
    bits = as_bits(u, basic.k)
    lead = bits.shape[:-1]
    out = np.empty(lead + (basic.n,), dtype=np.uint8)
    for code, b, ki, ni in basic.groups:
        chunk = bits[..., ki:ki + code.K * b].reshape(lead + (b, code.K))
        out[..., ni:ni + code.N * b] = encode(code, chunk).reshape(lead + (b * code.N,))
    return out


def make_interleavers(n: int, m: int, seed: int) -> list[np.ndarray]:
    """``m`` fixed random permutations of ``range(n)``.

    Drawn in order from ``numpy.random.default_rng(seed)`` (PCG64) with
    ``Generator.permutation``, so the first ``j`` interleavers do not depend on ``m``.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    rng = np.random.default_rng(seed)
    return [rng.permutation(n) for _ in range(m)]


@dataclass(frozen=True)
class BmstConfig:
    """Encoder setup: ``m`` interleavers are built, the first ``active_memory`` are switched on."""

    basic: BasicCode
    memory: int
    active_memory: int
    seed: int
    L: int
    interleavers: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if not 0 <= self.active_memory <= self.memory:
            raise ValueError("need 0 <= active_memory <= memory")
        perms = tuple(make_interleavers(self.basic.n, self.memory, self.seed))
        for p in perms:
            p.setflags(write=False)
        object.__setattr__(self, "interleavers", perms)

    @property
    def n_blocks(self) -> int:
        return self.L + self.active_memory

    @property
    def rate(self) -> float:
        return self.basic.k * self.L / (self.basic.n * self.n_blocks)


def interleave(perm: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply ``Pi``: output position ``j`` takes input position ``perm[j]``."""
    return x[..., perm]


def deinterleave(perm: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    out[..., perm] = x
    return out


def superpose(config: BmstConfig, v_blocks) -> np.ndarray:
    """``c(t) = v(t) xor sum_i Pi_i(v(t - i))`` for ``t < L + m_K``, zero blocks outside ``[0, L)``."""
    v = np.asarray(v_blocks, dtype=np.uint8)
    lead = v.shape[:-2]
    c = np.zeros(lead + (config.n_blocks, config.basic.n), dtype=np.uint8)
    c[..., : config.L, :] = v
    for i in range(1, config.active_memory + 1):
        c[..., i:i + config.L, :] ^= interleave(config.interleavers[i - 1], v)
    return c


def bmst_encode(config: BmstConfig, u_blocks) -> np.ndarray:
    """Encode ``L`` data blocks of ``k`` bits into ``L + m_K`` blocks of ``n`` bits.

    Leading axes beyond ``(L, k)`` are treated as independent frames.
    """
    u = as_bits(u_blocks, config.basic.k)
    if u.ndim < 2 or u.shape[-2] != config.L:
        raise ValueError(f"expected {config.L} data blocks of length {config.basic.k}, got shape {u.shape}")
    return superpose(config, basic_encode(config.basic, u))
