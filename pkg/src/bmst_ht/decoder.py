"""Sliding-window iterative decoding of BMST over HT-coset basic codes.

The normal graph has one layer per transmitted block. Layer ``t`` holds a
basic-code node ``C``, an equality node ``=`` replicating ``v(t)`` towards the
parity nodes of layers ``t .. t + m_K``, and a parity node ``+`` tying ``c(t)``
to ``v(t)`` and the interleaved ``v(t - i)``. All messages are LLRs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bmst import BasicCode, BmstConfig, basic_encode
from .coset import siso_decode_llr
from .messages import LLR_CLAMP, boxplus, from_llr, hard_decision, llr_entropy, to_llr


@dataclass(frozen=True)
class WindowConfig:
    """Decoding delay ``d``, iteration cap, entropy stop threshold and inner SISO iterations."""

    delay: int
    max_iterations: int = 18
    threshold: float = 1e-5
    inner_iterations: int = 3

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("delay must be >= 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if self.inner_iterations < 1:
            raise ValueError("inner_iterations must be >= 1")

    @classmethod
    def for_memory(cls, active_memory: int, **kw) -> "WindowConfig":
        """Window with the default delay ``d = 2 m_K``."""
        return cls(delay=2 * active_memory, **kw)


def _clamp(x):
    return np.clip(x, -LLR_CLAMP, LLR_CLAMP)


def equal_node_llr(incoming: np.ndarray) -> np.ndarray:
    """Extrinsic LLRs of an equality node; edges along axis 0."""
    x = np.asarray(incoming, dtype=float)
    return _clamp(x.sum(axis=0, keepdims=True) - x)


def check_node_llr(incoming: np.ndarray, channel=None) -> np.ndarray:
    """Extrinsic LLRs of a parity node ``c = xor of edges`` with evidence on ``c``.

    Edges lie along axis 0; leave-one-out boxplus via prefix and suffix chains.
    Without ``channel`` the node is a plain even-parity check (``c`` known to be 0).
    """
    x = np.asarray(incoming, dtype=float)
    k = x.shape[0]
    if k < 1:
        raise ValueError("a parity node needs at least one edge")
    prefix = [np.full(x.shape[1:], np.inf) if channel is None else np.asarray(channel, dtype=float)]
    for i in range(k - 1):
        prefix.append(boxplus(prefix[-1], x[i]))
    out = np.empty_like(x)
    out[k - 1] = prefix[k - 1]
    suffix = x[k - 1]
    for i in range(k - 2, -1, -1):
        out[i] = boxplus(prefix[i], suffix)
        suffix = boxplus(suffix, x[i])
    return _clamp(out)


def equal_node_update(incoming) -> np.ndarray:
    """Equality node on probability messages: ``(E, 2)`` in, extrinsic ``(E, 2)`` out."""
    msgs = np.asarray(incoming, dtype=float)
    if msgs.shape[0] < 2:
        raise ValueError("an equality node needs at least two edges")
    return from_llr(equal_node_llr(to_llr(msgs)))


def check_node_update(incoming, channel_msg=None) -> np.ndarray:
    """Parity node on probability messages; without ``channel_msg`` the edges XOR to zero."""
    msgs = np.asarray(incoming, dtype=float)
    ch = None if channel_msg is None else to_llr(channel_msg)
    return from_llr(check_node_llr(to_llr(msgs), ch))


def layer_siso_llr(basic: BasicCode, prior_v, iterations: int = 3):
    """Run the HT-coset SISO on every copy of the basic code (uniform info priors).

    Returns ``(ext_u, ext_v)`` with trailing lengths ``k`` and ``n``.
    """
    lv = np.asarray(prior_v, dtype=float)
    lead = lv.shape[:-1]
    ext_u = np.empty(lead + (basic.k,))
    ext_v = np.empty(lead + (basic.n,))
    for code, b, ki, ni in basic.groups:
        chunk = lv[..., ni:ni + code.N * b].reshape(lead + (b, code.N))
        eu, ev = siso_decode_llr(code, chunk, None, iterations)
        ext_u[..., ki:ki + code.K * b] = eu.reshape(lead + (b * code.K,))
        ext_v[..., ni:ni + code.N * b] = ev.reshape(lead + (b * code.N,))
    return ext_u, ext_v


def layer_siso(basic: BasicCode, prior_v, iterations: int = 3) -> np.ndarray:
    """Extrinsic coded-bit messages ``(n, 2)`` of the basic code from priors ``(n, 2)``."""
    _, ev = layer_siso_llr(basic, to_llr(prior_v), iterations)
    return from_llr(ev)


def entropy_stop(posteriors, threshold: float) -> bool:
    """True when the mean binary entropy (bits) of the messages is below ``threshold``."""
    from .messages import binary_entropy

    return bool(np.mean(binary_entropy(posteriors)) < threshold)


class _Window:
    """Message state of one batch of frames."""

    def __init__(self, config: BmstConfig, window: WindowConfig, channel: np.ndarray):
        self.cfg = config
        self.win = window
        self.ch = channel  # (F, T, n)
        F = channel.shape[0]
        L, mk, n, k = config.L, config.active_memory, config.basic.n, config.basic.k
        self.perms = [np.arange(n)] + [np.asarray(p) for p in config.interleavers[:mk]]
        self.inv = [np.argsort(p) for p in self.perms]
        # e2p[:, t, i]: '=' of v-layer t -> '+' of layer t+i, in v(t) coordinates
        self.e2p = np.zeros((F, L, mk + 1, n))
        # p2e[:, t, i]: '+' of layer t+i -> '=' of v-layer t, in v(t) coordinates
        self.p2e = np.zeros((F, L, mk + 1, n))
        self.ec = np.zeros((F, L, n))
        self.eu = np.zeros((F, L, k))

    def check(self, idx, tau):
        cfg = self.cfg
        edges = [i for i in range(cfg.active_memory + 1) if 0 <= tau - i < cfg.L]
        if not edges:
            return
        x = np.stack([self.e2p[idx, tau - i, i][:, self.perms[i]] for i in edges])
        y = check_node_llr(x, self.ch[idx, tau])
        for row, i in zip(y, edges):
            self.p2e[idx, tau - i, i] = row[:, self.inv[i]]

    def variable(self, idx, t):
        p2e = self.p2e[idx, t]  # (f, mk+1, n)
        prior = _clamp(p2e.sum(axis=1))
        eu, ev = layer_siso_llr(self.cfg.basic, prior, self.win.inner_iterations)
        self.ec[idx, t] = ev
        self.eu[idx, t] = eu
        self.e2p[idx, t] = _clamp(ev[:, None, :] + prior[:, None, :] - p2e)

    def posterior(self, idx, t):
        return self.ec[idx, t] + self.p2e[idx, t].sum(axis=1)

    def commit(self, t, u_hat):
        v_hat = basic_encode(self.cfg.basic, u_hat)
        sat = np.where(v_hat == 1, -LLR_CLAMP, LLR_CLAMP)
        self.e2p[:, t] = sat[:, None, :]


def sw_decode(config: BmstConfig, window: WindowConfig, channel_llr, return_iterations: bool = False):
    """Decode ``L`` data blocks from channel LLRs on ``L + m_K`` transmitted blocks.

    ``channel_llr`` has shape ``(L + m_K, n)`` or ``(F, L + m_K, n)`` for a batch
    of frames. For each target layer ``t`` the window spans layers
    ``t .. min(t + d, L + m_K - 1)``; every round visits the window layers in
    ascending order (parity node, then basic-code SISO through the equality
    node) and stops a frame early once the mean entropy of the target layer's
    coded-bit posteriors falls below the threshold. The decided block is
    re-encoded and fed back as saturated messages before the window slides.
    """
    ch = np.asarray(channel_llr, dtype=float)
    single = ch.ndim == 2
    if single:
        ch = ch[None]
    T, n = config.n_blocks, config.basic.n
    if ch.ndim != 3 or ch.shape[1:] != (T, n):
        raise ValueError(f"expected channel LLRs of shape (F, {T}, {n}), got {ch.shape}")
    ch = _clamp(ch)
    F = ch.shape[0]
    state = _Window(config, window, ch)
    decided = np.zeros((F, config.L, config.basic.k), dtype=np.uint8)
    iters = np.zeros((F, config.L), dtype=np.int64)
    for t in range(config.L):
        last = min(t + window.delay, T - 1)
        active = np.arange(F)
        for it in range(window.max_iterations):
            for tau in range(t, last + 1):
                state.check(active, tau)
                if tau < config.L:
                    state.variable(active, tau)
            iters[active, t] = it + 1
            h = llr_entropy(state.posterior(active, t)).mean(axis=1)
            active = active[h >= window.threshold]
            if active.size == 0:
                break
        decided[:, t] = hard_decision(state.eu[:, t])
        state.commit(t, decided[:, t])
    out = decided[0] if single else decided
    if return_iterations:
        return out, (iters[0] if single else iters)
    return out
