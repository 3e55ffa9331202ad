"""Soft messages on binary variables.

A message vector is stored as a float array of shape ``(..., N, 2)`` holding
``(P(0), P(1))`` per variable. Internally the decoders work on log-likelihood
ratios ``llr = log(p0 / p1)``; :func:`to_llr` and :func:`from_llr` are the
bijection between the two forms.
"""
from __future__ import annotations

import numpy as np

EPS_CLIP = 1e-12
LLR_CLAMP = 40.0


def normalize(probs, clip: float = EPS_CLIP) -> np.ndarray:
    """Normalize pairs to sum one, then clip each component to ``[clip, 1 - clip]``."""
    p = np.asarray(probs, dtype=float)
    if p.shape[-1] != 2:
        raise ValueError(f"last axis must have length 2, got shape {p.shape}")
    total = p.sum(axis=-1, keepdims=True)
    if np.any(total <= 0):
        raise ValueError("message with zero total mass")
    p = p / total
    if clip > 0:
        p = np.clip(p, clip, None)
        p = p / p.sum(axis=-1, keepdims=True)
    return p


def uniform(n: int) -> np.ndarray:
    return np.full((n, 2), 0.5)


def deterministic(bits) -> np.ndarray:
    """Saturated messages: all mass on the given bit values (no clipping)."""
    b = np.asarray(bits, dtype=np.int64)
    out = np.zeros(b.shape + (2,))
    np.put_along_axis(out, b[..., None], 1.0, axis=-1)
    return out


def to_llr(probs, clamp: float = LLR_CLAMP) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    with np.errstate(divide="ignore"):
        llr = np.log(p[..., 0]) - np.log(p[..., 1])
    return np.clip(np.nan_to_num(llr, nan=0.0), -clamp, clamp)


def from_llr(llr, clip: float = EPS_CLIP) -> np.ndarray:
    x = np.asarray(llr, dtype=float)
    p0 = 0.5 * (1.0 + np.tanh(0.5 * x))  # logistic(x), stable for large |x|
    return normalize(np.stack([p0, 1.0 - p0], axis=-1), clip=clip)


def boxplus(a, b):
    """LLR of the XOR of two independent bits with LLRs ``a`` and ``b`` (exact form)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
            + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b))))


def hard_decision(llr) -> np.ndarray:
    """Bit decisions from LLRs; ties decide 0."""
    return (np.asarray(llr) < 0).astype(np.uint8)


def binary_entropy(probs) -> np.ndarray:
    """Entropy in bits of each message in a ``(..., 2)`` array."""
    p = np.asarray(probs, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return terms.sum(axis=-1)


def llr_entropy(llr) -> np.ndarray:
    """Binary entropy (bits) of messages given in LLR form."""
    a = np.abs(np.asarray(llr, dtype=float))
    # H = log2(1 + e^-a) + a e^-a / (1 + e^-a) / ln 2
    e = np.exp(-a)
    return (np.log1p(e) + a * e / (1.0 + e)) / np.log(2.0)


def logsumexp_pair(zero_terms, one_terms) -> np.ndarray:
    """``log sum exp(zero_terms) - log sum exp(one_terms)`` along the last axis."""
    from scipy.special import logsumexp

    return logsumexp(zero_terms, axis=-1) - logsumexp(one_terms, axis=-1)
