"""Capacity of discrete memoryless channels."""

import logging

import numpy as np

from .analysis import TransitionMatrix

log = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    def __init__(self, gap, iterations):
        super().__init__(f"capacity bounds still {gap:.3e} bits apart after {iterations} iterations")
        self.gap = gap
        self.iterations = iterations


def _divergences(W, p):
    """Per-input KL divergence (nats) between ``W[i]`` and the output law under ``p``."""
    q = p @ W
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(W > 0, W / q, 1.0)
        return np.sum(np.where(W > 0, W * np.log(ratio), 0.0), axis=1)


def arimoto_blahut(m, tol=1e-9, max_iter=100_000):
    """Capacity in bits per channel use and the capacity-achieving input law.

    Iterates until the gap between the standard upper bound
    ``max_i D(W_i || q)`` and lower bound ``log sum_i p_i exp D(W_i || q)``
    drops below ``tol`` bits.
    """
    if not isinstance(m, TransitionMatrix):
        m = TransitionMatrix(np.asarray(m, dtype=float), tuple(str(i) for i in range(np.shape(m)[1])))
    if tol <= 0:
        raise ValueError("tol must be positive")
    W = m.probs
    p = np.full(W.shape[0], 1.0 / W.shape[0])
    gap = np.inf
    for it in range(1, max_iter + 1):
        d = _divergences(W, p)
        c = np.exp(d - d.max())
        lower = d.max() + np.log(p @ c)
        upper = d.max()
        gap = (upper - lower) / np.log(2)
        if gap < tol:
            return float(lower / np.log(2)), p
        p = p * c
        p /= p.sum()
    raise ConvergenceError(gap, max_iter)


def binary_entropy(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    return np.where((p <= 0) | (p >= 1), 0.0, h)[()]


def average_capacity(c_cond, p_c):
    """Capacity per bit interval averaged over whether the load changed."""
    if not 0.0 <= p_c <= 1.0:
        raise ValueError(f"p_c must be in [0, 1], got {p_c}")
    return c_cond * p_c + 1.0 * (1.0 - p_c)
