"""Bit-flip and erasure probabilities given a single load change per bit.

Every conditional probability reduces to one primitive: the chance that a
symbol's window average, which spends fraction ``w`` of the window at a
known pre-change level and the rest at ``f(x, R)`` for a fresh load ``R``,
ends up below the pilot threshold.  Because ``f(x, .)`` is strictly
increasing in the load, that event is ``R < r_th`` for a threshold load
found in closed form, so the probability is a cdf evaluation.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .grid import alpha_beta, bus_voltage
from .load import LoadDistribution, TruncatedExponential


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre node counts, applied on every smooth piece of the integrand."""

    nodes_r0: int = 48
    nodes_theta: int = 48
    scheme: str = "gauss-legendre"

    def __post_init__(self):
        if self.nodes_r0 < 16 or self.nodes_theta < 16:
            raise ValueError("need at least 16 nodes per dimension")
        if self.scheme != "gauss-legendre":
            raise ValueError(f"unsupported scheme {self.scheme!r}")

    def doubled(self):
        return QuadratureSpec(2 * self.nodes_r0, 2 * self.nodes_theta)


@lru_cache(maxsize=None)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def _gl_nodes(a, b, n):
    t, w = _leggauss(n)
    h = 0.5 * (b - a)
    return a + h * (t + 1.0), h * w


def _default_dist(g, dist):
    return dist if dist is not None else LoadDistribution(g.r_min, g.r_max)


def prob_avg_below(x, g, dist, v0, level0, w):
    """``Pr_R(w*level0 + (1-w)*f(x, R) < v0)`` for a fresh load ``R ~ dist``.

    Arguments broadcast; ``w`` must lie in ``[0, 1)``.
    """
    alpha, beta = alpha_beta(x, g)
    v0, level0, w = np.broadcast_arrays(
        np.asarray(v0, float), np.asarray(level0, float), np.asarray(w, float)
    )
    c = (v0 - w * level0) / (1.0 - w)
    out = np.zeros(c.shape)
    # f(x, .) ranges over (0, alpha/beta); outside that the event is sure or void
    out[c >= alpha / beta] = 1.0
    mid = (c > 0) & (c < alpha / beta)
    out[mid] = dist.cdf(1.0 / (alpha / c[mid] - beta))
    return out if out.ndim else float(out)


def _check_theta(theta, T):
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta >= T):
        raise ValueError("change instant must lie in [0, T)")
    return theta


def _levels(const, g, r0):
    return (
        bus_voltage(const.pilot, g, r0),
        bus_voltage(const.x_h, g, r0),
        bus_voltage(const.x_l, g, r0),
    )


def cond_flip_1to0(const, g, r0, theta, T, dist=None):
    """Chance a '1' is read as '0' given initial load ``r0`` and change at ``theta``."""
    theta = _check_theta(theta, T)
    dist = _default_dist(g, dist)
    v0, vh, _ = _levels(const, g, r0)
    return prob_avg_below(const.x_h, g, dist, v0, vh, theta / T)


def cond_flip_0to1(const, g, r0, theta, T, dist=None):
    theta = _check_theta(theta, T)
    dist = _default_dist(g, dist)
    v0, _, vl = _levels(const, g, r0)
    return 1.0 - prob_avg_below(const.x_l, g, dist, v0, vl, theta / T)


def cond_erasure_1(const, g, r0, theta, T, dist=None):
    """Chance a Manchester '1' (H then L) is erased given ``r0`` and ``theta``."""
    theta = _check_theta(theta, T)
    dist = _default_dist(g, dist)
    v0, vh, vl = _levels(const, g, r0)
    half = T / 2
    first = theta < half
    w1 = np.where(first, theta / half, 0.0)
    w2 = np.where(first, 0.0, (theta - half) / half)
    # change in the H half: erased iff L ends above v0, or the H average dips below
    in_first = (1.0 - prob_avg_below(const.x_l, g, dist, v0, vl, 0.0)) + prob_avg_below(
        const.x_h, g, dist, v0, vh, w1
    )
    # change in the L half: H is intact above v0, so only the L average matters
    in_second = 1.0 - prob_avg_below(const.x_l, g, dist, v0, vl, w2)
    return np.where(first, in_first, in_second)[()]


def cond_erasure_0(const, g, r0, theta, T, dist=None):
    """Chance a Manchester '0' (L then H) is erased given ``r0`` and ``theta``."""
    theta = _check_theta(theta, T)
    dist = _default_dist(g, dist)
    v0, vh, vl = _levels(const, g, r0)
    half = T / 2
    first = theta < half
    w1 = np.where(first, theta / half, 0.0)
    w2 = np.where(first, 0.0, (theta - half) / half)
    in_first = (1.0 - prob_avg_below(const.x_l, g, dist, v0, vl, w1)) + prob_avg_below(
        const.x_h, g, dist, v0, vh, 0.0
    )
    in_second = prob_avg_below(const.x_h, g, dist, v0, vh, w2)
    return np.where(first, in_first, in_second)[()]


def _symbol_breaks(x, g, dist):
    # the primitive is smooth except where its threshold load hits the support ends
    return bus_voltage(x, g, np.array([dist.r_min, dist.r_max]))


def _outer_breaks(const, g, dist):
    """Initial loads where an inner kink enters or leaves the change window."""
    alpha0, beta0 = alpha_beta(const.pilot, g)
    pts = []
    for x in (const.x_h, const.x_l):
        for t in _symbol_breaks(x, g, dist):
            d = alpha0 / t - beta0
            if d > 0:
                r = 1.0 / d
                if dist.r_min < r < dist.r_max:
                    pts.append(r)
    return sorted(set(pts))


def _inner_breaks(const, g, dist, r0, T, windows, support):
    v0, _, _ = _levels(const, g, r0)
    pts = {support[0], support[1]}
    for a, b in windows:
        pts.update((a, b))
        for x in (const.x_h, const.x_l):
            level0 = float(bus_voltage(x, g, r0))
            for t in _symbol_breaks(x, g, dist):
                if t == level0:
                    continue
                w = (t - v0) / (t - level0)
                if 0.0 < w < 1.0:
                    pts.add(a + w * (b - a))
    lo, hi = support
    return sorted(p for p in pts if lo <= p <= hi)


def _nested_expectation(cond, const, g, dist, T, theta_dist, quad, windows):
    """``E_R0 E_theta[cond(r0, theta)]`` by piecewise Gauss-Legendre."""
    support = theta_dist.support(T)
    r_edges = [dist.r_min, *_outer_breaks(const, g, dist), dist.r_max]
    total = 0.0
    for ra, rb in zip(r_edges[:-1], r_edges[1:]):
        r_nodes, r_w = _gl_nodes(ra, rb, quad.nodes_r0)
        for r0, wr in zip(r_nodes, r_w):
            edges = _inner_breaks(const, g, dist, r0, T, windows, support)
            inner = 0.0
            for a, b in zip(edges[:-1], edges[1:]):
                if b <= a:
                    continue
                th, wt = _gl_nodes(a, b, quad.nodes_theta)
                inner += np.sum(wt * theta_dist.pdf(th, T) * cond(const, g, r0, th, T, dist))
            total += wr * inner
    return total / (dist.r_max - dist.r_min)


def flip_probs(const, g, load_dist=None, theta_dist=None, T=1.0, quad=None):
    """BAC flip probabilities ``(p_1to0, p_0to1)`` given a load change in the bit."""
    load_dist = _default_dist(g, load_dist)
    if load_dist.degenerate:
        return 0.0, 0.0
    theta_dist = theta_dist or TruncatedExponential()
    quad = quad or QuadratureSpec()
    windows = [(0.0, T)]
    p10 = _nested_expectation(cond_flip_1to0, const, g, load_dist, T, theta_dist, quad, windows)
    p01 = _nested_expectation(cond_flip_0to1, const, g, load_dist, T, theta_dist, quad, windows)
    return float(np.clip(p10, 0, 1)), float(np.clip(p01, 0, 1))


def erasure_probs(const, g, load_dist=None, theta_dist=None, T=1.0, quad=None):
    """BAEC erasure probabilities ``(q_1e, q_0e)`` for Manchester bits."""
    load_dist = _default_dist(g, load_dist)
    if load_dist.degenerate:
        return 0.0, 0.0
    theta_dist = theta_dist or TruncatedExponential()
    quad = quad or QuadratureSpec()
    windows = [(0.0, T / 2), (T / 2, T)]
    q1 = _nested_expectation(cond_erasure_1, const, g, load_dist, T, theta_dist, quad, windows)
    q0 = _nested_expectation(cond_erasure_0, const, g, load_dist, T, theta_dist, quad, windows)
    return float(np.clip(q1, 0, 1)), float(np.clip(q0, 0, 1))


@dataclass(frozen=True)
class ChannelParams:
    kind: str
    p10: float = 0.0
    p01: float = 0.0
    q1e: float = 0.0
    q0e: float = 0.0

    def __post_init__(self):
        if self.kind not in ("BAC", "BAEC"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        for name in ("p10", "p01", "q1e", "q0e"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} is not a probability")

    @classmethod
    def bac(cls, p10, p01):
        return cls("BAC", p10=p10, p01=p01)

    @classmethod
    def baec(cls, q1e, q0e):
        return cls("BAEC", q1e=q1e, q0e=q0e)


@dataclass(frozen=True)
class TransitionMatrix:
    """Rows are inputs (0, 1); columns are the outputs listed in ``outputs``."""

    probs: np.ndarray
    outputs: tuple = field(default=("0", "1"))

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[1] != len(self.outputs):
            raise ValueError("matrix shape does not match outputs")
        if np.any(p < 0) or np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("transition matrix must be row-stochastic")
        object.__setattr__(self, "probs", p)


def to_matrix(params):
    if params.kind == "BAC":
        p = [[1 - params.p01, params.p01], [params.p10, 1 - params.p10]]
        return TransitionMatrix(np.array(p), ("0", "1"))
    p = [[1 - params.q0e, 0.0, params.q0e], [0.0, 1 - params.q1e, params.q1e]]
    return TransitionMatrix(np.array(p), ("0", "1", "e"))
