"""Error, erasure and capacity curves against the power deviation.

The H and L symbols at each sweep point sit on the family's line through
the pilot and are paired so that both have the same power deviation.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .analysis import ChannelParams, QuadratureSpec, erasure_probs, flip_probs, to_matrix
from .capacity import arimoto_blahut
from .constellation import Constellation
from .grid import Symbol
from .load import LoadDistribution
from .space import DeviationSpec, in_space, power_deviation
from .streams import pmap

FAMILY_ALIASES = {"fixed-va": "fixed_va", "fixed-rd": "fixed_rd", "fixed_va": "fixed_va", "fixed_rd": "fixed_rd"}

# outer ends of each family line, (H, L)
DEFAULT_RANGES = {
    "fixed_rd": (402.0, 396.0),  # v_a, volts
    "fixed_va": (0.8, 2.5),  # r_da, ohms
}


def family_symbol(family, pilot, t):
    if family == "fixed_rd":
        return Symbol(float(t), pilot.r_da)
    return Symbol(pilot.v_a, float(t))


def _pilot_coord(family, pilot):
    return pilot.v_a if family == "fixed_rd" else pilot.r_da


def admissible_edge(family, pilot, outer, g, iters=80):
    """Farthest point towards ``outer`` on the family line that stays in the signaling space."""
    inner = _pilot_coord(family, pilot)
    if in_space(family_symbol(family, pilot, outer), g):
        return outer
    lo, hi = inner, outer
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if in_space(family_symbol(family, pilot, mid), g):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class SweepRow:
    delta: float
    delta_h: float
    delta_l: float
    x_h: Symbol
    x_l: Symbol
    p10: float
    p01: float
    q1e: float
    q0e: float
    c_bac: float
    c_baec: float


def sweep_line(family, pilot, g, ranges=None, load_dist=None):
    """Pilot coordinate, admissible outer ends and the deviation at each end."""
    family = FAMILY_ALIASES[family]
    load_dist = load_dist or LoadDistribution(g.r_min, g.r_max)
    spec = DeviationSpec(pilot, load_dist)
    outer_h, outer_l = ranges or DEFAULT_RANGES[family]
    edge_h = admissible_edge(family, pilot, outer_h, g)
    edge_l = admissible_edge(family, pilot, outer_l, g)

    def delta_at(t):
        return power_deviation(family_symbol(family, pilot, t), spec, g)

    return _pilot_coord(family, pilot), edge_h, edge_l, delta_at


def delta_grid(family, pilot, g, points, ranges=None, load_dist=None):
    """Default deviation grid: ``points`` values up to the largest deviation both symbols reach."""
    _, edge_h, edge_l, delta_at = sweep_line(family, pilot, g, ranges, load_dist)
    d_max = min(delta_at(edge_h), delta_at(edge_l))
    return np.linspace(d_max / points, d_max, points)


def _solve_coord(delta_at, inner, edge, target):
    if target <= 0:
        return inner
    f_edge = delta_at(edge) - target
    if f_edge <= 0:
        return edge
    return brentq(lambda t: delta_at(t) - target, inner, edge, xtol=1e-13, rtol=1e-14)


def delta_sweep(
    family,
    pilot,
    g,
    points=10,
    deltas=None,
    ranges=None,
    load_dist=None,
    T=1.0,
    quad=None,
    workers=1,
    tol=1e-9,
):
    """Rows of deviation, flip/erasure probabilities and conditional capacities."""
    family = FAMILY_ALIASES[family]
    load_dist = load_dist or LoadDistribution(g.r_min, g.r_max)
    quad = quad or QuadratureSpec()
    inner, edge_h, edge_l, delta_at = sweep_line(family, pilot, g, ranges, load_dist)
    if deltas is None:
        deltas = delta_grid(family, pilot, g, points, ranges, load_dist)
    d_max = min(delta_at(edge_h), delta_at(edge_l))
    if np.any(np.asarray(deltas) > d_max * (1 + 1e-12)):
        raise ValueError(f"requested deviation beyond the reachable maximum {d_max:.6g}")

    def point(d):
        x_h = family_symbol(family, pilot, _solve_coord(delta_at, inner, edge_h, d))
        x_l = family_symbol(family, pilot, _solve_coord(delta_at, inner, edge_l, d))
        const = Constellation.build(pilot, x_h, x_l, g, family)
        p10, p01 = flip_probs(const, g, load_dist, T=T, quad=quad)
        q1e, q0e = erasure_probs(const, g, load_dist, T=T, quad=quad)
        c_bac, _ = arimoto_blahut(to_matrix(ChannelParams.bac(p10, p01)), tol)
        c_baec, _ = arimoto_blahut(to_matrix(ChannelParams.baec(q1e, q0e)), tol)
        spec = DeviationSpec(pilot, load_dist)
        return SweepRow(
            float(d),
            power_deviation(x_h, spec, g),
            power_deviation(x_l, spec, g),
            x_h,
            x_l,
            p10,
            p01,
            q1e,
            q0e,
            c_bac,
            c_baec,
        )

    return pmap(point, list(deltas), workers)
