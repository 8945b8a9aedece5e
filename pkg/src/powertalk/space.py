"""Admissible symbol regions and the power-deviation cost of a symbol.

Regions live in the ``(r_da, v_a)`` plane.  The voltage and current regions
are closed; the high/low regions relative to the pilot are strict.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import Symbol, bus_voltage, output_current_a
from .load import LoadDistribution

# Absolute slack (volts) for the closed-form boundary tests; keeps points
# sampled exactly on a bounding line inside the region.
_EDGE_TOL = 1e-9


def voltage_bounds(r_da, g):
    """Lower/upper ``v_a`` keeping ``V_min <= v* <= V_max`` for every admissible load."""
    r_da = np.asarray(r_da, dtype=float)
    lo = r_da * (g.v_min / g.r_min + (g.v_min - g.v_b) / g.r_db) + g.v_min
    hi = r_da * (g.v_max / g.r_max + (g.v_max - g.v_b) / g.r_db) + g.v_max
    return lo, hi


def current_bounds(r_da, g):
    """Lower/upper ``v_a`` keeping ``0 <= i_a <= I_a,max`` for every admissible load."""
    r_da = np.asarray(r_da, dtype=float)
    lo = np.full(r_da.shape, (g.v_b / g.r_db) / (1.0 / g.r_db + 1.0 / g.r_max))
    hi = r_da * g.i_a_max + (g.i_a_max + g.v_b / g.r_db) / (1.0 / g.r_min + 1.0 / g.r_db)
    return lo, hi


def in_voltage_region(x, g):
    lo, hi = voltage_bounds(x.r_da, g)
    return bool(lo - _EDGE_TOL <= x.v_a <= hi + _EDGE_TOL)


def in_current_region(x, g):
    lo, hi = current_bounds(x.r_da, g)
    return bool(lo - _EDGE_TOL <= x.v_a <= hi + _EDGE_TOL)


def in_space(x, g):
    return in_voltage_region(x, g) and in_current_region(x, g)


def load_grid(g, n=1001):
    return np.linspace(g.r_min, g.r_max, n)


def violates_constraints(x, g, n=1001):
    """Direct check of the operating limits on a dense load grid."""
    r = load_grid(g, n)
    v = bus_voltage(x, g, r)
    i = output_current_a(x, g, r)
    return bool(
        np.any(v < g.v_min) or np.any(v > g.v_max) or np.any(i < 0) or np.any(i > g.i_a_max)
    )


def boundary_curves(g, n_points=50, r_da_range=None):
    """The four bounding lines of the signaling space.

    Returns a dict mapping line name to an ``(n_points, 2)`` array of
    ``(r_da, v_a)`` pairs.  By default ``r_da`` spans the range where the
    region is non-empty.
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    lo_r, hi_r = r_da_range if r_da_range is not None else space_r_da_range(g)
    r_da = np.linspace(lo_r, hi_r, n_points)
    v_lo, v_hi = voltage_bounds(r_da, g)
    i_lo, i_hi = current_bounds(r_da, g)
    return {
        "voltage_lower": np.column_stack([r_da, v_lo]),
        "voltage_upper": np.column_stack([r_da, v_hi]),
        "current_lower": np.column_stack([r_da, i_lo]),
        "current_upper": np.column_stack([r_da, i_hi]),
    }


def space_r_da_range(g):
    """Interval of ``r_da`` over which the signaling space is non-empty.

    Each bound is linear in ``r_da``, so the feasible set is the interval
    where max(lower lines) <= min(upper lines).
    """
    slopes_lo = np.array([g.v_min / g.r_min + (g.v_min - g.v_b) / g.r_db, 0.0])
    icpt_lo = np.array([g.v_min, current_bounds(1.0, g)[0].item()])
    slopes_hi = np.array([g.v_max / g.r_max + (g.v_max - g.v_b) / g.r_db, g.i_a_max])
    icpt_hi = np.array([g.v_max, current_bounds(0.0, g)[1].item()])
    lo, hi = 0.0, np.inf
    for sl, il in zip(slopes_lo, icpt_lo):
        for sh, ih in zip(slopes_hi, icpt_hi):
            # need il + sl*r <= ih + sh*r
            ds = sl - sh
            di = ih - il
            if ds > 0:
                hi = min(hi, di / ds)
            elif ds < 0:
                lo = max(lo, di / ds)
            elif di < 0:
                return (np.nan, np.nan)
    return lo, hi


def in_region_H(x, pilot, g, n=1001):
    """Symbol lifts the bus strictly above the pilot level for every admissible load."""
    r = load_grid(g, n)
    return bool(np.all(bus_voltage(x, g, r) > bus_voltage(pilot, g, r)))


def in_region_L(x, pilot, g, n=1001):
    r = load_grid(g, n)
    return bool(np.all(bus_voltage(x, g, r) < bus_voltage(pilot, g, r)))


def bus_power(x, g, r):
    r = np.asarray(r, dtype=float)
    return bus_voltage(x, g, r) ** 2 / r


@dataclass(frozen=True)
class DeviationSpec:
    pilot: Symbol
    load_dist: LoadDistribution = field(default_factory=LoadDistribution)
    method: str = "quadrature"
    samples_or_nodes: int = 64

    def __post_init__(self):
        if self.method not in ("quadrature", "monte_carlo"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.samples_or_nodes < 16:
            raise ValueError("need at least 16 nodes/samples")


def load_expectation_nodes(dist, n):
    """Gauss-Legendre nodes and probability weights for ``E_R[.]``."""
    if dist.degenerate:
        return np.array([dist.r_min]), np.array([1.0])
    t, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (dist.r_max - dist.r_min)
    return dist.r_min + half * (t + 1.0), 0.5 * w


def power_deviation(x, spec, g, rng=None):
    """RMS change of delivered load power relative to the mean pilot power."""
    if not in_space(spec.pilot, g):
        raise ValueError("pilot lies outside the signaling space")
    if spec.method == "quadrature":
        r, w = load_expectation_nodes(spec.load_dist, spec.samples_or_nodes)
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        r = spec.load_dist.sample(rng, spec.samples_or_nodes)
        w = np.full(r.shape, 1.0 / r.size)
    p0 = bus_power(spec.pilot, g, r)
    dp = bus_power(x, g, r) - p0
    return float(np.sqrt(np.sum(w * dp**2)) / np.sum(w * p0))


def delta_map(g, pilot, n_va=41, n_rd=41, load_dist=None):
    """Power deviation over a rectangular grid of the signaling space.

    Returns rows ``(v_a, r_da, delta)`` for grid points inside the space.
    """
    load_dist = load_dist or LoadDistribution(g.r_min, g.r_max)
    spec = DeviationSpec(pilot, load_dist)
    lo_r, hi_r = space_r_da_range(g)
    r_da = np.linspace(lo_r, hi_r, n_rd)
    (vl, vh), (il, ih) = voltage_bounds(r_da, g), current_bounds(r_da, g)
    v_a = np.linspace(np.min(np.maximum(vl, il)), np.max(np.minimum(vh, ih)), n_va)
    rows = []
    for va in v_a:
        for rd in r_da:
            if rd <= 0:
                continue
            x = Symbol(float(va), float(rd))
            if in_space(x, g):
                rows.append((float(va), float(rd), power_deviation(x, spec, g)))
    return rows
