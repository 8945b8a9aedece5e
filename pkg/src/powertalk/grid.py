"""Steady-state model of a two-converter DC bus.

Unit A (the transmitter) and unit B (the receiver) both run droop control
and feed a single resistive load.  All voltages are in volts, resistances
in ohms and currents in amps.
"""

from dataclasses import dataclass, field

import numpy as np

# Stand-in for an open-circuit load.
R_OPEN = 1e12


def droop_slope(v_ref, v_min, i_max):
    """Virtual resistance giving proportional current sharing."""
    if i_max <= 0:
        raise ValueError(f"i_max must be positive, got {i_max}")
    if v_ref <= v_min:
        raise ValueError(f"v_ref ({v_ref}) must exceed v_min ({v_min})")
    return (v_ref - v_min) / i_max


@dataclass(frozen=True)
class UnitParams:
    v_ref: float
    r_d: float
    i_max: float

    def __post_init__(self):
        if not (self.v_ref > 0 and self.r_d > 0 and self.i_max > 0):
            raise ValueError(f"invalid unit parameters: {self}")


@dataclass(frozen=True)
class Symbol:
    """Channel input: droop reference voltage and virtual resistance of unit A."""

    v_a: float
    r_da: float

    def __post_init__(self):
        if not (self.v_a > 0 and self.r_da > 0):
            raise ValueError(f"invalid symbol: {self}")


def _default_unit_b():
    return UnitParams(v_ref=400.0, r_d=droop_slope(400.0, 390.0, 4.0), i_max=4.0)


@dataclass(frozen=True)
class GridConfig:
    unit_b: UnitParams = field(default_factory=_default_unit_b)
    v_min: float = 390.0
    v_max: float = 400.0
    i_a_max: float = 6.0
    r_min: float = 50.0
    r_max: float = 250.0
    sigma: float = 0.0

    def __post_init__(self):
        if not 0 < self.v_min < self.v_max:
            raise ValueError(f"need 0 < v_min < v_max, got {self.v_min}, {self.v_max}")
        if not 0 < self.r_min < self.r_max:
            raise ValueError(f"need 0 < r_min < r_max, got {self.r_min}, {self.r_max}")
        if self.i_a_max <= 0:
            raise ValueError(f"i_a_max must be positive, got {self.i_a_max}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")

    @property
    def v_b(self):
        return self.unit_b.v_ref

    @property
    def r_db(self):
        return self.unit_b.r_d

    def nominal_pilot(self, v_a0=400.0):
        """Pilot whose droop slope gives proportional sharing at ``v_a0``."""
        return Symbol(v_a0, droop_slope(v_a0, self.v_min, self.i_a_max))


@dataclass(frozen=True)
class BusState:
    v_star: float
    i_a: float
    i_b: float
    r: float


def alpha_beta(x, g):
    """Norton-equivalent source terms: ``v* = alpha / (beta + 1/r)``."""
    alpha = x.v_a / x.r_da + g.v_b / g.r_db
    beta = 1.0 / x.r_da + 1.0 / g.r_db
    return alpha, beta


def _check_load(r):
    if np.any(np.asarray(r) <= 0):
        raise ValueError("load resistance must be positive")


def bus_voltage(x, g, r):
    """Bus voltage for symbol ``x`` and load ``r`` (scalar or array)."""
    _check_load(r)
    alpha, beta = alpha_beta(x, g)
    return alpha / (beta + 1.0 / np.asarray(r, dtype=float))


def output_current_a(x, g, r):
    # negative values mean unit A sinks current; flagged by the region checks
    return (x.v_a - bus_voltage(x, g, r)) / x.r_da


def bus_state(x, g, r):
    v = float(bus_voltage(x, g, r))
    return BusState(
        v_star=v,
        i_a=(x.v_a - v) / x.r_da,
        i_b=(g.v_b - v) / g.r_db,
        r=float(r),
    )


def observe(v_star, sigma, rng):
    """Noisy measurement of the bus voltage."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    v_star = np.asarray(v_star, dtype=float)
    if sigma == 0:
        return v_star.copy() if v_star.ndim else float(v_star)
    return v_star + rng.normal(0.0, sigma, size=v_star.shape)
