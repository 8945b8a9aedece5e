"""Sampled bus waveform, window averaging and threshold detection."""

from dataclasses import dataclass

import numpy as np

from .grid import bus_voltage, observe

H, L = "H", "L"


@dataclass(frozen=True)
class SlotConfig:
    """Slot timing; ``T`` is the bit interval and ``Ts`` the symbol interval."""

    Ts: float = 0.01
    fs: float = 10_000.0
    symbols_per_bit: int = 1

    def __post_init__(self):
        if self.Ts <= 0 or self.fs <= 0:
            raise ValueError("Ts and fs must be positive")
        if self.symbols_per_bit not in (1, 2):
            raise ValueError("a bit spans one (simple) or two (Manchester) symbols")
        if self.N < 1:
            raise ValueError("fewer than one sample per symbol")

    @property
    def T(self):
        return self.symbols_per_bit * self.Ts

    @property
    def N(self):
        return int(round(self.Ts * self.fs))

    def sample_times(self):
        """Sample instants within a symbol interval, at the centre of each sample period."""
        return (np.arange(self.N) + 0.5) * (self.Ts / self.N)

    @classmethod
    def for_scheme(cls, scheme, Ts=0.01, fs=10_000.0):
        return cls(Ts, fs, 2 if scheme == "manchester" else 1)


@dataclass(frozen=True)
class ThresholdState:
    v0: float = float("nan")
    valid: bool = False


def synthesize_symbol_samples(x, r0, theta, r1, g, slot, rng=None, sigma=None):
    """Bus samples over one symbol interval under a step load change.

    ``theta`` is measured from the start of the symbol; use ``theta >= Ts``
    (or ``inf``) for no change.  ``r0``, ``theta`` and ``r1`` broadcast, and
    the samples run along the last axis.
    """
    sigma = g.sigma if sigma is None else sigma
    r0, theta, r1 = np.broadcast_arrays(
        np.asarray(r0, float), np.asarray(theta, float), np.asarray(r1, float)
    )
    t = slot.sample_times()
    before = t < theta[..., None]
    v = np.where(before, bus_voltage(x, g, r0)[..., None], bus_voltage(x, g, r1)[..., None])
    if sigma == 0:
        return v
    return observe(v, sigma, rng)


def average_window(samples):
    return np.mean(samples, axis=-1)[()]


def acquire_threshold(pilot, g, slot, r, rng=None, sigma=None):
    """Threshold from one pilot symbol interval at constant load ``r``."""
    samples = synthesize_symbol_samples(pilot, r, np.inf, r, g, slot, rng, sigma)
    return ThresholdState(float(average_window(samples)), True)


def detect(avg, th):
    """Hard decision against the pilot threshold; a tie reads as L."""
    if not th.valid:
        raise ValueError("no valid threshold")
    return H if avg > th.v0 else L


def detect_array(avg, v0):
    """Vectorised :func:`detect`: True where H."""
    return np.asarray(avg) > np.asarray(v0)
