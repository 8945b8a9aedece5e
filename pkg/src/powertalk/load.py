"""Random load model: value distribution, change occurrence and change instant."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

_E1 = 1.0 - np.exp(-1.0)


@dataclass(frozen=True)
class LoadDistribution:
    """Uniform load distribution on ``[r_min, r_max]``.

    ``r_min == r_max`` is allowed and gives a point mass.
    """

    r_min: float = 50.0
    r_max: float = 250.0
    kind: str = "uniform"

    def __post_init__(self):
        if self.kind != "uniform":
            raise ValueError(f"unsupported load distribution {self.kind!r}")
        if not 0 < self.r_min <= self.r_max:
            raise ValueError(f"need 0 < r_min <= r_max, got {self.r_min}, {self.r_max}")

    @property
    def degenerate(self):
        return self.r_min == self.r_max

    def cdf(self, r):
        r = np.asarray(r, dtype=float)
        if self.degenerate:
            out = (r >= self.r_min).astype(float)
        else:
            out = np.clip((r - self.r_min) / (self.r_max - self.r_min), 0.0, 1.0)
        return out if out.ndim else float(out)

    def sample(self, rng, size=None):
        return rng.uniform(self.r_min, self.r_max, size=size)


@dataclass(frozen=True)
class TruncatedExponential:
    """Exponential change instant with mean ``T``, conditioned on ``theta < T``."""

    def support(self, T):
        return 0.0, T

    def pdf(self, theta, T):
        theta = np.asarray(theta, dtype=float)
        inside = (theta >= 0) & (theta < T)
        return np.where(inside, np.exp(-theta / T) / (T * _E1), 0.0)

    def cdf(self, theta, T):
        theta = np.clip(np.asarray(theta, dtype=float), 0.0, T)
        return (1.0 - np.exp(-theta / T)) / _E1

    def sample(self, T, rng, size=None):
        u = rng.uniform(size=size)
        theta = -T * np.log1p(-u * _E1)
        # rounding must not land on the open end
        return np.minimum(theta, np.nextafter(T, 0.0))


@dataclass(frozen=True)
class UniformInstant:
    """Change instant uniform on ``[lo*T, hi*T)``; used to pin the change to a window."""

    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise ValueError(f"need 0 <= lo < hi <= 1, got {self.lo}, {self.hi}")

    def support(self, T):
        return self.lo * T, self.hi * T

    def pdf(self, theta, T):
        theta = np.asarray(theta, dtype=float)
        a, b = self.support(T)
        return np.where((theta >= a) & (theta < b), 1.0 / (b - a), 0.0)

    def cdf(self, theta, T):
        a, b = self.support(T)
        return np.clip((np.asarray(theta, dtype=float) - a) / (b - a), 0.0, 1.0)

    def sample(self, T, rng, size=None):
        a, b = self.support(T)
        return np.minimum(rng.uniform(a, b, size=size), np.nextafter(b, a))


@dataclass(frozen=True)
class ChangeProcess:
    """At most one load change per bit interval.

    A change happens with probability ``p_change``; its instant is measured
    from the start of the interval.
    """

    p_change: float = 1.0
    theta_dist: object = field(default_factory=TruncatedExponential)

    def __post_init__(self):
        if not 0.0 <= self.p_change <= 1.0:
            raise ValueError(f"p_change must be in [0, 1], got {self.p_change}")


def sample_theta(proc, T, rng, size=None):
    if T <= 0:
        raise ValueError(f"bit interval must be positive, got {T}")
    return proc.theta_dist.sample(T, rng, size)


@dataclass(frozen=True)
class LoadTrajectory:
    r0: float
    theta: Optional[float] = None
    r1: Optional[float] = None

    @property
    def changed(self):
        return self.theta is not None

    @property
    def r_end(self):
        return self.r1 if self.changed else self.r0

    def load_at(self, t):
        """Load seen at time(s) ``t`` measured from the start of the bit interval."""
        t = np.asarray(t, dtype=float)
        if not self.changed:
            return np.full(t.shape, self.r0)
        return np.where(t < self.theta, self.r0, self.r1)


def sample_trajectory(proc, dist, T, rng, r0=None):
    """Draw the load over one bit interval.

    ``r0`` continues the load from the previous interval; when omitted it is
    drawn from ``dist``.
    """
    if r0 is None:
        r0 = float(dist.sample(rng))
    if rng.uniform() < proc.p_change:
        theta = float(sample_theta(proc, T, rng))
        return LoadTrajectory(r0, theta, float(dist.sample(rng)))
    return LoadTrajectory(r0)
