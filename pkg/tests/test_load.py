import numpy as np
import pytest

from powertalk.load import (
    ChangeProcess,
    LoadDistribution,
    LoadTrajectory,
    TruncatedExponential,
    UniformInstant,
    sample_theta,
    sample_trajectory,
)

from oracles import ks_two_sample, ks_uniform, rejection_theta

DIST = LoadDistribution()


@pytest.mark.parametrize("r, p", [(50.0, 0.0), (150.0, 0.5), (250.0, 1.0), (300.0, 1.0), (10.0, 0.0)])
def test_cdf(r, p):
    assert DIST.cdf(r) == p


def test_cdf_nondecreasing():
    r = np.linspace(0, 400, 2001)
    assert np.all(np.diff(DIST.cdf(r)) >= 0)


def test_distribution_rejects_bad_range():
    with pytest.raises(ValueError):
        LoadDistribution(250.0, 50.0)


def test_theta_samples_within_interval():
    th = sample_theta(ChangeProcess(), 0.02, np.random.default_rng(0), 10**5)
    assert th.min() >= 0 and th.max() < 0.02


def test_theta_matches_rejection_oracle():
    T = 0.02
    th = sample_theta(ChangeProcess(), T, np.random.default_rng(1), 10**6)
    ref = rejection_theta(T, 10**6, np.random.default_rng(2))
    assert ks_two_sample(th, ref) < 0.002


def test_theta_pdf_normalized():
    T = 0.02
    t, w = np.polynomial.legendre.leggauss(64)
    th = 0.5 * T * (t + 1)
    assert np.sum(0.5 * T * w * TruncatedExponential().pdf(th, T)) == pytest.approx(1.0, abs=1e-10)


def test_theta_cdf_matches_pdf():
    T = 1.0
    d = TruncatedExponential()
    assert d.cdf(0.0, T) == 0.0
    assert d.cdf(T, T) == pytest.approx(1.0, abs=1e-15)
    x = np.linspace(0.01, 0.99, 50)
    h = 1e-6
    fd = (d.cdf(x + h, T) - d.cdf(x - h, T)) / (2 * h)
    assert fd == pytest.approx(d.pdf(x, T), rel=1e-6)


def test_uniform_instant_window():
    d = UniformInstant(0.4, 0.6)
    th = d.sample(2.0, np.random.default_rng(0), 10**5)
    assert th.min() >= 0.8 and th.max() < 1.2
    assert d.cdf(1.0, 2.0) == pytest.approx(0.5)


def test_sample_theta_rejects_bad_interval():
    with pytest.raises(ValueError):
        sample_theta(ChangeProcess(), 0.0, np.random.default_rng(0))


def test_change_process_rejects_bad_probability():
    with pytest.raises(ValueError):
        ChangeProcess(1.5)


def test_no_change_when_probability_zero():
    rng = np.random.default_rng(0)
    assert not any(sample_trajectory(ChangeProcess(0.0), DIST, 0.01, rng).changed for _ in range(10_000))


def test_always_change_when_probability_one():
    rng = np.random.default_rng(0)
    trajs = [sample_trajectory(ChangeProcess(1.0), DIST, 0.01, rng) for _ in range(10**5)]
    assert all(t.changed for t in trajs)
    assert all(0 <= t.theta < 0.01 for t in trajs)
    assert all(50 <= t.r0 <= 250 and 50 <= t.r1 <= 250 for t in trajs)


def test_trajectory_marginals_uniform():
    rng = np.random.default_rng(8)
    n = 10**6
    r0 = DIST.sample(rng, n)
    r1 = DIST.sample(rng, n)
    assert ks_uniform(r0, 50, 250) < 0.002
    assert ks_uniform(r1, 50, 250) < 0.002


def test_trajectory_carries_given_initial_load():
    t = sample_trajectory(ChangeProcess(1.0), DIST, 1.0, np.random.default_rng(0), r0=123.0)
    assert t.r0 == 123.0


def test_trajectory_load_at():
    t = LoadTrajectory(200.0, 0.3, 60.0)
    assert t.load_at(0.1) == 200.0
    assert t.load_at(0.3) == 60.0
    assert t.r_end == 60.0
    static = LoadTrajectory(100.0)
    assert not static.changed
    assert static.r_end == 100.0
