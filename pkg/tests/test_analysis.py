import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powertalk.analysis import (
    ChannelParams,
    QuadratureSpec,
    TransitionMatrix,
    cond_erasure_0,
    cond_erasure_1,
    cond_flip_0to1,
    cond_flip_1to0,
    erasure_probs,
    flip_probs,
    prob_avg_below,
    to_matrix,
)
from powertalk.constellation import fixed_rd, fixed_va
from powertalk.grid import GridConfig, Symbol, alpha_beta, bus_voltage
from powertalk.load import LoadDistribution, UniformInstant

from oracles import literal_flip_threshold, mc_avg_below

G = GridConfig()
PILOT = G.nominal_pilot()
DIST = LoadDistribution()
CONST = fixed_rd(PILOT, 400.5, 399.5, G)
T = 1.0


def f(x):
    return lambda r: bus_voltage(x, G, r)


def test_threshold_inversion_matches_literal_form():
    alpha, beta = alpha_beta(CONST.x_h, G)
    rng = np.random.default_rng(0)
    checked = 0
    for _ in range(5000):
        r0 = rng.uniform(50, 250)
        theta = rng.uniform(0, T)
        v0 = bus_voltage(PILOT, G, r0)
        vh = bus_voltage(CONST.x_h, G, r0)
        w = theta / T
        c = (v0 - w * vh) / (1 - w)
        if not (0 < c < alpha / beta):
            continue
        ours = 1.0 / (alpha / c - beta)
        lit = literal_flip_threshold(T, v0, alpha, beta, r0, theta)
        if lit <= 0:
            continue
        assert ours == pytest.approx(lit, rel=1e-12, abs=1e-12 * 250)
        checked += 1
    assert checked > 100


def test_flip_vanishes_as_change_reaches_end():
    th = T - 1e-12 * T
    for r0 in (50.0, 150.0, 250.0):
        assert cond_flip_1to0(CONST, G, r0, th, T) == 0.0
        assert cond_flip_0to1(CONST, G, r0, th, T) == 0.0


def test_deep_symbols_never_flip():
    # with a narrow load range both symbols can sit clear of every pilot level
    g = GridConfig(r_min=200.0, r_max=250.0)
    c = fixed_rd(PILOT, 402.6, 396.1, g)
    assert bus_voltage(c.x_h, g, 200.0) > bus_voltage(PILOT, g, 250.0)
    assert bus_voltage(c.x_l, g, 250.0) < bus_voltage(PILOT, g, 200.0)
    for r0 in (200.0, 225.0, 250.0):
        assert cond_flip_1to0(c, g, r0, 0.0, T) == 0.0
        assert cond_flip_0to1(c, g, r0, 0.0, T) == 0.0
    assert flip_probs(c, g) == (0.0, 0.0)


@pytest.mark.parametrize("which", ["1to0", "0to1"])
def test_conditional_flip_vs_monte_carlo(which):
    r0, theta = 150.0, T / 2
    v0 = bus_voltage(PILOT, G, r0)
    rng = np.random.default_rng(42)
    if which == "1to0":
        x = CONST.x_h
        ours = cond_flip_1to0(CONST, G, r0, theta, T)
        p, se = mc_avg_below(bus_voltage(x, G, r0), 0.5, f(x), v0, 50, 250, 10**7, rng)
    else:
        x = CONST.x_l
        ours = cond_flip_0to1(CONST, G, r0, theta, T)
        p, se = mc_avg_below(bus_voltage(x, G, r0), 0.5, f(x), v0, 50, 250, 10**7, rng)
        p = 1 - p
    assert 0 < ours < 1
    assert abs(ours - p) <= 3 * se


def test_conditional_erasure_vs_monte_carlo():
    rng = np.random.default_rng(9)
    n = 2 * 10**6
    for theta in (0.2, 0.7):
        for r0 in (80.0, 210.0):
            v0 = bus_voltage(PILOT, G, r0)
            r1 = rng.uniform(50, 250, n)
            half = T / 2
            for bit, first, second in ((1, CONST.x_h, CONST.x_l), (0, CONST.x_l, CONST.x_h)):
                if theta < half:
                    w = theta / half
                    a1 = w * bus_voltage(first, G, r0) + (1 - w) * bus_voltage(first, G, r1)
                    a2 = bus_voltage(second, G, r1)
                else:
                    w = (theta - half) / half
                    a1 = np.full(n, bus_voltage(first, G, r0))
                    a2 = w * bus_voltage(second, G, r0) + (1 - w) * bus_voltage(second, G, r1)
                mc = np.mean((a1 > v0) == (a2 > v0))
                se = np.sqrt(mc * (1 - mc) / n) + 1e-12
                cond = cond_erasure_1 if bit else cond_erasure_0
                assert abs(cond(CONST, G, r0, theta, T) - mc) <= 3 * se + 1e-9


def test_conditional_rejects_theta_outside_interval():
    with pytest.raises(ValueError):
        cond_flip_1to0(CONST, G, 100.0, T, T)
    with pytest.raises(ValueError):
        cond_erasure_0(CONST, G, 100.0, -0.1, T)


def test_prob_avg_below_edges():
    x = CONST.x_h
    alpha, beta = alpha_beta(x, G)
    assert prob_avg_below(x, G, DIST, -1.0, 0.0, 0.0) == 0.0
    assert prob_avg_below(x, G, DIST, alpha / beta + 1, 0.0, 0.0) == 1.0
    # level below the threshold pulls the probability up
    v0 = 396.0
    assert prob_avg_below(x, G, DIST, v0, 390.0, 0.5) >= prob_avg_below(x, G, DIST, v0, 400.0, 0.5)


def test_degenerate_load_distribution():
    d = LoadDistribution(120.0, 120.0)
    assert flip_probs(CONST, G, d) == (0.0, 0.0)
    assert erasure_probs(CONST, G, d) == (0.0, 0.0)


def test_reference_values():
    p10, p01 = flip_probs(CONST, G)
    q1e, q0e = erasure_probs(CONST, G)
    # frozen from quadrature; cross-checked against conditioned link simulation
    assert p10 == pytest.approx(0.32923, abs=5e-5)
    assert p01 == pytest.approx(0.32931, abs=5e-5)
    assert q1e == pytest.approx(0.57349, abs=5e-5)
    assert q0e == pytest.approx(0.57355, abs=5e-5)


def test_flip_probabilities_asymmetric():
    c = fixed_va(PILOT, 1.2, 2.2, G)
    p10, p01 = flip_probs(c, G)
    assert abs(p10 - p01) > 1e-3


@pytest.mark.parametrize("const", [CONST, fixed_va(PILOT, 1.0, 2.3, G), fixed_rd(PILOT, 401.7, 397.0, G)])
def test_node_doubling_converged(const):
    q = QuadratureSpec()
    a = flip_probs(const, G, quad=q) + erasure_probs(const, G, quad=q)
    b = flip_probs(const, G, quad=q.doubled()) + erasure_probs(const, G, quad=q.doubled())
    assert np.max(np.abs(np.subtract(a, b))) < 1e-8


def test_symmetric_change_window():
    # changes confined to a window centred on the half-bit boundary
    win = UniformInstant(0.4, 0.6)
    q1e, q0e = erasure_probs(CONST, G, theta_dist=win)
    rng = np.random.default_rng(5)
    n = 10**6
    r0 = rng.uniform(50, 250, n)
    r1 = rng.uniform(50, 250, n)
    th = rng.uniform(0.4, 0.6, n)
    ours = cond_erasure_1(CONST, G, r0, th, T)
    # averaging the conditional over MC draws: an independent check of the nested quadrature
    mc = np.mean(ours)
    assert abs(q1e - mc) < 4 * np.std(ours) / np.sqrt(n)
    assert 0 <= q0e <= 1


def test_quadrature_spec_minimum():
    with pytest.raises(ValueError):
        QuadratureSpec(8, 48)


def test_bac_matrix():
    m = to_matrix(ChannelParams.bac(0.2, 0.1))
    assert np.allclose(m.probs, [[0.9, 0.1], [0.2, 0.8]])
    assert np.allclose(m.probs.sum(axis=1), 1.0)
    assert np.allclose(to_matrix(ChannelParams.bac(0.0, 0.0)).probs, np.eye(2))


def test_bac_reduces_to_bsc():
    m = to_matrix(ChannelParams.bac(0.11, 0.11)).probs
    assert np.allclose(m, [[0.89, 0.11], [0.11, 0.89]])


def test_baec_matrix():
    m = to_matrix(ChannelParams.baec(0.3, 0.2)).probs
    assert m.shape == (2, 3)
    assert np.allclose(m.sum(axis=1), 1.0)
    assert m[0, 1] == 0.0 and m[1, 0] == 0.0
    assert np.allclose(to_matrix(ChannelParams.baec(0.0, 0.0)).probs[:, :2], np.eye(2))


def test_channel_params_validated():
    with pytest.raises(ValueError):
        ChannelParams.bac(1.2, 0.0)
    with pytest.raises(ValueError):
        TransitionMatrix(np.array([[0.5, 0.4], [0.0, 1.0]]), ("0", "1"))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_matrices_row_stochastic(a, b):
    for p in (ChannelParams.bac(a, b), ChannelParams.baec(a, b)):
        m = to_matrix(p).probs
        assert np.all(m >= 0)
        assert np.allclose(m.sum(axis=1), 1.0, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(50.0, 250.0), st.floats(0.0, 0.999), st.floats(400.05, 402.5), st.floats(396.4, 399.95))
def test_conditionals_are_probabilities(r0, theta, v_h, v_l):
    c = fixed_rd(PILOT, v_h, v_l, G)
    for fn in (cond_flip_1to0, cond_flip_0to1, cond_erasure_1, cond_erasure_0):
        p = fn(c, G, r0, theta, T)
        assert 0.0 <= p <= 1.0
