import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twolayer_dg.fluxes import (
    InterfacePair,
    dissipation_term,
    ec_flux_normal,
    flux_ec,
    flux_es,
    noncons_diamond,
    verify_entropy_condition,
)
from twolayer_dg.physics import PhysicsParams, PositivityError, entropy_variables, physical_flux


def test_consistency(states, params):
    u = states(200)
    F1, F2 = flux_ec(u, u, params)
    f1, f2 = physical_flux(u, params)
    assert np.max(np.abs(F1 - f1)) <= 1e-14 * np.max(np.abs(f1))
    assert np.max(np.abs(F2 - f2)) <= 1e-14 * np.max(np.abs(f2))


def test_symmetry(states, params):
    uL, uR = states(100), states(100)
    for a, b in zip(flux_ec(uL, uR, params), flux_ec(uR, uL, params)):
        assert np.array_equal(a, b)


def test_entropy_condition_random_pairs(states, params, rng):
    uL, uR = states(10_000), states(10_000)
    bL, bR = rng.uniform(-1, 1, 10_000), rng.uniform(-1, 1, 10_000)
    for d in ("x", "y"):
        assert verify_entropy_condition(uL, uR, bL, bR, params, d).max() <= 1e-12


def test_jump_rule_identities(rng):
    a, a2 = rng.uniform(-3, 3, (2, 1000))
    b, b2 = rng.uniform(-3, 3, (2, 1000))
    avg = lambda l, r: 0.5 * (l + r)
    jump = lambda l, r: r - l
    assert np.max(np.abs(jump(a**2, a2**2) - 2 * avg(a, a2) * jump(a, a2))) <= 1e-13
    lhs = (jump(a, a2) * avg(a * b, a2 * b2) + jump(b, b2) * avg(a, a2) ** 2
           - 0.5 * jump(b, b2) * avg(a**2, a2**2))
    rhs = 0.5 * jump(a**2 * b, a2**2 * b2)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_es_flux_dissipates(states, params, rng):
    uM, uP = states(500), states(500)
    bM, bP = rng.uniform(-1, 1, (2, 500))
    ang = rng.uniform(0, 2 * np.pi, 500)
    nx, ny = np.cos(ang), np.sin(ang)
    dterm = dissipation_term(uM, uP, bM, bP, params, nx, ny, check=True)
    jw = entropy_variables(uP, bP, params) - entropy_variables(uM, bM, params)
    # [[w]] . (F_ES - F_EC) = -0.5 lam [[w]]^T H [[w]] <= 0
    assert np.all(np.sum(jw * dterm, axis=0) >= 0)


def test_es_flux_equals_ec_for_equal_traces(params):
    u = np.array([1.0, 0.2, -0.1, 2.0, 0.3, 0.1])
    pair = InterfacePair(u, u, 0.4, 0.4, (0.6, 0.8))
    assert np.allclose(flux_es(pair, params), ec_flux_normal(u, u, params.g, 0.6, 0.8), atol=1e-14)


def test_lake_at_rest_dissipation_vanishes(params):
    # traces with equal H1, H2 but different b: [[w]] = 0, so ES adds nothing
    bM, bP = 0.1, 0.35
    uM = np.array([0.1, 0, 0, 0.5 - bM, 0, 0])
    uP = np.array([0.1, 0, 0, 0.5 - bP, 0, 0])
    assert np.max(np.abs(dissipation_term(uM, uP, bM, bP, params, 1.0, 0.0))) <= 1e-14


def test_diamond_vanishes_for_identical_data(params):
    u = np.array([1.0, 0.2, -0.1, 2.0, 0.3, 0.1])
    assert np.all(noncons_diamond(InterfacePair(u, u, 0.3, 0.3, (1.0, 0.0)), params) == 0)


def test_interface_pair_validation():
    u = np.array([1.0, 0, 0, 1.0, 0, 0])
    with pytest.raises(ValueError):
        InterfacePair(u, u, 0.0, 0.0, (1.0, 1.0))
    bad = u.copy()
    bad[0] = -1
    with pytest.raises(PositivityError):
        InterfacePair(u, bad, 0.0, 0.0, (1.0, 0.0))


def test_single_layer_limit(params):
    # with a quiescent, uniform lower layer the upper-layer part is the one-layer
    # EC flux; its pressure term g{h}^2 - g{h^2}/2 simplifies to g hL hR / 2
    hL, hR, uL_, uR_ = 1.3, 0.7, 0.4, -0.2
    g = params.g
    uL = np.array([hL, hL * uL_, 0, 1.0, 0, 0])
    uR = np.array([hR, hR * uR_, 0, 1.0, 0, 0])
    F = flux_ec(uL, uR, params)[0]
    havg, uavg = 0.5 * (hL + hR), 0.5 * (uL_ + uR_)
    huavg = 0.5 * (hL * uL_ + hR * uR_)
    assert F[0] == pytest.approx(huavg)
    assert F[1] == pytest.approx(huavg * uavg + 0.5 * g * hL * hR)
    assert np.allclose(F[3:], [0, 0.5 * g, 0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.1, 5), min_size=4, max_size=4),
       st.lists(st.floats(-2, 2), min_size=8, max_size=8),
       st.floats(-1, 1), st.floats(-1, 1))
def test_entropy_condition_property(h, v, bL, bR):
    p = PhysicsParams()
    uL = np.array([h[0], h[0] * v[0], h[0] * v[1], h[1], h[1] * v[2], h[1] * v[3]])
    uR = np.array([h[2], h[2] * v[4], h[2] * v[5], h[3], h[3] * v[6], h[3] * v[7]])
    assert verify_entropy_condition(uL, uR, bL, bR, p, 0) <= 1e-12
    assert verify_entropy_condition(uL, uR, bL, bR, p, 1) <= 1e-12
