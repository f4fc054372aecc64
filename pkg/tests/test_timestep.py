import math

import numpy as np
import pytest

from twolayer_dg.mesh import build_structured_mesh, compute_metrics
from twolayer_dg.physics import PositivityError, wavespeed_bound
from twolayer_dg.sbp import operator_set
from twolayer_dg.scenarios import build_perturbation, build_well_balanced
from twolayer_dg.timestep import (
    LSRK54_A, LSRK54_B, LSRK54_C, TimeIntegratorConfig, compute_dt_cfl, lsrk54_step, run,
)


def decay(dt, T=1.0):
    y = np.array([1.0])
    for k in range(round(T / dt)):
        y = lsrk54_step(lambda t, u: -u, y, k * dt, dt)
    return y[0]


def test_coefficient_set():
    assert len(LSRK54_A) == len(LSRK54_B) == len(LSRK54_C) == 5
    assert LSRK54_A[0] == 0.0 and LSRK54_C[0] == 0.0
    # the stage times follow from the 2N-storage recursion
    c, k = [0.0], 1.0
    acc = LSRK54_B[0]
    for a, b in zip(LSRK54_A[1:], LSRK54_B[1:]):
        c.append(acc)
        k = a * k + 1.0
        acc += b * k
    assert np.allclose(c, LSRK54_C, rtol=1e-10, atol=1e-12)
    assert acc == pytest.approx(1.0, abs=1e-12)


def amplification_polynomial():
    """Coefficients of R(z) for u' = z u, built by running the 2N-storage recursion on polynomials."""
    U, k = np.array([1.0]), np.array([0.0])
    for a, b in zip(LSRK54_A, LSRK54_B):
        k = np.polynomial.polynomial.polyadd(a * k, np.polynomial.polynomial.polymulx(U))
        U = np.polynomial.polynomial.polyadd(U, b * k)
    return U


def test_amplification_polynomial_is_fourth_order():
    R = amplification_polynomial()
    assert np.allclose(R[:5], [1 / math.factorial(i) for i in range(5)], rtol=1e-12)
    assert R[5] == pytest.approx(0.005, rel=1e-9)  # not 1/120: fourth order only


def test_scalar_decay_accuracy():
    R = np.polynomial.polynomial.polyval(-0.1, amplification_polynomial())
    y = decay(0.1)
    assert y == pytest.approx(R**10, rel=1e-14)
    # the error is that of a fourth-order scheme at dt = 0.1
    assert abs(y - math.exp(-1)) <= 2e-7
    assert abs(decay(0.025) - math.exp(-1)) <= 1e-9


def test_measured_order():
    e = [abs(decay(dt) - math.exp(-1)) for dt in (0.1, 0.05, 0.025)]
    assert math.log2(e[0] / e[1]) >= 3.9 and math.log2(e[1] / e[2]) >= 3.9
    y = [decay(dt) for dt in (0.1, 0.05, 0.025)]
    assert math.log2((y[0] - y[1]) / (y[1] - y[2])) >= 3.9


def test_zero_rhs_leaves_state_bitwise(rng):
    U = rng.standard_normal((6, 3, 4, 4))
    assert np.array_equal(lsrk54_step(lambda t, u: np.zeros_like(u), U, 0.0, 0.3), U)


def test_supplied_first_stage_matches():
    f = lambda t, u: -u * (1 + t)
    U = np.array([1.0, 2.0])
    assert np.array_equal(lsrk54_step(f, U, 0.2, 0.1), lsrk54_step(f, U, 0.2, 0.1, du0=f(0.2, U)))


def test_step_rejects_nonpositive_dt():
    with pytest.raises(ValueError):
        lsrk54_step(lambda t, u: u, np.ones(2), 0.0, 0.0)


def rest_state(geo, h1=0.4, h2=0.6):
    U = np.zeros((6,) + geo.J.shape)
    U[0], U[3] = h1, h2
    return U


def test_cfl_formula_on_cartesian_mesh(params):
    N, cfl = 4, 0.7
    ops = operator_set(N)
    geo = compute_metrics(build_structured_mesh("cartesian", 5, 5, domain=(0, 1, 0, 1)), ops)
    U = rest_state(geo)
    lam = float(wavespeed_bound(U[:, 0, 0, 0], params, (1.0, 0.0)))
    dx = 0.2
    expected = cfl * (2 / (2 * N + 1)) * (dx / 2) / (2 * lam)
    assert compute_dt_cfl(U, geo, ops, cfl, params) == pytest.approx(expected, rel=1e-12)
    fine = compute_metrics(build_structured_mesh("cartesian", 10, 10, domain=(0, 1, 0, 1)), ops)
    assert compute_dt_cfl(rest_state(fine), fine, ops, cfl, params) == pytest.approx(expected / 2, rel=1e-12)
    with pytest.raises(ValueError):
        compute_dt_cfl(U, geo, ops, 2.5, params)


@pytest.mark.parametrize("kw", [
    dict(t_end=0.0, dt=0.1),
    dict(t_end=1.0),
    dict(t_end=1.0, dt=0.1, cfl=0.5),
    dict(t_end=1.0, dt=-0.1),
    dict(t_end=1.0, cfl=0.0),
    dict(t_end=1.0, cfl=2.1),
    dict(t_end=1.0, dt=0.1, diagnostics_interval=0),
])
def test_integrator_config_validation(kw):
    with pytest.raises(ValueError):
        TimeIntegratorConfig(**kw)


def test_run_clips_final_step_and_samples():
    sc = build_perturbation(N=3)
    cfg = TimeIntegratorConfig(t_end=0.0105, dt=0.001, diagnostics_interval=4)
    _, rec = run(sc.semi, cfg, sc.U0)
    assert rec.t[-1] == 0.0105
    assert np.all(np.diff(rec.t) > 0)
    assert len(rec.t) == 4  # steps 0, 4, 8 and the clipped final one
    assert rec.columns() == ["t", "S", "dSdt", "mass1", "mass2", "err_H1", "err_H2"]


def test_run_entropy_and_mass_diagnostics():
    for flux in ("ec", "es"):
        sc = build_perturbation(N=4, flux=flux)
        cfg = TimeIntegratorConfig(t_end=0.02, cfl=0.7, diagnostics_interval=1)
        _, rec = run(sc.semi, cfg, sc.U0)
        d = np.array(rec.dSdt)
        if flux == "ec":
            assert np.max(np.abs(d)) <= 1e-13
        else:
            assert np.all(d <= 1e-14)
        for m in (rec.mass1, rec.mass2):
            assert np.max(np.abs(np.array(m) - m[0])) <= 1e-12 * abs(m[0])


def test_well_balanced_short_run_is_steady():
    sc = build_well_balanced(N=5, flux="es")
    U, rec = run(sc.semi, TimeIntegratorConfig(t_end=0.05, cfl=0.7, diagnostics_interval=5), sc.U0)
    assert np.max(np.abs(U - sc.U0)) <= 5e-12
    assert max(rec.err_H1) <= 5e-12 and max(rec.err_H2) <= 5e-12


def test_run_reports_blowup_location():
    sc = build_perturbation(N=3)
    with pytest.raises((PositivityError, FloatingPointError), match="element"):
        with np.errstate(all="ignore"):
            run(sc.semi, TimeIntegratorConfig(t_end=5.0, dt=0.5), sc.U0)


def test_run_l2_against_exact():
    from twolayer_dg.scenarios import build_convergence
    sc = build_convergence(N=4, t_end=0.001, dt=0.0005)
    _, rec = run(sc.semi, sc.integrator, sc.U0, exact=sc.exact)
    assert rec.l2[0] == pytest.approx([0.0] * 6, abs=1e-15)
    assert 0 < rec.l2[-1][1] < 1e-2
    assert "l2_hu1" in rec.columns()
