"""Quick self-checks of operator and flux properties (used by ``solver check``)."""

from __future__ import annotations

import math

import numpy as np

from .dgsem import Semidiscretization, volume_entropy_contraction_check
from .fluxes import verify_entropy_condition
from .mesh import build_structured_mesh, compute_metrics, metric_identity_residual
from .physics import PhysicsParams
from .sbp import operator_set

__all__ = ["random_states", "run_checks"]


def random_states(rng, n, hmin=0.1, hmax=5.0, vmax=2.0):
    h1 = rng.uniform(hmin, hmax, n)
    h2 = rng.uniform(hmin, hmax, n)
    vel = rng.uniform(-vmax, vmax, (4, n))
    return np.stack([h1, h1 * vel[0], h1 * vel[1], h2, h2 * vel[2], h2 * vel[3]])


def _sbp(max_degree=20):
    worst = 0.0
    for N in range(1, max_degree + 1):
        ops = operator_set(N)
        worst = max(worst, np.max(np.abs(ops.sbp_q + ops.sbp_q.T - ops.boundary)))
    return worst, 1e-13


def _quadrature(max_degree=20):
    worst = 0.0
    for N in range(1, max_degree + 1):
        ops = operator_set(N)
        for k in range(2 * N):
            exact = 0.0 if k % 2 else 2.0 / (k + 1)
            worst = max(worst, abs(np.sum(ops.weights * ops.nodes**k) - exact))
    return worst, 1e-12


def _ec_condition(seed=0, n=10_000):
    rng = np.random.default_rng(seed)
    p = PhysicsParams(g=9.81, rho1=0.9, rho2=1.0)
    uL, uR = random_states(rng, n), random_states(rng, n)
    bL, bR = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    res = max(verify_entropy_condition(uL, uR, bL, bR, p, d).max() for d in (0, 1))
    return res, 1e-12


def _warped_mesh():
    return build_structured_mesh("sine_warped", 4, 4, domain=(0, math.sqrt(2), 0, math.sqrt(2)),
                                 warp_amplitude=0.1, degree=6)


def _metric_identities():
    mesh = _warped_mesh()
    return max(metric_identity_residual(compute_metrics(mesh, operator_set(N)), operator_set(N))
               for N in (3, 6, 9)), 1e-12


def _free_stream():
    mesh = _warped_mesh()
    p = PhysicsParams()
    worst = 0.0
    for N in (3, 6, 9):
        ops = operator_set(N)
        semi = Semidiscretization(mesh, ops, p, 0.3, "es")
        U = np.empty(semi.shape)
        for v, c in enumerate((1.0, 0.3, -0.2, 2.0, 0.1, 0.5)):
            U[v] = c
        worst = max(worst, np.max(np.abs(semi.rhs(0.0, U))))
    return worst, 1e-12


def _lemma1(seed=1):
    rng = np.random.default_rng(seed)
    mesh = _warped_mesh()
    p = PhysicsParams()
    N = 6
    ops = operator_set(N)
    geo = compute_metrics(mesh, ops)
    worst = 0.0
    for k in range(len(geo)):
        x, y = geo.x[k], geo.y[k]
        a = rng.uniform(0.5, 1.5, 6)
        U = np.stack([1.5 + 0.3 * np.sin(a[0] * x + y), 0.4 * np.cos(a[1] * y), 0.2 * x,
                      2.0 + 0.3 * np.cos(x * a[2]), -0.3 * y * a[3], 0.1 + 0.2 * np.sin(a[4] * x)])
        b = 0.2 * np.sin(a[5] * x + y)
        worst = max(worst, volume_entropy_contraction_check(U, b, geo[k], ops, p))
    return worst, 1e-11


CHECKS = (
    ("SBP property Q + Q^T = B, N = 1..20", _sbp),
    ("LGL quadrature exact to degree 2N-1, N = 1..20", _quadrature),
    ("EC flux entropy condition, 10^4 random pairs", _ec_condition),
    ("metric identities on the warped mesh", _metric_identities),
    ("free-stream preservation on the warped mesh", _free_stream),
    ("volume entropy contraction equals boundary flux", _lemma1),
)


def run_checks(out=print):
    """Run all checks; returns True when every one passes."""
    ok = True
    for name, fn in CHECKS:
        value, tol = fn()
        passed = value <= tol
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}: {value:.2e} (tol {tol:.0e})")
    return ok
