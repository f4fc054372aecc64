"""Low-storage RK5(4) time stepping, CFL step size and run diagnostics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .physics import PositivityError, wavespeed_bound

__all__ = [
    "LSRK54_A",
    "LSRK54_B",
    "LSRK54_C",
    "TimeIntegratorConfig",
    "DiagnosticsRecord",
    "lsrk54_step",
    "compute_dt_cfl",
    "run",
]

# Carpenter & Kennedy five-stage fourth-order 2N-storage coefficients
LSRK54_A = (
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
)
LSRK54_B = (
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
)
LSRK54_C = (
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
)


def lsrk54_step(rhs, U, t, dt, du0=None):
    """Advance ``U`` by one step; ``rhs(t, U)``.  ``du0`` may supply ``rhs(t, U)``."""
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    U = np.array(U, dtype=float, copy=True)
    k = np.zeros_like(U)
    for a, b, c, stage in zip(LSRK54_A, LSRK54_B, LSRK54_C, range(5)):
        du = du0 if (stage == 0 and du0 is not None) else rhs(t + c * dt, U)
        k = a * k + dt * du
        U += b * k
    return U


def compute_dt_cfl(U, geometry, ops, cfl, physics):
    """``cfl * min (2/(2N+1)) J / (lam1 |Ja1| + lam2 |Ja2|)`` over all nodes."""
    if not 0 < cfl <= 2:
        raise ValueError(f"CFL number must be in (0, 2], got {cfl}")
    N = ops.degree
    terms = []
    for Ja in (geometry.Ja1, geometry.Ja2):
        mag = np.hypot(Ja[0], Ja[1])
        terms.append(wavespeed_bound(U, physics, (Ja[0] / mag, Ja[1] / mag)) * mag)
    return float(cfl * np.min((2.0 / (2 * N + 1)) * geometry.J / (terms[0] + terms[1])))


@dataclass(frozen=True)
class TimeIntegratorConfig:
    """Either ``dt`` (fixed) or ``cfl`` must be given."""

    t_end: float
    dt: float = None
    cfl: float = None
    diagnostics_interval: int = 1

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if (self.dt is None) == (self.cfl is None):
            raise ValueError("give exactly one of dt and cfl")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.cfl is not None and not 0 < self.cfl <= 2:
            raise ValueError(f"CFL number must be in (0, 2], got {self.cfl}")
        if int(self.diagnostics_interval) < 1:
            raise ValueError("diagnostics_interval must be >= 1")


VAR_NAMES = ("h1", "hu1", "hv1", "h2", "hu2", "hv2")


@dataclass
class DiagnosticsRecord:
    """Sampled time series; ``l2`` rows are empty without an exact solution."""

    t: list = field(default_factory=list)
    S: list = field(default_factory=list)
    dSdt: list = field(default_factory=list)
    mass1: list = field(default_factory=list)
    mass2: list = field(default_factory=list)
    err_H1: list = field(default_factory=list)
    err_H2: list = field(default_factory=list)
    l2: list = field(default_factory=list)

    def columns(self):
        cols = ["t", "S", "dSdt", "mass1", "mass2", "err_H1", "err_H2"]
        if self.l2 and self.l2[0] is not None:
            cols += [f"l2_{v}" for v in VAR_NAMES]
        return cols

    def rows(self):
        has_l2 = "l2_h1" in self.columns()
        for k in range(len(self.t)):
            row = [self.t[k], self.S[k], self.dSdt[k], self.mass1[k], self.mass2[k],
                   self.err_H1[k], self.err_H2[k]]
            if has_l2:
                row += list(self.l2[k])
            yield row

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.columns())
            for row in self.rows():
                w.writerow([repr(float(v)) for v in row])


def _l2_errors(semi, U, exact, t):
    ue, _ = exact(semi.geometry.x, semi.geometry.y, t)
    return [math.sqrt(semi.integrate((U[v] - ue[v]) ** 2)) for v in range(6)]


def _check_finite(U, t):
    bad = ~np.all(np.isfinite(U), axis=0)
    if np.any(bad):
        k, i, j = np.argwhere(bad)[0]
        raise FloatingPointError(f"non-finite solution at element {k}, node ({i}, {j}), t={t:.6g}")


def run(semi, config, U0, exact=None, t0=0.0, on_sample=None):
    """Integrate from ``t0`` to ``config.t_end``; returns ``(U, DiagnosticsRecord)``.

    ``exact(x, y, t) -> (u, b)`` enables L2 errors.  ``on_sample(t, U)`` is
    called at every diagnostics sample (used for solution dumps).
    """
    U = np.array(U0, dtype=float, copy=True)
    b = semi.bottom
    H1_0 = U[0] + U[3] + b
    H2_0 = U[3] + b
    rec = DiagnosticsRecord()
    t, step = float(t0), 0
    t_end = float(config.t_end)
    interval = int(config.diagnostics_interval)

    def sample(t, U):
        du = semi.rhs(t, U)
        rec.t.append(t)
        rec.S.append(semi.total_entropy(U))
        rec.dSdt.append(semi.entropy_rate(U, du))
        m1, m2 = semi.layer_masses(U)
        rec.mass1.append(m1)
        rec.mass2.append(m2)
        rec.err_H1.append(float(np.max(np.abs(U[0] + U[3] + b - H1_0))))
        rec.err_H2.append(float(np.max(np.abs(U[3] + b - H2_0))))
        rec.l2.append(_l2_errors(semi, U, exact, t) if exact is not None else None)
        if on_sample is not None:
            on_sample(t, U)
        return du

    du0 = sample(t, U)
    eps = 1e-12 * max(1.0, abs(t_end))
    while t < t_end - eps:
        if config.dt is not None:
            dt = config.dt
        else:
            dt = compute_dt_cfl(U, semi.geometry, semi.ops, config.cfl, semi.physics)
        dt = min(dt, t_end - t)
        try:
            U = lsrk54_step(semi.rhs, U, t, dt, du0)
        except PositivityError as exc:
            raise PositivityError(f"{exc} (during step starting at t={t:.6g})") from exc
        step += 1
        t = t_end if t_end - (t + dt) <= eps else t + dt
        _check_finite(U, t)
        du0 = sample(t, U) if (step % interval == 0 or t >= t_end) else None
    return U, rec
