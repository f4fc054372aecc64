"""Builtin experiments: manufactured convergence, lake at rest, perturbed lake, dam break.

Each builder returns a :class:`Scenario` holding a ready semidiscretization,
initial field and integrator settings.  Keyword arguments override defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dgsem import BoundaryCondition, Semidiscretization
from .manufactured import manufactured_solution, manufactured_source
from .mesh import build_structured_mesh, build_tensor_mesh, compute_metrics, load_mesh_file, locate_points
from .physics import PhysicsParams
from .sbp import interpolation_matrix, operator_set
from .timestep import TimeIntegratorConfig

__all__ = ["Scenario", "SCENARIOS", "build_scenario", "sample_line", "total_variation",
           "element_index"]

ROOT2 = math.sqrt(2.0)


@dataclass
class Scenario:
    name: str
    semi: Semidiscretization
    U0: np.ndarray
    integrator: TimeIntegratorConfig
    exact: object = None
    notes: str = ""


def element_index(ix, iy, nx):
    """Index of structured element ``(ix, iy)`` (zero based) in a full tensor mesh."""
    return iy * nx + ix


def _sine_mesh(opts, periodic):
    return build_structured_mesh(opts.get("generator", "sine_warped"), opts.get("nx", 4), opts.get("ny", 4),
                                 domain=opts.get("domain", (0.0, ROOT2, 0.0, ROOT2)),
                                 warp_amplitude=opts.get("warp_amplitude", 0.1),
                                 degree=opts.get("curve_degree", 6), periodic=periodic)


def _mesh_and_ops(opts, N, periodic):
    if opts.get("file"):
        mesh = load_mesh_file(opts["file"])
    else:
        mesh = _sine_mesh(opts, periodic)
    ops = operator_set(N)
    return mesh, ops, compute_metrics(mesh, ops)


def build_convergence(N=6, flux="es", g=10.0, ratio=0.9, t_end=0.1, dt=1.0 / 12000, mesh=None,
                      diagnostics_interval=None, rho2=1.0):
    """Manufactured solution on the warped square with exact Dirichlet data."""
    p = PhysicsParams.from_ratio(g, ratio, rho2)
    m, ops, geo = _mesh_and_ops(mesh or {}, N, periodic=(False, False))
    _, b = manufactured_solution(geo.x, geo.y, 0.0)
    bc = BoundaryCondition("dirichlet", manufactured_solution)
    bcs = {bf.tag: bc for bf in m.boundary_faces}
    semi = Semidiscretization(m, ops, p, b, flux, bcs,
                              source=lambda x, y, t: manufactured_source(x, y, t, p), geometry=geo)
    U0, _ = manufactured_solution(geo.x, geo.y, 0.0)
    steps = max(1, round(t_end / dt))
    cfg = TimeIntegratorConfig(t_end=t_end, dt=dt, diagnostics_interval=diagnostics_interval or steps)
    return Scenario("convergence", semi, U0, cfg, exact=manufactured_solution)


def _lake_fields(geo, nx, bump_element, H1, H2, H1_element=None, H1_pert=None):
    x, y = geo.x, geo.y
    b = np.zeros_like(x)
    k = element_index(*bump_element, nx)
    b[k] = 0.25 + 0.1 * np.sin(2 * np.pi * x[k]) + 0.1 * np.cos(2 * np.pi * y[k])
    H1f = np.full_like(x, H1)
    if H1_element is not None:
        H1f[element_index(*H1_element, nx)] = H1_pert
    U = np.zeros((6,) + x.shape)
    U[0] = H1f - H2
    U[3] = H2 - b
    return U, b


def build_well_balanced(N=8, flux="ec", g=9.81, ratio=0.9, t_end=10.0, cfl=0.7, mesh=None,
                        H1=0.6, H2=0.5, bump_element=(2, 1), diagnostics_interval=100, rho2=1.0,
                        perturb_element=None, H1_perturbed=0.65):
    """Lake at rest with a trigonometric bottom confined to one element (periodic)."""
    opts = dict(mesh or {})
    if opts.get("file"):
        raise ValueError("the lake-at-rest scenarios use the builtin structured mesh")
    p = PhysicsParams.from_ratio(g, ratio, rho2)
    m, ops, geo = _mesh_and_ops(opts, N, periodic=(True, True))
    U0, b = _lake_fields(geo, opts.get("nx", 4), bump_element, H1, H2, perturb_element, H1_perturbed)
    semi = Semidiscretization(m, ops, p, b, flux, {}, geometry=geo)
    cfg = TimeIntegratorConfig(t_end=t_end, cfl=cfl, diagnostics_interval=diagnostics_interval)
    name = "well_balanced" if perturb_element is None else "perturbation"
    return Scenario(name, semi, U0, cfg)


def build_perturbation(N=8, flux="ec", t_end=0.1, diagnostics_interval=1, perturb_element=(1, 2),
                       **kw):
    """Lake at rest with the upper surface raised to 0.65 in one element."""
    return build_well_balanced(N=N, flux=flux, t_end=t_end, diagnostics_interval=diagnostics_interval,
                               perturb_element=perturb_element, **kw)


def dam_centerline(y, shape="straight"):
    if shape == "straight":
        return np.full_like(np.asarray(y, dtype=float), 5.0)
    if shape == "parabolic":
        y = np.asarray(y, dtype=float)
        return y * y / 25.0 - 0.4 * y + 6.0
    raise ValueError(f"unknown dam centerline {shape!r}")


def straight_dam_mesh(cells_per_side=20, thickness=0.2, gap=(4.5, 5.5), ny=40, size=10.0):
    """Tensor grid on ``[0, size]^2`` with a one-cell-wide dam column and an open gap."""
    xd0, xd1 = 0.5 * (size - thickness), 0.5 * (size + thickness)
    xs = np.concatenate([np.linspace(0.0, xd0, cells_per_side + 1), np.linspace(xd1, size, cells_per_side + 1)])
    ys = np.linspace(0.0, size, ny + 1)
    col = cells_per_side
    mid = 0.5 * (ys[:-1] + ys[1:])
    skip = [(col, iy) for iy in range(ny) if not gap[0] < mid[iy] < gap[1]]
    return build_tensor_mesh(xs, ys, skip=skip, boundary_names=("outer",) * 4, hole_tag="wall")


def build_dam_break(N=3, flux="es", g=1.0, ratio=0.25, t_end=1.0, cfl=0.7, mesh=None,
                    diagnostics_interval=10, h_left=1.0, h_right=0.75, rho2=1.0):
    """Both layers at rest, deeper upstream of a dam with a gap; slip walls on the dam."""
    opts = dict(mesh or {})
    p = PhysicsParams.from_ratio(g, ratio, rho2)
    shape = opts.get("dam_centerline", "straight" if not opts.get("file") else "parabolic")
    wall_tags = set(opts.get("slip_wall_tags", ("wall", "dam")))
    m = load_mesh_file(opts["file"]) if opts.get("file") else straight_dam_mesh()
    ops = operator_set(N)
    geo = compute_metrics(m, ops)

    def state(x, y, t=0.0):
        x = np.asarray(x, dtype=float)
        h = np.where(x <= dam_centerline(y, shape), h_left, h_right)
        zero = np.zeros_like(h)
        return np.stack([h, zero, zero, h.copy(), zero, zero]), zero

    bcs = {}
    for bf in m.boundary_faces:
        bcs[bf.tag] = BoundaryCondition("slip_wall") if bf.tag in wall_tags else BoundaryCondition("dirichlet", state)
    U0, b = state(geo.x, geo.y)
    semi = Semidiscretization(m, ops, p, b, flux, bcs, geometry=geo)
    cfg = TimeIntegratorConfig(t_end=t_end, cfl=cfl, diagnostics_interval=diagnostics_interval)
    return Scenario("dam_break", semi, U0, cfg)


SCENARIOS = {
    "convergence": build_convergence,
    "well_balanced": build_well_balanced,
    "perturbation": build_perturbation,
    "dam_break": build_dam_break,
}


def build_scenario(name, **kw):
    try:
        builder = SCENARIOS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return builder(**kw)


def sample_line(semi, field, points):
    """Interpolate a nodal scalar ``field`` ``(K, n, n)`` at physical ``points`` ``(P, 2)``."""
    elem, xi, eta = locate_points(semi.geometry, np.asarray(points, dtype=float))
    if np.any(elem < 0):
        raise ValueError(f"{int(np.sum(elem < 0))} sample points lie outside the mesh")
    nodes = semi.ops.nodes
    Vx = interpolation_matrix(nodes, xi)
    Vy = interpolation_matrix(nodes, eta)
    return np.einsum("pi,pij,pj->p", Vx, field[elem], Vy)


def total_variation(values):
    return float(np.sum(np.abs(np.diff(np.asarray(values, dtype=float)))))
