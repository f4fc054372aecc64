"""Split-form DGSEM right-hand side for the two-layer shallow water equations.

The volume term uses flux differencing with the EC two-point flux and the
two-point nonconservative term ``0.5 Phi_ij o (R_m - R_ij)``, both contracted
with arithmetic means of the contravariant vectors.  Surfaces use the EC or ES
numerical flux plus the linear-path term ``0.5 Phi^- o [[R]]``.

Solution fields are arrays of shape ``(6, K, N+1, N+1)``; bathymetry is
``(K, N+1, N+1)`` and may jump across element faces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import node_primitives, volume_flux_differencing
from .fluxes import diamond_normal, ec_flux_normal, es_flux_normal
from .mesh import compute_metrics, face_slice
from .physics import PositivityError, entropy, entropy_flux, entropy_variables

__all__ = [
    "BoundaryCondition",
    "Semidiscretization",
    "volume_kernel",
    "surface_kernel",
    "apply_bc",
    "volume_entropy_contraction_check",
]

SURFACE_FLUXES = ("ec", "es")
METRIC_SNAP_TOL = 1e-10


@dataclass(frozen=True)
class BoundaryCondition:
    """``kind`` is ``"dirichlet"`` or ``"slip_wall"`` (periodicity lives in the mesh faces).

    A Dirichlet ``function(x, y, t)`` returns ``(u, b)`` with ``u`` shaped ``(6,) + x.shape``.
    """

    kind: str
    function: object = None

    def __post_init__(self):
        if self.kind not in ("dirichlet", "slip_wall", "periodic"):
            raise ValueError(f"unknown boundary condition kind {self.kind!r}")
        if self.kind == "dirichlet" and self.function is None:
            raise ValueError("dirichlet boundary condition needs a state function")


def apply_bc(kind, u_int, b_int, x, y, t, normal, function=None, partner=None):
    """Exterior trace ``(u_ext, b_ext)`` for a boundary face node set."""
    if kind == "slip_wall":
        nx, ny = normal
        u_ext = np.array(u_int, dtype=float, copy=True)
        for m in (1, 4):
            un = u_int[m] * nx + u_int[m + 1] * ny
            u_ext[m] = u_int[m] - 2.0 * un * nx
            u_ext[m + 1] = u_int[m + 1] - 2.0 * un * ny
        return u_ext, np.array(b_int, dtype=float, copy=True)
    if kind == "dirichlet":
        u_ext, b_ext = function(x, y, t)
        return np.asarray(u_ext, dtype=float), np.broadcast_to(np.asarray(b_ext, dtype=float), np.shape(x))
    if kind == "periodic":
        if partner is None:
            raise ValueError("periodic boundary needs the partner trace")
        return partner
    raise ValueError(f"unknown boundary condition kind {kind!r}")


def _node_flux(U, g):
    """Cartesian consistent fluxes ``(fx, fy)``, each ``(6,) + U.shape[1:]``."""
    fx, fy = [], []
    for o in (0, 3):
        h, hu, hv = U[o], U[o + 1], U[o + 2]
        u, v, p = hu / h, hv / h, 0.5 * g * h * h
        fx += [hu, hu * u + p, hu * v]
        fy += [hv, hv * u, hv * v + p]
    return np.stack(fx), np.stack(fy)


def _metric_divergence(Ja1, Ja2, D, N):
    """``2 sum_m D_im {Ja1}_(i,m)j + 2 sum_m D_jm {Ja2}_i(j,m)`` per node, ``(2, K, n, n)``.

    This is what the consistent flux ``f(U_ij)`` is contracted with in the
    flux-differencing sum.  It vanishes when the discrete metric identities
    hold; elements where it is pure roundoff are snapped to exactly zero so a
    constant state gives a bitwise-zero volume residual.
    """
    rs = D.sum(axis=1)
    div = (Ja1 * rs[:, None] + np.einsum("im,ckmj->ckij", D, Ja1)
           + Ja2 * rs[None, :] + np.einsum("jm,ckim->ckij", D, Ja2))
    scale = np.maximum(np.abs(Ja1).max(axis=(0, 2, 3)), np.abs(Ja2).max(axis=(0, 2, 3)))
    roundoff = np.abs(div).max(axis=(0, 2, 3)) <= METRIC_SNAP_TOL * (N + 1) ** 2 * scale
    div[:, roundoff] = 0.0
    return div


def _volume(U, b, Ja1, Ja2, D2, g, ratio, mdiv=None):
    P = node_primitives(U, b, ratio)
    vol = np.empty_like(U)
    volume_flux_differencing(P, Ja1, Ja2, D2, float(g), vol)
    if mdiv is not None:
        fx, fy = _node_flux(U, g)
        vol += fx * mdiv[0] + fy * mdiv[1]
    return vol


def volume_kernel(U, b, geom, ops, p):
    """Flux-differencing volume residual (conservative + nonconservative).

    ``geom`` is an :class:`~twolayer_dg.mesh.ElementGeometry` (``U`` shaped
    ``(6, n, n)``) or a :class:`~twolayer_dg.mesh.MeshGeometry` (``(6, K, n, n)``).
    """
    U = np.asarray(U, dtype=float)
    b = np.asarray(b, dtype=float)
    single = U.ndim == 3
    if single:
        Ja1, Ja2 = (c[:, None] for c in geom.contravariant)
        U, b = U[:, None], b[None]
    else:
        Ja1, Ja2 = geom.Ja1, geom.Ja2
    if not (np.all(U[0] > 0) and np.all(U[3] > 0)):
        raise PositivityError("nonpositive layer height in volume kernel input")
    Ja1, Ja2 = np.ascontiguousarray(Ja1), np.ascontiguousarray(Ja2)
    mdiv = _metric_divergence(Ja1, Ja2, ops.deriv, ops.degree)
    if not np.any(mdiv):
        mdiv = None
    vol = _volume(U, b, Ja1, Ja2, 2.0 * ops.deriv, p.g, p.ratio, mdiv)
    return vol[:, 0] if single else vol


def surface_kernel(uM, uP, bM, bP, normal, scaling, p, flux="ec"):
    """Per-node surface contributions ``(minus, plus)`` of one face, before lifting.

    Minus: ``(F*_n - f(uM).n + 0.5 phi(uM) o [[R]].n) s``; the plus side gets
    the mirrored expression with ``n+ = -n`` and its own ``phi``.
    """
    nx, ny = normal
    g = p.g
    if flux == "ec":
        fstar = ec_flux_normal(uM, uP, g, nx, ny)
    elif flux == "es":
        fstar = es_flux_normal(uM, uP, bM, bP, p, nx, ny)
    else:
        raise ValueError(f"unknown surface flux {flux!r}")
    fM = ec_flux_normal(uM, uM, g, nx, ny)
    fP = ec_flux_normal(uP, uP, g, nx, ny)
    minus = (fstar - fM + diamond_normal(uM, uP, bM, bP, g, p.ratio, nx, ny)) * scaling
    plus = (fP - fstar + diamond_normal(uP, uM, bP, bM, g, p.ratio, -nx, -ny)) * scaling
    return minus, plus


class Semidiscretization:
    """Mesh + operators + physics + bathymetry + flux choice; evaluates ``dU/dt``.

    ``boundary_conditions`` maps each boundary tag of the mesh to a
    :class:`BoundaryCondition`.  ``source(x, y, t)`` (optional) returns a
    ``(6,) + x.shape`` array added after division by the Jacobian.
    """

    def __init__(self, mesh, ops, physics, bottom, surface_flux="es",
                 boundary_conditions=None, source=None, geometry=None):
        if surface_flux not in SURFACE_FLUXES:
            raise ValueError(f"surface flux must be one of {SURFACE_FLUXES}, got {surface_flux!r}")
        self.mesh, self.ops, self.physics = mesh, ops, physics
        self.surface_flux = surface_flux
        self.source = source
        self.geometry = geometry if geometry is not None else compute_metrics(mesh, ops)
        geo = self.geometry
        K, n = len(geo), ops.n_nodes
        self.shape = (6, K, n, n)
        self.bottom = np.broadcast_to(np.asarray(bottom, dtype=float), (K, n, n)).copy()
        self.boundary_conditions = dict(boundary_conditions or {})
        for bf in mesh.boundary_faces:
            if bf.tag not in self.boundary_conditions:
                raise ValueError(f"boundary tag {bf.tag!r} has no boundary condition")
        self._Ja1, self._Ja2 = np.ascontiguousarray(geo.Ja1), np.ascontiguousarray(geo.Ja2)
        self._D2 = 2.0 * ops.deriv
        self._mdiv = _metric_divergence(geo.Ja1, geo.Ja2, ops.deriv, ops.degree)
        if not np.any(self._mdiv):
            self._mdiv = None
        self._jw = geo.J * ops.weights[:, None] * ops.weights[None, :]
        self._build_face_maps()

    # -- connectivity ------------------------------------------------------
    def _node_index(self, elem, side):
        N = self.ops.degree
        n = N + 1
        ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        sl = face_slice(side, N)
        return elem * n * n + ii[sl] * n + jj[sl]

    def _slot_index(self, elem, side):
        n = self.ops.n_nodes
        return (elem * 4 + side) * n + np.arange(n)

    def _build_face_maps(self):
        geo = self.geometry
        idxM, idxP, slotM, slotP, nrm, sc = [], [], [], [], [], []
        for f in self.mesh.faces:
            order = slice(None, None, -1) if f.flip else slice(None)
            idxM.append(self._node_index(f.elem_minus, f.side_minus))
            idxP.append(self._node_index(f.elem_plus, f.side_plus)[order])
            slotM.append(self._slot_index(f.elem_minus, f.side_minus))
            slotP.append(self._slot_index(f.elem_plus, f.side_plus)[order])
            nrm.append(geo.normals[f.side_minus, :, f.elem_minus])
            sc.append(geo.scaling[f.side_minus, f.elem_minus])
        n = self.ops.n_nodes
        as_arr = lambda a, shape: np.array(a).reshape(shape)  # noqa: E731
        F = len(idxM)
        self._faces = dict(
            idxM=as_arr(idxM, (F, n)).astype(int), idxP=as_arr(idxP, (F, n)).astype(int),
            slotM=as_arr(slotM, (F, n)).astype(int), slotP=as_arr(slotP, (F, n)).astype(int),
            nx=as_arr([v[0] for v in nrm], (F, n)), ny=as_arr([v[1] for v in nrm], (F, n)),
            s=as_arr(sc, (F, n)),
        )
        groups = {}
        for bf in self.mesh.boundary_faces:
            groups.setdefault(bf.tag, []).append(bf)
        self._bfaces = []
        xf, yf = geo.x.reshape(-1), geo.y.reshape(-1)
        for tag, bfs in sorted(groups.items()):
            idx = np.array([self._node_index(bf.elem, bf.side) for bf in bfs]).reshape(len(bfs), n)
            slot = np.array([self._slot_index(bf.elem, bf.side) for bf in bfs]).reshape(len(bfs), n)
            nx = np.array([geo.normals[bf.side, 0, bf.elem] for bf in bfs])
            ny = np.array([geo.normals[bf.side, 1, bf.elem] for bf in bfs])
            s = np.array([geo.scaling[bf.side, bf.elem] for bf in bfs])
            self._bfaces.append(dict(tag=tag, bc=self.boundary_conditions[tag], idx=idx, slot=slot,
                                     nx=nx, ny=ny, s=s, x=xf[idx], y=yf[idx]))
        parts = [self._faces] + self._bfaces
        self._all_normals = (np.concatenate([g["nx"] for g in parts]),
                             np.concatenate([g["ny"] for g in parts]))
        self._all_s = np.concatenate([g["s"] for g in parts])
        self._bslots = (np.concatenate([g["slot"] for g in self._bfaces]) if self._bfaces
                        else np.zeros((0, n), dtype=int))

    # -- evaluation ----------------------------------------------------------
    def surface_terms(self, U, t):
        """Surface contributions per element side slot, shape ``(6, K, 4, n)``.

        Interior faces and every boundary group go through one batched kernel call.
        """
        K, n = self.shape[1], self.shape[2]
        Uf = U.reshape(6, -1)
        bf = self.bottom.reshape(-1)
        fm = self._faces
        uM, uP = [Uf[:, fm["idxM"]]], [Uf[:, fm["idxP"]]]
        bM, bP = [bf[fm["idxM"]]], [bf[fm["idxP"]]]
        for grp in self._bfaces:
            ui, bi = Uf[:, grp["idx"]], bf[grp["idx"]]
            bc = grp["bc"]
            uE, bE = apply_bc(bc.kind, ui, bi, grp["x"], grp["y"], t, (grp["nx"], grp["ny"]), bc.function)
            uM.append(ui)
            uP.append(uE)
            bM.append(bi)
            bP.append(np.broadcast_to(bE, bi.shape))
        minus, plus = surface_kernel(np.concatenate(uM, axis=1), np.concatenate(uP, axis=1),
                                     np.concatenate(bM), np.concatenate(bP), self._all_normals,
                                     self._all_s, self.physics, self.surface_flux)
        surf = np.zeros((6, K * 4 * n))
        nint = fm["idxM"].shape[0]
        surf[:, fm["slotM"]] = minus[:, :nint]
        surf[:, fm["slotP"]] = plus[:, :nint]
        surf[:, self._bslots] = minus[:, nint:]
        return surf.reshape(6, K, 4, n)

    def volume_terms(self, U):
        p = self.physics
        return _volume(U, self.bottom, self._Ja1, self._Ja2, self._D2, p.g, p.ratio, self._mdiv)

    def rhs(self, t, U):
        U = np.asarray(U, dtype=float)
        if not (np.all(U[0] > 0) and np.all(U[3] > 0)):
            bad = np.argwhere(~((U[0] > 0) & (U[3] > 0)))[0]
            raise PositivityError(
                f"nonpositive layer height at element {bad[0]}, node ({bad[1]}, {bad[2]}), t={t:.6g}")
        N = self.ops.degree
        w = self.ops.weights
        total = self.volume_terms(U)
        surf = self.surface_terms(U, t)
        # fixed assembly order: volume, then sides 0..3
        total[:, :, :, 0] += surf[:, :, 0, :] / w[0]
        total[:, :, N, :] += surf[:, :, 1, :] / w[N]
        total[:, :, :, N] += surf[:, :, 2, :] / w[N]
        total[:, :, 0, :] += surf[:, :, 3, :] / w[0]
        dU = -total / self.geometry.J
        if self.source is not None:
            dU += self.source(self.geometry.x, self.geometry.y, t)
        return dU

    __call__ = rhs

    # -- diagnostics helpers ------------------------------------------------
    def integrate(self, field):
        """Quadrature ``sum J w f`` over the mesh (element order fixed)."""
        return float(np.sum(self._jw * field))

    def total_entropy(self, U):
        return self.integrate(entropy(U, self.bottom, self.physics))

    def entropy_rate(self, U, dU):
        w = entropy_variables(U, self.bottom, self.physics)
        return self.integrate(np.sum(w * dU, axis=0))

    def layer_masses(self, U):
        return self.integrate(U[0]), self.integrate(U[3])


def volume_entropy_contraction_check(U, b, geom, ops, p):
    """``|sum w W^T vol - boundary quadrature of fS.n s|`` for one element."""
    U = np.asarray(U, dtype=float)
    b = np.asarray(b, dtype=float)
    N = ops.degree
    w = ops.weights
    vol = volume_kernel(U, b, geom, ops, p)
    W = entropy_variables(U, b, p)
    contraction = np.sum(w[:, None] * w[None, :] * np.sum(W * vol, axis=0))
    fsx, fsy = entropy_flux(U, b, p)
    boundary = 0.0
    for side in range(4):
        sl = face_slice(side, N)
        nx, ny = geom.face_normal[side]
        boundary += np.sum(w * (fsx[sl] * nx + fsy[sl] * ny) * geom.face_scaling[side])
    return float(abs(contraction - boundary))
