"""Curvilinear quadrilateral meshes, transfinite mappings and metric terms.

Reference-element conventions used throughout the package:

* corners ``c0..c3`` sit at ``(-1,-1), (1,-1), (1,1), (-1,1)``;
* sides are numbered ``0`` south (eta=-1), ``1`` east (xi=+1), ``2`` north
  (eta=+1), ``3`` west (xi=-1);
* every edge (and every face-node slot) is ordered along the increasing
  reference coordinate, so south/north run in xi and east/west run in eta;
* nodal arrays are indexed ``[..., i, j]`` with ``i`` along xi and ``j``
  along eta.

Edge curves are stored as ``M+1`` points located at the LGL nodes of degree
``M`` along the edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.polynomial import legendre as npleg

from .sbp import interpolation_matrix, lgl_nodes_weights

__all__ = [
    "MeshFormatError",
    "MeshValidityError",
    "QuadElement",
    "Face",
    "BoundaryFace",
    "CurvedQuadMesh",
    "ElementGeometry",
    "MeshGeometry",
    "SIDE_CORNERS",
    "build_structured_mesh",
    "build_tensor_mesh",
    "load_mesh_file",
    "write_mesh_file",
    "transfinite_map",
    "compute_metrics",
    "metric_identity_residual",
    "face_slice",
    "locate_points",
]

# (start corner, end corner) of each side, along the increasing reference coordinate
SIDE_CORNERS = ((0, 1), (1, 2), (3, 2), (0, 3))


class MeshFormatError(ValueError):
    """Malformed mesh file."""


class MeshValidityError(ValueError):
    """Inconsistent connectivity, leaky interfaces or an inverted mapping."""


@dataclass
class QuadElement:
    corners: np.ndarray
    curves: dict = field(default_factory=dict)

    def __post_init__(self):
        self.corners = np.asarray(self.corners, dtype=float).reshape(4, 2)
        self.curves = {int(s): np.asarray(c, dtype=float) for s, c in self.curves.items()}

    def edge(self, side, s):
        """Points of edge ``side`` at reference parameters ``s`` (shape ``(len(s), 2)``)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        curve = self.curves.get(side)
        if curve is None:
            a, b = self.corners[SIDE_CORNERS[side][0]], self.corners[SIDE_CORNERS[side][1]]
            return 0.5 * (1 - s)[:, None] * a + 0.5 * (1 + s)[:, None] * b
        nodes, _ = lgl_nodes_weights(curve.shape[0] - 1)
        return interpolation_matrix(nodes, s) @ curve

    def edge_derivative(self, side, s):
        """d(edge)/ds using a Legendre-series fit of the edge data (independent of D)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        curve = self.curves.get(side)
        if curve is None:
            a, b = self.corners[SIDE_CORNERS[side][0]], self.corners[SIDE_CORNERS[side][1]]
            return np.tile(0.5 * (b - a), (s.size, 1))
        M = curve.shape[0] - 1
        nodes, _ = lgl_nodes_weights(M)
        coef = npleg.legfit(nodes, curve, M)
        return npleg.legval(s, npleg.legder(coef)).T


@dataclass(frozen=True)
class Face:
    """Conforming face between ``elem_minus``/``side_minus`` and ``elem_plus``/``side_plus``.

    ``flip`` reverses the plus side's node order.  ``periodic`` faces join
    geometrically distinct (translated) edges.
    """

    elem_minus: int
    side_minus: int
    elem_plus: int
    side_plus: int
    flip: bool = False
    periodic: bool = False


@dataclass(frozen=True)
class BoundaryFace:
    elem: int
    side: int
    tag: str


@dataclass
class CurvedQuadMesh:
    elements: list
    faces: list
    boundary_faces: list = field(default_factory=list)
    boundary_tags: dict = field(default_factory=dict)

    @property
    def n_elements(self):
        return len(self.elements)

    def curve_degree(self):
        degs = [c.shape[0] - 1 for e in self.elements for c in e.curves.values()]
        return max(degs) if degs else 1

    def validate(self, tol=1e-12):
        """Check connectivity and watertightness; raise :class:`MeshValidityError`."""
        K = self.n_elements
        seen = {}

        def claim(e, s, what):
            if not (0 <= e < K) or s not in (0, 1, 2, 3):
                raise MeshValidityError(f"{what} references missing element/side ({e}, {s})")
            if (e, s) in seen:
                raise MeshValidityError(
                    f"element {e} side {s} used twice ({seen[(e, s)]} and {what})")
            seen[(e, s)] = what

        for n, f in enumerate(self.faces):
            claim(f.elem_minus, f.side_minus, f"face {n}")
            claim(f.elem_plus, f.side_plus, f"face {n}")
        for n, bf in enumerate(self.boundary_faces):
            claim(bf.elem, bf.side, f"boundary face {n} ({bf.tag})")
        missing = [(e, s) for e in range(K) for s in range(4) if (e, s) not in seen]
        if missing:
            raise MeshValidityError(f"element sides without face or boundary: {missing[:5]}")

        for n, f in enumerate(self.faces):
            em, ep = self.elements[f.elem_minus], self.elements[f.elem_plus]
            curves = (em.curves.get(f.side_minus), ep.curves.get(f.side_plus))
            deg = max([1] + [c.shape[0] - 1 for c in curves if c is not None])
            s, _ = lgl_nodes_weights(deg)
            pm = em.edge(f.side_minus, s)
            pp = ep.edge(f.side_plus, -s if f.flip else s)
            d = pp - pm
            if f.periodic:
                d = d - d[0]
            err = np.max(np.abs(d))
            if err > tol * max(1.0, np.max(np.abs(pm))):
                kind = "periodic" if f.periodic else "interior"
                raise MeshValidityError(
                    f"{kind} face {n} (elements {f.elem_minus}/{f.elem_plus}) is not "
                    f"watertight: edge mismatch {err:.3e}")
        return self


# ---------------------------------------------------------------------------
# generators


def _warp(A, x0, y0, Lx, Ly):
    def f(x, y):
        s = np.sin(2 * np.pi * (x - x0) / Lx) * np.sin(2 * np.pi * (y - y0) / Ly)
        return x + A * Lx * s, y + A * Ly * s
    return f


def build_tensor_mesh(xs, ys, *, periodic=(False, False), skip=(), warp=None,
                      curve_degree=None, boundary_names=("south", "east", "north", "west"),
                      hole_tag="wall", boundary_tags=None):
    """Mesh on the tensor grid ``xs x ys`` (element ``(ix, iy)`` has index ``iy*nx + ix``
    before removal of the cells in ``skip``).

    ``warp(x, y) -> (x', y')`` displaces the grid; edges are then sampled as
    degree-``curve_degree`` curves.  Sides adjacent to skipped cells get ``hole_tag``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    nx, ny = xs.size - 1, ys.size - 1
    if nx < 1 or ny < 1:
        raise ValueError("need at least one element in each direction")
    skip = set(tuple(c) for c in skip)
    cells = [(ix, iy) for iy in range(ny) for ix in range(nx) if (ix, iy) not in skip]
    index = {c: n for n, c in enumerate(cells)}
    s_curve = lgl_nodes_weights(curve_degree)[0] if warp is not None else None

    GX, GY = np.meshgrid(xs, ys, indexing="ij")
    if warp is not None:
        WX, WY = warp(GX, GY)
    else:
        WX, WY = GX, GY

    elements = []
    for ix, iy in cells:
        grid = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)]
        corners = np.array([(WX[g], WY[g]) for g in grid], dtype=float)
        curves = {}
        if warp is not None:
            for side, (a, b) in enumerate(SIDE_CORNERS):
                ga = np.array([GX[grid[a]], GY[grid[a]]])
                gb = np.array([GX[grid[b]], GY[grid[b]]])
                pts = 0.5 * (1 - s_curve)[:, None] * ga + 0.5 * (1 + s_curve)[:, None] * gb
                wx, wy = warp(pts[:, 0], pts[:, 1])
                curve = np.column_stack([wx, wy])
                # shared endpoints come from the single grid evaluation
                curve[0], curve[-1] = corners[a], corners[b]
                curves[side] = curve
        elements.append(QuadElement(corners, curves))

    faces, bfaces = [], []
    for ix, iy in cells:
        e = index[(ix, iy)]
        # east neighbour
        jx = ix + 1
        if jx == nx and periodic[0]:
            jx = 0
        if jx < nx and (jx, iy) in index:
            faces.append(Face(e, 1, index[(jx, iy)], 3, False, jx != ix + 1))
        elif jx < nx:
            bfaces.append(BoundaryFace(e, 1, hole_tag))
        else:
            bfaces.append(BoundaryFace(e, 1, boundary_names[1]))
        jy = iy + 1
        if jy == ny and periodic[1]:
            jy = 0
        if jy < ny and (ix, jy) in index:
            faces.append(Face(e, 2, index[(ix, jy)], 0, False, jy != iy + 1))
        elif jy < ny:
            bfaces.append(BoundaryFace(e, 2, hole_tag))
        else:
            bfaces.append(BoundaryFace(e, 2, boundary_names[2]))
        # west/south sides only need a record when nothing else claims them
        if ix == 0 and not periodic[0]:
            bfaces.append(BoundaryFace(e, 3, boundary_names[3]))
        elif ix > 0 and (ix - 1, iy) not in index:
            bfaces.append(BoundaryFace(e, 3, hole_tag))
        if iy == 0 and not periodic[1]:
            bfaces.append(BoundaryFace(e, 0, boundary_names[0]))
        elif iy > 0 and (ix, iy - 1) not in index:
            bfaces.append(BoundaryFace(e, 0, hole_tag))
    mesh = CurvedQuadMesh(elements, faces, bfaces, dict(boundary_tags or {}))
    return mesh.validate()


def build_structured_mesh(generator, nx, ny, domain=(0.0, 1.0, 0.0, 1.0), warp_amplitude=0.0,
                          degree=6, periodic=(True, True)):
    """``cartesian`` or ``sine_warped`` structured mesh of ``nx x ny`` elements.

    The warp displaces ``x += A Lx sin(2 pi x/Lx) sin(2 pi y/Ly)`` and likewise
    for ``y``; it vanishes on the domain boundary so periodic pairing survives.
    """
    x0, x1, y0, y1 = domain
    if nx < 1 or ny < 1:
        raise ValueError("nx and ny must be >= 1")
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    if generator == "cartesian" or (generator == "sine_warped" and warp_amplitude == 0.0):
        return build_tensor_mesh(xs, ys, periodic=periodic)
    if generator != "sine_warped":
        raise ValueError(f"unknown mesh generator {generator!r}")
    if not 0.0 <= warp_amplitude < 0.25:
        raise ValueError("warp_amplitude must lie in [0, 0.25)")
    warp = _warp(warp_amplitude, x0, y0, x1 - x0, y1 - y0)
    return build_tensor_mesh(xs, ys, periodic=periodic, warp=warp, curve_degree=degree)


# ---------------------------------------------------------------------------
# file IO


def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def load_mesh_file(path, boundary_tags=None):
    """Parse a ``quadmesh 1`` text file and validate the result."""
    text = Path(path).read_text()
    lines = list(_data_lines(text))
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            raise MeshFormatError(f"{path}: unexpected end of file, expected {what}")
        item = lines[pos]
        pos += 1
        return item

    def floats(lineno, toks, n):
        if len(toks) != n:
            raise MeshFormatError(f"{path}:{lineno}: expected {n} numbers, got {' '.join(toks)!r}")
        try:
            return [float(t) for t in toks]
        except ValueError as exc:
            raise MeshFormatError(f"{path}:{lineno}: bad number in {' '.join(toks)!r}") from exc

    def ints(lineno, toks):
        try:
            return [int(t) for t in toks]
        except ValueError as exc:
            raise MeshFormatError(f"{path}:{lineno}: expected integers, got {' '.join(toks)!r}") from exc

    lineno, toks = take("header")
    if toks != ["quadmesh", "1"]:
        raise MeshFormatError(f"{path}:{lineno}: header must be 'quadmesh 1', got {' '.join(toks)!r}")
    lineno, toks = take("'elements <E>'")
    if len(toks) != 2 or toks[0] != "elements":
        raise MeshFormatError(f"{path}:{lineno}: expected 'elements <E>'")
    (E,) = ints(lineno, toks[1:])
    elements = []
    for _ in range(E):
        corners = [floats(*take("corner coordinates"), 2) for _ in range(4)]
        elements.append(QuadElement(np.array(corners)))

    faces, bfaces = [], []
    while pos < len(lines):
        lineno, toks = take("section")
        if toks[0] == "curve":
            if len(toks) != 4:
                raise MeshFormatError(f"{path}:{lineno}: expected 'curve <elem> <side> <N>'")
            e, s, M = ints(lineno, toks[1:])
            if not 0 <= e < E or s not in (0, 1, 2, 3) or M < 1:
                raise MeshFormatError(f"{path}:{lineno}: invalid curve reference {toks[1:]}")
            pts = np.array([floats(*take("curve point"), 2) for _ in range(M + 1)])
            elements[e].curves[s] = pts
        elif toks[0] == "faces":
            if len(toks) != 2:
                raise MeshFormatError(f"{path}:{lineno}: expected 'faces <F>'")
            (F,) = ints(lineno, toks[1:])
            for _ in range(F):
                lineno, toks = take("face record")
                kind = toks[0]
                if kind in ("interior", "periodic") and len(toks) == 6:
                    em, sm, ep, sp, flip = ints(lineno, toks[1:])
                    for e, s in ((em, sm), (ep, sp)):
                        if not 0 <= e < E or s not in (0, 1, 2, 3):
                            raise MeshFormatError(f"{path}:{lineno}: dangling face reference ({e}, {s})")
                    faces.append(Face(em, sm, ep, sp, bool(flip), kind == "periodic"))
                elif kind == "boundary" and len(toks) == 4:
                    e, s = ints(lineno, toks[1:3])
                    if not 0 <= e < E or s not in (0, 1, 2, 3):
                        raise MeshFormatError(f"{path}:{lineno}: dangling boundary reference ({e}, {s})")
                    bfaces.append(BoundaryFace(e, s, toks[3]))
                else:
                    raise MeshFormatError(f"{path}:{lineno}: malformed face record {' '.join(toks)!r}")
        else:
            raise MeshFormatError(f"{path}:{lineno}: unknown section {toks[0]!r}")
    for el in elements:
        for s, c in el.curves.items():
            a, b = el.corners[SIDE_CORNERS[s][0]], el.corners[SIDE_CORNERS[s][1]]
            if np.max(np.abs(c[0] - a)) > 1e-12 or np.max(np.abs(c[-1] - b)) > 1e-12:
                raise MeshFormatError(f"{path}: curve endpoints of side {s} do not match the corners")
    mesh = CurvedQuadMesh(elements, faces, bfaces, dict(boundary_tags or {}))
    return mesh.validate()


def write_mesh_file(mesh, path):
    out = ["quadmesh 1", f"elements {mesh.n_elements}"]
    for n, el in enumerate(mesh.elements):
        out.append(f"# element {n}")
        out.extend(f"{float(x)!r} {float(y)!r}" for x, y in el.corners)
    for n, el in enumerate(mesh.elements):
        for s, c in sorted(el.curves.items()):
            out.append(f"curve {n} {s} {c.shape[0] - 1}")
            out.extend(f"{float(x)!r} {float(y)!r}" for x, y in c)
    out.append(f"faces {len(mesh.faces) + len(mesh.boundary_faces)}")
    for f in mesh.faces:
        kind = "periodic" if f.periodic else "interior"
        out.append(f"{kind} {f.elem_minus} {f.side_minus} {f.elem_plus} {f.side_plus} {int(f.flip)}")
    for bf in mesh.boundary_faces:
        out.append(f"boundary {bf.elem} {bf.side} {bf.tag}")
    Path(path).write_text("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# mapping and metrics


def transfinite_map(element, xi, eta):
    """Linear-blending transfinite interpolation of the four edges at ``(xi, eta)`` pairs."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    c = element.corners
    S, E = element.edge(0, xi), element.edge(1, eta)
    Nn, W = element.edge(2, xi), element.edge(3, eta)
    a, b = (1 - xi)[:, None], (1 + xi)[:, None]
    m, p = (1 - eta)[:, None], (1 + eta)[:, None]
    return (0.5 * (a * W + b * E + m * S + p * Nn)
            - 0.25 * (a * m * c[0] + b * m * c[1] + b * p * c[2] + a * p * c[3]))


def _exact_derivatives(element, xi, eta):
    xi = np.atleast_1d(xi)
    eta = np.atleast_1d(eta)
    c = element.corners
    S, E = element.edge(0, xi), element.edge(1, eta)
    Nn, W = element.edge(2, xi), element.edge(3, eta)
    dS, dE = element.edge_derivative(0, xi), element.edge_derivative(1, eta)
    dN, dW = element.edge_derivative(2, xi), element.edge_derivative(3, eta)
    a, b = (1 - xi)[:, None], (1 + xi)[:, None]
    m, p = (1 - eta)[:, None], (1 + eta)[:, None]
    d_xi = (0.5 * (-W + E + m * dS + p * dN)
            - 0.25 * (-m * c[0] + m * c[1] + p * c[2] - p * c[3]))
    d_eta = (0.5 * (a * dW + b * dE - S + Nn)
             - 0.25 * (-a * c[0] - b * c[1] + b * c[2] + a * c[3]))
    return d_xi, d_eta


@dataclass(frozen=True)
class ElementGeometry:
    jacobian: np.ndarray
    contravariant: tuple
    node_coords: np.ndarray
    face_scaling: tuple
    face_normal: tuple


def face_slice(side, N):
    """Index tuple selecting the face nodes of ``side`` from an ``[..., i, j]`` array."""
    return {0: (slice(None), 0), 1: (N, slice(None)), 2: (slice(None), N), 3: (0, slice(None))}[side]


class MeshGeometry:
    """Stacked metric data for all elements.

    Attributes: ``x, y, J`` with shape ``(K, n, n)``; ``Ja1, Ja2`` with shape
    ``(2, K, n, n)``; ``normals`` ``(4, 2, K, n)`` and ``scaling`` ``(4, K, n)``
    indexed by side.  Indexing yields per-element :class:`ElementGeometry` views.
    """

    def __init__(self, mesh, ops, x, y, J, Ja1, Ja2):
        self.mesh, self.ops = mesh, ops
        self.x, self.y, self.J, self.Ja1, self.Ja2 = x, y, J, Ja1, Ja2
        N = ops.degree
        K = x.shape[0]
        self.normals = np.zeros((4, 2, K, N + 1))
        self.scaling = np.zeros((4, K, N + 1))
        for side, (vec, sign) in enumerate(((Ja2, -1.0), (Ja1, 1.0), (Ja2, 1.0), (Ja1, -1.0))):
            idx = face_slice(side, N)
            v = sign * vec[(slice(None), slice(None)) + idx]
            s = np.hypot(v[0], v[1])
            self.scaling[side] = s
            self.normals[side] = v / s

    def __len__(self):
        return self.x.shape[0]

    def __getitem__(self, k):
        return ElementGeometry(
            jacobian=self.J[k],
            contravariant=(self.Ja1[:, k], self.Ja2[:, k]),
            node_coords=np.stack([self.x[k], self.y[k]], axis=-1),
            face_scaling=tuple(self.scaling[s, k] for s in range(4)),
            face_normal=tuple(self.normals[s, :, k] for s in range(4)),
        )

    def __iter__(self):
        return (self[k] for k in range(len(self)))


def compute_metrics(mesh, ops, method="collocation"):
    """Node coordinates, Jacobian, contravariant vectors and face data.

    ``method="collocation"`` differentiates the nodal coordinates with ``D``
    (the discrete metric identities then hold to roundoff).  ``"exact"``
    samples the analytic derivatives of the transfinite map instead; the
    identities fail when the edge curves have degree above ``ops.degree``.
    """
    N = ops.degree
    xi = ops.nodes
    XI, ETA = np.meshgrid(xi, xi, indexing="ij")
    K = mesh.n_elements
    x = np.empty((K, N + 1, N + 1))
    y = np.empty_like(x)
    xs = np.empty((4, K, N + 1, N + 1))  # x_xi, y_xi, x_eta, y_eta
    for k, el in enumerate(mesh.elements):
        pts = transfinite_map(el, XI.ravel(), ETA.ravel())
        x[k] = pts[:, 0].reshape(N + 1, N + 1)
        y[k] = pts[:, 1].reshape(N + 1, N + 1)
        if method == "exact":
            dxi, deta = _exact_derivatives(el, XI.ravel(), ETA.ravel())
            xs[0, k], xs[1, k] = dxi[:, 0].reshape(N + 1, N + 1), dxi[:, 1].reshape(N + 1, N + 1)
            xs[2, k], xs[3, k] = deta[:, 0].reshape(N + 1, N + 1), deta[:, 1].reshape(N + 1, N + 1)
    if method == "collocation":
        D = ops.deriv
        xs[0] = np.einsum("im,kmj->kij", D, x)
        xs[1] = np.einsum("im,kmj->kij", D, y)
        xs[2] = np.einsum("jm,kim->kij", D, x)
        xs[3] = np.einsum("jm,kim->kij", D, y)
    elif method != "exact":
        raise ValueError(f"unknown metric method {method!r}")
    x_xi, y_xi, x_eta, y_eta = xs
    J = x_xi * y_eta - y_xi * x_eta
    if np.any(~(J > 0)):
        k, i, j = np.argwhere(~(J > 0))[0]
        raise MeshValidityError(
            f"nonpositive Jacobian {J[k, i, j]:.3e} in element {k} at node ({i}, {j})")
    Ja1 = np.stack([y_eta, -x_eta])
    Ja2 = np.stack([-y_xi, x_xi])
    return MeshGeometry(mesh, ops, x, y, J, Ja1, Ja2)


def metric_identity_residual(geom, ops):
    """max |D (Ja1) + (Ja2) D^T| over nodes and components (one element or a whole mesh)."""
    if isinstance(geom, MeshGeometry):
        return max(metric_identity_residual(g, ops) for g in geom)
    Ja1, Ja2 = geom.contravariant
    D = ops.deriv
    res = np.einsum("im,cmj->cij", D, Ja1) + np.einsum("jm,cim->cij", D, Ja2)
    return float(np.max(np.abs(res)))


# ---------------------------------------------------------------------------
# point location


def locate_points(geometry, points, tol=1e-12, maxiter=50):
    """Return ``(elem, xi, eta)`` arrays for physical ``points`` (shape ``(P, 2)``).

    Points outside every element get ``elem = -1``.
    """
    ops = geometry.ops
    nodes = ops.nodes
    points = np.atleast_2d(np.asarray(points, dtype=float))
    P = points.shape[0]
    elem = np.full(P, -1)
    ref = np.zeros((P, 2))
    xmin, xmax = geometry.x.min(axis=(1, 2)), geometry.x.max(axis=(1, 2))
    ymin, ymax = geometry.y.min(axis=(1, 2)), geometry.y.max(axis=(1, 2))
    pad = 1e-9 + 0.05 * np.maximum(xmax - xmin, ymax - ymin)
    for n, (px, py) in enumerate(points):
        cand = np.nonzero((px >= xmin - pad) & (px <= xmax + pad)
                          & (py >= ymin - pad) & (py <= ymax + pad))[0]
        for k in cand:
            X, Y = geometry.x[k], geometry.y[k]
            s = np.zeros(2)
            for _ in range(maxiter):
                vx = interpolation_matrix(nodes, [s[0]])[0]
                vy = interpolation_matrix(nodes, [s[1]])[0]
                dvx = vx @ ops.deriv
                dvy = vy @ ops.deriv
                f = np.array([vx @ X @ vy - px, vx @ Y @ vy - py])
                Jm = np.array([[dvx @ X @ vy, vx @ X @ dvy], [dvx @ Y @ vy, vx @ Y @ dvy]])
                step = np.linalg.solve(Jm, f)
                s = np.clip(s - step, -1.5, 1.5)
                if np.max(np.abs(step)) < tol:
                    break
            if np.all(np.abs(s) <= 1 + 1e-10):
                elem[n], ref[n] = k, np.clip(s, -1, 1)
                break
    return elem, ref[:, 0], ref[:, 1]
