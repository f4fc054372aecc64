"""Legendre-Gauss-Lobatto collocation operators with the summation-by-parts property.

All arrays are plain numpy float64.  An :class:`OperatorSet` bundles the 1D nodes,
weights, derivative matrix ``D``, the SBP matrix ``Q = M D`` and the boundary
matrix ``B = diag(-1, 0, ..., 0, 1)`` for one polynomial degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "OperatorSet",
    "OperatorConstructionError",
    "lgl_nodes_weights",
    "barycentric_weights",
    "lagrange_derivative_matrix",
    "sbp_matrices",
    "interpolate",
    "interpolation_matrix",
    "operator_set",
]

_NEWTON_TOL = 1e-15
_NEWTON_MAXITER = 100
_SBP_TOL = 1e-13


class OperatorConstructionError(ValueError):
    """Raised when nodes/weights/derivative data do not form a consistent SBP set."""


def _legendre_and_derivative(n, x):
    # three-term recurrence; returns P_n(x), P_{n-1}(x)
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p, p_prev


def lgl_nodes_weights(N):
    """Return the N+1 Legendre-Gauss-Lobatto nodes (ascending) and weights.

    Nodes are the roots of ``(1 - x**2) P_N'(x)``, found by Newton iteration from
    Chebyshev-Gauss-Lobatto guesses.  Weights are ``2 / (N (N+1) P_N(x_i)**2)``.
    """
    N = int(N)
    if N < 1:
        raise ValueError(f"LGL rule needs polynomial degree N >= 1, got {N}")
    n1 = N + 1
    x = np.cos(np.pi * np.arange(n1) / N)
    # Newton on (1-x^2) P_N' via the identity (1-x^2)P_N' = N (P_{N-1} - x P_N)
    for _ in range(_NEWTON_MAXITER):
        pn, pnm1 = _legendre_and_derivative(N, x)
        dx = (x * pn - pnm1) / (n1 * pn)
        x = x - dx
        if np.max(np.abs(dx)) <= _NEWTON_TOL:
            break
    else:
        if np.max(np.abs(dx)) > 1e-14:
            raise OperatorConstructionError(f"LGL Newton iteration did not converge for N={N}")
    x = np.sort(x)
    # enforce exact symmetry and endpoints
    x = 0.5 * (x - x[::-1])
    x[0], x[-1] = -1.0, 1.0
    pn, _ = _legendre_and_derivative(N, x)
    w = 2.0 / (N * n1 * pn**2)
    w = 0.5 * (w + w[::-1])
    return x, w


def barycentric_weights(nodes):
    nodes = np.asarray(nodes, dtype=float)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0.0):
        raise ValueError("interpolation nodes must be distinct")
    return 1.0 / np.prod(diff, axis=1)


def lagrange_derivative_matrix(nodes):
    """D[i, j] = l_j'(x_i) in barycentric form, diagonal from the negative-sum trick."""
    nodes = np.asarray(nodes, dtype=float)
    if np.any(np.diff(nodes) <= 0.0):
        raise ValueError("nodes must be strictly increasing (duplicate or unsorted nodes)")
    lam = barycentric_weights(nodes)
    n = nodes.size
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (lam[j] / lam[i]) / (nodes[i] - nodes[j])
        D[i, i] = -np.sum(D[i, :])
    return D


def sbp_matrices(deriv, weights):
    """Return ``Q = diag(w) D`` and ``B``; raise if ``Q + Q^T != B``."""
    deriv = np.asarray(deriv, dtype=float)
    weights = np.asarray(weights, dtype=float)
    n = weights.size
    if deriv.shape != (n, n):
        raise OperatorConstructionError(
            f"derivative matrix shape {deriv.shape} does not match {n} weights"
        )
    Q = weights[:, None] * deriv
    B = np.zeros((n, n))
    B[0, 0], B[-1, -1] = -1.0, 1.0
    err = np.max(np.abs(Q + Q.T - B))
    if err > _SBP_TOL:
        raise OperatorConstructionError(f"SBP property violated: max|Q+Q^T-B| = {err:.3e}")
    return Q, B


def interpolation_matrix(nodes, points):
    """Matrix ``V`` with ``V @ values`` the barycentric interpolant at ``points``."""
    nodes = np.asarray(nodes, dtype=float)
    points = np.atleast_1d(np.asarray(points, dtype=float))
    lam = barycentric_weights(nodes)
    diff = points[:, None] - nodes[None, :]
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        t = lam[None, :] / diff
        V = t / np.sum(t, axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    V[rows] = exact[rows].astype(float)
    return V


def interpolate(nodal_values, nodes, point):
    """Evaluate the Lagrange interpolant of ``nodal_values`` at a scalar ``point``."""
    point = float(point)
    if not -1.0 - 1e-14 <= point <= 1.0 + 1e-14:
        raise ValueError(f"interpolation point {point} outside [-1, 1]")
    V = interpolation_matrix(nodes, [point])
    return float(V[0] @ np.asarray(nodal_values, dtype=float))


@dataclass(frozen=True, eq=False)
class OperatorSet:
    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    deriv: np.ndarray
    sbp_q: np.ndarray
    boundary: np.ndarray

    @property
    def n_nodes(self):
        return self.degree + 1


@lru_cache(maxsize=None)
def operator_set(N):
    """Build (and cache) the LGL operator set for polynomial degree ``N``."""
    x, w = lgl_nodes_weights(N)
    D = lagrange_derivative_matrix(x)
    Q, B = sbp_matrices(D, w)
    for arr in (x, w, D, Q, B):
        arr.flags.writeable = False
    return OperatorSet(int(N), x, w, D, Q, B)
