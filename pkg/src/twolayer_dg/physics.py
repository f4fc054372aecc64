"""Pointwise two-layer shallow water quantities.

States are arrays whose *leading* axis holds the six conserved variables
``(h1, h1 u1, h1 v1, h2, h2 u2, h2 v2)``; any trailing shape is allowed, so the
same functions serve a single node, a face trace or a whole solution field.
Bottom topography ``b`` has the trailing shape only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicsParams",
    "PositivityError",
    "EigenvalueEstimates",
    "NVARS",
    "check_positive",
    "primitive",
    "entropy_variable_jump",
    "physical_flux",
    "normal_flux",
    "noncons_vectors",
    "entropy",
    "entropy_variables",
    "entropy_flux",
    "entropy_potential",
    "wavespeed_bound",
    "eigval_estimates",
    "entropy_hessian",
    "dissipation_matrix",
]

NVARS = 6


class PositivityError(ValueError):
    """A layer height is nonpositive (or not finite) somewhere."""


@dataclass(frozen=True)
class PhysicsParams:
    g: float = 9.81
    rho1: float = 0.9
    rho2: float = 1.0

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"gravity must be positive, got {self.g}")
        if not 0 < self.rho1 < self.rho2:
            raise ValueError(f"need 0 < rho1 < rho2, got rho1={self.rho1}, rho2={self.rho2}")

    @classmethod
    def from_ratio(cls, g, ratio, rho2=1.0):
        return cls(g=float(g), rho1=float(ratio) * rho2, rho2=float(rho2))

    @property
    def ratio(self):
        return self.rho1 / self.rho2

    @property
    def reduced_gravity(self):
        return self.g * (1.0 - self.ratio)


def check_positive(u, context=""):
    h1, h2 = u[0], u[3]
    bad = ~((h1 > 0) & (h2 > 0))
    if np.any(bad):
        idx = np.argwhere(np.atleast_1d(bad))[0]
        where = f" at index {tuple(int(i) for i in idx)}" if np.ndim(bad) else ""
        raise PositivityError(f"nonpositive or non-finite layer height{where}{context}")


def primitive(u):
    """Return ``(h1, u1, v1, h2, u2, v2)``."""
    h1, h2 = u[0], u[3]
    return h1, u[1] / h1, u[2] / h1, h2, u[4] / h2, u[5] / h2


def physical_flux(u, p):
    """x- and y-flux vectors ``(f1, f2)``, each shaped like ``u``."""
    u = np.asarray(u, dtype=float)
    check_positive(u)
    h1, u1, v1, h2, u2, v2 = primitive(u)
    g = p.g
    f1 = np.stack([u[1], u[1] * u1 + 0.5 * g * h1**2, u[1] * v1,
                   u[4], u[4] * u2 + 0.5 * g * h2**2, u[4] * v2])
    f2 = np.stack([u[2], u[2] * u1, u[2] * v1 + 0.5 * g * h1**2,
                   u[5], u[5] * u2, u[5] * v2 + 0.5 * g * h2**2])
    return f1, f2


def normal_flux(u, p, nx, ny):
    f1, f2 = physical_flux(u, p)
    return f1 * nx + f2 * ny


def noncons_vectors(u, b, p):
    """``phi``, ``r1``, ``r2`` of the Hadamard-product nonconservative term."""
    u = np.asarray(u, dtype=float)
    check_positive(u)
    b = np.asarray(b, dtype=float)
    h1, h2 = u[0], u[3]
    zero = np.zeros(np.broadcast(h1, b).shape)
    phi = np.stack([zero, p.g * h1 + zero, p.g * h1 + zero, zero, p.g * h2 + zero, p.g * h2 + zero])
    upper = b + h2
    lower = b + p.ratio * h1
    r1 = np.stack([zero, upper, zero, zero, lower, zero])
    r2 = np.stack([zero, zero, upper, zero, zero, lower])
    return phi, r1, r2


def entropy(u, b, p):
    """Total energy of both layers (the mathematical entropy)."""
    u = np.asarray(u, dtype=float)
    check_positive(u)
    h1, u1, v1, h2, u2, v2 = primitive(u)
    g = p.g
    return (0.5 * (p.rho1 * (h1 * u1**2 + h1 * v1**2 + g * h1**2)
                   + p.rho2 * (h2 * u2**2 + h2 * v2**2 + g * h2**2))
            + p.rho2 * g * h2 * b + p.rho1 * g * h1 * (b + h2))


def entropy_variables(u, b, p):
    u = np.asarray(u, dtype=float)
    check_positive(u)
    h1, u1, v1, h2, u2, v2 = primitive(u)
    g = p.g
    b = np.asarray(b, dtype=float)
    w1 = p.rho1 * (g * (h1 + h2 + b) - 0.5 * (u1**2 + v1**2))
    w4 = p.rho2 * (g * (p.ratio * h1 + h2 + b) - 0.5 * (u2**2 + v2**2))
    return np.stack([w1, p.rho1 * u1 + 0 * b, p.rho1 * v1 + 0 * b,
                     w4, p.rho2 * u2 + 0 * b, p.rho2 * v2 + 0 * b])


def entropy_variable_jump(uL, uR, bL, bR, p):
    """``w(uR) - w(uL)`` assembled from per-layer jumps.

    Grouping the free-surface heights as ``[[h1]] + [[h2 + b]]`` makes the jump
    exactly zero for lake-at-rest traces even when ``b`` differs across the face.
    """
    uL, uR = np.asarray(uL, dtype=float), np.asarray(uR, dtype=float)
    check_positive(uL)
    check_positive(uR)
    h1L, u1L, v1L, h2L, u2L, v2L = primitive(uL)
    h1R, u1R, v1R, h2R, u2R, v2R = primitive(uR)
    g = p.g
    dh1 = h1R - h1L
    dlow = (h2R + np.asarray(bR, dtype=float)) - (h2L + np.asarray(bL, dtype=float))
    dke1 = 0.5 * ((u1R**2 + v1R**2) - (u1L**2 + v1L**2))
    dke2 = 0.5 * ((u2R**2 + v2R**2) - (u2L**2 + v2L**2))
    return np.stack([p.rho1 * (g * (dh1 + dlow) - dke1), p.rho1 * (u1R - u1L), p.rho1 * (v1R - v1L),
                     p.rho2 * (g * (p.ratio * dh1 + dlow) - dke2), p.rho2 * (u2R - u2L),
                     p.rho2 * (v2R - v2L)])


def entropy_flux(u, b, p):
    """Entropy flux ``(fS_x, fS_y)``."""
    u = np.asarray(u, dtype=float)
    check_positive(u)
    h1, u1, v1, h2, u2, v2 = primitive(u)
    g, r1, r2 = p.g, p.rho1, p.rho2
    ke1 = 0.5 * (u1**2 + v1**2)
    ke2 = 0.5 * (u2**2 + v2**2)

    def component(a1, a2):
        return (r1 * (h1 * a1 * ke1 + g * h1 * a1 * (h1 + b))
                + r2 * (h2 * a2 * ke2 + g * h2 * a2 * (h2 + b))
                + g * r1 * h1 * h2 * (a1 + a2))

    return component(u1, u2), component(v1, v2)


def entropy_potential(u, b, p):
    """Flux potential ``psi = w . f - fS`` per direction."""
    w = entropy_variables(u, b, p)
    f1, f2 = physical_flux(u, p)
    fsx, fsy = entropy_flux(u, b, p)
    return np.sum(w * f1, axis=0) - fsx, np.sum(w * f2, axis=0) - fsy


def wavespeed_bound(u, p, direction):
    """Upper bound on the wave speeds in the given unit direction."""
    u = np.asarray(u, dtype=float)
    check_positive(u)
    nx, ny = direction
    h1, h2 = u[0], u[3]
    un1 = (u[1] * nx + u[2] * ny) / h1
    un2 = (u[4] * nx + u[5] * ny) / h2
    htot = h1 + h2
    return np.abs((h1 * un1 + h2 * un2) / htot) + np.sqrt(p.g * htot)


@dataclass(frozen=True)
class EigenvalueEstimates:
    lambda_ext_pm: tuple
    lambda_int_pm: tuple
    hyperbolic: object

    @property
    def complex_internal(self):
        return ~np.asarray(self.hyperbolic)


def eigval_estimates(u, p, direction):
    """Barotropic/baroclinic wave speed estimates for weakly coupled layers.

    Internal speeds are ``nan`` wherever the hyperbolicity indicator exceeds one.
    """
    u = np.asarray(u, dtype=float)
    check_positive(u)
    if p.ratio >= 1.0:
        raise ValueError("density ratio must be < 1 (reduced gravity <= 0)")
    nx, ny = direction
    h1, h2 = u[0], u[3]
    un1 = (u[1] * nx + u[2] * ny) / h1
    un2 = (u[4] * nx + u[5] * ny) / h2
    htot = h1 + h2
    gp = p.reduced_gravity
    um = (h1 * un1 + h2 * un2) / htot
    uc = (h1 * un2 + h2 * un1) / htot
    ext = np.sqrt(p.g * htot)
    indicator = (un1 - un2) ** 2 / (gp * htot)
    hyperbolic = indicator <= 1.0
    with np.errstate(invalid="ignore"):
        radicand = gp * h1 * h2 / htot * (1.0 - indicator)
        internal = np.where(hyperbolic, np.sqrt(np.where(hyperbolic, radicand, 0.0)), np.nan)
    return EigenvalueEstimates((um - ext, um + ext), (uc - internal, uc + internal), hyperbolic)


def entropy_hessian(u, p):
    """Analytic ``dw/du`` with shape ``(..., 6, 6)``."""
    u = np.asarray(u, dtype=float)
    h1, u1, v1, h2, u2, v2 = primitive(u)
    g, r1, r2 = p.g, p.rho1, p.rho2
    shape = np.shape(h1)
    H = np.zeros(shape + (6, 6))
    for off, rho, h, a, c in ((0, r1, h1, u1, v1), (3, r2, h2, u2, v2)):
        H[..., off, off] = rho * (g + (a**2 + c**2) / h)
        H[..., off, off + 1] = H[..., off + 1, off] = -rho * a / h
        H[..., off, off + 2] = H[..., off + 2, off] = -rho * c / h
        H[..., off + 1, off + 1] = rho / h
        H[..., off + 2, off + 2] = rho / h
    H[..., 0, 3] = H[..., 3, 0] = r1 * g
    return H


def dissipation_matrix(u_avg, b_avg, p, check=True):
    """``du/dw`` at the averaged state: the inverse of the entropy Hessian.

    ``b_avg`` does not enter (bathymetry appears linearly in the entropy
    variables) but is accepted to keep the interface-state signature.
    """
    u_avg = np.asarray(u_avg, dtype=float)
    check_positive(u_avg, " in averaged interface state")
    hess = entropy_hessian(u_avg, p)
    H = np.linalg.inv(hess)
    if check:
        asym = np.max(np.abs(H - np.swapaxes(H, -1, -2))) if H.size else 0.0
        scale = max(np.max(np.abs(H)), 1.0) if H.size else 1.0
        if asym > 1e-10 * scale:
            raise np.linalg.LinAlgError(f"dissipation matrix not symmetric (|H-H^T| = {asym:.2e})")
        try:
            np.linalg.cholesky(0.5 * (H + np.swapaxes(H, -1, -2)))
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError("dissipation matrix is not positive definite") from exc
    return H
