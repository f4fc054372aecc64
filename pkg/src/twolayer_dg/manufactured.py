"""Smooth manufactured solution with constant layer velocities and its source term.

Heights and bathymetry are trigonometric; because the velocities are constant the
momentum sources collapse to ``u_k * s_cont + g h_k * (pressure gradient)``.
"""

from __future__ import annotations

import numpy as np

__all__ = ["VELOCITIES", "manufactured_solution", "manufactured_source"]

VELOCITIES = (0.9, 1.0, 1.0, 0.9)  # u1, v1, u2, v2
TWO_PI = 2.0 * np.pi


def _fields(x, y, t):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    b = 1.0 + 0.1 * np.cos(np.pi * x) * np.sin(np.pi * y)
    h1 = 2.0 + 0.1 * np.sin(TWO_PI * x + t) * np.cos(TWO_PI * y + t)
    H = 4.0 + 0.1 * np.cos(TWO_PI * x + t) * np.sin(TWO_PI * y + t)
    return b, h1, H - h1 - b


def manufactured_solution(x, y, t, p=None):
    """Exact ``(u, b)``; ``u`` has shape ``(6,) + x.shape``."""
    b, h1, h2 = _fields(x, y, t)
    u1, v1, u2, v2 = VELOCITIES
    return np.stack([h1, h1 * u1, h1 * v1, h2, h2 * u2, h2 * v2]), b


def manufactured_source(x, y, t, p):
    """Residual of the two-layer system for :func:`manufactured_solution`."""
    g, r = p.g, p.ratio
    u1, v1, u2, v2 = VELOCITIES
    b, h1, h2 = _fields(x, y, t)
    ax, ay = TWO_PI * x + t, TWO_PI * y + t
    sx, cx, sy, cy = np.sin(ax), np.cos(ax), np.sin(ay), np.cos(ay)
    # h1 and total height H = h1 + h2 + b
    h1_t = 0.1 * (cx * cy - sx * sy)
    h1_x = 0.1 * TWO_PI * cx * cy
    h1_y = -0.1 * TWO_PI * sx * sy
    H_t = 0.1 * (-sx * sy + cx * cy)
    H_x = -0.1 * TWO_PI * sx * sy
    H_y = 0.1 * TWO_PI * cx * cy
    b_x = -0.1 * np.pi * np.sin(np.pi * x) * np.sin(np.pi * y)
    b_y = 0.1 * np.pi * np.cos(np.pi * x) * np.cos(np.pi * y)
    h2_t, h2_x, h2_y = H_t - h1_t, H_x - h1_x - b_x, H_y - h1_y - b_y

    s1 = h1_t + u1 * h1_x + v1 * h1_y
    s4 = h2_t + u2 * h2_x + v2 * h2_y
    lower_x = h2_x + b_x + r * h1_x
    lower_y = h2_y + b_y + r * h1_y
    return np.stack([
        s1,
        u1 * s1 + g * h1 * H_x,
        v1 * s1 + g * h1 * H_y,
        s4,
        u2 * s4 + g * h2 * lower_x,
        v2 * s4 + g * h2 * lower_y,
    ])
