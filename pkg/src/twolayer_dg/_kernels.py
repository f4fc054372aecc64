"""Compiled flux-differencing volume loop.

Elements are distributed over threads; the sums inside an element always run
in the same order, so results do not depend on the thread count.
"""

from __future__ import annotations

import numba
import numpy as np
from numba import njit, prange

# the bundled TBB is often too old for numba; OpenMP or the builtin queue suffice
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


def set_threads(n):
    """Cap the kernel thread pool at ``n`` (clipped to what numba was started with)."""
    numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# rows of the per-node primitive array
H1, HU1, HV1, U1, V1, S1, H2, HU2, HV2, U2, V2, S2 = range(12)


def node_primitives(U, b, ratio):
    """``(12, K, n, n)``: per layer ``h, hu, hv, u, v`` and the free surface it feels."""
    h1, h2 = U[0], U[3]
    return np.ascontiguousarray(np.stack([
        h1, U[1], U[2], U[1] / h1, U[2] / h1, h1 + (h2 + b),
        h2, U[4], U[5], U[4] / h2, U[5] / h2, h2 + (b + ratio * h1),
    ]))


@njit(cache=True, inline="always")
def _layer_pair(g, P, o, k, iL, jL, iR, jR, ax, ay):
    hL = P[o, k, iL, jL]
    huL, hvL = P[o + 1, k, iL, jL], P[o + 2, k, iL, jL]
    uL, vL = P[o + 3, k, iL, jL], P[o + 4, k, iL, jL]
    hua = (huL + P[o + 1, k, iR, jR]) * 0.5
    hva = (hvL + P[o + 2, k, iR, jR]) * 0.5
    ua = (uL + P[o + 3, k, iR, jR]) * 0.5
    va = (vL + P[o + 4, k, iR, jR]) * 0.5
    pr = 0.5 * g * hL * (P[o + 5, k, iR, jR] - P[o + 5, k, iL, jL])
    mass = (hua - huL) * ax + (hva - hvL) * ay
    momx = (hua * ua - huL * uL + pr) * ax + (hva * ua - hvL * uL) * ay
    momy = (hua * va - huL * vL) * ax + (hva * va - hvL * vL + pr) * ay
    return mass, momx, momy


@njit(cache=True, parallel=True)
def volume_flux_differencing(P, Ja1, Ja2, D2, g, out):
    """``out[v, k, i, j] = sum_m D2[i, m] G_v((i,j), (m,j)) + sum_m D2[j, m] G_v((i,j), (i,m))``."""
    K, n = P.shape[1], P.shape[2]
    for k in prange(K):
        for i in range(n):
            for j in range(n):
                a0 = a1 = a2 = a3 = a4 = a5 = 0.0
                for m in range(n):
                    if m == i:
                        continue
                    d = D2[i, m]
                    ax = 0.5 * (Ja1[0, k, i, j] + Ja1[0, k, m, j])
                    ay = 0.5 * (Ja1[1, k, i, j] + Ja1[1, k, m, j])
                    f0, f1, f2 = _layer_pair(g, P, H1, k, i, j, m, j, ax, ay)
                    f3, f4, f5 = _layer_pair(g, P, H2, k, i, j, m, j, ax, ay)
                    a0 += d * f0
                    a1 += d * f1
                    a2 += d * f2
                    a3 += d * f3
                    a4 += d * f4
                    a5 += d * f5
                for m in range(n):
                    if m == j:
                        continue
                    d = D2[j, m]
                    ax = 0.5 * (Ja2[0, k, i, j] + Ja2[0, k, i, m])
                    ay = 0.5 * (Ja2[1, k, i, j] + Ja2[1, k, i, m])
                    f0, f1, f2 = _layer_pair(g, P, H1, k, i, j, i, m, ax, ay)
                    f3, f4, f5 = _layer_pair(g, P, H2, k, i, j, i, m, ax, ay)
                    a0 += d * f0
                    a1 += d * f1
                    a2 += d * f2
                    a3 += d * f3
                    a4 += d * f4
                    a5 += d * f5
                out[0, k, i, j] = a0
                out[1, k, i, j] = a1
                out[2, k, i, j] = a2
                out[3, k, i, j] = a3
                out[4, k, i, j] = a4
                out[5, k, i, j] = a5
