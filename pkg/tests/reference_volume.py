"""Vectorised numpy flux differencing, kept as an independent check on the compiled loop."""

import numpy as np


def _metric_averages(Ja1, Ja2):
    # {Ja1}_(i,m)j -> (2, K, i, m, j);  {Ja2}_i(j,m) -> (2, K, i, j, m)
    a1 = 0.5 * (Ja1[:, :, :, None, :] + Ja1[:, :, None, :, :])
    a2 = 0.5 * (Ja2[:, :, :, :, None] + Ja2[:, :, :, None, :])
    return a1, a2


_LAYERS = (("h1", "hu1", "hv1", "u1", "v1", "sq1", "p1", "up"),
           ("h2", "hu2", "hv2", "u2", "v2", "sq2", "p2", "lo"))


def _node_data(U, b, g, ratio):
    h1, h2 = U[0], U[3]
    d = dict(h1=h1, h2=h2, hu1=U[1], hv1=U[2], hu2=U[4], hv2=U[5],
             u1=U[1] / h1, v1=U[2] / h1, u2=U[4] / h2, v2=U[5] / h2,
             sq1=h1 * h1, sq2=h2 * h2, up=b + h2, lo=b + ratio * h1)
    d["p1"] = g * h1 * h1 - 0.5 * g * d["sq1"]
    d["p2"] = g * h2 * h2 - 0.5 * g * d["sq2"]
    return d


def _pair_terms(L, R, g, ax, ay):
    # two-point EC flux minus the local flux, plus the two-point nonconservative term
    for h, hu, hv, u, v, sq, p, r in _LAYERS:
        hua = (L[hu] + R[hu]) * 0.5
        hva = (L[hv] + R[hv]) * 0.5
        ua = (L[u] + R[u]) * 0.5
        va = (L[v] + R[v]) * 0.5
        ha = (L[h] + R[h]) * 0.5
        pa = g * ha * ha - 0.5 * g * ((L[sq] + R[sq]) * 0.5)
        nc = 0.5 * g * L[h] * (R[r] - L[r])
        yield (hua - L[hu]) * ax + (hva - L[hv]) * ay
        yield ((hua * ua + pa - (L[hu] * L[u] + L[p]) + nc) * ax
               + (hva * ua - L[hv] * L[u]) * ay)
        yield ((hua * va - L[hu] * L[v]) * ax
               + (hva * va + pa - (L[hv] * L[v] + L[p]) + nc) * ay)


def reference_volume(U, b, Ja1, Ja2, D2, g, ratio):
    avg1, avg2 = _metric_averages(Ja1, Ja2)
    d = _node_data(U, b, g, ratio)
    vol = np.empty_like(U)
    L = {k: a[:, :, None, :] for k, a in d.items()}
    R = {k: a[:, None, :, :] for k, a in d.items()}
    for v, G in enumerate(_pair_terms(L, R, g, avg1[0], avg1[1])):
        vol[v] = np.einsum("im,kimj->kij", D2, G)
    L = {k: a[:, :, :, None] for k, a in d.items()}
    R = {k: a[:, :, None, :] for k, a in d.items()}
    for v, G in enumerate(_pair_terms(L, R, g, avg2[0], avg2[1])):
        vol[v] += np.einsum("jm,kijm->kij", D2, G)
    return vol
