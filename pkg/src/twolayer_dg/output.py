"""Output writers and the convergence-table report."""

from __future__ import annotations

import csv
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .timestep import VAR_NAMES

__all__ = ["write_solution", "read_solution", "write_convergence_csv", "convergence_report",
           "ConvergenceReport", "CONVERGENCE_COLUMNS", "solution_filename"]

CONVERGENCE_COLUMNS = ("N",) + tuple(f"l2_{v}" for v in VAR_NAMES)
STAGNATION_SLOPE = -0.05


def solution_filename(t):
    return f"solution_{t:.6f}.txt"


def write_solution(path, semi, U):
    """``solution 1`` header, then ``elem i j x y h1 hu1 hv1 h2 hu2 hv2 b`` per node."""
    geo = semi.geometry
    K, n = geo.x.shape[0], geo.x.shape[1]
    k, i, j = (a.ravel() for a in np.meshgrid(np.arange(K), np.arange(n), np.arange(n), indexing="ij"))
    cols = [geo.x.ravel(), geo.y.ravel()] + [U[v].ravel() for v in range(6)] + [semi.bottom.ravel()]
    with open(path, "w") as fh:
        fh.write("solution 1\n")
        for row in range(k.size):
            vals = " ".join(repr(float(c[row])) for c in cols)
            fh.write(f"{k[row]} {i[row]} {j[row]} {vals}\n")


def read_solution(path):
    """Return ``(index (P, 3) int, values (P, 9))``."""
    with open(path) as fh:
        header = fh.readline().split()
        if header != ["solution", "1"]:
            raise ValueError(f"{path}: not a solution file (header {header!r})")
        rows = [line.split() for line in fh if line.strip()]
    idx = np.array([[int(v) for v in r[:3]] for r in rows], dtype=int)
    vals = np.array([[float(v) for v in r[3:]] for r in rows])
    return idx, vals


def write_convergence_csv(path, rows):
    """``rows`` are ``(N, [six L2 errors])``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CONVERGENCE_COLUMNS)
        for N, errs in rows:
            w.writerow([int(N)] + [repr(float(e)) for e in errs])


@dataclass
class ConvergenceReport:
    degrees: np.ndarray
    errors: dict
    slopes: dict
    stagnant: tuple

    def table(self):
        names = list(self.errors)
        lines = ["   N  " + "  ".join(f"{n:>11s}" for n in names)]
        for k, N in enumerate(self.degrees):
            lines.append(f"{int(N):4d}  " + "  ".join(f"{self.errors[n][k]:11.3e}" for n in names))
        lines.append("slope " + "  ".join(f"{self.slopes[n]:11.3f}" for n in names))
        return "\n".join(lines)


def convergence_report(csv_path):
    """Least-squares slope of ``log10(error)`` against ``N`` for each error column."""
    if not os.path.isfile(csv_path):
        raise FileNotFoundError(csv_path)
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        fields = reader.fieldnames or []
    if "N" not in fields:
        raise ValueError(f"{csv_path}: missing 'N' column")
    if len(rows) < 3:
        raise ValueError(f"{csv_path}: need at least 3 degrees for a slope, found {len(rows)}")
    degrees = np.array([float(r["N"]) for r in rows])
    errors, slopes, stagnant = {}, {}, []
    for name in fields:
        if name == "N":
            continue
        e = np.array([float(r[name]) for r in rows])
        if np.any(e <= 0) or not np.all(np.isfinite(e)):
            raise ValueError(f"{csv_path}: column {name} has nonpositive or non-finite errors")
        slope = float(np.polyfit(degrees, np.log10(e), 1)[0])
        errors[name], slopes[name] = e, slope
        if slope > STAGNATION_SLOPE:
            stagnant.append(name)
    if stagnant:
        warnings.warn(f"error stagnates with N for {', '.join(stagnant)}", RuntimeWarning, stacklevel=2)
    return ConvergenceReport(degrees, errors, slopes, tuple(stagnant))
