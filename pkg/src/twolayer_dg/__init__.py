"""Entropy-stable, well-balanced DGSEM for the two-layer shallow water equations.

Setting ``SOLVER_THREADS`` before the first import caps the thread pools of
the compiled volume kernel (parallel over elements) and of the linear-algebra
backend.
"""

import os as _os

_threads = _os.environ.get("SOLVER_THREADS")
if _threads and _threads.isdigit() and int(_threads) > 0:
    for _var in ("NUMBA_NUM_THREADS", "OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .dgsem import BoundaryCondition, Semidiscretization  # noqa: E402
from .mesh import build_structured_mesh, compute_metrics, load_mesh_file  # noqa: E402
from .physics import PhysicsParams, PositivityError  # noqa: E402
from .sbp import operator_set  # noqa: E402
from .timestep import TimeIntegratorConfig, run  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "Semidiscretization",
    "build_structured_mesh",
    "compute_metrics",
    "load_mesh_file",
    "PhysicsParams",
    "PositivityError",
    "operator_set",
    "TimeIntegratorConfig",
    "run",
]
