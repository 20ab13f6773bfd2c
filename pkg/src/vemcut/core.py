"""Kernel backend selection.

The per-element projector/stabilization kernels and the triangle-fit
predicate exist twice: a Cython extension (`_speedups`) and a pure numpy
fallback (`_pycore`).  The compiled one is picked when importable; set
VEMCUT_PURE=1 to force the fallback.  `tests/test_backends.py` pins the
two to identical outputs.
"""
from __future__ import annotations

import os

from . import _pycore

STAB_BROKEN_HALF = _pycore.STAB_BROKEN_HALF
STAB_L2_EDGE = _pycore.STAB_L2_EDGE
STAB_DOF = _pycore.STAB_DOF
STAB_TANGENTIAL = _pycore.STAB_TANGENTIAL

if os.environ.get("VEMCUT_PURE", "0") == "1":
    _impl = _pycore
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _pycore
        BACKEND = "pure"

element_arrays = _impl.element_arrays
consistency_matrix = _impl.consistency_matrix
stab_matrix = _impl.stab_matrix
apex_feasible = _impl.apex_feasible
points_in_polygon = _pycore.points_in_polygon


def backend_name() -> str:
    return BACKEND
