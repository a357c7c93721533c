"""Exact LP backend selection.

The compiled GMP kernel is used when it imports; otherwise the pure-Python
``Fraction`` simplex. Set ``NASHFLOW_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _simplex_py

if os.environ.get("NASHFLOW_PURE_PYTHON"):
    _fast = None
else:
    try:
        from . import _simplex as _fast
    except ImportError:
        _fast = None

if _fast is not None:
    solve_lp = _fast.solve_lp
    BACKEND = "gmp"
else:
    solve_lp = _simplex_py.solve_lp
    BACKEND = "python"

solve_lp_python = _simplex_py.solve_lp
solve_lp_compiled = _fast.solve_lp if _fast is not None else None

IncrementalLP = _fast.IncrementalLP if _fast is not None else _simplex_py.IncrementalLP
IncrementalLPPython = _simplex_py.IncrementalLP
