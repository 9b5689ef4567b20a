"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set ANISOCOUNT_PURE=1 to force the pure lane.  `backend()` reports which
lane is active; both produce identical exact counts, and the benchmark
script under benchmarks/ compares their throughput.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from . import _kernels_py

_compiled = None
if os.environ.get("ANISOCOUNT_PURE") != "1":
    try:
        from . import _kernels as _compiled_module

        _compiled = _compiled_module
    except ImportError:
        _compiled = None


def backend(prefer_compiled: Optional[bool] = None) -> object:
    if prefer_compiled is False:
        return _kernels_py
    if _compiled is not None:
        return _compiled
    if prefer_compiled is True:
        raise RuntimeError("compiled kernels requested but not built")
    return _kernels_py


def backend_name() -> str:
    return "compiled" if _compiled is not None else "python"


def count_cell(exps, domain, widths, t, collect_witnesses=False,
               prefer_compiled: Optional[bool] = None):
    b = backend(prefer_compiled)
    return b.count_cell(exps, domain, widths, t, collect_witnesses)


def smooth_cell(exps, j, t, thresholds, mho, omega, w, mho_on_x=True,
                prefer_compiled: Optional[bool] = None):
    b = backend(prefer_compiled)
    return b.smooth_cell(exps, j, t, thresholds, mho, omega, w, mho_on_x)


def smooth_and_base_cell(exps, j, t, thresholds, mho, omega, w, mho_on_x=True,
                         prefer_compiled: Optional[bool] = None):
    b = backend(prefer_compiled)
    return b.smooth_and_base_cell(exps, j, t, thresholds, mho, omega, w, mho_on_x)
