"""Selects the compiled overlap kernel when it is importable.

Set ``HYBRIDGKP_PURE=1`` to force the numpy fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
pair_overlap = _kernels_py.pair_overlap
train_overlap = _kernels_py.train_overlap

if os.environ.get("HYBRIDGKP_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        BACKEND = "cython"
        pair_overlap = _compiled.pair_overlap
        train_overlap = _compiled.train_overlap

__all__ = ["BACKEND", "pair_overlap", "train_overlap"]
