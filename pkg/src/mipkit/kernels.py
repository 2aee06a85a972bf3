"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``MIPKIT_PURE=1`` to force the fallback (used by the benchmark and by the
test-suite to exercise both paths).
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
collect = _pykernels.collect
sparse_vec_times = _pykernels.sparse_vec_times

if os.environ.get("MIPKIT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        _ckernels = None
    if _ckernels is not None:
        collect = _ckernels.collect
        sparse_vec_times = _ckernels.sparse_vec_times
        BACKEND = "cython"

python_collect = _pykernels.collect
python_sparse_vec_times = _pykernels.sparse_vec_times
