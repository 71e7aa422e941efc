"""Backend selection for the greedy-selection kernels.

Prefers the compiled extension; falls back to the NumPy implementation.
Set GRFACTIVE_BACKEND=python to force the fallback (used by tests and
benchmarks to compare the two).
"""

import os

from . import _fast_py

if os.environ.get("GRFACTIVE_BACKEND", "").lower() == "python":
    _impl = _fast_py
    BACKEND = "python"
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _fast_py
        BACKEND = "python"

candidate_reductions = _impl.candidate_reductions
downdate = _impl.downdate
