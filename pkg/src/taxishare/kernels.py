"""Kernel selection: the compiled extension when importable, else pure Python."""
import os

from ._pykernels import INF

if os.environ.get("TAXISHARE_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _pykernels as _impl

BACKEND = "compiled" if _impl.__name__.endswith("._kernels") else "python"

sssp = _impl.sssp
sssp_batched = _impl.sssp_batched
sssp_parents = _impl.sssp_parents
all_pairs = _impl.all_pairs

__all__ = ["INF", "BACKEND", "sssp", "sssp_batched", "sssp_parents", "all_pairs"]
