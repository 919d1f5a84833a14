"""Backend selection for the hot loops.

The compiled extension ``qcond._kernels`` is used when it imports; otherwise
the numpy implementation in ``qcond._fallback`` takes over. Setting
``QCOND_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _fallback

fallback = _fallback

if os.environ.get("QCOND_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

compiled = _impl if BACKEND == "compiled" else None

jacobi_eigh_batch = _impl.jacobi_eigh_batch
vn_entropy_batch = _impl.vn_entropy_batch
shannon_rows = _impl.shannon_rows
curvature_series = _impl.curvature_series
