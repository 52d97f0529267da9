"""Kernel backend selection.

The compiled extension is used when it imports; set ``CMCBAR_BACKEND=python``
to force the pure-Python fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("CMCBAR_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

flux_stencil = _impl.flux_stencil
rk4_flux = _impl.rk4_flux

BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl
