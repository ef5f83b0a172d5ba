"""Backend selection for the inner loops.

The compiled extension is used when importable; set ``POLYFOCK_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
radial_table = _pykernels.radial_table
assemble = _pykernels.assemble

if os.environ.get("POLYFOCK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        radial_table = _ckernels.radial_table
        assemble = _ckernels.assemble

__all__ = ["BACKEND", "radial_table", "assemble"]
