"""Select the compiled kernels when available, else the numpy fallback.

Set ``JJBELL_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

pure = _kernels_py

if os.environ.get("JJBELL_PURE_PYTHON"):
    kernels = _kernels_py
    NAME = "python"
else:
    try:
        from . import _kernels as kernels

        NAME = "cython"
    except ImportError:
        kernels = _kernels_py
        NAME = "python"

compiled = kernels if NAME == "cython" else None
