"""Select the crossing kernel at import time.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``HOCPOLES_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the pure-Python kernel is used.  Both produce identical
state.
"""

import os

from . import _kernel_py

_force_pure = os.environ.get("HOCPOLES_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_pure:
        raise ImportError("pure-Python kernel requested")
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

if _compiled is not None:
    ingest_block = _compiled.ingest_block
    BACKEND = "cython"
else:
    ingest_block = _kernel_py.ingest_block
    BACKEND = "python"

KERNELS = {"python": _kernel_py.ingest_block}
if _compiled is not None:
    KERNELS["cython"] = _compiled.ingest_block
