"""Select the kernel backend at import time.

The compiled extension ``symsq._core`` is preferred; the numpy fallback
``symsq._core_py`` is used when the extension is missing.  Set
``SYMSQ_BACKEND=python`` (or ``cython``) to force a choice; forcing the
compiled backend raises if it was not built.
"""

import os

_choice = os.environ.get("SYMSQ_BACKEND", "auto").lower()

if _choice in ("auto", "", "cython"):
    try:
        from . import _core as kernels
    except ImportError:
        if _choice == "cython":
            raise
        from . import _core_py as kernels
elif _choice in ("python", "pure"):
    from . import _core_py as kernels
else:
    raise ValueError(f"unknown SYMSQ_BACKEND value: {_choice!r}")

BACKEND = kernels.BACKEND_NAME
