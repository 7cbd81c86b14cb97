"""Backend selection for the hot loops.

The compiled extension is used when it was built and ``GAUSSREG_PURE`` is
not set; otherwise the numpy fallback in ``_kernels_py`` is used. Both
produce identical results.
"""

import os

from . import _kernels_py

if os.environ.get("GAUSSREG_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

fisher_yates = _impl.fisher_yates
batch_abs_deviation = _impl.batch_abs_deviation
smooth5 = _impl.smooth5
circular_autocorr_direct = _impl.circular_autocorr_direct


def backends():
    """Return the available kernel modules keyed by name."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["compiled"] = _kernels
    return found
