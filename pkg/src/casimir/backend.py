"""Backend selection for the stepping kernels.

The compiled extension is preferred when present; setting the environment
variable CASIMIR_PURE_PYTHON to a nonempty value (other than "0") forces the
numpy fallback.  Both implementations share one calling convention and are
cross-checked in the test suite.
"""

import os

_forced = os.environ.get("CASIMIR_PURE_PYTHON", "") not in ("", "0")

if _forced:
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"

rk4_full = _impl.rk4_full
rk4_linear = _impl.rk4_linear


def backend_name() -> str:
    """Name of the kernel implementation selected at import time."""
    return BACKEND
