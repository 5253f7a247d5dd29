"""Select the integrator kernel at import time.

The compiled extension is preferred.  Setting ``HYPERLANE_PURE_PYTHON=1``
forces the pure-Python fallback, which is also used when the extension was
not built.
"""

import os

if os.environ.get("HYPERLANE_PURE_PYTHON", "") not in ("", "0"):
    from ._pykernel import integrate_kernel
    BACKEND = "python"
else:
    try:
        from ._kernel import integrate_kernel
        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._pykernel import integrate_kernel
        BACKEND = "python"

from ._pykernel import (  # noqa: E402
    BLOWUP, DECAY, EV_BLOWUP, EV_CROSSING, EV_DECAY, MAX_STEPS, REACHED_END,
    STEP_UNDERFLOW, U_CROSSED, V_CROSSED,
)

__all__ = [
    "integrate_kernel", "BACKEND", "REACHED_END", "U_CROSSED", "V_CROSSED",
    "BLOWUP", "DECAY", "STEP_UNDERFLOW", "MAX_STEPS", "EV_CROSSING",
    "EV_BLOWUP", "EV_DECAY",
]
