"""Select the compiled kernels when available, else the numpy fallback.

Set ``PBSSP_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
if os.environ.get("PBSSP_PURE_PYTHON") != "1":
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _fallback
    else:
        BACKEND = "compiled"
else:
    _impl = _fallback

eg_solve = _impl.eg_solve
speg_run = _impl.speg_run
ogda_run = _impl.ogda_run

EUCLID = _fallback.EUCLID
ENTROPIC = _fallback.ENTROPIC
REALS, BOX, SIMPLEX = _fallback.REALS, _fallback.BOX, _fallback.SIMPLEX
