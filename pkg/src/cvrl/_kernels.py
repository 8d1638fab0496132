"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation takes over. Set ``CVRL_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _recurrence_py

BACKEND = "python"
gaussian_fock_block = _recurrence_py.gaussian_fock_block

if os.environ.get("CVRL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _recurrence as _compiled
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        gaussian_fock_block = _compiled.gaussian_fock_block

IMPLEMENTATIONS = {"python": _recurrence_py.gaussian_fock_block}
try:
    from . import _recurrence as _compiled_mod

    IMPLEMENTATIONS["cython"] = _compiled_mod.gaussian_fock_block
except ImportError:
    pass
