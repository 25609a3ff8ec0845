"""Kernel backend selection.

The compiled extension is used when importable. Set ``SPECSET_KERNELS=python``
to force the numpy fallback (the test suite runs both).
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SPECSET_KERNELS", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "compiled"


def available_backends():
    names = {"python": _kernels_py}
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        names["compiled"] = _compiled
    return names


def tree_norms(X, plan):
    return _impl.tree_norms(X, *plan)


def sweep_max(T, amps, phases, dom_norms, plan):
    return _impl.sweep_max(T, amps, phases, dom_norms, *plan)
