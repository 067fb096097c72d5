"""Hot-kernel backend selection.

The compiled Cython extension is preferred when importable; the pure-numpy
implementation in ``_pykernels`` is the drop-in fallback. Set
``DISCORD_BOUNDS_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and parity tests). Both backends implement the same search algorithms; values
agree to well inside every tolerance this package asserts.
"""

import os

from . import _pykernels
from ._neldermead import nelder_mead
from ._pykernels import (
    OBJ_CONCURRENCE,
    OBJ_ENTROPY,
    OBJ_NEG_MUTUAL_INFO,
    OBJ_TANGLE,
    povm_elements_from_params,
)

if os.environ.get("DISCORD_BOUNDS_PURE_PYTHON", "") not in ("", "0"):
    _backend = _pykernels
    backend_name = "python"
else:
    try:
        from . import _ckernels as _backend

        backend_name = "cython"
    except ImportError:
        _backend = _pykernels
        backend_name = "python"

cond_entropy_proj_2q = _backend.cond_entropy_proj_2q
min_proj_2q = _backend.min_proj_2q
povm_cost_2q = _backend.povm_cost_2q
min_povm_2q = _backend.min_povm_2q


def get_backend(name: str):
    """Return a specific backend module ("cython" or "python").

    Raises ImportError when the compiled backend is unavailable.
    """
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
