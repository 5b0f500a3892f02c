"""Kernel backend selection.

The hot inner loops (FIFO feasibility-set enumeration and the fluid
simulator) exist twice: a Cython extension (``bwmin.kernels._core``) and a
pure-Python fallback (``bwmin.kernels.pure``).  The compiled backend is
preferred at import time; set ``BWMIN_PURE=1`` to force the fallback.

``benchmarks/bench_kernels.py`` compares the two.
"""

import os

from . import pure

FIFO = pure.FIFO
STATIC_PRIORITY = pure.STATIC_PRIORITY
EDF = pure.EDF

if os.environ.get("BWMIN_PURE"):
    _backend = pure
else:
    try:
        from . import _core as _backend
    except ImportError:
        _backend = pure

BACKEND = _backend.BACKEND

fifo_total_burst_lower = _backend.fifo_total_burst_lower
fifo_total_burst_upper = _backend.fifo_total_burst_upper
simulate_fluid = _backend.simulate_fluid


def get_backend(name):
    """Return the named backend module ('pure' or 'compiled').

    Raises ImportError if the compiled extension is unavailable.
    """
    if name == "pure":
        return pure
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
