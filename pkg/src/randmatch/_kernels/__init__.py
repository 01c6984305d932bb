"""Solver kernel backend selection.

The compiled extension is preferred; the pure numpy module is the fallback.
Set RANDMATCH_PURE=1 to force the fallback (used by the benchmark and the
backend-parity tests).  Both expose the same four functions with identical
contracts: hungarian, greedy, auction, ssp_transport.
"""

import os

if os.environ.get("RANDMATCH_PURE", "").strip().lower() in ("1", "true", "yes"):
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _pure as _impl

        BACKEND = "pure"

hungarian = _impl.hungarian
greedy = _impl.greedy
auction = _impl.auction
ssp_transport = _impl.ssp_transport

__all__ = ["BACKEND", "hungarian", "greedy", "auction", "ssp_transport"]
