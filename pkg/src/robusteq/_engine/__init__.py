"""Iteration engine with a compiled core and a pure-Python twin.

The hot path of every experiment is the per-step recursion (mirror step,
feedback draw, dual update) repeated for 10^5 steps across hundreds of
seeded runs.  Both backends implement the same ``advance_chunk`` kernel,
expression for expression, consuming pregenerated draw blocks; the compiled
one is built from ``_core.pyx`` at install time.  Selection happens here at
import, overridable with ROBUST_EQ_ENGINE=compiled|pure (the ``auto``
default prefers the compiled core when present).
"""

import os

from . import pure

_FORCED = os.environ.get("ROBUST_EQ_ENGINE", "auto").lower()

_compiled = None
if _FORCED in ("auto", "compiled"):
    try:
        from . import _core as _compiled  # type: ignore[attr-defined]
    except ImportError:
        if _FORCED == "compiled":
            raise
        _compiled = None

if _FORCED == "pure" or _compiled is None:
    kernels = pure
    BACKEND = "pure"
else:
    kernels = _compiled
    BACKEND = "compiled"


def backend_name():
    return BACKEND


def available_backends():
    names = ["pure"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get_kernels(name=None):
    if name in (None, "auto"):
        return kernels
    if name == "pure":
        return pure
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled engine core is not built")
        return _compiled
    raise ValueError(f"unknown engine backend '{name}'")
