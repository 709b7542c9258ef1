"""Selects the trajectory kernel backend at import time.

The compiled extension is preferred when present; the pure numpy reference
is the fallback and the arbiter of correctness.  Both produce identical
bytes for identical keys, so the choice is invisible except in speed.
Set RDBP_BACKEND=python or RDBP_BACKEND=compiled to force one.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_requested = os.environ.get("RDBP_BACKEND")
if _requested not in (None, "", "compiled", "python"):
    raise ImportError(
        f"RDBP_BACKEND={_requested!r} is not recognized; "
        "use 'compiled' or 'python'")
if _requested == "compiled" and _compiled is None:
    raise ImportError(
        "RDBP_BACKEND=compiled, but the compiled kernels are not built; "
        "reinstall with a working C toolchain or unset RDBP_BACKEND")

if _requested == "python" or _compiled is None:
    _impl = _kernels_py
else:
    _impl = _compiled

#: Name of the backend actually in use: "compiled" or "python".
BACKEND = _impl.BACKEND_NAME

run_trajectory = _impl.run_trajectory


def available_backends() -> dict:
    """Importable backend modules by name (for benchmarks and tests)."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
