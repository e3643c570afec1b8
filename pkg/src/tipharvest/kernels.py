"""Selection of the Bellman sweep backend.

The compiled extension is preferred when importable; the pure-numpy
fallback is used otherwise.  Set TIPHARVEST_FORCE_PY=1 to force the
fallback (the benchmark and the backend-equivalence tests do).  Both
backends implement the same arithmetic and return bit-identical iterates.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _bellman_np

try:
    from . import _bellman  # type: ignore[attr-defined]
    _HAVE_COMPILED = True
except ImportError:  # pragma: no cover - build-environment dependent
    _bellman = None
    _HAVE_COMPILED = False

__all__ = ["get_backend", "default_backend_name", "available_backends"]


def available_backends() -> list[str]:
    return ["compiled", "python"] if _HAVE_COMPILED else ["python"]


def default_backend_name() -> str:
    if os.environ.get("TIPHARVEST_FORCE_PY"):
        return "python"
    return "compiled" if _HAVE_COMPILED else "python"


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module for `name` (or the default backend)."""
    if name is None:
        name = default_backend_name()
    if name == "python":
        return _bellman_np
    if name == "compiled":
        if not _HAVE_COMPILED:
            raise RuntimeError("compiled kernel backend is not available")
        return _bellman
    raise ValueError(f"unknown kernel backend {name!r}")
