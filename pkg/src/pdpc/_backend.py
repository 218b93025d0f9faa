"""Kernel backend selection.

The compiled extension is used when it imports; ``PDPC_PURE_PYTHON=1``
forces the numpy fallback. Tests and the benchmark reach both explicitly
through :func:`get`.
"""

from __future__ import annotations

import os

from . import _pykernels

NAMES = ("compiled", "python")

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def available() -> list[str]:
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get(name: str | None = None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return active
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; "
                              "run `pip install -e . --no-build-isolation`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def _select():
    if os.environ.get("PDPC_PURE_PYTHON", "") not in ("", "0"):
        return _pykernels
    return _compiled if _compiled is not None else _pykernels


active = _select()


def use(name: str) -> None:
    """Switch the process-wide active backend."""
    global active
    active = get(name)

