"""Hot search loops, compiled when possible.

The Cython extension ``_ckernels`` is used when it was built and imports
cleanly; otherwise the pure-Python ``_pykernels`` module is used.  Setting
``SKETCHKIT_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("SKETCHKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_backend  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled_backend = None

active = compiled_backend if compiled_backend is not None else python_backend
BACKEND: str = active.BACKEND


def available_backends():
    out = [python_backend]
    if compiled_backend is not None:
        out.append(compiled_backend)
    return out


def use_backend(name: str):
    """Switch the process-wide backend ("python" or "cython"); returns the previous name."""
    global active, BACKEND
    previous = BACKEND
    if name == "python":
        active = python_backend
    elif name == "cython":
        if compiled_backend is None:
            raise RuntimeError("compiled kernels are not available")
        active = compiled_backend
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = active.BACKEND
    return previous


def search_homs(plan, tables, budget):
    return active.search_homs(plan, tables, budget)


def enumerate_cones(diag, tables, apex):
    return active.enumerate_cones(diag, tables, apex)


def is_limit(diag, tables, apex, legs):
    return active.is_limit(diag, tables, apex, legs)
