"""Kernel backend selection.

The compiled extension is preferred when it imports; otherwise the numpy
fallback is used. ``RBTENSOR_BACKEND=python`` (or ``compiled``) forces a
choice at import time, and :func:`use` switches at runtime.
"""
import contextlib
import logging
import os

from rbtensor import _pykernels

log = logging.getLogger(__name__)

try:
    from rbtensor import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels

_state = {"kernels": _ckernels if _ckernels is not None else _pykernels, "workers": 1}

_requested = os.environ.get("RBTENSOR_BACKEND")
if _requested:
    if _requested not in _BACKENDS:
        log.warning("backend %r unavailable, using %s", _requested, _state["kernels"].NAME)
    else:
        _state["kernels"] = _BACKENDS[_requested]


def available():
    """Names of the importable backends, compiled first when present."""
    return sorted(_BACKENDS, key=lambda name: name != "compiled")


def current():
    return _state["kernels"]


def name():
    return _state["kernels"].NAME


def set_backend(backend):
    if backend not in _BACKENDS:
        raise ValueError(f"unknown or unavailable backend {backend!r}; have {available()}")
    _state["kernels"] = _BACKENDS[backend]


@contextlib.contextmanager
def use(backend):
    """Temporarily switch the kernel backend."""
    previous = _state["kernels"]
    set_backend(backend)
    try:
        yield _state["kernels"]
    finally:
        _state["kernels"] = previous


def workers():
    return _state["workers"]


def set_workers(count):
    """Number of threads used for batched per-slice SVDs (1 = serial)."""
    if count < 1:
        raise ValueError("workers must be >= 1")
    _state["workers"] = int(count)
