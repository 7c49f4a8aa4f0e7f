"""Kernel backend selection.

``kernels`` is the compiled extension when it imports, otherwise the
pure-Python module. ``FROGLAB_BACKEND`` set to ``python`` or ``compiled``
overrides the automatic choice (``compiled`` raises if unavailable).
"""

import importlib
import os

_MODULES = {"compiled": "froglab._core", "python": "froglab._pykernels"}


def load(name):
    if name not in _MODULES:
        raise ValueError(f"unknown backend {name!r}; expected one of {sorted(_MODULES)}")
    return importlib.import_module(_MODULES[name])


def available():
    names = []
    for name in _MODULES:
        try:
            load(name)
        except ImportError:
            continue
        names.append(name)
    return names


def _select():
    forced = os.environ.get("FROGLAB_BACKEND", "").strip().lower()
    if forced:
        return forced, load(forced)
    try:
        return "compiled", load("compiled")
    except ImportError:
        return "python", load("python")


BACKEND, kernels = _select()
