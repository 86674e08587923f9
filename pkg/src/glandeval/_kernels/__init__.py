"""Grid kernels with two interchangeable backends.

``_speedups`` is a Cython extension compiled at install time; ``_numpy`` is a
vectorized numpy/scipy fallback. The compiled backend is preferred when
importable; ``GLANDEVAL_BACKEND=python`` or ``=native`` forces a choice.

Exports: ``label_components``, ``sq_edt``, ``overlap_counts``,
``inner_boundary``, plus ``BACKEND`` (the active backend name) and
``get_backend`` for explicit access (benchmarks, parity tests).
"""

import os

from . import _numpy


def get_backend(name):
    """Return the kernel module for ``name`` ('native' or 'python')."""
    if name == "python":
        return _numpy
    if name == "native":
        from . import _speedups

        return _speedups
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends():
    names = ["python"]
    try:
        get_backend("native")
    except ImportError:
        pass
    else:
        names.insert(0, "native")
    return names


_forced = os.environ.get("GLANDEVAL_BACKEND", "").strip().lower()
if _forced:
    _active = get_backend(_forced)
    BACKEND = _forced
else:
    try:
        _active = get_backend("native")
        BACKEND = "native"
    except ImportError:
        _active = _numpy
        BACKEND = "python"

label_components = _active.label_components
sq_edt = _active.sq_edt
overlap_counts = _active.overlap_counts
inner_boundary = _active.inner_boundary
