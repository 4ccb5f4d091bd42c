"""Spreading-simulation kernels: compiled core with pure-Python fallback.

Both backends implement the identical algorithm and consume the identical
random stream, so outcomes are bitwise-equal between them:

* per step, hyperedge infected-counts are taken from the state at the
  step start;
* infection draws happen for "eligible" nodes (susceptible with at least
  one infected incident hyperedge) in ascending node order, one uniform
  per eligible node, infecting when ``u < 1 - prod(ftable[eta])`` with the
  product over the node's incident hyperedges in CSR order;
* recovery draws follow for the nodes infected at the step start, in
  ascending node order, recovering when ``u < gamma``;
* newly infected nodes enter the infected set after recoveries resolve
  (an infection and a recovery never happen to one node in one step).

``ftable[eta]`` is the per-hyperedge survival factor ``1 - min(term, 1)``
precomputed outside the kernels, so no transcendental function is
evaluated inside them; ``clamp_eta`` is the smallest count whose term got
clamped (hyperedges at or above it are tallied per step).

The backend is chosen at import: the Cython extension when importable,
else the numpy implementation. Set ``HYPERMINE_BACKEND=python|cython`` to
force one.
"""

import os

from . import _sir_py

_forced = os.environ.get("HYPERMINE_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _sir_py
    BACKEND = "python"
else:
    try:
        from . import _sir_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise ImportError(
                "HYPERMINE_BACKEND=cython but the compiled kernel is not built"
            )
        _impl = _sir_py
        BACKEND = "python"

sir_run = _impl.sir_run
sir_final_sizes = _impl.sir_final_sizes


def available_backends():
    out = ["python"]
    try:
        from . import _sir_cy  # noqa: F401

        out.append("cython")
    except ImportError:
        pass
    return out


def get_backend(name: str):
    """Return the kernel module for an explicit backend name."""
    if name == "python":
        return _sir_py
    if name == "cython":
        from . import _sir_cy

        return _sir_cy
    raise ValueError(f"unknown backend {name!r}")
