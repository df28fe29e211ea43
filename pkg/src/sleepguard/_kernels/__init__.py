"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The Cython extension ``_speedups`` is preferred when importable; otherwise
(or when the environment variable ``SLEEPGUARD_PURE`` is set to a non-empty
value) the numpy implementation in ``_pure`` is used. Both expose the same
functions; ``implementation()`` reports which one is active.

Callers are expected to pass float64/int64 arrays and uint8 masks: the
``active`` mask is mutated in place by ``accrue_spans``/``point_debits``.
"""

from __future__ import annotations

import os

from . import _pure


def _select():
    if os.environ.get("SLEEPGUARD_PURE"):
        return _pure
    try:
        from . import _speedups
        return _speedups
    except ImportError:
        return _pure


_impl = _select()

build_adjacency = _impl.build_adjacency
elect_heads = _impl.elect_heads
assign_members = _impl.assign_members
accrue_spans = _impl.accrue_spans
point_debits = _impl.point_debits


def implementation() -> str:
    """'compiled' when the Cython kernels are active, else 'pure'."""
    return _impl.IMPLEMENTATION


def available_implementations():
    """All importable kernel modules, compiled first."""
    impls = []
    try:
        from . import _speedups
        impls.append(_speedups)
    except ImportError:
        pass
    impls.append(_pure)
    return impls
