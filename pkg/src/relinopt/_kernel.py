"""Kernel backend selection and circuit flattening.

The compiled Cython kernel is preferred when importable; the pure-Python
twin is the fallback.  ``RELINOPT_BACKEND=python`` or
``RELINOPT_BACKEND=compiled`` overrides the choice (the latter raises if
the extension is missing, rather than silently degrading).
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

from .circuit import Circuit, VertexKind

KIND_CODE = {
    VertexKind.INPUT: 0,
    VertexKind.OUTPUT: 1,
    VertexKind.ADD: 2,
    VertexKind.MUL: 3,
    VertexKind.SQUARE: 4,
}

CODE_INPUT, CODE_OUTPUT, CODE_ADD, CODE_MUL, CODE_SQUARE = 0, 1, 2, 3, 4


def _load_backend():
    choice = os.environ.get("RELINOPT_BACKEND", "").strip().lower()
    if choice in ("python", "pure", "py"):
        from . import _kernel_py

        return _kernel_py
    if choice in ("compiled", "native", "c"):
        from . import _kernel_c

        return _kernel_c
    try:
        from . import _kernel_c

        return _kernel_c
    except ImportError:
        from . import _kernel_py

        return _kernel_py


impl = _load_backend()


def backend_name() -> str:
    return "compiled" if impl.__name__.endswith("_kernel_c") else "pure-python"


class FlatCircuit(NamedTuple):
    """Parallel-array view of a circuit in topological order."""

    ids: tuple[str, ...]
    pos: dict[str, int]
    kind: np.ndarray  # int8
    p1: np.ndarray  # int32, -1 if absent
    p2: np.ndarray  # int32, -1 if absent; squares repeat p1


def flatten(circuit: Circuit) -> FlatCircuit:
    flat = circuit._flat
    if flat is not None:
        return flat
    order = circuit.topo_order
    pos = {vid: i for i, vid in enumerate(order)}
    n = len(order)
    kind = np.empty(n, dtype=np.int8)
    p1 = np.full(n, -1, dtype=np.int32)
    p2 = np.full(n, -1, dtype=np.int32)
    for i, vid in enumerate(order):
        v = circuit.vertex(vid)
        kind[i] = KIND_CODE[v.kind]
        parents = v.parents
        if parents:
            p1[i] = pos[parents[0]]
            if len(parents) == 2:
                p2[i] = pos[parents[1]]
            elif v.kind is VertexKind.SQUARE:
                p2[i] = pos[parents[0]]
    flat = FlatCircuit(order, pos, kind, p1, p2)
    circuit._flat = flat
    return flat
