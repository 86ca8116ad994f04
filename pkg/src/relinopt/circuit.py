"""Arithmetic circuit DAGs with explicit squaring vertices.

A circuit is a finite DAG whose vertices are inputs, outputs, additions,
multiplications, and squarings.  Additions and multiplications take two
parents, squarings one, outputs one or two, inputs none.  Circuits are
validated eagerly: construction rejects duplicate ids, unresolved or
cyclic parent references, wrong arities, outputs used as parents, and
inputs that feed nothing (unless the whole circuit is one lone input).

Vertex ids are restricted to ``[A-Za-z0-9_.~]`` so that every id can be
embedded verbatim in DOT and LP output.
"""

from __future__ import annotations

import heapq
import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping

from .errors import (
    CycleError,
    DegreeError,
    DuplicateIdError,
    FormatError,
    UnknownParentError,
)

_ID_RE = re.compile(r"^[A-Za-z0-9_.~]+$")

SEMANTICS_NAMES = ("standard", "reduced")


class VertexKind(Enum):
    INPUT = "input"
    OUTPUT = "output"
    ADD = "add"
    MUL = "mul"
    SQUARE = "square"

    @property
    def arity(self) -> tuple[int, int]:
        """Allowed (min, max) number of parents."""
        return _ARITY[self]

    @property
    def is_product(self) -> bool:
        return self in (VertexKind.MUL, VertexKind.SQUARE)


_ARITY = {
    VertexKind.INPUT: (0, 0),
    VertexKind.OUTPUT: (1, 2),
    VertexKind.ADD: (2, 2),
    VertexKind.MUL: (2, 2),
    VertexKind.SQUARE: (1, 1),
}


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: VertexKind
    parents: tuple[str, ...] = ()


@dataclass(frozen=True)
class Violation:
    """One validation finding, tied to a vertex and the rule it breaks."""

    vertex: str
    rule: str
    message: str


class Circuit:
    """Validated, effectively immutable circuit DAG.

    Vertices are kept in insertion order; ``topo_order`` is the unique
    Kahn ordering that breaks ties by vertex id, so every derived
    artifact (DOT, LP, solver output) is deterministic.
    """

    __slots__ = ("_vertices", "_children", "_topo", "_flat")

    def __init__(self, vertices: Iterable[Vertex]):
        table: dict[str, Vertex] = {}
        for v in vertices:
            if not isinstance(v.id, str) or not _ID_RE.match(v.id):
                raise FormatError(f"vertex id {v.id!r} is not a nonempty [A-Za-z0-9_.~] string")
            if v.id in table:
                raise DuplicateIdError(f"duplicate vertex id '{v.id}'")
            table[v.id] = v
        children: dict[str, list[str]] = {vid: [] for vid in table}
        normalized: dict[str, Vertex] = {}
        for v in table.values():
            v = _normalize(v)
            lo, hi = v.kind.arity
            if not lo <= len(v.parents) <= hi:
                raise DegreeError(
                    f"vertex '{v.id}' ({v.kind.value}) has {len(v.parents)} parents, expected "
                    + (f"{lo}" if lo == hi else f"{lo}..{hi}")
                )
            for p in v.parents:
                if p not in table:
                    raise UnknownParentError(f"vertex '{v.id}' references unknown parent '{p}'")
                if table[p].kind is VertexKind.OUTPUT:
                    raise DegreeError(f"vertex '{v.id}' uses output '{p}' as a parent")
                children[p].append(v.id)
            normalized[v.id] = v
        self._vertices = normalized
        self._children = {vid: tuple(kids) for vid, kids in children.items()}
        self._topo = _kahn(normalized, self._children)
        if len(normalized) > 1:
            for v in normalized.values():
                if v.kind is VertexKind.INPUT and not self._children[v.id]:
                    raise DegreeError(f"input '{v.id}' has no consumer")
        self._flat = None  # filled lazily by the kernel layer

    # -- basic queries -------------------------------------------------

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, vid: str) -> bool:
        return vid in self._vertices

    def __iter__(self) -> Iterator[Vertex]:
        return iter(self._vertices.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self._vertices == other._vertices

    def __repr__(self) -> str:
        return f"Circuit({len(self)} vertices)"

    def vertex(self, vid: str) -> Vertex:
        return self._vertices[vid]

    def ids(self) -> tuple[str, ...]:
        return tuple(self._vertices)

    def parents_of(self, vid: str) -> tuple[str, ...]:
        return self._vertices[vid].parents

    def children_of(self, vid: str) -> tuple[str, ...]:
        return self._children[vid]

    @property
    def topo_order(self) -> tuple[str, ...]:
        return self._topo

    def inputs(self) -> tuple[str, ...]:
        return tuple(v.id for v in self if v.kind is VertexKind.INPUT)

    def sinks(self) -> tuple[str, ...]:
        return tuple(v.id for v in self if not self._children[v.id])

    def ancestors_of(self, vids: Iterable[str]) -> set[str]:
        """All vertices reachable upward from ``vids``, inclusive."""
        seen: set[str] = set()
        stack = list(vids)
        while stack:
            vid = stack.pop()
            if vid in seen:
                continue
            seen.add(vid)
            stack.extend(self._vertices[vid].parents)
        return seen

    def to_records(self) -> list[dict]:
        return [
            {"id": v.id, "kind": v.kind.value, "parents": list(v.parents)}
            for v in self
        ]


def _normalize(v: Vertex) -> Vertex:
    """A multiplication of a vertex by itself is a squaring."""
    if v.kind is VertexKind.MUL and len(v.parents) == 2 and v.parents[0] == v.parents[1]:
        return Vertex(v.id, VertexKind.SQUARE, (v.parents[0],))
    return v


def _kahn(vertices: Mapping[str, Vertex], children: Mapping[str, tuple[str, ...]]) -> tuple[str, ...]:
    indeg = {vid: len(v.parents) for vid, v in vertices.items()}
    ready = [vid for vid, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        vid = heapq.heappop(ready)
        order.append(vid)
        for kid in children[vid]:
            indeg[kid] -= 1
            if indeg[kid] == 0:
                heapq.heappush(ready, kid)
    if len(order) != len(vertices):
        stuck = min(vid for vid, d in indeg.items() if d > 0)
        raise CycleError(f"cycle through vertex '{stuck}'")
    return tuple(order)


def build_circuit(records: Iterable) -> Circuit:
    """Build a circuit from vertex records.

    Accepts ``Vertex`` instances, ``(id, kind, parents)`` tuples, or dicts
    with ``id``/``kind``/``parents`` keys; kind may be a ``VertexKind`` or
    its lowercase name.
    """
    vertices = []
    for rec in records:
        if isinstance(rec, Vertex):
            vertices.append(rec)
            continue
        if isinstance(rec, dict):
            vid, kind, parents = rec.get("id"), rec.get("kind"), rec.get("parents", ())
        else:
            vid, kind, *rest = rec
            parents = rest[0] if rest else ()
        if not isinstance(kind, VertexKind):
            try:
                kind = VertexKind(kind)
            except ValueError:
                raise FormatError(f"vertex '{vid}': unknown kind {kind!r}") from None
        if isinstance(parents, str):
            raise FormatError(f"vertex '{vid}': parents must be a sequence of ids, not a string")
        vertices.append(Vertex(str(vid), kind, tuple(parents)))
    return Circuit(vertices)


def topo_order(circuit: Circuit) -> tuple[str, ...]:
    """Deterministic topological order (Kahn, ties broken by id)."""
    return circuit.topo_order


def validate(circuit: Circuit, strict: bool = False) -> list[Violation]:
    """Check degree discipline and return all violations.

    Construction already guarantees arities, acyclicity, and reference
    integrity, so in the default (lenient) mode a constructed circuit has
    no violations and fan-out is unrestricted.  ``strict`` additionally
    requires textbook out-degrees: exactly one consumer for inputs,
    additions, multiplications, and squarings, none for outputs.
    """
    violations: list[Violation] = []
    if not strict:
        return violations
    for v in circuit:
        out = len(circuit.children_of(v.id))
        if v.kind is VertexKind.OUTPUT:
            if out != 0:
                violations.append(Violation(v.id, "output-outdegree", f"output '{v.id}' has {out} consumers, expected 0"))
        elif out != 1:
            violations.append(
                Violation(
                    v.id,
                    f"{v.kind.value}-outdegree",
                    f"{v.kind.value} '{v.id}' has {out} consumers, expected exactly 1",
                )
            )
    return violations


# -- serialization -----------------------------------------------------


def circuit_to_json_dict(circuit: Circuit, semantics: str = "standard") -> dict:
    if semantics not in SEMANTICS_NAMES:
        raise FormatError(f"unknown semantics {semantics!r}")
    return {"semantics": semantics, "vertices": circuit.to_records()}


def circuit_from_json_dict(data) -> tuple[Circuit, str]:
    """Parse the documented circuit format; unknown fields are rejected."""
    if not isinstance(data, dict):
        raise FormatError("circuit file must contain a JSON object")
    extra = set(data) - {"semantics", "vertices"}
    if extra:
        raise FormatError(f"unknown top-level fields: {sorted(extra)}")
    semantics = data.get("semantics", "standard")
    if semantics not in SEMANTICS_NAMES:
        raise FormatError(f"unknown semantics {semantics!r}")
    vertices = data.get("vertices")
    if not isinstance(vertices, list):
        raise FormatError("'vertices' must be a list")
    records = []
    for rec in vertices:
        if not isinstance(rec, dict):
            raise FormatError("each vertex record must be an object")
        extra = set(rec) - {"id", "kind", "parents"}
        if extra:
            raise FormatError(f"vertex record has unknown fields: {sorted(extra)}")
        if "id" not in rec or "kind" not in rec:
            raise FormatError("each vertex record needs 'id' and 'kind'")
        records.append(rec)
    return build_circuit(records), semantics


def save_circuit(circuit: Circuit, path: str, semantics: str = "standard") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(circuit_to_json_dict(circuit, semantics), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_circuit(path: str) -> tuple[Circuit, str]:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc})") from None
    return circuit_from_json_dict(data)


_DOT_SHAPE = {
    VertexKind.INPUT: "ellipse",
    VertexKind.OUTPUT: "doubleoctagon",
    VertexKind.ADD: "box",
    VertexKind.MUL: "box",
    VertexKind.SQUARE: "box",
}


def export_dot(circuit: Circuit, lengths: Mapping[str, int] | None = None) -> str:
    """Render the circuit as Graphviz DOT text.

    Output is byte-deterministic: vertices appear in topological order,
    edges in (child topological, parent slot) order.  ``lengths`` adds a
    ``l=<n>`` annotation to each covered label.
    """
    lines = ["digraph circuit {", "  rankdir=BT;"]
    for vid in circuit.topo_order:
        v = circuit.vertex(vid)
        label = f"{vid}\\n{v.kind.value}"
        if lengths is not None and vid in lengths:
            label += f" l={lengths[vid]}"
        lines.append(f'  "{vid}" [label="{label}", shape={_DOT_SHAPE[v.kind]}];')
    for vid in circuit.topo_order:
        for p in circuit.parents_of(vid):
            lines.append(f'  "{p}" -> "{vid}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
