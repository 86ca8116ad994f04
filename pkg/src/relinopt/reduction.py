"""Gadget circuits and the knapsack-to-placement reduction.

All gadgets live in reduced semantics with prose cost accounting and
``k_m = 1``.  Two primitive families:

* ``length_gadget(k)`` — a squaring chain with skip multiplications
  whose designated vertex is the first squaring; shrinking its length
  from 2 to 1 shrinks the gadget output's length by exactly ``k``.
* ``cost_gadget(lam)`` — a squaring chain with multiplication taps onto
  a shared fresh input; the same shrink lowers total multiplication
  cost by exactly ``lam`` while leaving all other lengths' roles intact.

Combinators assemble gadgets (sum/product of single-sink circuits,
sink-to-input concatenation, repetition above a shared core, and gluing
along isomorphic ancestor closures).  ``build_reduction`` composes them
into a circuit whose restricted relinearization optimum encodes the
0/1-knapsack optimum: leaving mark ``i`` unrelinearized both "uses"
weight ``w_i`` against a capacity gate and "earns" value ``v_i`` through
calibrated amplification, so selections decode as ``length - 1`` at the
marks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product as _bits

from .circuit import Circuit, Vertex, VertexKind
from .costmodel import CostMode, RelinPlan, Semantics, cost_units, propagate_lengths
from .errors import (
    ArityMismatchError,
    FormatError,
    GadgetError,
    LengthOutOfRangeError,
    MultipleSinksError,
    NotIsomorphicError,
    TooManyItemsError,
    UnknownVertexError,
)

_REDUCED = Semantics.REDUCED


# -- knapsack instances --------------------------------------------------


@dataclass(frozen=True)
class KnapsackInstance:
    """0/1 knapsack: positive integer values/weights, capacity >= 1."""

    values: tuple[int, ...]
    weights: tuple[int, ...]
    capacity: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.values) != len(self.weights):
            raise FormatError("values and weights must have the same length")
        for name, seq in (("value", self.values), ("weight", self.weights)):
            for entry in seq:
                if not isinstance(entry, int) or isinstance(entry, bool) or entry < 1:
                    raise FormatError(f"every {name} must be a positive integer, got {entry!r}")
        if not isinstance(self.capacity, int) or self.capacity < 1:
            raise FormatError(f"capacity must be a positive integer, got {self.capacity!r}")

    def __len__(self) -> int:
        return len(self.values)

    def normalized(self) -> tuple["KnapsackInstance", tuple[int, ...]]:
        """Drop items heavier than the capacity (they can never be
        selected); returns the surviving instance and original indices."""
        kept = tuple(i for i, w in enumerate(self.weights) if w <= self.capacity)
        inst = KnapsackInstance(
            tuple(self.values[i] for i in kept),
            tuple(self.weights[i] for i in kept),
            self.capacity,
        )
        return inst, kept

    def to_json_dict(self) -> dict:
        return {
            "values": list(self.values),
            "weights": list(self.weights),
            "capacity": self.capacity,
        }

    @classmethod
    def from_json_dict(cls, data) -> "KnapsackInstance":
        if not isinstance(data, dict):
            raise FormatError("knapsack file must contain a JSON object")
        extra = set(data) - {"values", "weights", "capacity"}
        if extra:
            raise FormatError(f"unknown fields: {sorted(extra)}")
        try:
            return cls(tuple(data["values"]), tuple(data["weights"]), data["capacity"])
        except KeyError as exc:
            raise FormatError(f"missing field {exc}") from None


def load_knapsack(path: str) -> KnapsackInstance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc})") from None
    return KnapsackInstance.from_json_dict(data)


def knapsack_brute_force(instance: KnapsackInstance, max_items: int = 20) -> tuple[int, tuple[int, ...]]:
    """Exact optimum by 2^n enumeration (n <= ``max_items``).

    Ties resolve to the lexicographically smallest selection vector.
    """
    n = len(instance)
    if n > max_items:
        raise TooManyItemsError(f"{n} items exceed the exhaustive cap of {max_items}")
    best_value = 0
    best_sel: tuple[int, ...] = (0,) * n
    for sel in _bits((0, 1), repeat=n):
        weight = sum(w for w, s in zip(instance.weights, sel) if s)
        if weight > instance.capacity:
            continue
        value = sum(v for v, s in zip(instance.values, sel) if s)
        if value > best_value:
            best_value = value
            best_sel = sel
    return best_value, best_sel


# -- gadget primitives ----------------------------------------------------


@dataclass(frozen=True)
class GadgetCircuit:
    """A circuit with a designated relinearization site.

    ``kind`` is ``"length"`` (shrinking the designated vertex from
    length 2 to 1 shrinks the output length by ``target``) or ``"cost"``
    (the same shrink lowers total prose multiplication cost by
    ``target``).
    """

    circuit: Circuit
    designated: str
    output: str
    kind: str
    target: int


def _measure_output_drop(circuit: Circuit, designated: str, output: str) -> tuple[int, int]:
    base = propagate_lengths(circuit, RelinPlan(), _REDUCED)
    bent = propagate_lengths(circuit, RelinPlan({designated: 1}), _REDUCED)
    return base[output], base[output] - bent[output]


def _measure_cost_drop(circuit: Circuit, designated: str) -> int:
    base, _ = cost_units(circuit, RelinPlan(), _REDUCED, CostMode.PROSE)
    bent, _ = cost_units(circuit, RelinPlan({designated: 1}), _REDUCED, CostMode.PROSE)
    return base - bent


def length_gadget(k: int, prefix: str = "L") -> GadgetCircuit:
    """Build a gadget whose output length is ``k`` times the designated
    vertex's length: a chain of ``floor(log2 k) + 1`` squarings plus one
    skip multiplication per remaining set bit of ``k``.
    """
    if not isinstance(k, int) or k < 1:
        raise GadgetError(f"length sensitivity must be a positive integer, got {k!r}")
    src = f"{prefix}_in"
    vertices = [Vertex(src, VertexKind.INPUT)]
    m = k.bit_length() - 1
    prev = src
    for j in range(1, m + 2):
        cid = f"{prefix}_c{j}"
        vertices.append(Vertex(cid, VertexKind.SQUARE, (prev,)))
        prev = cid
    designated = f"{prefix}_c1"
    out = f"{prefix}_c{m + 1}"
    for j in range(m):
        if k >> j & 1:
            tid = f"{prefix}_t{j}"
            vertices.append(Vertex(tid, VertexKind.MUL, (out, f"{prefix}_c{j + 1}")))
            out = tid
    circuit = Circuit(vertices)
    base_out, drop = _measure_output_drop(circuit, designated, out)
    if drop != k or base_out != 2 * k:
        raise GadgetError(f"length gadget for k={k} failed verification (drop {drop}, output {base_out})")
    return GadgetCircuit(circuit, designated, out, "length", k)


def cost_gadget(lam: int, prefix: str = "C") -> GadgetCircuit:
    """Build a gadget whose total prose multiplication cost drops by
    exactly ``lam`` when the designated squaring shrinks from 2 to 1.

    A chain of ``t = floor(log2(lam + 2))`` squarings contributes
    ``2^t - 2``; the remainder is made up by multiplication taps from
    chain stages onto one shared fresh input (each tap at stage ``j``
    contributes ``2^(j-1)``).
    """
    if not isinstance(lam, int) or lam < 0:
        raise GadgetError(f"cost sensitivity must be a nonnegative integer, got {lam!r}")
    src = f"{prefix}_in"
    designated = f"{prefix}_c1"
    vertices = [Vertex(src, VertexKind.INPUT), Vertex(designated, VertexKind.SQUARE, (src,))]
    top = designated
    if lam > 0:
        t = (lam + 2).bit_length() - 1
        for j in range(2, t + 1):
            cid = f"{prefix}_c{j}"
            vertices.append(Vertex(cid, VertexKind.SQUARE, (f"{prefix}_c{j - 1}",)))
            top = cid
        remainder = lam - (2**t - 2)
        if remainder > 0:
            aux = f"{prefix}_aux"
            vertices.append(Vertex(aux, VertexKind.INPUT))
            for j in range(1, t + 1):
                if remainder >> (j - 1) & 1:
                    vertices.append(Vertex(f"{prefix}_t{j}", VertexKind.MUL, (f"{prefix}_c{j}", aux)))
    circuit = Circuit(vertices)
    drop = _measure_cost_drop(circuit, designated)
    if drop != lam:
        raise GadgetError(f"cost gadget for lam={lam} failed verification (drop {drop})")
    return GadgetCircuit(circuit, designated, top, "cost", lam)


def _fixed_length_circuit(target: int, prefix: str) -> Circuit:
    """Single-sink circuit whose sink has exact reduced length ``target``
    under the zero plan (a squaring ladder multiplied per set bit)."""
    if target < 1:
        raise GadgetError(f"target length must be positive, got {target!r}")
    src = f"{prefix}_in"
    vertices = [Vertex(src, VertexKind.INPUT)]
    if target == 1:
        return Circuit(vertices)
    hi_bit = target.bit_length() - 1
    prev = src
    for j in range(1, hi_bit + 1):
        cid = f"{prefix}_c{j}"
        vertices.append(Vertex(cid, VertexKind.SQUARE, (prev,)))
        prev = cid
    acc = None
    for j in range(hi_bit + 1):
        if not target >> j & 1:
            continue
        piece = src if j == 0 else f"{prefix}_c{j}"
        if acc is None:
            acc = piece
        else:
            mid = f"{prefix}_m{j}"
            vertices.append(Vertex(mid, VertexKind.MUL, (acc, piece)))
            acc = mid
    return Circuit(vertices)


# -- combinators ----------------------------------------------------------


def _free_id(used: set[str], vid: str) -> str:
    if vid not in used:
        return vid
    i = 2
    while f"{vid}.{i}" in used:
        i += 1
    return f"{vid}.{i}"


def _single_sink(circuit: Circuit) -> str:
    sinks = circuit.sinks()
    if len(sinks) != 1:
        raise MultipleSinksError(f"expected one sink, found {len(sinks)}: {list(sinks)}")
    return sinks[0]


def _combine(kind: VertexKind, c1: Circuit, c2: Circuit, out_id: str | None) -> Circuit:
    s1 = _single_sink(c1)
    s2 = _single_sink(c2)
    vertices = list(c1)
    used = set(c1.ids())
    mapping: dict[str, str] = {}
    for v in c2:
        nid = _free_id(used, v.id)
        used.add(nid)
        mapping[v.id] = nid
        vertices.append(Vertex(nid, v.kind, tuple(mapping[p] for p in v.parents)))
    out = _free_id(used, out_id or ("sum" if kind is VertexKind.ADD else "prod"))
    vertices.append(Vertex(out, kind, (s1, mapping[s2])))
    return Circuit(vertices)


def combine_add(c1: Circuit, c2: Circuit, out_id: str | None = None) -> Circuit:
    """Disjoint union of two single-sink circuits joined by an addition
    (the result's length is the max of the two outputs)."""
    return _combine(VertexKind.ADD, c1, c2, out_id)


def combine_mul(c1: Circuit, c2: Circuit, out_id: str | None = None) -> Circuit:
    """Disjoint union of two single-sink circuits joined by a
    multiplication (reduced semantics: lengths add)."""
    return _combine(VertexKind.MUL, c1, c2, out_id)


def concat(c1: Circuit, c2: Circuit) -> Circuit:
    """Feed the sinks of ``c1`` into the inputs of ``c2``.

    Sinks and inputs are paired in lexicographic order and must agree in
    number; ``c2``'s inputs vanish, their consumers rewire to the paired
    sinks.
    """
    sinks = sorted(c1.sinks())
    inputs = sorted(c2.inputs())
    if len(sinks) != len(inputs):
        raise ArityMismatchError(f"{len(sinks)} sinks cannot feed {len(inputs)} inputs")
    pairing = dict(zip(inputs, sinks))
    vertices = list(c1)
    used = set(c1.ids())
    mapping: dict[str, str] = {}
    for v in c2:
        if v.id in pairing:
            mapping[v.id] = pairing[v.id]
            continue
        nid = _free_id(used, v.id)
        used.add(nid)
        mapping[v.id] = nid
        vertices.append(Vertex(nid, v.kind, tuple(mapping[p] for p in v.parents)))
    return Circuit(vertices)


def repeat_circuit(circuit: Circuit, shared: list[str], copies: int) -> Circuit:
    """Keep the ancestor closure of ``shared`` once and replicate the
    rest ``copies`` times (copy ``c`` gets id suffix ``~c``)."""
    for vid in shared:
        if vid not in circuit:
            raise UnknownVertexError(f"shared vertex '{vid}' is not in the circuit")
    if not isinstance(copies, int) or copies < 1:
        raise GadgetError(f"copies must be a positive integer, got {copies!r}")
    if copies == 1:
        return circuit
    kept = circuit.ancestors_of(shared)
    vertices = [v for v in circuit if v.id in kept]
    used = {v.id for v in vertices}
    for c in range(1, copies + 1):
        mapping: dict[str, str] = {}
        for v in circuit:
            if v.id in kept:
                continue
            nid = _free_id(used, f"{v.id}~{c}")
            used.add(nid)
            mapping[v.id] = nid
            parents = tuple(p if p in kept else mapping[p] for p in v.parents)
            vertices.append(Vertex(nid, v.kind, parents))
    return Circuit(vertices)


def glue(c1: Circuit, s1: list[str], c2: Circuit, s2: list[str]) -> Circuit:
    """Merge ``c2`` into ``c1`` by identifying the ancestor closure of
    ``s2`` with the ancestor closure of ``s1`` under the given pairing.

    The closures must be isomorphic (kinds, arities, and parent order);
    the remainder of ``c2`` is adopted with its references rewritten.
    """
    if len(s1) != len(s2) or len(set(s1)) != len(s1) or len(set(s2)) != len(s2):
        raise ArityMismatchError("gluing lists must be duplicate-free and equally long")
    for vid in s1:
        if vid not in c1:
            raise UnknownVertexError(f"glue vertex '{vid}' is not in the first circuit")
    for vid in s2:
        if vid not in c2:
            raise UnknownVertexError(f"glue vertex '{vid}' is not in the second circuit")
    anc1 = c1.ancestors_of(s1)
    anc2 = c2.ancestors_of(s2)
    mapping: dict[str, str] = {}
    work = list(zip(s2, s1))
    while work:
        b, a = work.pop()
        if b in mapping:
            if mapping[b] != a:
                raise NotIsomorphicError(f"'{b}' would map to both '{mapping[b]}' and '{a}'")
            continue
        va, vb = c1.vertex(a), c2.vertex(b)
        if va.kind is not vb.kind or len(va.parents) != len(vb.parents):
            raise NotIsomorphicError(f"'{b}' ({vb.kind.value}) does not match '{a}' ({va.kind.value})")
        mapping[b] = a
        work.extend(zip(vb.parents, va.parents))
    if len(mapping) != len(anc2) or len(set(mapping.values())) != len(anc1):
        raise NotIsomorphicError("ancestor closures are not isomorphic under the pairing")
    vertices = list(c1)
    used = set(c1.ids())
    for v in c2:
        if v.id in anc2:
            continue
        nid = _free_id(used, v.id)
        used.add(nid)
        mapping[v.id] = nid
        vertices.append(Vertex(nid, v.kind, tuple(mapping[p] for p in v.parents)))
    return Circuit(vertices)


# -- the reduction --------------------------------------------------------


def _clog2(x: int) -> int:
    """ceil(log2 x) for x >= 1."""
    return (x - 1).bit_length()


def schedule_parameters(M: int) -> tuple[int, int, int]:
    """Initial amplification schedule (T, k_r, K) for instance size M."""
    lg = math.log2(M)
    mlg = M * lg
    T = math.ceil(5 * mlg)
    k_r = 25 * math.ceil(mlg * math.log2(mlg))
    K = 6 * math.ceil(math.log2(mlg))
    return T, k_r, K


@dataclass(frozen=True)
class ReductionArtifact:
    """Everything needed to solve and decode a reduction circuit.

    ``marks[i]`` is the designated squaring for item ``i`` of the
    (normalized) instance; ``r[i]`` is the per-copy multiplication-cost
    drop of relinearizing it, ``lam[i]`` the glued cost-gadget target,
    and the identity ``K*r[i] + lam[i] + v[i] == k_r`` holds exactly.
    """

    instance: KnapsackInstance
    kept_indices: tuple[int, ...]
    circuit: Circuit
    marks: tuple[str, ...]
    M: int
    T: int
    K: int
    k_r: int
    W_prime: int
    r: tuple[int, ...]
    lam: tuple[int, ...]

    def marks_json_dict(self) -> dict:
        return {
            "marks": list(self.marks),
            "params": {
                "M": self.M,
                "T": self.T,
                "K": self.K,
                "k_r": self.k_r,
                "lambda": list(self.lam),
                "r": list(self.r),
            },
        }


def save_marks(artifact: ReductionArtifact, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(artifact.marks_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_marks(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(data, dict) or set(data) != {"marks", "params"}:
        raise FormatError(f"{path}: expected exactly 'marks' and 'params'")
    params = data["params"]
    needed = {"M", "T", "K", "k_r", "lambda", "r"}
    if not isinstance(params, dict) or set(params) != needed:
        raise FormatError(f"{path}: 'params' must contain exactly {sorted(needed)}")
    return data


def _build_block(instance: KnapsackInstance, T: int, W_prime: int) -> tuple[Circuit, list[str]]:
    """One unamplified copy: item gadgets multiplied together, capacity
    gate against an exact-length-W' ladder, then the T-amplifier."""
    gadgets = [length_gadget(w, prefix=f"w{i}") for i, w in enumerate(instance.weights)]
    prodpart = gadgets[0].circuit
    for i in range(1, len(gadgets)):
        prodpart = combine_mul(prodpart, gadgets[i].circuit, out_id=f"join{i}")
    body = combine_add(prodpart, _fixed_length_circuit(W_prime, "cap"), out_id="gate")
    amp = length_gadget(T, prefix="amp")
    block = concat(body, amp.circuit)
    return block, [g.designated for g in gadgets]


def _measure_r(block: Circuit, marks: list[str]) -> list[int]:
    """Per-copy multiplication-cost drop of relinearizing each mark.

    Measured with all other marks relinearized: normalization guarantees
    the capacity gate stays pinned in both states, so the drop is the
    exact linear coefficient of that mark over the feasible box.
    """
    all_on = RelinPlan({m: 1 for m in marks})
    mu_all, _ = cost_units(block, all_on, _REDUCED, CostMode.PROSE)
    out = []
    for i, mark in enumerate(marks):
        plan = RelinPlan({m: 1 for j, m in enumerate(marks) if j != i})
        mu, _ = cost_units(block, plan, _REDUCED, CostMode.PROSE)
        out.append(mu - mu_all)
    return out


def build_reduction(instance: KnapsackInstance, max_items: int = 20) -> ReductionArtifact:
    """Compile a knapsack instance into a placement instance.

    Starts from the logarithmic amplification schedule and repairs it
    (doubling T, recomputing k_r and K) until relinearization is worth
    exactly its calibrated amount: K*T > k_r, k_r strictly dominates any
    single unmarked site's possible savings, and every glued cost target
    is nonnegative.
    """
    normalized, kept = instance.normalized()
    n = len(normalized)
    if n == 0:
        raise GadgetError("no items remain after dropping those heavier than the capacity")
    if n > max_items:
        raise TooManyItemsError(f"{n} items exceed the reduction cap of {max_items}")
    W = normalized.capacity
    W_prime = W + sum(normalized.weights)
    M = W_prime + sum(normalized.values)
    T, k_r, K = schedule_parameters(M)
    for _ in range(64):
        block, marks = _build_block(normalized, T, W_prime)
        r = _measure_r(block, marks)
        lam = [k_r - K * ri - v for ri, v in zip(r, normalized.values)]
        budget = 4 * (T * _clog2(T) + W_prime * _clog2(W_prime))
        if K * T > k_r and k_r > budget and min(lam) >= 0:
            break
        T *= 2
        k_r = 4 * (T * _clog2(T) + W_prime * _clog2(W_prime)) + 1
        K = k_r // T + 1
    else:
        raise GadgetError("amplification schedule failed to converge")
    circuit = repeat_circuit(block, marks, K)
    for i, target in enumerate(lam):
        gadget = cost_gadget(target, prefix=f"lam{i}")
        circuit = glue(circuit, [marks[i]], gadget.circuit, [gadget.designated])
    for mark in marks:
        if circuit.vertex(mark).kind is not VertexKind.SQUARE:
            raise GadgetError(f"mark '{mark}' lost its squaring role")
    return ReductionArtifact(
        instance=normalized,
        kept_indices=kept,
        circuit=circuit,
        marks=tuple(marks),
        M=M,
        T=T,
        K=K,
        k_r=k_r,
        W_prime=W_prime,
        r=tuple(r),
        lam=tuple(lam),
    )


@dataclass(frozen=True)
class DecodedSelection:
    selection: tuple[int, ...]
    value: int


def decode_marks(marks: list[str], K: int, k_r: int, r: list[int], lam: list[int], lengths) -> DecodedSelection:
    """Read a selection out of solved mark lengths: length 2 selects,
    length 1 rejects; item values are recovered from the calibration
    identity v_i = k_r - K*r_i - lam_i."""
    selection = []
    value = 0
    for i, mark in enumerate(marks):
        try:
            length = lengths[mark]
        except KeyError:
            raise UnknownVertexError(f"result has no length for mark '{mark}'") from None
        if length not in (1, 2):
            raise LengthOutOfRangeError(f"mark '{mark}' has length {length}, expected 1 or 2")
        chosen = length - 1
        selection.append(chosen)
        value += chosen * (k_r - K * r[i] - lam[i])
    return DecodedSelection(tuple(selection), value)


def decode_reduction(artifact: ReductionArtifact, result) -> DecodedSelection:
    """Decode a solve result (or anything mapping vertex id -> length)
    against the artifact's marks."""
    lengths = getattr(result, "profile", result)
    return decode_marks(
        list(artifact.marks), artifact.K, artifact.k_r, list(artifact.r), list(artifact.lam), lengths
    )
