"""Relinearization placement solvers.

Four strategies, all exact about cost accounting:

* ``baseline_plan`` — relinearize every product down to the minimum
  length (the eager textbook strategy).
* ``brute_force_solve`` — enumerate every plan in a bounded box and
  keep the best; exponential, guarded by capacity checks.
* ``dp_solve_single_output`` — the length-indexed dynamic program for
  circuits whose non-input vertices feed at most one consumer.
* ``restricted_solve`` — brute force restricted to a marked vertex set
  (everything else pinned to zero), used to answer questions about
  specific relinearization sites.

Ties are broken identically everywhere: smaller cost, then smaller
total relinearization, then the lexicographically smallest plan vector
in topological order.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from . import _kernel
from .circuit import Circuit, VertexKind
from .costmodel import (
    CostBreakdown,
    CostMode,
    CostParams,
    LengthProfile,
    RelinPlan,
    Semantics,
    evaluate_plan,
    raw_lengths,
)
from .errors import (
    FormatError,
    MarkNotRelinearizableError,
    NotSingleOutputError,
    SearchSpaceTooLargeError,
    SolverError,
    UnknownVertexError,
)

_RELINABLE = (VertexKind.ADD, VertexKind.MUL, VertexKind.SQUARE)


@dataclass(frozen=True)
class SolveResult:
    method: str
    plan: RelinPlan
    cost: CostBreakdown
    profile: LengthProfile
    semantics: Semantics
    params: CostParams

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "semantics": self.semantics.value,
            "cost_mode": self.params.mode.value,
            "k_m": str(self.params.k_m),
            "k_r": str(self.params.k_r),
            "plan": self.plan.to_json_dict(),
            "cost": self.cost.to_json_dict(),
            "lengths": {vid: self.profile[vid] for vid in sorted(self.profile)},
        }


def save_result(result: SolveResult, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_result_lengths(path: str) -> dict[str, int]:
    """Read the resolved lengths out of a saved solve result."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc})") from None
    lengths = data.get("lengths") if isinstance(data, dict) else None
    if not isinstance(lengths, dict):
        raise FormatError(f"{path}: missing 'lengths' mapping")
    return {str(k): int(v) for k, v in lengths.items()}


def _finish(
    method: str,
    circuit: Circuit,
    plan: RelinPlan,
    params: CostParams,
    semantics: Semantics,
    scaled_cost: int | None = None,
) -> SolveResult:
    cost, profile = evaluate_plan(circuit, plan, params, semantics)
    if scaled_cost is not None:
        a, b, d = params.scaled()
        if cost.total != Fraction(scaled_cost, d):
            raise SolverError(
                f"internal cost mismatch for method '{method}': "
                f"{cost.total} != {Fraction(scaled_cost, d)}"
            )
    return SolveResult(method, plan, cost, profile, semantics, params)


def baseline_plan(circuit: Circuit, semantics: Semantics = Semantics.STANDARD) -> RelinPlan:
    """Relinearize every product down to the minimum length.

    Amounts are computed with all upstream vertices already reduced, so
    every multiplication and squaring sees minimum-length parents except
    where additions cannot shrink below the minimum anyway.
    """
    min_len = semantics.min_length
    lengths: dict[str, int] = {}
    amounts: dict[str, int] = {}
    for vid in circuit.topo_order:
        v = circuit.vertex(vid)
        if v.kind is VertexKind.INPUT:
            lengths[vid] = semantics.input_length
        elif v.kind is VertexKind.ADD:
            lengths[vid] = max(min_len, max(lengths[p] for p in v.parents))
        elif v.kind is VertexKind.OUTPUT:
            lengths[vid] = max(lengths[p] for p in v.parents)
        else:
            l1 = lengths[v.parents[0]]
            l2 = lengths[v.parents[-1]]
            amounts[vid] = semantics.product_length(l1, l2) - min_len
            lengths[vid] = min_len
    return RelinPlan(amounts)


def _search(
    circuit: Circuit,
    maxx: list[int],
    params: CostParams,
    semantics: Semantics,
    threads: int,
) -> tuple[int, list[int]]:
    """Run the enumeration kernel, optionally partitioned across threads
    on the first free vertex.  Returns (scaled cost, x vector)."""
    flat = _kernel.flatten(circuit)
    a, b, _ = params.scaled()
    prose = params.mode is CostMode.PROSE
    args = (
        flat.kind,
        flat.p1,
        flat.p2,
        maxx,
        semantics.input_length,
        semantics.min_length,
        semantics.product_sub,
        prose,
        a,
        b,
    )
    free = [i for i, m in enumerate(maxx) if m > 0]
    chunks = min(threads, maxx[free[0]] + 1) if free else 1
    if chunks <= 1:
        found, cost, sumx, plan = _kernel.impl.search_min(*args, -1, 0, 0)
        results = [(found, cost, sumx, plan)]
    else:
        d0 = free[0]
        size = maxx[d0] + 1
        bounds = [(size * c // chunks, size * (c + 1) // chunks) for c in range(chunks)]
        with ThreadPoolExecutor(max_workers=chunks) as pool:
            results = list(pool.map(lambda w: _kernel.impl.search_min(*args, d0, w[0], w[1]), bounds))
    best = None
    for found, cost, sumx, plan in results:
        if found and (best is None or (cost, sumx) < (best[0], best[1])):
            best = (cost, sumx, plan)
    if best is None:
        raise SolverError("no feasible plan in the searched region")
    return best[0], list(best[2])


def _plan_from_x(flat: _kernel.FlatCircuit, xs: list[int]) -> RelinPlan:
    return RelinPlan({flat.ids[i]: x for i, x in enumerate(xs) if x})


def brute_force_solve(
    circuit: Circuit,
    params: CostParams,
    semantics: Semantics = Semantics.STANDARD,
    max_free: int = 10,
    max_plans: int = 2_000_000,
    threads: int = 1,
) -> SolveResult:
    """Globally optimal plan by bounded exhaustive enumeration.

    Each relinearizable vertex ranges over ``[0, min(raw, |V|) - min]``
    where ``raw`` is its zero-plan length.  Raises
    ``SearchSpaceTooLargeError`` when more than ``max_free`` vertices
    have a nonzero range or the plan count would exceed ``max_plans``.
    """
    flat = _kernel.flatten(circuit)
    raw = raw_lengths(circuit, semantics)
    n = len(circuit)
    min_len = semantics.min_length
    maxx = [0] * n
    for i, vid in enumerate(flat.ids):
        if circuit.vertex(vid).kind in _RELINABLE:
            maxx[i] = max(0, min(raw[vid], n) - min_len)
    free = sum(1 for m in maxx if m)
    count = prod(m + 1 for m in maxx)
    if free > max_free:
        raise SearchSpaceTooLargeError(
            f"{free} relinearizable vertices with nonzero range exceed the cap of "
            f"{max_free} (about {count} plans)"
        )
    if count > max_plans:
        raise SearchSpaceTooLargeError(f"{count} candidate plans exceed the cap of {max_plans}")
    scaled, xs = _search(circuit, maxx, params, semantics, threads)
    return _finish("brute", circuit, _plan_from_x(flat, xs), params, semantics, scaled)


def restricted_solve(
    circuit: Circuit,
    marks: list[str],
    params: CostParams,
    semantics: Semantics = Semantics.STANDARD,
    per_mark_max: int = 1,
    max_plans: int = 2_000_000,
    threads: int = 1,
) -> SolveResult:
    """Optimal plan among those that relinearize only ``marks``.

    Marks must be multiplications or squarings; each may take any amount
    in ``[0, per_mark_max]``, every other vertex is pinned to zero.
    """
    if per_mark_max < 1:
        raise SolverError("per_mark_max must be at least 1")
    flat = _kernel.flatten(circuit)
    maxx = [0] * len(circuit)
    for vid in dict.fromkeys(marks):
        if vid not in circuit:
            raise UnknownVertexError(f"mark '{vid}' is not in the circuit")
        kind = circuit.vertex(vid).kind
        if not kind.is_product:
            raise MarkNotRelinearizableError(f"mark '{vid}' is a {kind.value}, not a mul/square")
        maxx[flat.pos[vid]] = per_mark_max
    count = prod(m + 1 for m in maxx)
    if count > max_plans:
        raise SearchSpaceTooLargeError(f"{count} candidate plans exceed the cap of {max_plans}")
    scaled, xs = _search(circuit, maxx, params, semantics, threads)
    return _finish("restricted", circuit, _plan_from_x(flat, xs), params, semantics, scaled)


# -- dynamic program ----------------------------------------------------


@dataclass(frozen=True)
class DpTable:
    """Inspectable DP state: minimal cost of the cone under each vertex
    for each admissible resolved length, with the chosen parent lengths."""

    costs: dict[tuple[str, int], Fraction]
    relin: dict[tuple[str, int], int]
    choices: dict[tuple[str, int], tuple[int, ...]]


def _dp_arrays(circuit: Circuit, params: CostParams, semantics: Semantics):
    for vid in circuit.ids():
        v = circuit.vertex(vid)
        if v.kind is not VertexKind.INPUT and len(circuit.children_of(vid)) > 1:
            raise NotSingleOutputError(f"vertex '{vid}' feeds {len(circuit.children_of(vid))} consumers")
    flat = _kernel.flatten(circuit)
    raw = raw_lengths(circuit, semantics)
    n = len(circuit)
    min_len = semantics.min_length
    hi = [0] * n
    for i, vid in enumerate(flat.ids):
        if circuit.vertex(vid).kind is VertexKind.INPUT:
            hi[i] = semantics.input_length
        else:
            hi[i] = max(min_len, min(raw[vid], n))
    a, b, _ = params.scaled()
    tables = _kernel.impl.dp_tables(
        flat.kind,
        flat.p1,
        flat.p2,
        hi,
        semantics.input_length,
        min_len,
        semantics.product_sub,
        params.mode is CostMode.PROSE,
        a,
        b,
    )
    return flat, hi, tables


def dp_table(circuit: Circuit, params: CostParams, semantics: Semantics = Semantics.STANDARD) -> DpTable:
    """Expose the DP tables keyed by (vertex id, resolved length)."""
    flat, hi, (M, S, B1, B2) = _dp_arrays(circuit, params, semantics)
    _, _, d = params.scaled()
    costs: dict[tuple[str, int], Fraction] = {}
    relin: dict[tuple[str, int], int] = {}
    choices: dict[tuple[str, int], tuple[int, ...]] = {}
    inf = _kernel.impl.INF
    for i, vid in enumerate(flat.ids):
        for length in range(semantics.min_length, hi[i] + 1):
            if M[i][length] >= inf:
                continue
            key = (vid, length)
            costs[key] = Fraction(int(M[i][length]), d)
            relin[key] = int(S[i][length])
            l1, l2 = int(B1[i][length]), int(B2[i][length])
            choices[key] = tuple(v for v in (l1, l2) if v >= 0)
    return DpTable(costs, relin, choices)


def dp_solve_single_output(
    circuit: Circuit,
    params: CostParams,
    semantics: Semantics = Semantics.STANDARD,
) -> SolveResult:
    """Optimal plan via the length-indexed dynamic program.

    Requires every non-input vertex to feed at most one consumer (inputs
    may fan out freely); disjoint cones are solved independently, multi-
    sink circuits sum their sinks.  Resolved lengths are searched in
    ``[min, min(raw, |V|)]`` per vertex, which covers the optimum for
    two-parent operations.
    """
    if len(circuit) == 0:
        return _finish("dp", circuit, RelinPlan(), params, semantics)
    flat, hi, (M, S, B1, B2) = _dp_arrays(circuit, params, semantics)
    min_len = semantics.min_length
    kindv = flat.kind.tolist()
    p1v = flat.p1.tolist()
    p2v = flat.p2.tolist()
    xs = [0] * len(circuit)
    total_scaled = 0
    sub1 = semantics.product_sub
    for vid in circuit.sinks():
        i = flat.pos[vid]
        best_l = -1
        best = None
        for length in range(min_len, hi[i] + 1):
            cand = (int(M[i][length]), int(S[i][length]))
            if cand[0] < _kernel.impl.INF and (best is None or cand < best):
                best = cand
                best_l = length
        if best is None:
            raise SolverError(f"no feasible length assignment at sink '{vid}'")
        total_scaled += best[0]
        stack = [(i, best_l)]
        while stack:
            v, length = stack.pop()
            k = kindv[v]
            if k == _kernel.CODE_INPUT:
                continue
            l1 = int(B1[v][length])
            l2 = int(B2[v][length])
            if k == _kernel.CODE_OUTPUT:
                if l2 < 0:
                    stack.append((p1v[v], l1))
                else:
                    stack.append((p1v[v], l1))
                    stack.append((p2v[v], l2))
                continue
            if k == _kernel.CODE_SQUARE:
                xs[v] = (2 * l1 - sub1) - length
                stack.append((p1v[v], l1))
                continue
            if k == _kernel.CODE_ADD:
                xs[v] = max(l1, l2) - length
            else:
                xs[v] = (l1 + l2 - sub1) - length
            stack.append((p1v[v], l1))
            stack.append((p2v[v], l2))
    return _finish("dp", circuit, _plan_from_x(flat, xs), params, semantics, total_scaled)
