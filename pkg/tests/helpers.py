"""Shared test machinery.

The oracle functions re-implement length propagation and cost accounting
from the written rules alone — plain dicts, no shared code with the
package's kernels — so agreement between the two is meaningful evidence.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from relinopt import Circuit, Vertex, VertexKind

# -- independent oracle ---------------------------------------------------

_SEMANTICS = {
    "standard": {"input": 2, "min": 2, "sub": 1},
    "reduced": {"input": 1, "min": 1, "sub": 0},
}


def oracle_lengths(records: list[dict], plan: dict[str, int], semantics: str) -> dict[str, int]:
    """Forward length recurrence on raw vertex records.

    Returns the resolved length map, or raises ``ValueError`` when a
    product is pushed below the minimum.  Records must already be in a
    parent-before-child order (``Circuit.to_records`` guarantees
    insertion order; tests pass topologically sorted records).
    """
    cfg = _SEMANTICS[semantics]
    by_id = {r["id"]: r for r in records}
    lengths: dict[str, int] = {}

    def resolve(vid: str) -> int:
        if vid in lengths:
            return lengths[vid]
        rec = by_id[vid]
        kind = rec["kind"]
        x = plan.get(vid, 0)
        if kind == "input":
            val = cfg["input"]
        elif kind == "output":
            val = max(resolve(p) for p in rec["parents"])
        elif kind == "add":
            val = max(cfg["min"], max(resolve(p) for p in rec["parents"]) - x)
        else:
            ps = rec["parents"]
            l1 = resolve(ps[0])
            l2 = resolve(ps[-1]) if kind != "square" else l1
            val = l1 + l2 - cfg["sub"] - x
            if val < cfg["min"]:
                raise ValueError(f"infeasible at {vid}")
        lengths[vid] = val
        return val

    for rec in records:
        resolve(rec["id"])
    return lengths


def oracle_cost(
    records: list[dict],
    plan: dict[str, int],
    semantics: str,
    mode: str,
    k_m,
    k_r,
) -> Fraction:
    """Total cost per the written cost rules, exact rationals."""
    cfg = _SEMANTICS[semantics]
    lengths = oracle_lengths(records, plan, semantics)
    k_m, k_r = Fraction(k_m), Fraction(k_r)
    total = Fraction(0)
    for rec in records:
        vid, kind = rec["id"], rec["kind"]
        x = plan.get(vid, 0)
        total += k_r * x
        if kind in ("mul", "square"):
            ps = rec["parents"]
            l1 = lengths[ps[0]]
            l2 = lengths[ps[-1]] if kind != "square" else l1
            if mode == "prose":
                total += k_m * (l1 + l2)
            else:
                total += k_m * (lengths[vid] + x)
    return total


def oracle_best_plan(
    records: list[dict],
    semantics: str,
    mode: str,
    k_m,
    k_r,
    max_amounts: dict[str, int],
) -> tuple[Fraction, dict[str, int]]:
    """Exhaustive minimum over the given per-vertex amount boxes,
    breaking ties toward smaller total relinearization and then the
    lexicographically smallest vector (box iteration order)."""
    ids = list(max_amounts)
    best = None
    for combo in product(*(range(max_amounts[v] + 1) for v in ids)):
        plan = {v: amt for v, amt in zip(ids, combo) if amt}
        try:
            cost = oracle_cost(records, plan, semantics, mode, k_m, k_r)
        except ValueError:
            continue
        key = (cost, sum(combo))
        if best is None or key < best[0]:
            best = (key, plan)
    assert best is not None, "no feasible plan"
    return best[0][0], best[1]


# -- circuit generators ---------------------------------------------------


def random_single_consumer_circuit(rng, max_ops: int = 5) -> Circuit:
    """Random single-sink add/mul circuit where every operation feeds at
    most one consumer (inputs may fan out) and parents are always
    distinct.

    Every input is consumed; sizes stay within ``max_ops + 4`` vertices.
    Rejection-samples until all inputs are used and exactly one
    operation remains unconsumed (a handful of draws).
    """
    for _ in range(200):
        n_ops = rng.randint(1, max_ops)
        n_inp = rng.randint(2, min(4, n_ops + 1))
        inputs = [f"i{j}" for j in range(n_inp)]
        vertices = [Vertex(v, VertexKind.INPUT) for v in inputs]
        ops_open: list[str] = []
        used: set[str] = set()
        for j in range(n_ops):
            pool = inputs + ops_open
            p1 = rng.choice(pool)
            p2 = rng.choice([p for p in pool if p != p1])
            kind = VertexKind.ADD if rng.random() < 0.5 else VertexKind.MUL
            vid = f"op{j}"
            vertices.append(Vertex(vid, kind, (p1, p2)))
            for p in (p1, p2):
                if p in ops_open:
                    ops_open.remove(p)
                else:
                    used.add(p)
            ops_open.append(vid)
        if len(used) == n_inp and len(ops_open) == 1:
            return Circuit(vertices)
    raise AssertionError("generator failed to cover all inputs")


def records_of(circuit: Circuit) -> list[dict]:
    """Plain, topologically ordered vertex records for the oracles."""
    return [
        {
            "id": vid,
            "kind": circuit.vertex(vid).kind.value,
            "parents": list(circuit.vertex(vid).parents),
        }
        for vid in circuit.topo_order
    ]


def random_plan(rng, circuit: Circuit, semantics, cap: int = 2) -> dict[str, int]:
    """A feasible random plan: products relinearize within their raw
    headroom, additions anywhere up to ``cap``.  Redraws on infeasible
    combinations (relinearizing upstream shrinks downstream headroom)."""
    from relinopt import raw_lengths

    raw = raw_lengths(circuit, semantics)
    records = records_of(circuit)
    for _ in range(500):
        plan: dict[str, int] = {}
        for v in circuit:
            if v.kind is VertexKind.ADD:
                amt = rng.randint(0, cap)
            elif v.kind.is_product:
                amt = rng.randint(0, raw[v.id] - semantics.min_length)
            else:
                continue
            if amt:
                plan[v.id] = amt
        try:
            oracle_lengths(records, plan, semantics.value)
        except ValueError:
            continue
        return plan
    return {}


# -- structure fingerprinting ---------------------------------------------


def structure_fingerprint(circuit: Circuit) -> tuple:
    """Canonical shape of a circuit modulo vertex renaming: the sorted
    multiset of recursive (kind, parent-shapes) hashes."""
    memo: dict[str, tuple] = {}

    def shape(vid: str) -> tuple:
        if vid not in memo:
            v = circuit.vertex(vid)
            memo[vid] = (v.kind.value, tuple(shape(p) for p in v.parents))
        return memo[vid]

    return tuple(sorted(repr(shape(vid)) for vid in circuit.ids()))


# -- LP text parsing -------------------------------------------------------


def parse_lp(text: str):
    """Parse the emitted LP dialect into (objective, rows, bounds, generals).

    objective: dict var -> Fraction; rows: list of (name, dict var ->
    Fraction, sense, rhs); bounds: dict var -> Fraction lower bound.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("\\")]
    section = None
    obj_text: list[str] = []
    row_texts: list[str] = []
    bounds: dict[str, Fraction] = {}
    generals: list[str] = []
    for ln in lines:
        stripped = ln.strip()
        if stripped in ("Minimize", "Subject To", "Bounds", "Generals", "End"):
            section = stripped
            continue
        if section == "Minimize":
            obj_text.append(stripped)
        elif section == "Subject To":
            row_texts.append(stripped)
        elif section == "Bounds":
            var, _, rhs = stripped.partition(">=")
            bounds[var.strip()] = Fraction(rhs.strip())
        elif section == "Generals":
            generals.extend(stripped.split())

    def parse_terms(expr: str) -> dict[str, Fraction]:
        tokens = expr.replace("- ", "-").replace("+ ", "+").split()
        out: dict[str, Fraction] = {}
        coef = None
        for tok in tokens:
            sign = Fraction(1)
            if tok.startswith("-"):
                sign, tok = Fraction(-1), tok[1:]
            elif tok.startswith("+"):
                tok = tok[1:]
            try:
                coef = sign * Fraction(tok)
            except ValueError:
                out[tok] = out.get(tok, Fraction(0)) + (coef if coef is not None else sign)
                coef = None
        return out

    obj_all = " ".join(obj_text)
    assert obj_all.startswith("obj:")
    objective = parse_terms(obj_all[4:])
    rows = []
    for rt in row_texts:
        name, _, rest = rt.partition(":")
        if "=" in rest and ">=" not in rest:
            lhs, _, rhs = rest.partition("=")
            sense = "="
        else:
            lhs, _, rhs = rest.partition(">=")
            sense = ">="
        rows.append((name.strip(), parse_terms(lhs.strip()), sense, Fraction(rhs.strip())))
    return objective, rows, bounds, generals
