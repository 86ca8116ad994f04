"""Ciphertext-length propagation and cost accounting.

Two length semantics are supported.  Under ``standard`` semantics a
fresh ciphertext has length 2, the minimum (fully relinearized) length
is 2, and a product of lengths ``l1``, ``l2`` has length
``l1 + l2 - 1``.  Under ``reduced`` semantics fresh and minimum lengths
are 1 and a product has length ``l1 + l2``.  Additions propagate the
maximum parent length; outputs copy (or max) their parents.

A relinearization plan assigns each vertex a nonnegative amount ``x``.
At a product vertex the amount is subtracted from the raw product
length and must not push it below the minimum; at an addition the
result clamps at the minimum (the surplus is wasted but still paid
for); inputs and outputs cannot be relinearized.

Costs: every unit of relinearization costs ``k_r``.  Multiplications
and squarings cost ``k_m`` per unit of, depending on the mode, either
the post-relinearization length plus the amount relinearized
(``objective``) or the sum of the parent lengths (``prose``).  The two
modes differ by exactly ``k_m`` per product vertex under standard
semantics and are identical under reduced semantics, so they share
their minimizers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Mapping

from . import _kernel
from .circuit import Circuit, VertexKind
from .errors import (
    FormatError,
    InfeasibleRelinError,
    InvalidPlanError,
    LengthOverflowError,
)


class Semantics(Enum):
    STANDARD = "standard"
    REDUCED = "reduced"

    @property
    def input_length(self) -> int:
        return 2 if self is Semantics.STANDARD else 1

    @property
    def min_length(self) -> int:
        return 2 if self is Semantics.STANDARD else 1

    @property
    def product_sub(self) -> int:
        """Constant subtracted by the product rule (1 or 0)."""
        return 1 if self is Semantics.STANDARD else 0

    def product_length(self, l1: int, l2: int) -> int:
        return l1 + l2 - self.product_sub


class CostMode(Enum):
    OBJECTIVE = "objective"
    PROSE = "prose"


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"cost constant {value!r} is not a valid rational") from None
    raise FormatError(f"cost constant {value!r} must be an int, Fraction, or rational string")


@dataclass(frozen=True)
class CostParams:
    """Cost constants and accounting mode (defaults: k_m = k_r = 1)."""

    k_m: Fraction = Fraction(1)
    k_r: Fraction = Fraction(1)
    mode: CostMode = CostMode.OBJECTIVE

    def __post_init__(self):
        object.__setattr__(self, "k_m", _to_fraction(self.k_m))
        object.__setattr__(self, "k_r", _to_fraction(self.k_r))
        if self.k_m < 0 or self.k_r < 0:
            raise FormatError("cost constants must be nonnegative")

    def scaled(self) -> tuple[int, int, int]:
        """Integer cost coefficients ``(a, b, d)`` with
        ``a/d == k_m`` and ``b/d == k_r``; kernels minimize
        ``a * mul_units + b * relin_units`` exactly."""
        d = lcm(self.k_m.denominator, self.k_r.denominator)
        return int(self.k_m * d), int(self.k_r * d), d


class RelinPlan:
    """Map from vertex id to relinearization amount (missing means 0).

    Zero entries are dropped on construction, so plans compare equal
    exactly when they relinearize the same vertices by the same amounts.
    """

    __slots__ = ("_amounts",)

    def __init__(self, amounts: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = amounts.items() if isinstance(amounts, Mapping) else amounts
        cleaned: dict[str, int] = {}
        for vid, amt in items:
            if not isinstance(amt, int) or isinstance(amt, bool):
                raise InvalidPlanError(f"relin amount for '{vid}' must be an integer, got {amt!r}")
            if amt < 0:
                raise InvalidPlanError(f"relin amount for '{vid}' is negative ({amt})")
            if amt:
                cleaned[str(vid)] = amt
        self._amounts = cleaned

    def __getitem__(self, vid: str) -> int:
        return self._amounts.get(vid, 0)

    def __iter__(self) -> Iterator[str]:
        return iter(self._amounts)

    def __len__(self) -> int:
        return len(self._amounts)

    def __eq__(self, other) -> bool:
        if isinstance(other, RelinPlan):
            return self._amounts == other._amounts
        return NotImplemented

    def __repr__(self) -> str:
        return f"RelinPlan({self._amounts!r})"

    def items(self):
        return self._amounts.items()

    @property
    def total(self) -> int:
        return sum(self._amounts.values())

    def as_dict(self) -> dict[str, int]:
        return dict(self._amounts)

    def to_json_dict(self) -> dict:
        return {"relin": {vid: self._amounts[vid] for vid in sorted(self._amounts)}}

    @classmethod
    def from_json_dict(cls, data) -> "RelinPlan":
        """Accept a plan object or any result object embedding one."""
        if not isinstance(data, dict):
            raise FormatError("plan file must contain a JSON object")
        if "relin" not in data and isinstance(data.get("plan"), dict):
            data = data["plan"]
        relin = data.get("relin")
        if not isinstance(relin, dict):
            raise FormatError("plan object needs a 'relin' mapping")
        try:
            return cls(relin)
        except InvalidPlanError as exc:
            raise FormatError(str(exc)) from None


def load_plan(path: str) -> RelinPlan:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc})") from None
    return RelinPlan.from_json_dict(data)


def save_plan(plan: RelinPlan, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


class LengthProfile(Mapping):
    """Resolved length of every vertex under some plan."""

    __slots__ = ("_lengths",)

    def __init__(self, lengths: Mapping[str, int]):
        self._lengths = dict(lengths)

    def __getitem__(self, vid: str) -> int:
        return self._lengths[vid]

    def __iter__(self) -> Iterator[str]:
        return iter(self._lengths)

    def __len__(self) -> int:
        return len(self._lengths)

    def __repr__(self) -> str:
        return f"LengthProfile({self._lengths!r})"

    def as_dict(self) -> dict[str, int]:
        return dict(self._lengths)


@dataclass(frozen=True)
class CostBreakdown:
    mul_cost: Fraction
    relin_cost: Fraction
    total: Fraction = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", self.mul_cost + self.relin_cost)

    def to_json_dict(self) -> dict:
        return {
            "mul": str(self.mul_cost),
            "relin": str(self.relin_cost),
            "total": str(self.total),
        }


def _x_vector(circuit: Circuit, plan: RelinPlan) -> list[int]:
    flat = _kernel.flatten(circuit)
    xs = [0] * len(flat.ids)
    for vid, amt in plan.items():
        pos = flat.pos.get(vid)
        if pos is None:
            raise InvalidPlanError(f"plan names unknown vertex '{vid}'")
        kind = circuit.vertex(vid).kind
        if kind in (VertexKind.INPUT, VertexKind.OUTPUT):
            raise InvalidPlanError(f"{kind.value} '{vid}' cannot be relinearized")
        xs[pos] = amt
    return xs


def _evaluate(circuit: Circuit, plan: RelinPlan, semantics: Semantics):
    flat = _kernel.flatten(circuit)
    xs = _x_vector(circuit, plan)
    status, pos, lengths, mu, ru = _kernel.impl.evaluate(
        flat.kind,
        flat.p1,
        flat.p2,
        xs,
        semantics.input_length,
        semantics.min_length,
        semantics.product_sub,
        False,  # mode only affects units; recompute below when needed
    )
    if status == 1:
        raise InfeasibleRelinError(flat.ids[pos])
    if status == 2:
        raise LengthOverflowError(flat.ids[pos])
    return flat, lengths, mu, ru


def cost_units(circuit: Circuit, plan: RelinPlan, semantics: Semantics, mode: CostMode) -> tuple[int, int]:
    """Exact integer (multiplication units, relinearization units)."""
    flat = _kernel.flatten(circuit)
    xs = _x_vector(circuit, plan)
    status, pos, _, mu, ru = _kernel.impl.evaluate(
        flat.kind,
        flat.p1,
        flat.p2,
        xs,
        semantics.input_length,
        semantics.min_length,
        semantics.product_sub,
        mode is CostMode.PROSE,
    )
    if status == 1:
        raise InfeasibleRelinError(flat.ids[pos])
    if status == 2:
        raise LengthOverflowError(flat.ids[pos])
    return mu, ru


def propagate_lengths(circuit: Circuit, plan: RelinPlan, semantics: Semantics = Semantics.STANDARD) -> LengthProfile:
    """Resolve every vertex length under ``plan``.

    Raises ``InfeasibleRelinError`` if a product is pushed below the
    minimum length.  The returned profile is the componentwise-minimal
    length assignment compatible with the plan.
    """
    flat, lengths, _, _ = _evaluate(circuit, plan, semantics)
    return LengthProfile(dict(zip(flat.ids, lengths)))


def total_cost(
    circuit: Circuit,
    plan: RelinPlan,
    params: CostParams,
    semantics: Semantics = Semantics.STANDARD,
) -> CostBreakdown:
    mu, ru = cost_units(circuit, plan, semantics, params.mode)
    return CostBreakdown(params.k_m * mu, params.k_r * ru)


def evaluate_plan(
    circuit: Circuit,
    plan: RelinPlan,
    params: CostParams,
    semantics: Semantics = Semantics.STANDARD,
) -> tuple[CostBreakdown, LengthProfile]:
    """One-pass cost + profile (what the CLI ``eval`` command prints)."""
    mu, ru = cost_units(circuit, plan, semantics, params.mode)
    profile = propagate_lengths(circuit, plan, semantics)
    return CostBreakdown(params.k_m * mu, params.k_r * ru), profile


def raw_lengths(circuit: Circuit, semantics: Semantics) -> dict[str, int]:
    """Zero-plan lengths: the raw growth with no relinearization."""
    return propagate_lengths(circuit, RelinPlan(), semantics).as_dict()


# -- integer-program export ---------------------------------------------


def _coef(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else repr(float(f))


def _terms_to_text(terms: list[tuple[Fraction, str]], per_line: int = 8) -> list[str]:
    """Render a signed linear expression, wrapped for LP readers."""
    chunks: list[str] = []
    for idx, (coef, var) in enumerate(terms):
        mag = _coef(abs(coef))
        if idx == 0:
            chunks.append(f"-{mag} {var}" if coef < 0 else f"{mag} {var}")
        else:
            chunks.append(f"{'-' if coef < 0 else '+'} {mag} {var}")
    lines = []
    for start in range(0, len(chunks), per_line):
        lines.append(" ".join(chunks[start : start + per_line]))
    return lines or ["0"]


def export_ilp(
    circuit: Circuit,
    params: CostParams,
    semantics: Semantics = Semantics.STANDARD,
) -> str:
    """Emit the relinearization placement problem as CPLEX-style LP text.

    Variables: ``l_<id>`` for every non-output vertex, ``x_<id>`` for
    every addition/multiplication/squaring.  Products pin their length
    by an equality row, additions dominate each parent by one inequality
    row per parent; all variables are integer, lengths are bounded below
    by the semantics' minimum.  Output vertices carry no cost and no
    constraint, so they are omitted.  The text is byte-deterministic.
    """
    if len(circuit) == 0:
        raise FormatError("cannot export an empty circuit")
    sub = semantics.product_sub
    min_len = semantics.min_length
    obj: dict[str, Fraction] = {}
    var_order: list[str] = []

    def _add(var: str, coef: Fraction):
        if var not in obj:
            var_order.append(var)
        obj[var] = obj.get(var, Fraction(0)) + coef

    rows: list[str] = []
    lvars: list[str] = []
    xvars: list[str] = []
    for vid in circuit.topo_order:
        v = circuit.vertex(vid)
        if v.kind is VertexKind.OUTPUT:
            continue
        lvars.append(f"l_{vid}")
        if v.kind is VertexKind.INPUT:
            continue
        xvars.append(f"x_{vid}")
        _add(f"x_{vid}", params.k_r)
        if v.kind is VertexKind.ADD:
            for slot, p in enumerate(v.parents, start=1):
                rows.append(f" sum_{vid}_{slot}: l_{vid} + x_{vid} - l_{p} >= 0")
        else:
            if params.mode is CostMode.OBJECTIVE:
                _add(f"l_{vid}", params.k_m)
                _add(f"x_{vid}", params.k_m)
            rhs = str(-sub)
            if v.kind is VertexKind.SQUARE:
                p = v.parents[0]
                if params.mode is CostMode.PROSE:
                    _add(f"l_{p}", 2 * params.k_m)
                rows.append(f" prod_{vid}: l_{vid} + x_{vid} - 2 l_{p} = {rhs}")
            else:
                pa, pb = v.parents
                if params.mode is CostMode.PROSE:
                    _add(f"l_{pa}", params.k_m)
                    _add(f"l_{pb}", params.k_m)
                rows.append(f" prod_{vid}: l_{vid} + x_{vid} - l_{pa} - l_{pb} = {rhs}")

    terms = [(obj[var], var) for var in var_order if obj[var] != 0]
    if not terms:
        terms = [(Fraction(0), lvars[0])]
    obj_lines = _terms_to_text(terms)
    lines = ["\\ relinearization placement integer program", "Minimize"]
    lines.append(" obj: " + obj_lines[0])
    lines.extend("      " + more for more in obj_lines[1:])
    lines.append("Subject To")
    lines.extend(rows)
    lines.append("Bounds")
    lines.extend(f" l_{vid} >= {min_len}" for vid in circuit.topo_order if circuit.vertex(vid).kind is not VertexKind.OUTPUT)
    lines.extend(f" {xv} >= 0" for xv in xvars)
    lines.append("Generals")
    allvars = lvars + xvars
    for start in range(0, len(allvars), 10):
        lines.append(" " + " ".join(allvars[start : start + 10]))
    lines.append("End")
    return "\n".join(lines) + "\n"
