"""Command-line interface.

Every command reads/writes the documented JSON formats and prints
deterministic output (sorted keys, fixed indentation), so runs are
byte-for-byte reproducible.

Exit codes: 0 success, 1 input/usage/validation problems, 2 infeasible
or malformed plans, 3 search-space or item-count capacity limits.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .circuit import (
    SEMANTICS_NAMES,
    load_circuit,
    save_circuit,
    validate,
    export_dot,
)
from .costmodel import (
    CostMode,
    CostParams,
    RelinPlan,
    Semantics,
    evaluate_plan,
    export_ilp,
    load_plan,
    propagate_lengths,
)
from .errors import (
    PlanError,
    RelinoptError,
    SearchSpaceTooLargeError,
    TooManyItemsError,
)
from .reduction import (
    build_reduction,
    decode_marks,
    knapsack_brute_force,
    load_knapsack,
    load_marks,
    save_marks,
)
from .solvers import (
    SolveResult,
    baseline_plan,
    brute_force_solve,
    dp_solve_single_output,
    load_result_lengths,
    restricted_solve,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, path: str | None) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", path)


def _resolve_semantics(flag: str | None, file_semantics: str) -> Semantics:
    return Semantics(flag if flag is not None else file_semantics)


def _params(args, km="1", kr="1", cost_mode=CostMode.OBJECTIVE.value) -> CostParams:
    """Build cost parameters; explicit flags beat the given defaults."""
    return CostParams(
        args.km if args.km is not None else km,
        args.kr if args.kr is not None else kr,
        CostMode(args.cost_mode if args.cost_mode is not None else cost_mode),
    )


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--semantics",
        choices=SEMANTICS_NAMES,
        default=None,
        help="length semantics; defaults to the circuit file's declaration",
    )
    p.add_argument(
        "--cost",
        dest="cost_mode",
        choices=[m.value for m in CostMode],
        default=None,
        help="multiplication accounting mode (default: objective)",
    )
    p.add_argument("--km", default=None, help="cost per multiplied unit (int or fraction, default 1)")
    p.add_argument("--kr", default=None, help="cost per relinearized unit (int or fraction, default 1)")


def _add_output_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", default=None, help="write to this file instead of stdout")


# -- commands --------------------------------------------------------------


def _cmd_validate(args) -> int:
    circuit, semantics = load_circuit(args.circuit)
    violations = validate(circuit, strict=args.strict)
    if violations:
        for v in violations:
            print(f"{v.vertex}: {v.rule}: {v.message}")
        print(f"invalid: {len(violations)} violation(s)")
        return 1
    mode = "strict" if args.strict else "lenient"
    print(f"ok: {len(circuit)} vertices, semantics {semantics}, {mode} checks passed")
    return 0


def _cmd_eval(args) -> int:
    circuit, file_semantics = load_circuit(args.circuit)
    semantics = _resolve_semantics(args.semantics, file_semantics)
    params = _params(args)
    plan = load_plan(args.plan) if args.plan else RelinPlan()
    cost, profile = evaluate_plan(circuit, plan, params, semantics)
    _emit_json(
        {
            "semantics": semantics.value,
            "cost_mode": params.mode.value,
            "k_m": str(params.k_m),
            "k_r": str(params.k_r),
            "plan": plan.to_json_dict(),
            "cost": cost.to_json_dict(),
            "lengths": {vid: profile[vid] for vid in sorted(profile)},
        },
        args.output,
    )
    return 0


def _cmd_solve(args) -> int:
    circuit, file_semantics = load_circuit(args.circuit)
    semantics = _resolve_semantics(args.semantics, file_semantics)
    params = _params(args)
    if args.method == "baseline":
        plan = baseline_plan(circuit, semantics)
        cost, profile = evaluate_plan(circuit, plan, params, semantics)
        result = SolveResult("baseline", plan, cost, profile, semantics, params)
    elif args.method == "brute":
        result = brute_force_solve(
            circuit,
            params,
            semantics,
            max_free=args.max_free,
            max_plans=args.cap,
            threads=args.threads,
        )
    elif args.method == "dp":
        result = dp_solve_single_output(circuit, params, semantics)
    else:
        if not args.marks:
            raise _UsageError("--method restricted requires --marks")
        data = load_marks(args.marks)
        # A marks file carries the calibrated price of relinearization;
        # solving with anything else decodes garbage, so it is the default.
        params = _params(args, kr=str(data["params"]["k_r"]), cost_mode=CostMode.PROSE.value)
        result = restricted_solve(
            circuit,
            data["marks"],
            params,
            semantics,
            per_mark_max=args.per_mark_max,
            max_plans=args.cap,
            threads=args.threads,
        )
    _emit_json(result.to_json_dict(), args.output)
    return 0


def _cmd_reduce(args) -> int:
    instance = load_knapsack(args.knapsack)
    artifact = build_reduction(instance, max_items=args.max_items)
    save_circuit(artifact.circuit, args.output, semantics="reduced")
    save_marks(artifact, args.marks)
    summary = artifact.marks_json_dict()
    summary["circuit"] = args.output
    summary["vertices"] = len(artifact.circuit)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_decode(args) -> int:
    data = load_marks(args.marks)
    params = data["params"]
    lengths = load_result_lengths(args.result)
    decoded = decode_marks(
        data["marks"],
        params["K"],
        params["k_r"],
        params["r"],
        params["lambda"],
        lengths,
    )
    print(
        json.dumps(
            {"selection": list(decoded.selection), "value": decoded.value},
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def _cmd_knapsack(args) -> int:
    instance = load_knapsack(args.knapsack)
    value, selection = knapsack_brute_force(instance, max_items=args.max_items)
    print(
        json.dumps(
            {"selection": list(selection), "value": value},
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def _cmd_export_dot(args) -> int:
    circuit, file_semantics = load_circuit(args.circuit)
    lengths = None
    if args.plan is not None:
        semantics = _resolve_semantics(args.semantics, file_semantics)
        lengths = propagate_lengths(circuit, load_plan(args.plan), semantics)
    _emit(export_dot(circuit, lengths), args.output)
    return 0


def _cmd_export_lp(args) -> int:
    circuit, file_semantics = load_circuit(args.circuit)
    semantics = _resolve_semantics(args.semantics, file_semantics)
    _emit(export_ilp(circuit, _params(args), semantics), args.output)
    return 0


# -- wiring ----------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="relinopt", description="Relinearization placement for leveled circuits.")
    parser.add_argument("--version", action="version", version=f"relinopt {__version__}")
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="seed reserved for randomized strategies; current commands are deterministic",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a circuit file")
    p.add_argument("circuit")
    p.add_argument("--strict", action="store_true", help="also require textbook out-degrees")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("eval", help="evaluate a relinearization plan")
    p.add_argument("circuit")
    p.add_argument("--plan", default=None, help="plan JSON file (default: the zero plan)")
    _add_model_args(p)
    _add_output_arg(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("solve", help="find a relinearization plan")
    p.add_argument("circuit")
    p.add_argument(
        "--method",
        choices=("baseline", "brute", "dp", "restricted"),
        default="dp",
        help="solver strategy (default: dp)",
    )
    p.add_argument("--marks", default=None, help="marks JSON file (required for --method restricted)")
    p.add_argument("--per-mark-max", type=int, default=1, help="max relinearization per mark (default 1)")
    p.add_argument("--max-free", type=int, default=10, help="brute-force cap on free vertices (default 10)")
    p.add_argument("--cap", type=int, default=2_000_000, help="cap on enumerated plans (default 2000000)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for enumeration (default 1)")
    _add_model_args(p)
    _add_output_arg(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("reduce", help="compile a knapsack instance to a placement instance")
    p.add_argument("knapsack")
    p.add_argument("-o", "--output", required=True, help="write the circuit JSON here")
    p.add_argument("--marks", required=True, help="write the marks/parameters JSON here")
    p.add_argument("--max-items", type=int, default=20, help="item cap (default 20)")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("decode", help="read a knapsack selection out of a solve result")
    p.add_argument("--marks", required=True, help="marks JSON from 'reduce'")
    p.add_argument("--result", required=True, help="solve result JSON")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("knapsack", help="solve a knapsack instance exactly")
    p.add_argument("knapsack")
    p.add_argument(
        "--brute",
        action="store_true",
        help="use exhaustive enumeration (the only engine; accepted for explicitness)",
    )
    p.add_argument("--max-items", type=int, default=20, help="item cap (default 20)")
    p.set_defaults(func=_cmd_knapsack)

    p = sub.add_parser("export-dot", help="render a circuit as Graphviz DOT")
    p.add_argument("circuit")
    p.add_argument("--plan", default=None, help="annotate lengths resolved under this plan")
    p.add_argument(
        "--semantics",
        choices=SEMANTICS_NAMES,
        default=None,
        help="length semantics for --plan; defaults to the circuit file's declaration",
    )
    _add_output_arg(p)
    p.set_defaults(func=_cmd_export_dot)

    p = sub.add_parser("export-lp", help="emit the placement integer program in LP format")
    p.add_argument("circuit")
    _add_model_args(p)
    _add_output_arg(p)
    p.set_defaults(func=_cmd_export_lp)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SearchSpaceTooLargeError, TooManyItemsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RelinoptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
