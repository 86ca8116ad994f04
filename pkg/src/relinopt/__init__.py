"""Relinearization placement for leveled arithmetic circuits.

The package models circuits whose ciphertext lengths grow under
multiplication and squaring, prices relinearization against
multiplication, and finds where to relinearize: a dynamic program for
single-consumer circuits, exhaustive and restricted enumeration for
small general ones, and a knapsack reduction demonstrating why the
restricted problem is hard.  Hot loops run in a compiled extension when
available with a pure-Python twin as fallback (``RELINOPT_BACKEND``
selects explicitly).
"""

from ._kernel import backend_name
from .circuit import (
    Circuit,
    Vertex,
    VertexKind,
    Violation,
    build_circuit,
    circuit_from_json_dict,
    circuit_to_json_dict,
    export_dot,
    load_circuit,
    save_circuit,
    topo_order,
    validate,
)
from .costmodel import (
    CostBreakdown,
    CostMode,
    CostParams,
    LengthProfile,
    RelinPlan,
    Semantics,
    cost_units,
    evaluate_plan,
    export_ilp,
    load_plan,
    propagate_lengths,
    raw_lengths,
    save_plan,
    total_cost,
)
from .errors import (
    ArityMismatchError,
    CircuitError,
    CycleError,
    DegreeError,
    DuplicateIdError,
    FormatError,
    GadgetError,
    InfeasibleRelinError,
    InvalidPlanError,
    LengthOutOfRangeError,
    LengthOverflowError,
    MarkNotRelinearizableError,
    MultipleSinksError,
    NotIsomorphicError,
    NotSingleOutputError,
    PlanError,
    RelinoptError,
    SearchSpaceTooLargeError,
    SolverError,
    TooManyItemsError,
    UnknownParentError,
    UnknownVertexError,
)
from .examples import demo_circuit, squaring_chain, two_level_chain
from .reduction import (
    DecodedSelection,
    GadgetCircuit,
    KnapsackInstance,
    ReductionArtifact,
    build_reduction,
    combine_add,
    combine_mul,
    concat,
    cost_gadget,
    decode_marks,
    decode_reduction,
    glue,
    knapsack_brute_force,
    length_gadget,
    load_knapsack,
    load_marks,
    repeat_circuit,
    save_marks,
    schedule_parameters,
)
from .solvers import (
    DpTable,
    SolveResult,
    baseline_plan,
    brute_force_solve,
    dp_solve_single_output,
    dp_table,
    load_result_lengths,
    restricted_solve,
    save_result,
)

__version__ = "0.1.0"

__all__ = [
    "ArityMismatchError",
    "Circuit",
    "CircuitError",
    "CostBreakdown",
    "CostMode",
    "CostParams",
    "CycleError",
    "DecodedSelection",
    "DegreeError",
    "DpTable",
    "DuplicateIdError",
    "FormatError",
    "GadgetCircuit",
    "GadgetError",
    "InfeasibleRelinError",
    "InvalidPlanError",
    "KnapsackInstance",
    "LengthOutOfRangeError",
    "LengthOverflowError",
    "LengthProfile",
    "MarkNotRelinearizableError",
    "MultipleSinksError",
    "NotIsomorphicError",
    "NotSingleOutputError",
    "PlanError",
    "ReductionArtifact",
    "RelinPlan",
    "RelinoptError",
    "SearchSpaceTooLargeError",
    "Semantics",
    "SolveResult",
    "SolverError",
    "TooManyItemsError",
    "UnknownParentError",
    "UnknownVertexError",
    "Vertex",
    "VertexKind",
    "Violation",
    "backend_name",
    "baseline_plan",
    "brute_force_solve",
    "build_circuit",
    "build_reduction",
    "circuit_from_json_dict",
    "circuit_to_json_dict",
    "combine_add",
    "combine_mul",
    "concat",
    "cost_gadget",
    "cost_units",
    "decode_marks",
    "decode_reduction",
    "demo_circuit",
    "dp_solve_single_output",
    "dp_table",
    "evaluate_plan",
    "export_dot",
    "export_ilp",
    "glue",
    "knapsack_brute_force",
    "length_gadget",
    "load_circuit",
    "load_knapsack",
    "load_marks",
    "load_plan",
    "load_result_lengths",
    "propagate_lengths",
    "raw_lengths",
    "repeat_circuit",
    "restricted_solve",
    "save_circuit",
    "save_marks",
    "save_plan",
    "save_result",
    "schedule_parameters",
    "squaring_chain",
    "topo_order",
    "total_cost",
    "two_level_chain",
    "validate",
]
