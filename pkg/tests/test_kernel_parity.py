"""The compiled kernel must be bit-for-bit interchangeable with the
pure-Python one on every exposed entry point."""

import os
import random

import numpy as np
import pytest

from relinopt import CostParams, Semantics, _kernel
from relinopt import _kernel_py as pure

from helpers import random_plan, random_single_consumer_circuit

compiled = pytest.importorskip(
    "relinopt._kernel_c", reason="compiled kernel not built"
)

STANDARD, REDUCED = Semantics.STANDARD, Semantics.REDUCED


def flat_arrays(circuit):
    flat = _kernel.flatten(circuit)
    return flat, flat.kind, flat.p1, flat.p2


def semantics_args(semantics):
    return semantics.input_length, semantics.min_length, semantics.product_sub


def random_case(rng):
    circuit = random_single_consumer_circuit(rng)
    semantics = rng.choice((STANDARD, REDUCED))
    return circuit, semantics


class TestBackendSelection:
    def test_active_backend_is_compiled(self):
        if os.environ.get("RELINOPT_BACKEND", "").strip().lower() in ("python", "pure", "py"):
            pytest.skip("pure-Python backend forced via RELINOPT_BACKEND")
        assert _kernel.backend_name() == "compiled"

    def test_limits_agree(self):
        assert pure.LENGTH_LIMIT == compiled.LENGTH_LIMIT
        assert pure.INF == compiled.INF


class TestEvaluateParity:
    def test_random_plans(self):
        rng = random.Random(1618)
        for _ in range(150):
            circuit, semantics = random_case(rng)
            flat, kind, p1, p2 = flat_arrays(circuit)
            plan = random_plan(rng, circuit, semantics)
            xs = [plan.get(vid, 0) for vid in flat.ids]
            for prose in (False, True):
                args = (kind, p1, p2, xs, *semantics_args(semantics), prose)
                assert pure.evaluate(*args) == compiled.evaluate(*args)

    def test_infeasible_plans_report_same_position(self):
        rng = random.Random(2718)
        for _ in range(80):
            circuit, semantics = random_case(rng)
            flat, kind, p1, p2 = flat_arrays(circuit)
            # deliberately oversized amounts to trip the feasibility check
            xs = [rng.randint(0, 3) for _ in flat.ids]
            args = (kind, p1, p2, xs, *semantics_args(semantics), False)
            assert pure.evaluate(*args) == compiled.evaluate(*args)

    def test_overflow_reported_identically(self):
        from relinopt.examples import squaring_chain

        flat, kind, p1, p2 = flat_arrays(squaring_chain(60))
        xs = [0] * len(flat.ids)
        got_pure = pure.evaluate(kind, p1, p2, xs, 2, 2, 1, False)
        got_compiled = compiled.evaluate(kind, p1, p2, xs, 2, 2, 1, False)
        assert got_pure == got_compiled
        assert got_pure[0] == 2  # overflow status


class TestSearchMinParity:
    def _maxx(self, circuit, flat, semantics):
        from relinopt import raw_lengths

        raw = raw_lengths(circuit, semantics)
        out = []
        for vid in flat.ids:
            kind = circuit.vertex(vid).kind
            if kind.value in ("add", "mul", "square"):
                out.append(max(0, min(raw[vid], len(circuit)) - semantics.min_length))
            else:
                out.append(0)
        return out

    def test_full_range(self):
        rng = random.Random(31415)
        for _ in range(60):
            circuit, semantics = random_case(rng)
            flat, kind, p1, p2 = flat_arrays(circuit)
            maxx = self._maxx(circuit, flat, semantics)
            a, b, _ = CostParams(*rng.choice([(1, 1), (1, 3), (3, 1)])).scaled()
            prose = rng.random() < 0.5
            args = (kind, p1, p2, maxx, *semantics_args(semantics), prose, a, b, -1, 0, 0)
            assert pure.search_min(*args) == compiled.search_min(*args)

    def test_chunked_ranges(self):
        rng = random.Random(92653)
        for _ in range(30):
            circuit, semantics = random_case(rng)
            flat, kind, p1, p2 = flat_arrays(circuit)
            maxx = self._maxx(circuit, flat, semantics)
            free = [m for m in maxx if m > 0]
            if not free:
                continue
            top = free[0] + 1
            cut = rng.randint(0, top)
            for lo, hi in ((0, cut), (cut, top)):
                args = (kind, p1, p2, maxx, *semantics_args(semantics), False, 1, 1, 0, lo, hi)
                assert pure.search_min(*args) == compiled.search_min(*args)

    def test_empty_chunk(self):
        from relinopt.examples import two_level_chain

        flat, kind, p1, p2 = flat_arrays(two_level_chain())
        maxx = self._maxx(two_level_chain(), flat, STANDARD)
        args = (kind, p1, p2, maxx, 2, 2, 1, False, 1, 1, 0, 2, 2)
        assert pure.search_min(*args) == compiled.search_min(*args)
        assert pure.search_min(*args)[0] is False or pure.search_min(*args)[0] == 0


class TestDpTablesParity:
    def test_random_circuits(self):
        from relinopt import raw_lengths

        rng = random.Random(58979)
        for _ in range(60):
            circuit, semantics = random_case(rng)
            flat, kind, p1, p2 = flat_arrays(circuit)
            raw = raw_lengths(circuit, semantics)
            hi = [
                semantics.input_length
                if circuit.vertex(vid).kind.value == "input"
                else max(semantics.min_length, min(raw[vid], len(circuit)))
                for vid in flat.ids
            ]
            a, b, _ = CostParams(*rng.choice([(1, 1), (1, 3), (3, 1)])).scaled()
            prose = rng.random() < 0.5
            args = (kind, p1, p2, hi, *semantics_args(semantics), prose, a, b)
            mp, sp, b1p, b2p = pure.dp_tables(*args)
            mc, sc, b1c, b2c = compiled.dp_tables(*args)
            for want, got in ((mp, mc), (sp, sc), (b1p, b1c), (b2p, b2c)):
                assert np.array_equal(np.asarray(want), np.asarray(got))
