"""Compare the compiled kernel against its pure-Python twin.

Three workloads exercise the three kernel entry points on realistic
shapes: repeated plan evaluation on a large reduction circuit, full plan
enumeration on a balanced product tree, and the length-indexed dynamic
program on a deep one.  Both backends receive identical flattened
inputs, so the printed checksums must agree.

Usage::

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import random
import time

import numpy as np

from relinopt import (
    CostParams,
    KnapsackInstance,
    Semantics,
    Vertex,
    VertexKind,
    build_circuit,
    build_reduction,
)
from relinopt._kernel import flatten
from relinopt import _kernel_py

try:
    from relinopt import _kernel_c
except ImportError:  # extension not built; measure the fallback alone
    _kernel_c = None


def balanced_mul_tree(depth: int):
    """Full binary multiplication tree with 2**depth leaf inputs."""
    K = VertexKind
    vertices = [Vertex(f"in{i}", K.INPUT) for i in range(2**depth)]
    level = [v.id for v in vertices]
    tier = 0
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level), 2):
            vid = f"t{tier}_{i // 2}"
            vertices.append(Vertex(vid, K.MUL, (level[i], level[i + 1])))
            nxt.append(vid)
        level = nxt
        tier += 1
    return build_circuit(vertices)


def standard_args(flat):
    return flat.kind, flat.p1, flat.p2


def raw_profile(impl, flat):
    zeros = np.zeros(len(flat.ids), dtype=np.int64)
    status, _, lengths, _, _ = impl.evaluate(*standard_args(flat), zeros, 2, 2, 1, False)
    assert status == 0
    return lengths


def bench(func, repeats):
    best = None
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = func()
        elapsed = time.perf_counter() - start
        best = elapsed if best is None or elapsed < best else best
    return best, result


def evaluate_workload(impl, flat, plans):
    def run():
        acc = 0
        for xs in plans:
            status, _, lengths, mu, ru = impl.evaluate(
                *standard_args(flat), xs, 1, 1, 0, True
            )
            assert status == 0
            acc += mu + ru + lengths[-1]
        return acc

    return run


def search_workload(impl, flat, maxx, a, b):
    def run():
        found, cost, sumx, plan = impl.search_min(
            *standard_args(flat), maxx, 2, 2, 1, False, a, b, -1, 0, 0
        )
        assert found
        return cost * 1000 + sumx

    return run


def dp_workload(impl, flat, hi):
    def run():
        M, S, B1, B2 = impl.dp_tables(*standard_args(flat), hi, 2, 2, 1, False, 1, 1)
        return int(np.asarray(M)[-1].min())

    return run


def build_workloads():
    rng = random.Random(7)
    workloads = []

    # plan evaluation on the ~860-vertex knapsack reduction circuit
    artifact = build_reduction(KnapsackInstance((1, 2), (2, 3), 4))
    flat = flatten(artifact.circuit)
    n = len(flat.ids)
    relinable = [i for i in range(n) if flat.kind[i] >= 2]
    plans = []
    for _ in range(60):
        xs = np.zeros(n, dtype=np.int64)
        for i in rng.sample(relinable, 4):
            xs[i] = 1
        plans.append(xs)
    workloads.append(
        ("evaluate x60 (reduction circuit, 859 vertices)",
         lambda impl, f=flat, p=plans: evaluate_workload(impl, f, p))
    )

    # exhaustive enumeration on a depth-3 product tree (2k plans)
    tree = balanced_mul_tree(3)
    flat = flatten(tree)
    raw = raw_profile(_kernel_py, flat)
    n = len(flat.ids)
    maxx = np.array(
        [max(0, min(raw[i], n) - 2) if flat.kind[i] >= 2 else 0 for i in range(n)],
        dtype=np.int64,
    )
    a, b = 1, 1
    workloads.append(
        ("search_min (15-vertex tree, 2048 plans)",
         lambda impl, f=flat, m=maxx: search_workload(impl, f, m, a, b))
    )

    # dynamic program on a depth-6 product tree (127 vertices)
    deep = balanced_mul_tree(6)
    flat = flatten(deep)
    raw = raw_profile(_kernel_py, flat)
    n = len(flat.ids)
    hi = np.array(
        [2 if flat.kind[i] == 0 else max(2, min(raw[i], n)) for i in range(n)],
        dtype=np.int64,
    )
    workloads.append(
        ("dp_tables (127-vertex tree)",
         lambda impl, f=flat, h=hi: dp_workload(impl, f, h))
    )
    return workloads


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats (best-of)")
    args = parser.parse_args(argv)

    if _kernel_c is None:
        print("note: compiled extension not built; timing the pure-Python kernel only")

    header = f"{'workload':<46} {'pure-python':>12} {'compiled':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, make in build_workloads():
        py_time, py_result = bench(make(_kernel_py), args.repeats)
        if _kernel_c is None:
            print(f"{name:<46} {py_time * 1e3:>10.2f}ms {'-':>12} {'-':>8}")
            continue
        c_time, c_result = bench(make(_kernel_c), args.repeats)
        if py_result != c_result:
            raise SystemExit(f"backend mismatch on {name}: {py_result} != {c_result}")
        print(
            f"{name:<46} {py_time * 1e3:>10.2f}ms {c_time * 1e3:>10.2f}ms"
            f" {py_time / c_time:>7.1f}x"
        )


if __name__ == "__main__":
    main()
