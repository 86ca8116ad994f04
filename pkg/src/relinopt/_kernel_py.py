"""Pure-Python kernel: length propagation, plan enumeration, and the
length-indexed dynamic program.

This module mirrors the compiled kernel (``_kernel_c``) function for
function; both operate on flattened circuits (parallel arrays in
topological order) and scaled integer costs, so results are exact and
backend-independent.  Kind codes: 0 input, 1 output, 2 add, 3 mul,
4 square.  For squares and two-parent vertices ``p2`` holds the second
parent position (squares store their single parent twice); -1 means
absent.

Status codes returned by ``evaluate``: 0 ok, 1 infeasible relinearization
at ``pos``, 2 length overflow at ``pos``.
"""

from itertools import product as _product

import numpy as np

LENGTH_LIMIT = 1 << 40
INF = 1 << 62


def _as_list(a):
    return a.tolist() if isinstance(a, np.ndarray) else list(a)


def evaluate(kind, p1, p2, x, input_len, min_len, sub1, prose):
    kind = _as_list(kind)
    a1 = _as_list(p1)
    a2 = _as_list(p2)
    xs = _as_list(x)
    n = len(kind)
    ln = [0] * n
    mu = 0
    ru = 0
    for i in range(n):
        k = kind[i]
        xi = xs[i]
        if k == 0:
            length = input_len
        elif k == 2:
            length = ln[a1[i]]
            other = ln[a2[i]]
            if other > length:
                length = other
            length -= xi
            if length < min_len:
                length = min_len
        elif k == 1:
            length = ln[a1[i]]
            if a2[i] >= 0 and ln[a2[i]] > length:
                length = ln[a2[i]]
        else:
            l1 = ln[a1[i]]
            l2 = ln[a2[i]]
            if l1 + l2 > LENGTH_LIMIT:
                return 2, i, ln, 0, 0
            length = l1 + l2 - sub1 - xi
            if length < min_len:
                return 1, i, ln, 0, 0
            mu += l1 + l2 if prose else l1 + l2 - sub1
        ln[i] = length
        ru += xi
    return 0, -1, ln, mu, ru


def search_min(kind, p1, p2, maxx, input_len, min_len, sub1, prose, a, b, d0, lo, hi):
    """Enumerate every plan bounded by ``maxx`` and return the best.

    Plans are visited in lexicographic order over the relinearizable
    vertices (topological order, first vertex most significant), keeping
    only strict improvements of (cost, total relin); the winner is
    therefore the lexicographically smallest plan among the optima.
    When ``d0 >= 0`` the first free vertex is restricted to ``[lo, hi)``
    (used to partition the space across threads).

    Returns ``(found, cost, sumx, plan)``.
    """
    kind = _as_list(kind)
    a1 = _as_list(p1)
    a2 = _as_list(p2)
    mx = _as_list(maxx)
    n = len(kind)
    free = [i for i in range(n) if mx[i] > 0]
    ranges = []
    for slot, i in enumerate(free):
        if slot == 0 and d0 >= 0:
            ranges.append(range(lo, hi))
        else:
            ranges.append(range(mx[i] + 1))
    xs = [0] * n
    best_cost = best_ru = 0
    best_plan = None
    ln = [0] * n
    for combo in _product(*ranges):
        for slot, i in enumerate(free):
            xs[i] = combo[slot]
        mu = 0
        ru = 0
        ok = True
        for i in range(n):
            k = kind[i]
            if k == 0:
                length = input_len
            elif k == 2:
                length = ln[a1[i]]
                other = ln[a2[i]]
                if other > length:
                    length = other
                length -= xs[i]
                if length < min_len:
                    length = min_len
            elif k == 1:
                length = ln[a1[i]]
                if a2[i] >= 0 and ln[a2[i]] > length:
                    length = ln[a2[i]]
            else:
                l1 = ln[a1[i]]
                l2 = ln[a2[i]]
                if l1 + l2 > LENGTH_LIMIT:
                    ok = False
                    break
                length = l1 + l2 - sub1 - xs[i]
                if length < min_len:
                    ok = False
                    break
                mu += l1 + l2 if prose else l1 + l2 - sub1
            ln[i] = length
            ru += xs[i]
        if not ok:
            continue
        cost = a * mu + b * ru
        if best_plan is None or cost < best_cost or (cost == best_cost and ru < best_ru):
            best_cost = cost
            best_ru = ru
            best_plan = xs.copy()
    if best_plan is None:
        return False, 0, 0, []
    return True, best_cost, best_ru, best_plan


def dp_tables(kind, p1, p2, hi, input_len, min_len, sub1, prose, a, b):
    """Fill the per-vertex length-indexed cost tables.

    ``M[v][l]`` is the minimal scaled cost of the cone under ``v`` when
    ``v`` is left at length ``l``; ``S`` tracks total relin for
    tie-breaking; ``B1``/``B2`` record the chosen parent lengths.
    Candidates are scanned in ascending parent-length order and replaced
    only on strict (cost, relin) improvement, so backpointers are
    deterministic.  Returns numpy arrays (M, S, B1, B2).
    """
    kind = _as_list(kind)
    a1 = _as_list(p1)
    a2 = _as_list(p2)
    hi = _as_list(hi)
    n = len(kind)
    width = (max(hi) if hi else min_len) + 1
    M = [[INF] * width for _ in range(n)]
    S = [[0] * width for _ in range(n)]
    B1 = [[-1] * width for _ in range(n)]
    B2 = [[-1] * width for _ in range(n)]
    for i in range(n):
        k = kind[i]
        mi, si, b1i, b2i = M[i], S[i], B1[i], B2[i]
        if k == 0:
            mi[input_len] = 0
            continue
        q1 = a1[i]
        m1, s1 = M[q1], S[q1]
        if k == 4:
            for l1 in range(min_len, hi[q1] + 1):
                c1 = m1[l1]
                if c1 >= INF:
                    continue
                raw = 2 * l1 - sub1
                mul_units = 2 * l1 if prose else raw
                top = raw if raw < hi[i] else hi[i]
                for l in range(min_len, top + 1):
                    relin = raw - l
                    cand = c1 + a * mul_units + b * relin
                    cs = s1[l1] + relin
                    if cand < mi[l] or (cand == mi[l] and cs < si[l]):
                        mi[l] = cand
                        si[l] = cs
                        b1i[l] = l1
            continue
        if k == 1 and a2[i] < 0:
            for l in range(min_len, hi[q1] + 1):
                if m1[l] < INF:
                    mi[l] = m1[l]
                    si[l] = s1[l]
                    b1i[l] = l
            continue
        q2 = a2[i]
        m2, s2 = M[q2], S[q2]
        for l1 in range(min_len, hi[q1] + 1):
            c1 = m1[l1]
            if c1 >= INF:
                continue
            for l2 in range(min_len, hi[q2] + 1):
                c2 = m2[l2]
                if c2 >= INF:
                    continue
                base = c1 + c2
                bs = s1[l1] + s2[l2]
                if k == 1:
                    l = l1 if l1 > l2 else l2
                    if l <= hi[i] and (base < mi[l] or (base == mi[l] and bs < si[l])):
                        mi[l] = base
                        si[l] = bs
                        b1i[l] = l1
                        b2i[l] = l2
                    continue
                if k == 2:
                    reach = l1 if l1 > l2 else l2
                    mul_units = 0
                else:
                    reach = l1 + l2 - sub1
                    mul_units = l1 + l2 if prose else reach
                top = reach if reach < hi[i] else hi[i]
                for l in range(min_len, top + 1):
                    relin = reach - l
                    cand = base + a * mul_units + b * relin
                    cs = bs + relin
                    if cand < mi[l] or (cand == mi[l] and cs < si[l]):
                        mi[l] = cand
                        si[l] = cs
                        b1i[l] = l1
                        b2i[l] = l2
    return (
        np.array(M, dtype=np.int64),
        np.array(S, dtype=np.int64),
        np.array(B1, dtype=np.int32),
        np.array(B2, dtype=np.int32),
    )
