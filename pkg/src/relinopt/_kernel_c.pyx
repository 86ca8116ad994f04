# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: length propagation, plan enumeration, and the
length-indexed dynamic program.

Mirrors ``_kernel_py`` function for function — same argument order, same
return shapes, same tie-breaking — so the two backends are
interchangeable.  Costs are scaled int64; callers keep magnitudes within
range (lengths are guarded by ``LENGTH_LIMIT``).
"""

import numpy as np

from libc.stdint cimport int32_t, int64_t

LENGTH_LIMIT = 1 << 40
INF = 1 << 62

cdef int64_t _LIMIT = (<int64_t>1) << 40
cdef int64_t _INF = (<int64_t>1) << 62


cdef inline object _i64(object a):
    return np.ascontiguousarray(a, dtype=np.int64)


def evaluate(kind, p1, p2, x, int input_len, int min_len, int sub1, bint prose):
    cdef const int64_t[::1] kv = _i64(kind)
    cdef const int64_t[::1] a1 = _i64(p1)
    cdef const int64_t[::1] a2 = _i64(p2)
    cdef const int64_t[::1] xs = _i64(x)
    cdef Py_ssize_t n = kv.shape[0]
    ln_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] ln = ln_arr
    cdef int64_t mu = 0, ru = 0, length, other, l1, l2, xi
    cdef int64_t k
    cdef Py_ssize_t i
    for i in range(n):
        k = kv[i]
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
            if l1 + l2 > _LIMIT:
                return 2, i, ln_arr.tolist(), 0, 0
            length = l1 + l2 - sub1 - xi
            if length < min_len:
                return 1, i, ln_arr.tolist(), 0, 0
            mu += l1 + l2 if prose else l1 + l2 - sub1
        ln[i] = length
        ru += xi
    return 0, -1, ln_arr.tolist(), mu, ru


def search_min(kind, p1, p2, maxx, int input_len, int min_len, int sub1, bint prose,
               int64_t a, int64_t b, int d0, int64_t lo, int64_t hi):
    """Enumerate every plan bounded by ``maxx`` and return the best.

    Identical order and tie-breaking to the pure twin: lexicographic over
    free vertices in topological order, strict improvement of
    (cost, total relin).  ``d0 >= 0`` restricts the first free vertex to
    ``[lo, hi)``.  Returns ``(found, cost, sumx, plan)``.
    """
    cdef const int64_t[::1] kv = _i64(kind)
    cdef const int64_t[::1] a1 = _i64(p1)
    cdef const int64_t[::1] a2 = _i64(p2)
    cdef const int64_t[::1] mx = _i64(maxx)
    cdef Py_ssize_t n = kv.shape[0]
    cdef Py_ssize_t i, slot
    cdef Py_ssize_t nf = 0
    for i in range(n):
        if mx[i] > 0:
            nf += 1
    fv_arr = np.zeros(nf, dtype=np.int64)
    starts_arr = np.zeros(nf, dtype=np.int64)
    stops_arr = np.zeros(nf, dtype=np.int64)
    cdef int64_t[::1] fv = fv_arr
    cdef int64_t[::1] starts = starts_arr
    cdef int64_t[::1] stops = stops_arr
    slot = 0
    for i in range(n):
        if mx[i] > 0:
            fv[slot] = i
            if slot == 0 and d0 >= 0:
                starts[slot] = lo
                stops[slot] = hi
            else:
                starts[slot] = 0
                stops[slot] = mx[i] + 1
            if starts[slot] >= stops[slot]:
                return False, 0, 0, []
            slot += 1
    xs_arr = np.zeros(n, dtype=np.int64)
    best_arr = np.zeros(n, dtype=np.int64)
    ln_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] xs = xs_arr
    cdef int64_t[::1] best_xs = best_arr
    cdef int64_t[::1] ln = ln_arr
    for slot in range(nf):
        xs[fv[slot]] = starts[slot]
    cdef bint found = False, ok
    cdef int64_t best_cost = 0, best_ru = 0
    cdef int64_t mu, ru, cost, length, other, l1, l2, k
    cdef Py_ssize_t j
    while True:
        mu = 0
        ru = 0
        ok = True
        for i in range(n):
            k = kv[i]
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
                if l1 + l2 > _LIMIT:
                    ok = False
                    break
                length = l1 + l2 - sub1 - xs[i]
                if length < min_len:
                    ok = False
                    break
                mu += l1 + l2 if prose else l1 + l2 - sub1
            ln[i] = length
            ru += xs[i]
        if ok:
            cost = a * mu + b * ru
            if not found or cost < best_cost or (cost == best_cost and ru < best_ru):
                found = True
                best_cost = cost
                best_ru = ru
                for j in range(n):
                    best_xs[j] = xs[j]
        slot = nf - 1
        while slot >= 0:
            i = fv[slot]
            xs[i] += 1
            if xs[i] < stops[slot]:
                break
            xs[i] = starts[slot]
            slot -= 1
        if slot < 0:
            break
    if not found:
        return False, 0, 0, []
    return True, best_cost, best_ru, best_arr.tolist()


def dp_tables(kind, p1, p2, hi, int input_len, int min_len, int sub1, bint prose,
              int64_t a, int64_t b):
    """Fill the per-vertex length-indexed cost tables.

    Same scan order and strict (cost, relin) improvement rule as the pure
    twin, so backpointers agree exactly.  Returns numpy (M, S, B1, B2).
    """
    cdef const int64_t[::1] kv = _i64(kind)
    cdef const int64_t[::1] a1 = _i64(p1)
    cdef const int64_t[::1] a2 = _i64(p2)
    cdef const int64_t[::1] hiv = _i64(hi)
    cdef Py_ssize_t n = kv.shape[0]
    cdef int64_t width = min_len + 1
    cdef Py_ssize_t i
    for i in range(n):
        if hiv[i] + 1 > width:
            width = hiv[i] + 1
    M_arr = np.full((n, width), INF, dtype=np.int64)
    S_arr = np.zeros((n, width), dtype=np.int64)
    B1_arr = np.full((n, width), -1, dtype=np.int32)
    B2_arr = np.full((n, width), -1, dtype=np.int32)
    cdef int64_t[:, ::1] M = M_arr
    cdef int64_t[:, ::1] S = S_arr
    cdef int32_t[:, ::1] B1 = B1_arr
    cdef int32_t[:, ::1] B2 = B2_arr
    cdef int64_t k, q1, q2, l1, l2, l, c1, c2, raw, reach, top, relin
    cdef int64_t mul_units, cand, cs, base, bs
    for i in range(n):
        k = kv[i]
        if k == 0:
            M[i, input_len] = 0
            continue
        q1 = a1[i]
        if k == 4:
            for l1 in range(min_len, hiv[q1] + 1):
                c1 = M[q1, l1]
                if c1 >= _INF:
                    continue
                raw = 2 * l1 - sub1
                mul_units = 2 * l1 if prose else raw
                top = raw if raw < hiv[i] else hiv[i]
                for l in range(min_len, top + 1):
                    relin = raw - l
                    cand = c1 + a * mul_units + b * relin
                    cs = S[q1, l1] + relin
                    if cand < M[i, l] or (cand == M[i, l] and cs < S[i, l]):
                        M[i, l] = cand
                        S[i, l] = cs
                        B1[i, l] = <int32_t>l1
            continue
        if k == 1 and a2[i] < 0:
            for l in range(min_len, hiv[q1] + 1):
                if M[q1, l] < _INF:
                    M[i, l] = M[q1, l]
                    S[i, l] = S[q1, l]
                    B1[i, l] = <int32_t>l
            continue
        q2 = a2[i]
        for l1 in range(min_len, hiv[q1] + 1):
            c1 = M[q1, l1]
            if c1 >= _INF:
                continue
            for l2 in range(min_len, hiv[q2] + 1):
                c2 = M[q2, l2]
                if c2 >= _INF:
                    continue
                base = c1 + c2
                bs = S[q1, l1] + S[q2, l2]
                if k == 1:
                    l = l1 if l1 > l2 else l2
                    if l <= hiv[i] and (base < M[i, l] or (base == M[i, l] and bs < S[i, l])):
                        M[i, l] = base
                        S[i, l] = bs
                        B1[i, l] = <int32_t>l1
                        B2[i, l] = <int32_t>l2
                    continue
                if k == 2:
                    reach = l1 if l1 > l2 else l2
                    mul_units = 0
                else:
                    reach = l1 + l2 - sub1
                    mul_units = l1 + l2 if prose else reach
                top = reach if reach < hiv[i] else hiv[i]
                for l in range(min_len, top + 1):
                    relin = reach - l
                    cand = base + a * mul_units + b * relin
                    cs = bs + relin
                    if cand < M[i, l] or (cand == M[i, l] and cs < S[i, l]):
                        M[i, l] = cand
                        S[i, l] = cs
                        B1[i, l] = <int32_t>l1
                        B2[i, l] = <int32_t>l2
    return M_arr, S_arr, B1_arr, B2_arr
