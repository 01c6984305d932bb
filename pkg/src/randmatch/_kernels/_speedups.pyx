# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled solver kernels.

Same contracts as `_pure.py`; see that module for the algorithm notes.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double INF = float("inf")


def hungarian(c_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] c = \
        np.ascontiguousarray(c_in, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u = np.zeros(n + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.zeros(n + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] minv = np.empty(n + 1)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] match = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] way = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] used = np.zeros(n + 1, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] perm = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t i, j, i0, j0, j1
    cdef double cur, delta

    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        for j in range(n + 1):
            minv[j] = INF
            way[j] = 0
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = match[j0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = c[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    for j in range(1, n + 1):
        perm[match[j] - 1] = j - 1
    return perm


def greedy(c_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] c = \
        np.ascontiguousarray(c_in, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] perm = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] free = np.ones(n, dtype=np.uint8)
    cdef Py_ssize_t i, j, best
    cdef double best_val
    for j in range(n):
        best = -1
        best_val = INF
        for i in range(n):
            if free[i] and c[i, j] < best_val:
                best_val = c[i, j]
                best = i
        perm[best] = j
        free[best] = 0
    return perm


def auction(c_in, double eps_final):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] c = \
        np.ascontiguousarray(c_in, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] item_of = np.full(n, -1, dtype=np.int64)
    if n == 1:
        item_of[0] = 0
        return item_of
    cdef cnp.ndarray[cnp.float64_t, ndim=1] price = np.zeros(n)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] owner = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] stack = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t top, i, j, jbest, prev
    cdef double lo, hi, span, eps, val, v1, v2

    lo = c[0, 0]
    hi = c[0, 0]
    for i in range(n):
        for j in range(n):
            if c[i, j] < lo:
                lo = c[i, j]
            if c[i, j] > hi:
                hi = c[i, j]
    span = hi - lo
    eps = span / 2.0
    if eps < eps_final:
        eps = eps_final
    while True:
        for i in range(n):
            owner[i] = -1
            item_of[i] = -1
            stack[i] = n - 1 - i
        top = n
        while top > 0:
            top -= 1
            i = stack[top]
            jbest = 0
            v1 = -c[i, 0] - price[0]
            v2 = -INF
            for j in range(1, n):
                val = -c[i, j] - price[j]
                if val > v1:
                    v2 = v1
                    v1 = val
                    jbest = j
                elif val > v2:
                    v2 = val
            price[jbest] += v1 - v2 + eps
            prev = owner[jbest]
            owner[jbest] = i
            item_of[i] = jbest
            if prev >= 0:
                item_of[prev] = -1
                stack[top] = prev
                top += 1
        if eps <= eps_final:
            return item_of
        eps = eps / 4.0
        if eps < eps_final:
            eps = eps_final


def ssp_transport(c_in, p_units, q_units):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] c = \
        np.ascontiguousarray(c_in, dtype=np.float64)
    cdef Py_ssize_t m = c.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] flow = np.zeros((m, m), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] a = np.asarray(p_units, dtype=np.int64).copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] b = np.asarray(q_units, dtype=np.int64).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pot_src = np.zeros(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pot_snk = np.zeros(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist_src = np.empty(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist_snk = np.empty(m)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pred_src = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pred_snk = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done_src = np.empty(m, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done_snk = np.empty(m, dtype=np.uint8)

    cdef long long remaining = 0, delta, guard, phases
    cdef Py_ssize_t i, j, k, t, root, cur, best_src, best_snk
    cdef double d_src, d_snk, rc, nd, dt
    cdef bint src_side

    for i in range(m):
        remaining += a[i]
    guard = 20 * m * m + 10_000
    phases = 0
    while remaining > 0:
        phases += 1
        if phases > guard:
            raise RuntimeError("transport solver exceeded its phase budget")
        for i in range(m):
            dist_src[i] = 0.0 if a[i] > 0 else INF
            dist_snk[i] = INF
            pred_src[i] = -1
            pred_snk[i] = -1
            done_src[i] = 0
            done_snk[i] = 0
        while True:
            d_src = INF
            best_src = -1
            d_snk = INF
            best_snk = -1
            for i in range(m):
                if not done_src[i] and dist_src[i] < d_src:
                    d_src = dist_src[i]
                    best_src = i
                if not done_snk[i] and dist_snk[i] < d_snk:
                    d_snk = dist_snk[i]
                    best_snk = i
            if best_src < 0 and best_snk < 0:
                break
            src_side = best_src >= 0 and d_src <= d_snk
            if src_side:
                i = best_src
                done_src[i] = 1
                for j in range(m):
                    rc = c[i, j] + pot_src[i] - pot_snk[j]
                    if rc < 0.0:
                        rc = 0.0
                    nd = d_src + rc
                    if nd < dist_snk[j]:
                        dist_snk[j] = nd
                        pred_snk[j] = i
            else:
                j = best_snk
                done_snk[j] = 1
                for i in range(m):
                    if flow[i, j] > 0:
                        rc = pot_snk[j] - c[i, j] - pot_src[i]
                        if rc < 0.0:
                            rc = 0.0
                        nd = d_snk + rc
                        if nd < dist_src[i]:
                            dist_src[i] = nd
                            pred_src[i] = j
        t = -1
        dt = INF
        for j in range(m):
            if b[j] > 0 and dist_snk[j] < dt:
                dt = dist_snk[j]
                t = j
        if t < 0:
            raise RuntimeError("transportation network disconnected")
        for i in range(m):
            pot_src[i] += dist_src[i] if dist_src[i] < dt else dt
            pot_snk[i] += dist_snk[i] if dist_snk[i] < dt else dt
        # trace back to a supply node; bottleneck over endpoint masses and
        # the reverse arcs used
        delta = b[t]
        cur = t
        root = -1
        while True:
            i = pred_snk[cur]
            j = pred_src[i]
            if j < 0:
                root = i
                break
            if flow[i, j] < delta:
                delta = flow[i, j]
            cur = j
        if a[root] < delta:
            delta = a[root]
        cur = t
        while True:
            i = pred_snk[cur]
            flow[i, cur] += delta
            j = pred_src[i]
            if j < 0:
                break
            flow[i, j] -= delta
            cur = j
        a[root] -= delta
        b[t] -= delta
        remaining -= delta
    return flow, pot_src, pot_snk
