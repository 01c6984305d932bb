"""Pure numpy implementations of the solver kernels.

These mirror the compiled extension in `_speedups.pyx` and are selected at
import time when the extension is unavailable (or RANDMATCH_PURE=1).  All
functions take raw arrays, do no validation, and are deterministic.
"""

from __future__ import annotations

import numpy as np

_INF = np.inf


def hungarian(c: np.ndarray) -> np.ndarray:
    """Optimal assignment by shortest augmenting paths with dual potentials.

    Returns perm with perm[row] = column.  O(n^3).  Exact on integer-valued
    input (only additions and subtractions touch the costs).
    """
    c = np.ascontiguousarray(c, dtype=np.float64)
    n = c.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    # match[j] = row assigned to column j, 1-indexed; column 0 is virtual
    match = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(n + 1, _INF)
        way = np.zeros(n + 1, dtype=np.int64)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            cur = c[i0 - 1, :] - u[i0] - v[1:]
            unused = ~used[1:]
            better = unused & (cur < minv[1:])
            minv1 = minv[1:]
            way1 = way[1:]
            minv1[better] = cur[better]
            way1[better] = j0
            masked = np.where(unused, minv1, _INF)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[match[used]] += delta
            v[used] -= delta
            minv1[unused] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    perm = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        perm[match[j] - 1] = j - 1
    return perm


def greedy(c: np.ndarray) -> np.ndarray:
    """Column-by-column greedy: each column takes the cheapest unassigned row.

    Ties break toward the lowest row index.  Returns perm[row] = column.
    """
    c = np.asarray(c, dtype=np.float64)
    n = c.shape[0]
    perm = np.full(n, -1, dtype=np.int64)
    free = np.ones(n, dtype=bool)
    for j in range(n):
        col = np.where(free, c[:, j], _INF)
        i = int(np.argmin(col))
        perm[i] = j
        free[i] = False
    return perm


def auction(c: np.ndarray, eps_final: float) -> np.ndarray:
    """Forward auction with epsilon scaling (factor 4 per phase).

    Minimizes by bidding on values -c.  Prices start at zero and persist
    across phases.  The returned assignment costs at most optimal +
    n * eps_final; integer costs with eps_final < 1/n are solved exactly.
    """
    c = np.asarray(c, dtype=np.float64)
    n = c.shape[0]
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    a = -c
    price = np.zeros(n)
    span = float(a.max() - a.min())
    eps = max(float(eps_final), span / 2.0)
    while True:
        owner = np.full(n, -1, dtype=np.int64)
        item_of = np.full(n, -1, dtype=np.int64)
        stack = list(range(n - 1, -1, -1))
        while stack:
            i = stack.pop()
            values = a[i] - price
            j = int(np.argmax(values))
            v1 = values[j]
            values[j] = -_INF
            v2 = float(values.max())
            price[j] += v1 - v2 + eps
            prev = owner[j]
            owner[j] = i
            item_of[i] = j
            if prev >= 0:
                item_of[prev] = -1
                stack.append(prev)
        if eps <= eps_final:
            return item_of
        eps = max(eps / 4.0, eps_final)


def ssp_transport(c: np.ndarray, p_units: np.ndarray, q_units: np.ndarray):
    """Exact transportation problem via successive shortest paths.

    Supplies and demands are nonnegative int64 mass units with equal sums;
    integrality guarantees termination for arbitrary real costs.  Dijkstra
    runs on reduced costs kept nonnegative by node potentials.

    Returns (flow, pot_src, pot_snk): int64 flow matrix in the same units,
    and the terminal node potentials.  Optimality certificate: every pair
    satisfies c[i, j] + pot_src[i] - pot_snk[j] >= 0 (up to roundoff), with
    equality on arcs carrying flow.
    """
    c = np.ascontiguousarray(c, dtype=np.float64)
    m = c.shape[0]
    flow = np.zeros((m, m), dtype=np.int64)
    a = np.asarray(p_units, dtype=np.int64).copy()
    b = np.asarray(q_units, dtype=np.int64).copy()
    pot_src = np.zeros(m)
    pot_snk = np.zeros(m)
    remaining = int(a.sum())
    guard = 20 * m * m + 10_000
    phases = 0
    while remaining > 0:
        phases += 1
        if phases > guard:
            raise RuntimeError("transport solver exceeded its phase budget")
        dist_src = np.where(a > 0, 0.0, _INF)
        dist_snk = np.full(m, _INF)
        pred_snk = np.full(m, -1, dtype=np.int64)
        pred_src = np.full(m, -1, dtype=np.int64)
        done_src = np.zeros(m, dtype=bool)
        done_snk = np.zeros(m, dtype=bool)
        while True:
            ds = np.where(done_src, _INF, dist_src)
            dk = np.where(done_snk, _INF, dist_snk)
            i = int(np.argmin(ds))
            j = int(np.argmin(dk))
            if ds[i] <= dk[j]:
                if ds[i] == _INF:
                    break
                done_src[i] = True
                rc = c[i, :] + pot_src[i] - pot_snk
                np.maximum(rc, 0.0, out=rc)
                nd = dist_src[i] + rc
                upd = nd < dist_snk
                if upd.any():
                    dist_snk[upd] = nd[upd]
                    pred_snk[upd] = i
            else:
                if dk[j] == _INF:
                    break
                done_snk[j] = True
                rc = pot_snk[j] - c[:, j] - pot_src
                np.maximum(rc, 0.0, out=rc)
                nd = np.where(flow[:, j] > 0, dist_snk[j] + rc, _INF)
                upd = nd < dist_src
                if upd.any():
                    dist_src[upd] = nd[upd]
                    pred_src[upd] = j
        cand = np.where(b > 0, dist_snk, _INF)
        t = int(np.argmin(cand))
        dt = cand[t]
        if not np.isfinite(dt):
            raise RuntimeError("transportation network disconnected")
        pot_src += np.minimum(dist_src, dt)
        pot_snk += np.minimum(dist_snk, dt)
        # walk predecessors back to a supply node, collecting the path
        fwd = []
        bwd = []
        cur = t
        while True:
            i = int(pred_snk[cur])
            fwd.append((i, cur))
            j_prev = int(pred_src[i])
            if j_prev < 0:
                root = i
                break
            bwd.append((i, j_prev))
            cur = j_prev
        delta = min(int(a[root]), int(b[t]))
        for i, j in bwd:
            delta = min(delta, int(flow[i, j]))
        for i, j in fwd:
            flow[i, j] += delta
        for i, j in bwd:
            flow[i, j] -= delta
        a[root] -= delta
        b[t] -= delta
        remaining -= delta
    return flow, pot_src, pot_snk
