"""Square assignment problem solvers: exact, bounded-suboptimal, and greedy.

All solvers return an `Assignment` mapping row i to column perm[i].  The
brute-force enumerator exists as a test oracle and refuses n > 9.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _kernels

BRUTE_FORCE_MAX_N = 9


@dataclass(frozen=True)
class Assignment:
    """A permutation of row indices onto column indices with its total cost."""

    perm: np.ndarray
    cost: float

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        n = perm.shape[0]
        if perm.ndim != 1 or n == 0:
            raise ValueError("perm must be a nonempty 1-D index vector")
        if not np.array_equal(np.sort(perm), np.arange(n)):
            raise ValueError("perm must be a bijection on {0,...,n-1}")
        perm = perm.copy()
        perm.setflags(write=False)
        object.__setattr__(self, "perm", perm)

    @property
    def n(self) -> int:
        return self.perm.shape[0]


def _check_matrix(c, allow_nonfinite: bool = False) -> np.ndarray:
    a = np.asarray(c, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError("cost matrix must be square and nonempty")
    if not allow_nonfinite and not np.all(np.isfinite(a)):
        raise ValueError("cost matrix entries must be finite")
    return a


def _with_cost(c: np.ndarray, perm: np.ndarray) -> Assignment:
    cost = float(c[np.arange(c.shape[0]), perm].sum())
    return Assignment(perm=perm, cost=cost)


def brute_force_assign(c) -> Assignment:
    """Globally optimal assignment by exhaustive enumeration (oracle, n <= 9)."""
    a = _check_matrix(c)
    n = a.shape[0]
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force enumerates n! permutations; n={n} exceeds {BRUTE_FORCE_MAX_N}")
    rows = np.arange(n)
    best_perm = None
    best_cost = np.inf
    for perm in itertools.permutations(range(n)):
        cost = a[rows, perm].sum()
        if cost < best_cost:
            best_cost = cost
            best_perm = perm
    return Assignment(perm=np.array(best_perm, dtype=np.int64), cost=float(best_cost))


def hungarian(c) -> Assignment:
    """Exact minimum-cost assignment in O(n^3)."""
    a = _check_matrix(c)
    return _with_cost(a, _kernels.hungarian(a))


def auction(c, epsilon: float | None = None) -> Assignment:
    """Forward auction with epsilon scaling.

    Cost is within n * epsilon of optimal; integer cost matrices with
    epsilon < 1/n are solved exactly.  `epsilon=None` picks 1/(n+1), which
    makes integer inputs exact.
    """
    a = _check_matrix(c)
    n = a.shape[0]
    if epsilon is None:
        epsilon = 1.0 / (n + 1)
    if not epsilon > 0:
        raise ValueError("auction requires epsilon > 0")
    return _with_cost(a, _kernels.auction(a, float(epsilon)))


def greedy_assign(c) -> Assignment:
    """Greedy upper bound: columns in index order take the cheapest free row."""
    a = _check_matrix(c)
    return _with_cost(a, _kernels.greedy(a))


def assignment_to_ot_value(a: Assignment, n: int) -> float:
    """Transport value of the assignment under uniform marginals (cost / n)."""
    if n != a.n:
        raise ValueError("n must match the assignment size")
    return a.cost / n
