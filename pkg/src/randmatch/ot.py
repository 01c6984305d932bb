"""Exact discrete optimal transport: primal and dual solvers plus duality checks.

The primal solver runs successive shortest paths on the bipartite
transportation graph after scaling the marginals to integer mass units
(``MASS_UNITS``), which guarantees termination for arbitrary real-valued
marginals at a perturbation far below the feasibility tolerance.  Dual
potentials are read off the terminal node potentials of the same run; the
restricted metric dual is solved by an independent LP so the two routes
never share code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import _kernels
from .errors import NumericError

MASS_UNITS = 10**15

FEAS_TOL = 1e-9
SIMPLEX_TOL = 1e-12
METRIC_TOL = 1e-9


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-D vector")
    return v


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability vector over m states."""

    mass: np.ndarray

    def __post_init__(self):
        v = _as_vector(self.mass, "mass")
        if np.any(v < 0):
            raise ValueError("distribution entries must be nonnegative")
        if abs(float(v.sum()) - 1.0) > SIMPLEX_TOL:
            raise ValueError("distribution entries must sum to 1")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "mass", v)

    @property
    def m(self) -> int:
        return self.mass.shape[0]


@dataclass(frozen=True)
class CostMatrix:
    """Square nonnegative cost matrix; is_metric asserts (and checks) metric axioms."""

    c: np.ndarray
    is_metric: bool = False

    def __post_init__(self):
        a = np.asarray(self.c, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError("cost matrix must be square and nonempty")
        if not np.all(np.isfinite(a)):
            raise ValueError("cost matrix entries must be finite")
        if np.any(a < 0):
            raise ValueError("cost matrix entries must be nonnegative")
        if self.is_metric:
            if np.any(np.abs(np.diag(a)) > METRIC_TOL):
                raise ValueError("metric cost must have a zero diagonal")
            if np.any(np.abs(a - a.T) > METRIC_TOL):
                raise ValueError("metric cost must be symmetric")
            closure = np.min(a[:, :, None] + a[None, :, :], axis=1)
            if np.any(a > closure + METRIC_TOL):
                raise ValueError("metric cost must satisfy the triangle inequality")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "c", a)

    @property
    def m(self) -> int:
        return self.c.shape[0]


@dataclass(frozen=True)
class TransportPlan:
    """Feasible transport plan pi with its objective value."""

    pi: np.ndarray
    value: float


@dataclass(frozen=True)
class DualSolution:
    """Dual potentials (gamma for the row marginal, lam for the column one)."""

    gamma: np.ndarray
    lam: np.ndarray
    value: float


def as_cost(c) -> CostMatrix:
    return c if isinstance(c, CostMatrix) else CostMatrix(np.asarray(c, dtype=np.float64))


def as_distribution(p) -> DiscreteDistribution:
    return p if isinstance(p, DiscreteDistribution) else DiscreteDistribution(np.asarray(p, dtype=np.float64))


def _mass_units(mass: np.ndarray, units: int) -> np.ndarray:
    """Scale a probability vector to integers summing exactly to `units`."""
    scaled = np.floor(mass * units + 0.5).astype(np.int64)
    scaled[scaled < 0] = 0
    residual = units - int(scaled.sum())
    if residual != 0:
        k = int(np.argmax(mass))
        if scaled[k] + residual < 0:
            raise NumericError("marginal scaling failed; distribution too degenerate")
        scaled[k] += residual
    return scaled


def _check_instance(c: CostMatrix, p: DiscreteDistribution, q: DiscreteDistribution):
    if p.m != c.m or q.m != c.m:
        raise ValueError(
            f"dimension mismatch: cost is {c.m}x{c.m}, marginals have {p.m} and {q.m} states"
        )


def _solve_units(c_arr: np.ndarray, p_units: np.ndarray, q_units: np.ndarray):
    flow, pot_src, pot_snk = _kernels.ssp_transport(c_arr, p_units, q_units)
    return flow, pot_src, pot_snk


def solve_ot_primal(c, p, q) -> TransportPlan:
    """Minimum-cost transport plan between p and q under cost c (exact)."""
    c = as_cost(c)
    p = as_distribution(p)
    q = as_distribution(q)
    _check_instance(c, p, q)
    pu = _mass_units(p.mass, MASS_UNITS)
    qu = _mass_units(q.mass, MASS_UNITS)
    flow, _, _ = _solve_units(c.c, pu, qu)
    pi = flow.astype(np.float64) / MASS_UNITS
    value = float(np.sum(c.c * pi))
    pi.setflags(write=False)
    return TransportPlan(pi=pi, value=value)


def solve_ot_dual(c, p, q) -> DualSolution:
    """Optimal dual potentials, read from the primal solver's terminal state."""
    c = as_cost(c)
    p = as_distribution(p)
    q = as_distribution(q)
    _check_instance(c, p, q)
    pu = _mass_units(p.mass, MASS_UNITS)
    qu = _mass_units(q.mass, MASS_UNITS)
    _, pot_src, pot_snk = _solve_units(c.c, pu, qu)
    gamma = -pot_src
    lam = pot_snk.copy()
    # zero-mass states may carry drifted potentials; tighten them so the
    # constraint set holds for every pair without changing the objective
    for j in np.flatnonzero(qu == 0):
        lam[j] = float(np.min(c.c[:, j] - gamma))
    for i in np.flatnonzero(pu == 0):
        gamma[i] = float(np.min(c.c[i, :] - lam))
    value = float(gamma @ p.mass + lam @ q.mass)
    gamma.setflags(write=False)
    lam.setflags(write=False)
    return DualSolution(gamma=gamma, lam=lam, value=value)


def transport_value(c: np.ndarray, p_units: np.ndarray, q_units: np.ndarray) -> float:
    """Fast path: exact optimal transport cost for integer mass units.

    Returns the cost in mass units; divide by the total units for the
    distribution-level value.  No validation beyond what the kernel needs.
    """
    flow, _, _ = _kernels.ssp_transport(np.asarray(c, dtype=np.float64), p_units, q_units)
    return float(np.sum(np.asarray(c, dtype=np.float64) * flow))


def metric_dual_restricted(c, p, q) -> float:
    """Best potential value under |lam_i - lam_j| <= c[i][j] (metric costs only).

    Solved as an independent LP, deliberately sharing nothing with the
    flow-based primal/dual pair.
    """
    c = as_cost(c)
    if not c.is_metric:
        raise ValueError("metric_dual_restricted requires a cost matrix flagged is_metric")
    p = as_distribution(p)
    q = as_distribution(q)
    _check_instance(c, p, q)
    m = c.m
    if m == 1:
        return 0.0
    rows = []
    rhs = []
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            row = np.zeros(m)
            row[i] = 1.0
            row[j] = -1.0
            rows.append(row)
            rhs.append(c.c[i, j])
    res = linprog(
        c=p.mass - q.mass,
        A_ub=np.array(rows),
        b_ub=np.array(rhs),
        bounds=[(None, None)] * m,
        method="highs",
    )
    if not res.success:
        raise NumericError(f"restricted dual LP failed: {res.message}")
    return float(-res.fun)


def duality_gap(plan: TransportPlan, dual: DualSolution) -> float:
    """plan.value - dual.value; nonnegative (weak duality) up to roundoff."""
    return plan.value - dual.value
