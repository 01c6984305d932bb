import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randmatch.ot import (
    CostMatrix,
    DiscreteDistribution,
    duality_gap,
    metric_dual_restricted,
    solve_ot_dual,
    solve_ot_primal,
)

from conftest import random_distribution, random_metric


def two_state_transport_oracle(c, p, q):
    """Enumerate the vertices of the 2x2 transportation polytope."""
    lo = max(0.0, p[0] - q[1])
    hi = min(p[0], q[0])
    best = np.inf
    for pi00 in (lo, hi):
        pi = np.array([[pi00, p[0] - pi00], [q[0] - pi00, q[1] - p[0] + pi00]])
        best = min(best, float((c * pi).sum()))
    return best


class TestTypes:
    def test_distribution_rejects_negative(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(np.array([1.2, -0.2]))

    def test_distribution_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(np.array([0.5, 0.4]))

    def test_distribution_is_immutable(self):
        d = DiscreteDistribution(np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            d.mass[0] = 1.0

    def test_cost_rejects_negative_entries(self):
        with pytest.raises(ValueError):
            CostMatrix(np.array([[0.0, -1.0], [1.0, 0.0]]))

    def test_cost_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            CostMatrix(np.zeros((2, 3)))

    def test_metric_flag_checks_diagonal(self):
        with pytest.raises(ValueError):
            CostMatrix(np.array([[1.0, 2.0], [2.0, 0.0]]), is_metric=True)

    def test_metric_flag_checks_symmetry(self):
        with pytest.raises(ValueError):
            CostMatrix(np.array([[0.0, 2.0], [3.0, 0.0]]), is_metric=True)

    def test_metric_flag_checks_triangle(self):
        c = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
        with pytest.raises(ValueError):
            CostMatrix(c, is_metric=True)


class TestPrimal:
    def test_identity_transport(self):
        c = np.array([[0.0, 1.0], [1.0, 0.0]])
        plan = solve_ot_primal(c, [0.5, 0.5], [0.5, 0.5])
        assert plan.value == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(plan.pi, np.diag([0.5, 0.5]), atol=1e-12)

    def test_forced_transport(self):
        plan = solve_ot_primal([[0.0, 3.0], [2.0, 0.0]], [1.0, 0.0], [0.0, 1.0])
        assert plan.value == pytest.approx(3.0, abs=1e-12)

    def test_two_state_against_vertex_enumeration(self):
        c = np.array([[0.0, 1.0], [1.0, 0.0]])
        p = np.array([0.5, 0.5])
        q = np.array([0.25, 0.75])
        plan = solve_ot_primal(c, p, q)
        assert plan.value == pytest.approx(0.25, abs=1e-12)
        assert plan.value == pytest.approx(two_state_transport_oracle(c, p, q), abs=1e-12)

    def test_random_two_state_matches_oracle(self, seeded_rng):
        for _ in range(50):
            c = seeded_rng.random((2, 2)) * 5
            p = random_distribution(2, seeded_rng)
            q = random_distribution(2, seeded_rng)
            plan = solve_ot_primal(c, p, q)
            assert plan.value == pytest.approx(two_state_transport_oracle(c, p, q), abs=1e-9)

    def test_marginals_and_value_consistency(self, seeded_rng):
        for _ in range(30):
            m = int(seeded_rng.integers(1, 15))
            c = seeded_rng.random((m, m)) * 10
            p = random_distribution(m, seeded_rng)
            q = random_distribution(m, seeded_rng)
            plan = solve_ot_primal(c, p, q)
            assert np.all(plan.pi >= 0)
            assert np.abs(plan.pi.sum(axis=1) - p).max() < 1e-9
            assert np.abs(plan.pi.sum(axis=0) - q).max() < 1e-9
            assert plan.value == pytest.approx(float((c * plan.pi).sum()), abs=1e-9)

    def test_zero_mass_states_get_zero_rows(self):
        c = np.ones((3, 3)) - np.eye(3)
        plan = solve_ot_primal(c, [0.5, 0.5, 0.0], [0.5, 0.5, 0.0])
        assert np.all(plan.pi[2, :] == 0)
        assert np.all(plan.pi[:, 2] == 0)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            solve_ot_primal(np.zeros((2, 2)), [1.0], [0.5, 0.5])

    def test_non_distribution_rejected(self):
        with pytest.raises(ValueError):
            solve_ot_primal(np.zeros((2, 2)), [0.7, 0.7], [0.5, 0.5])


class TestDual:
    def test_self_distance_zero(self, seeded_rng):
        m = 4
        c = random_metric(m, seeded_rng)
        p = random_distribution(m, seeded_rng)
        dual = solve_ot_dual(c, p, p)
        assert dual.value == pytest.approx(0.0, abs=1e-9)
        # gamma = lambda = 0 is feasible and optimal here
        assert np.all(0.0 <= c + 1e-12)

    def test_forced_transport_dual_value(self):
        c = [[0.0, 3.0], [2.0, 0.0]]
        dual = solve_ot_dual(c, [1.0, 0.0], [0.0, 1.0])
        primal = solve_ot_primal(c, [1.0, 0.0], [0.0, 1.0])
        assert dual.value == pytest.approx(3.0, abs=1e-9)
        assert abs(primal.value - dual.value) <= 1e-6

    def test_feasibility_of_potentials(self, seeded_rng):
        for _ in range(30):
            m = int(seeded_rng.integers(1, 15))
            c = seeded_rng.random((m, m)) * 8
            p = random_distribution(m, seeded_rng)
            q = random_distribution(m, seeded_rng)
            dual = solve_ot_dual(c, p, q)
            assert np.all(dual.gamma[:, None] + dual.lam[None, :] <= c + 1e-9)
            assert dual.value == pytest.approx(float(dual.gamma @ p + dual.lam @ q), abs=1e-9)

    def test_weak_duality_against_suboptimal_plans(self, seeded_rng):
        m = 5
        c = seeded_rng.random((m, m)) * 3
        p = random_distribution(m, seeded_rng)
        q = random_distribution(m, seeded_rng)
        dual = solve_ot_dual(c, p, q)
        # outer-product plan is always feasible
        pi = np.outer(p, q)
        assert dual.value <= float((c * pi).sum()) + 1e-9


class TestStrongDuality:
    def test_sweep_up_to_m20(self, seeded_rng):
        for _ in range(100):
            m = int(seeded_rng.integers(1, 21))
            c = seeded_rng.random((m, m)) * 10
            p = random_distribution(m, seeded_rng)
            q = random_distribution(m, seeded_rng)
            primal = solve_ot_primal(c, p, q)
            dual = solve_ot_dual(c, p, q)
            assert abs(primal.value - dual.value) <= 1e-6

    def test_degenerate_marginals(self, seeded_rng):
        c = seeded_rng.random((4, 4)) * 2
        p = np.array([1.0, 0.0, 0.0, 0.0])
        q = np.array([0.0, 0.0, 0.5, 0.5])
        primal = solve_ot_primal(c, p, q)
        dual = solve_ot_dual(c, p, q)
        assert abs(primal.value - dual.value) <= 1e-6


class TestMetricDualRestricted:
    def test_identical_marginals(self, seeded_rng):
        c = CostMatrix(random_metric(5, seeded_rng), is_metric=True)
        p = random_distribution(5, seeded_rng)
        assert metric_dual_restricted(c, p, p) == pytest.approx(0.0, abs=1e-9)

    def test_two_state_forced(self):
        c = CostMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]), is_metric=True)
        value = metric_dual_restricted(c, [1.0, 0.0], [0.0, 1.0])
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_matches_primal_on_random_metrics(self, seeded_rng):
        for _ in range(30):
            m = int(seeded_rng.integers(2, 11))
            c = CostMatrix(random_metric(m, seeded_rng), is_metric=True)
            p = random_distribution(m, seeded_rng)
            q = random_distribution(m, seeded_rng)
            restricted = metric_dual_restricted(c, p, q)
            primal = solve_ot_primal(c, p, q).value
            assert abs(restricted - primal) <= 1e-6

    def test_rejects_non_metric(self, seeded_rng):
        c = CostMatrix(seeded_rng.random((3, 3)) + 0.1)
        with pytest.raises(ValueError):
            metric_dual_restricted(c, [0.3, 0.3, 0.4], [0.4, 0.3, 0.3])


class TestDualityGap:
    def test_optimal_pair_has_tiny_gap(self, seeded_rng):
        m = 6
        c = seeded_rng.random((m, m)) * 4
        p = random_distribution(m, seeded_rng)
        q = random_distribution(m, seeded_rng)
        gap = duality_gap(solve_ot_primal(c, p, q), solve_ot_dual(c, p, q))
        assert -1e-9 <= gap <= 1e-6

    def test_zero_dual_gap_equals_plan_value(self, seeded_rng):
        from randmatch.ot import DualSolution, TransportPlan

        m = 3
        c = seeded_rng.random((m, m)) + 0.5
        p = random_distribution(m, seeded_rng)
        q = random_distribution(m, seeded_rng)
        plan = solve_ot_primal(c, p, q)
        zero = DualSolution(gamma=np.zeros(m), lam=np.zeros(m), value=0.0)
        assert duality_gap(plan, zero) == pytest.approx(plan.value)
        assert duality_gap(plan, zero) >= 0

    def test_perturbed_plan_has_positive_gap(self, seeded_rng):
        from randmatch.ot import TransportPlan

        m = 4
        c = seeded_rng.random((m, m)) * 5
        p = random_distribution(m, seeded_rng)
        q = random_distribution(m, seeded_rng)
        plan = solve_ot_primal(c, p, q)
        dual = solve_ot_dual(c, p, q)
        # swap mass around a 2x2 submatrix in the direction that raises cost
        pi = np.array(plan.pi)
        moved = None
        for i in range(m):
            for k in range(m):
                for j in range(m):
                    for l in range(m):
                        if i == k or j == l:
                            continue
                        d = min(pi[i, j], pi[k, l])
                        change = c[i, l] + c[k, j] - c[i, j] - c[k, l]
                        if d > 1e-6 and change > 1e-9:
                            pi[i, j] -= d
                            pi[k, l] -= d
                            pi[i, l] += d
                            pi[k, j] += d
                            moved = d * change
                            break
                    if moved:
                        break
                if moved:
                    break
            if moved:
                break
        assert moved is not None
        bad = TransportPlan(pi=pi, value=float((c * pi).sum()))
        assert duality_gap(bad, dual) > 0


class TestMetricDistanceProperties:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 10_000))
    def test_symmetry_and_identity(self, m, seed):
        rng = np.random.default_rng(seed)
        c = CostMatrix(random_metric(m, rng), is_metric=True)
        p = random_distribution(m, rng)
        q = random_distribution(m, rng)
        assert solve_ot_primal(c, p, q).value == pytest.approx(solve_ot_primal(c, q, p).value, abs=1e-9)
        assert solve_ot_primal(c, p, p).value == pytest.approx(0.0, abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 10_000))
    def test_triangle_inequality_of_induced_distance(self, m, seed):
        rng = np.random.default_rng(seed)
        c = CostMatrix(random_metric(m, rng), is_metric=True)
        p = random_distribution(m, rng)
        q = random_distribution(m, rng)
        r = random_distribution(m, rng)
        d_pr = solve_ot_primal(c, p, r).value
        d_pq = solve_ot_primal(c, p, q).value
        d_qr = solve_ot_primal(c, q, r).value
        assert d_pr <= d_pq + d_qr + 1e-9
