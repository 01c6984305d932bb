import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from randmatch.assign import (
    Assignment,
    assignment_to_ot_value,
    auction,
    brute_force_assign,
    greedy_assign,
    hungarian,
)
from randmatch.ot import solve_ot_primal


class TestAssignmentType:
    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Assignment(perm=np.array([0, 0]), cost=0.0)

    def test_cost_recompute_matches(self):
        c = np.array([[1.0, 2.0], [2.0, 4.0]])
        a = hungarian(c)
        assert a.cost == pytest.approx(float(c[np.arange(2), a.perm].sum()), abs=1e-9)


class TestBruteForce:
    def test_zero_matrix(self):
        a = brute_force_assign(np.zeros((3, 3)))
        assert a.cost == 0.0

    def test_two_by_two(self):
        # identity costs 1 + 4 = 5, swap costs 2 + 2 = 4
        a = brute_force_assign([[1.0, 2.0], [2.0, 4.0]])
        assert a.cost == 4.0
        assert list(a.perm) == [1, 0]

    def test_three_by_three(self):
        # all six permutations: (0,1,2)=8, (0,2,1)=11, (1,0,2)=5, (1,2,0)=9, (2,0,1)=7, (2,1,0)=6
        a = brute_force_assign([[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]])
        assert a.cost == 5.0

    def test_size_guard(self):
        with pytest.raises(ValueError):
            brute_force_assign(np.zeros((10, 10)))


class TestHungarian:
    def test_zero_diagonal_dominant(self):
        c = np.ones((5, 5)) * 9
        np.fill_diagonal(c, 0.0)
        a = hungarian(c)
        assert list(a.perm) == list(range(5))
        assert a.cost == 0.0

    def test_two_by_two(self):
        assert hungarian([[1.0, 2.0], [2.0, 4.0]]).cost == 4.0

    def test_integer_sweep_matches_brute_force(self, seeded_rng):
        for _ in range(200):
            n = int(seeded_rng.integers(2, 8))
            c = seeded_rng.integers(0, 101, size=(n, n)).astype(float)
            assert hungarian(c).cost == brute_force_assign(c).cost

    def test_float_sweep_matches_brute_force(self, seeded_rng):
        for _ in range(100):
            n = int(seeded_rng.integers(2, 8))
            c = seeded_rng.random((n, n)) * 100
            assert hungarian(c).cost == pytest.approx(brute_force_assign(c).cost, abs=1e-9)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            hungarian(np.zeros((2, 3)))

    def test_rejects_nan(self):
        c = np.zeros((2, 2))
        c[0, 1] = np.nan
        with pytest.raises(ValueError):
            hungarian(c)

    def test_rejects_inf(self):
        c = np.zeros((2, 2))
        c[1, 0] = np.inf
        with pytest.raises(ValueError):
            hungarian(c)


class TestAuction:
    def test_zero_matrix(self):
        assert auction(np.zeros((4, 4))).cost == 0.0

    def test_integer_scaling_is_exact(self, seeded_rng):
        for _ in range(100):
            n = int(seeded_rng.integers(2, 9))
            c = seeded_rng.integers(0, 101, size=(n, n)).astype(float)
            assert auction(c).cost == hungarian(c).cost

    def test_float_epsilon_bound(self, seeded_rng):
        eps = 1e-6
        for _ in range(50):
            n = int(seeded_rng.integers(2, 20))
            c = seeded_rng.random((n, n)) * 10
            a = auction(c, epsilon=eps)
            assert a.cost <= hungarian(c).cost + n * eps + 1e-12

    def test_rejects_nonpositive_epsilon(self):
        with pytest.raises(ValueError):
            auction(np.zeros((2, 2)), epsilon=0.0)


class TestGreedy:
    def test_zero_matrix(self):
        assert greedy_assign(np.zeros((3, 3))).cost == 0.0

    def test_traced_example(self):
        # column 0 takes row 0 (cost 1), column 1 takes remaining row 1 (cost 4)
        a = greedy_assign([[1.0, 2.0], [2.0, 4.0]])
        assert list(a.perm) == [0, 1]
        assert a.cost == 5.0
        assert a.cost >= brute_force_assign([[1.0, 2.0], [2.0, 4.0]]).cost

    def test_tie_breaks_to_lowest_row(self):
        c = np.zeros((3, 3))
        a = greedy_assign(c)
        assert list(a.perm) == [0, 1, 2]

    def test_never_beats_hungarian_on_random_50x50(self, seeded_rng):
        ratios = []
        for _ in range(10):
            c = seeded_rng.random((50, 50)) * 10 + 0.1
            g = greedy_assign(c).cost
            h = hungarian(c).cost
            assert g >= h - 1e-9
            ratios.append(g / h)
        assert min(ratios) >= 1.0 - 1e-12


class TestOtConsistency:
    def test_zero_cost_maps_to_zero_value(self):
        a = greedy_assign(np.zeros((4, 4)))
        assert assignment_to_ot_value(a, 4) == 0.0

    def test_two_by_two_equals_uniform_transport(self):
        c = np.array([[1.0, 2.0], [2.0, 4.0]])
        a = hungarian(c)
        v = assignment_to_ot_value(a, 2)
        assert v == pytest.approx(2.0, abs=1e-12)
        ot = solve_ot_primal(c, [0.5, 0.5], [0.5, 0.5]).value
        assert v == pytest.approx(ot, abs=1e-9)

    def test_random_instances_match_uniform_transport(self, seeded_rng):
        n = 6
        u = np.full(n, 1.0 / n)
        for _ in range(50):
            c = seeded_rng.random((n, n)) * 5
            v = assignment_to_ot_value(hungarian(c), n)
            assert v == pytest.approx(solve_ot_primal(c, u, u).value, abs=1e-9)

    def test_size_mismatch_rejected(self):
        a = hungarian(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            assignment_to_ot_value(a, 5)


class TestSolverProperties:
    @settings(max_examples=60, deadline=None)
    @given(
        hnp.arrays(
            np.float64,
            st.integers(1, 7).map(lambda n: (n, n)),
            elements=st.floats(0, 100, allow_nan=False, allow_infinity=False),
        )
    )
    def test_every_solver_returns_a_bijection(self, c):
        n = c.shape[0]
        for solver in (hungarian, auction, greedy_assign):
            a = solver(c)
            assert np.array_equal(np.sort(a.perm), np.arange(n))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 10_000))
    def test_greedy_upper_bounds_hungarian(self, n, seed):
        rng = np.random.default_rng(seed)
        c = rng.random((n, n)) * 10
        assert greedy_assign(c).cost >= hungarian(c).cost - 1e-9

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 10_000))
    def test_row_shift_invariance(self, n, seed):
        rng = np.random.default_rng(seed)
        c = rng.integers(0, 50, size=(n, n)).astype(float)
        shift = float(rng.integers(1, 20))
        row = int(rng.integers(0, n))
        shifted = c.copy()
        shifted[row, :] += shift
        base = brute_force_assign(c)
        moved = brute_force_assign(shifted)
        assert moved.cost == base.cost + shift
        # the set of optimal permutations is unchanged
        import itertools

        def optimal_set(mat):
            best = brute_force_assign(mat).cost
            return {
                perm
                for perm in itertools.permutations(range(n))
                if mat[np.arange(n), perm].sum() == best
            }

        assert optimal_set(c) == optimal_set(shifted)
        assert hungarian(shifted).cost == hungarian(c).cost + shift
