import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multigrover.errors import DimensionError, InvalidTargetError
from multigrover.generators import StateSpec, UnitarySpec, make_state, make_unitary
from multigrover.hilbert import DenseOperator, IdentityOperator, StateVector, matrix_unitarity_residual
from multigrover.operators import (
    SearchProblem,
    TargetSet,
    diffusion_reflection,
    oracle_reflection,
    search_operator_matrix,
    search_step,
)


def dense_reflection(v):
    v = np.asarray(v, dtype=complex)
    return np.eye(v.size) - 2 * np.outer(v, v.conj())


def dense_oracle(targets, dim):
    d = np.ones(dim)
    d[list(targets)] = -1
    return np.diag(d)


def dense_u(gamma, v, targets):
    return -dense_reflection(gamma) @ v.conj().T @ dense_oracle(targets, v.shape[0]) @ v


def random_state(dim, seed):
    return make_state(StateSpec("random", seed=seed), dim)


class TestTargetSet:
    def test_sorted(self):
        assert TargetSet([3, 1], 8).indices == (1, 3)

    @pytest.mark.parametrize("idx", [[1, 1], [], [8], [-1]])
    def test_invalid(self, idx):
        with pytest.raises(InvalidTargetError):
            TargetSet(idx, 8)

    def test_oracle_function(self):
        t = TargetSet([0, 5], 8)
        assert [t.oracle(k) for k in range(8)] == [1, 0, 0, 0, 0, 1, 0, 0]


class TestSearchProblem:
    def test_dimension_consistency(self):
        with pytest.raises(DimensionError):
            SearchProblem(TargetSet([0], 4), StateVector.basis(0, 8), IdentityOperator(4))


class TestOracleReflection:
    def test_target_negated(self):
        out = oracle_reflection(TargetSet([0], 2), StateVector.basis(0, 2))
        np.testing.assert_array_equal(out.amplitudes, [-1, 0])

    def test_non_target_fixed(self):
        out = oracle_reflection(TargetSet([1], 2), StateVector.basis(0, 2))
        np.testing.assert_array_equal(out.amplitudes, [1, 0])

    def test_componentwise(self):
        out = oracle_reflection(TargetSet([0, 1], 4), StateVector([0.5] * 4))
        np.testing.assert_array_equal(out.amplitudes, [-0.5, -0.5, 0.5, 0.5])

    def test_involution_exact(self):
        t = TargetSet([1, 4, 6], 8)
        x = random_state(8, 2)
        np.testing.assert_array_equal(oracle_reflection(t, oracle_reflection(t, x)).amplitudes, x.amplitudes)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            oracle_reflection(TargetSet([0], 4), StateVector.basis(0, 8))


class TestDiffusionReflection:
    def test_axis_maps_to_minus(self):
        g = random_state(16, 1)
        np.testing.assert_allclose(diffusion_reflection(g, g).amplitudes, -g.amplitudes, atol=1e-15)

    def test_orthogonal_fixed(self):
        g = StateVector([1 / math.sqrt(2), 1 / math.sqrt(2), 0, 0])
        x = StateVector([1 / math.sqrt(2), -1 / math.sqrt(2), 0, 0])
        np.testing.assert_allclose(diffusion_reflection(g, x).amplitudes, x.amplitudes, atol=1e-15)

    def test_two_dim_against_dense(self):
        g = StateVector([1 / math.sqrt(2), 1 / math.sqrt(2)])
        x = StateVector.basis(0, 2)
        expected = dense_reflection(g.amplitudes) @ x.amplitudes
        np.testing.assert_allclose(expected, [0, -1], atol=1e-15)
        np.testing.assert_allclose(diffusion_reflection(g, x).amplitudes, expected, atol=1e-15)

    def test_involution(self):
        g, x = random_state(32, 1), random_state(32, 2)
        twice = diffusion_reflection(g, diffusion_reflection(g, x))
        assert np.max(np.abs(twice.amplitudes - x.amplitudes)) <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            diffusion_reflection(StateVector.basis(0, 2), StateVector.basis(0, 4))


class TestSearchStep:
    def test_classic_four_item_single_iteration(self):
        dim = 4
        gamma = make_state(StateSpec("uniform"), dim)
        prob = SearchProblem(TargetSet([0], dim), gamma, IdentityOperator(dim))
        expected = dense_u(gamma.amplitudes, np.eye(dim), [0]) @ gamma.amplitudes
        np.testing.assert_allclose(expected, [1, 0, 0, 0], atol=1e-15)
        out = search_step(prob, gamma)
        assert np.max(np.abs(out.amplitudes - np.array([1, 0, 0, 0]))) <= 1e-12

    def test_all_targets(self):
        e0 = StateVector.basis(0, 2)
        prob = SearchProblem(TargetSet([0, 1], 2), e0, IdentityOperator(2))
        expected = dense_u(e0.amplitudes, np.eye(2), [0, 1]) @ e0.amplitudes
        np.testing.assert_allclose(expected, [-1, 0], atol=1e-15)
        np.testing.assert_allclose(search_step(prob, e0).amplitudes, expected, atol=1e-15)

    def test_norm_preserved_random_problem(self):
        v = make_unitary(UnitarySpec("haar", seed=3), 16)
        prob = SearchProblem(TargetSet([2, 5], 16), StateVector.basis(0, 16), v)
        for seed in range(20):
            out = search_step(prob, random_state(16, 100 + seed))
            assert abs(np.linalg.norm(out.amplitudes) - 1) <= 1e-12

    @pytest.mark.parametrize("dim", [2, 5, 16, 64])
    def test_matches_dense_and_is_unitary(self, dim):
        v = make_unitary(UnitarySpec("haar", seed=dim), dim)
        gamma = random_state(dim, dim + 1)
        targets = sorted({0, dim // 2, dim - 1})
        prob = SearchProblem(TargetSet(targets, dim), gamma, v)
        u = search_operator_matrix(prob)
        assert np.max(np.abs(u - dense_u(gamma.amplitudes, v.matrix, targets))) <= 1e-12
        assert matrix_unitarity_residual(u) <= 1e-10

    @pytest.mark.parametrize("dim", [2, 4, 16, 64])
    def test_reduces_to_classic_grover(self, dim):
        s = np.full(dim, 1 / math.sqrt(dim))
        w = dim - 1
        e_w = np.zeros(dim)
        e_w[w] = 1
        classic = -dense_reflection(s) @ dense_reflection(e_w)
        prob = SearchProblem(TargetSet([w], dim), StateVector(s), IdentityOperator(dim))
        assert np.max(np.abs(search_operator_matrix(prob) - classic)) <= 1e-12

    @pytest.mark.parametrize("dim", [3, 8, 64])
    def test_reduces_to_single_target_general_v(self, dim):
        v = make_unitary(UnitarySpec("haar", seed=11), dim).matrix
        gamma = random_state(dim, 4).amplitudes
        e_w = np.zeros(dim)
        e_w[1] = 1
        single = -dense_reflection(gamma) @ np.linalg.inv(v) @ dense_reflection(e_w) @ v
        prob = SearchProblem(TargetSet([1], dim), StateVector(gamma), DenseOperator(v))
        assert np.max(np.abs(search_operator_matrix(prob) - single)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), dim=st.integers(2, 40), data=st.data())
def test_search_step_matches_dense_property(seed, dim, data):
    ell = data.draw(st.integers(1, dim))
    targets = data.draw(st.lists(st.integers(0, dim - 1), min_size=ell, max_size=ell, unique=True))
    v = make_unitary(UnitarySpec("haar", seed=seed), dim)
    gamma = random_state(dim, seed + 1)
    x = random_state(dim, seed + 2)
    prob = SearchProblem(TargetSet(targets, dim), gamma, v)
    ref = dense_u(gamma.amplitudes, v.matrix, targets) @ x.amplitudes
    assert np.max(np.abs(search_step(prob, x).amplitudes - ref)) <= 1e-12
