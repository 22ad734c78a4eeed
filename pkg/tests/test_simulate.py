import math

import numpy as np
import pytest

from multigrover.errors import DegenerateSubspaceError, PrecheckError
from multigrover.generators import StateSpec, TargetSpec, UnitarySpec, make_state, make_targets, make_unitary
from multigrover.hilbert import IdentityOperator, StateVector
from multigrover.operators import SearchProblem, TargetSet
from multigrover.reduced import build_reduced_model, compute_overlaps
from multigrover.simulate import (
    Verdict,
    compare_full_reduced,
    evolve,
    invariance_residual,
    measure,
    perturbed_step,
    precheck_start,
    problem_family,
    run_search,
    subspace_leak,
    theta_window,
)
from multigrover.validation import identity_residuals, run_validation


def uniform_problem(dim, targets):
    return SearchProblem(TargetSet(targets, dim), make_state(StateSpec("uniform"), dim), IdentityOperator(dim))


def haar_problem(dim, ell, v_seed, gamma_seed, t_seed=0):
    return SearchProblem(
        make_targets(TargetSpec(count=ell, seed=t_seed), dim),
        make_state(StateSpec("random", seed=gamma_seed), dim),
        make_unitary(UnitarySpec("haar", seed=v_seed), dim),
    )


@pytest.fixture(scope="module")
def family():
    return problem_family(12, seed=99)


class TestPrecheck:
    def test_already_solved(self):
        prob = SearchProblem(TargetSet([0], 4), StateVector.basis(0, 4), IdentityOperator(4))
        assert precheck_start(prob) is Verdict.ALREADY_SOLVED

    def test_orthogonal(self):
        prob = SearchProblem(TargetSet([0], 2), StateVector.basis(1, 2), IdentityOperator(2))
        assert precheck_start(prob) is Verdict.ORTHOGONAL_START

    def test_proceed(self):
        assert precheck_start(uniform_problem(4, [0])) is Verdict.PROCEED

    def test_run_search_refuses(self):
        prob = SearchProblem(TargetSet([0], 2), StateVector.basis(1, 2), IdentityOperator(2))
        with pytest.raises(PrecheckError) as info:
            run_search(prob, 3)
        assert info.value.verdict is Verdict.ORTHOGONAL_START


class TestRunSearch:
    def test_four_items(self):
        trace = run_search(uniform_problem(4, [0]), 1, record_full=True)
        assert [r.m for r in trace.rows] == [0, 1]
        assert trace.rows[0].p_reduced == pytest.approx(0.25, abs=1e-15)
        assert trace.rows[0].p_full == pytest.approx(0.25, abs=1e-15)
        assert abs(trace.rows[1].p_full - 1) <= 1e-12
        assert trace.rows[1].deviation <= 1e-12

    def test_1024_matches_analytic(self):
        trace = run_search(uniform_problem(1024, [0]), 25, record_full=True)
        phi = math.asin(1 / 32)
        for r in trace.rows:
            assert abs(r.p_full - math.sin((2 * r.m + 1) * phi) ** 2) <= 1e-10
        assert trace.rows[25].p_full >= 0.999

    def test_zero_iterations(self):
        prob = haar_problem(32, 3, 1, 2)
        trace = run_search(prob, 0, record_full=True)
        assert len(trace.rows) == 1
        assert trace.rows[0].p_full == pytest.approx(compute_overlaps(prob).ssq, abs=1e-15)

    def test_reduced_only(self):
        trace = run_search(uniform_problem(16, [3]), 5)
        assert all(r.p_full is None and r.deviation is None for r in trace.rows)
        assert trace.max_deviation() is None

    def test_final_state_matches_evolve(self):
        prob = haar_problem(16, 2, 5, 6)
        trace = run_search(prob, 7, record_full=True)
        np.testing.assert_allclose(trace.final_state.amplitudes, evolve(prob, 7).amplitudes, atol=1e-14)


class TestMeasure:
    def test_deterministic_distribution(self):
        v = make_unitary(UnitarySpec("haar", seed=8), 8)
        state = StateVector(v.rmatvec(StateVector.basis(3, 8).amplitudes))
        for seed in range(20):
            assert measure(state, TargetSet([3], 8), v, seed) == (3, True)
            assert measure(state, TargetSet([1], 8), v, seed) == (3, False)

    def test_four_items_after_one_step_always_hits(self):
        prob = uniform_problem(4, [0])
        state = evolve(prob, 1)
        assert all(measure(state, prob.targets, prob.v, seed)[1] for seed in range(200))

    def test_hit_rate_initial(self):
        prob = uniform_problem(4, [0])
        hits = sum(measure(prob.gamma, prob.targets, prob.v, seed)[1] for seed in range(10_000))
        assert abs(hits / 10_000 - 0.25) <= 0.02

    def test_seed_reproducible(self):
        prob = haar_problem(64, 2, 1, 1)
        assert measure(prob.gamma, prob.targets, prob.v, 5) == measure(prob.gamma, prob.targets, prob.v, 5)


class TestInvariance:
    def test_haar_problem(self):
        assert invariance_residual(haar_problem(32, 3, 1, 7), trials=20, seed=0) <= 1e-10

    def test_classic_plane(self):
        assert invariance_residual(uniform_problem(4, [0]), trials=20, seed=0) <= 1e-12

    @pytest.mark.parametrize("dim, ell", [(4, 1), (32, 3), (200, 8)])
    def test_negative_control(self, dim, ell):
        prob = haar_problem(dim, ell, 3, 4) if dim > 4 else uniform_problem(4, [0])
        leak = invariance_residual(prob, trials=5, seed=1, step=perturbed_step(prob, 1e-3, seed=2))
        assert leak >= 5e-4
        assert leak == pytest.approx(math.sin(1e-3), rel=1e-6)

    def test_degenerate_subspace(self):
        # V gamma inside L up to 1e-11 in probability: precheck passes, Gram is singular
        eps = 1e-11
        gamma = StateVector([math.sqrt(1 - eps), math.sqrt(eps), 0, 0])
        prob = SearchProblem(TargetSet([0], 4), gamma, IdentityOperator(4))
        assert precheck_start(prob) is Verdict.PROCEED
        with pytest.raises(DegenerateSubspaceError):
            invariance_residual(prob, 1, 0)

    def test_orbit_stays_in_subspace(self, family):
        for prob in family:
            leaks = subspace_leak(prob, 100)
            assert all(leak <= max(m, 1) * 1e-11 for m, leak in enumerate(leaks))

    def test_closed_form_images(self, family):
        for prob in family:
            t, g = identity_residuals(prob)
            assert t <= 1e-11 and g <= 1e-11


class TestCompare:
    def test_four_items(self):
        assert compare_full_reduced(uniform_problem(4, [0]), 3) <= 1e-12

    def test_haar_256(self):
        prob = haar_problem(256, 5, 13, 4)
        window = theta_window(build_reduced_model(compute_overlaps(prob)))
        assert compare_full_reduced(prob, window) <= 1e-9

    def test_all_targets_precheck(self):
        prob = uniform_problem(2, [0, 1])
        with pytest.raises(PrecheckError) as info:
            compare_full_reduced(prob, 3)
        assert info.value.verdict is Verdict.ALREADY_SOLVED

    def test_family(self, family):
        for prob in family:
            window = theta_window(build_reduced_model(compute_overlaps(prob)))
            assert compare_full_reduced(prob, window) <= 1e-9


class TestFamily:
    def test_deterministic(self):
        a, b = problem_family(5, 3), problem_family(5, 3)
        for p, q in zip(a, b):
            assert p.targets == q.targets
            assert p.gamma.amplitudes.tobytes() == q.gamma.amplitudes.tobytes()
            assert p.v.matrix.tobytes() == q.v.matrix.tobytes()

    def test_bounds(self):
        for p in problem_family(30, 1):
            assert 1 <= p.ell <= 8 and 2 * (p.ell + 1) <= p.dim <= 256


class TestValidationSuite:
    def test_all_pass_small_family(self):
        results = run_validation("all", seed=3, problems=6)
        assert results and all(r.passed for r in results), [r.line() for r in results if not r.passed]

    def test_scope_filter(self):
        names = {r.name.split("/")[0] for r in run_validation("degenerate", seed=0)}
        assert names == {"degenerate"}

    def test_unknown_scope(self):
        with pytest.raises(ValueError):
            run_validation("lemma99")
