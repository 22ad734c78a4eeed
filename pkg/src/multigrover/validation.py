"""Numerical checks of the invariant-subspace theory, grouped by family.

Each family returns :class:`CheckResult` rows; a row passes when its worst
case beats the tolerance (``<=`` for residuals, ``>=`` for negative
controls). Random problems come from
:func:`~multigrover.simulate.problem_family`, so a seed fixes everything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .generators import StateSpec, UnitarySpec, make_rng, make_state, make_unitary
from .hilbert import inner_product
from .operators import SearchProblem, TargetSet, search_operator_matrix, step_amplitudes
from .reduced import (
    OverlapData,
    big_m_matrix,
    build_reduced_model,
    compute_overlaps,
    mu_state,
    oblique_norm_sq,
    reduced_trajectory,
)
from .simulate import (
    compare_full_reduced,
    invariance_residual,
    perturbed_step,
    problem_family,
    subspace_basis,
    subspace_leak,
    theta_window,
)

SCOPES = ("lemma21", "lemma22", "thm23", "degenerate")
A_GRID = (0.01, 0.1, 0.5, 1.0, 1.9)
DEGENERATE_DIMS = (2, 4, 8, 16, 32, 64)


@dataclass(frozen=True)
class CheckResult:
    name: str
    worst: float
    tol: float
    count: int
    at_least: bool = False

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.worst):
            return False
        return self.worst >= self.tol if self.at_least else self.worst <= self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        op = ">=" if self.at_least else "<="
        return f"{status}  {self.name:<26} worst={self.worst:.3e}  need {op} {self.tol:.0e}  (n={self.count})"


# -- dense reference operators -------------------------------------------


def reflection_matrix(vec: np.ndarray) -> np.ndarray:
    """``I - 2|v><v|`` for a unit vector ``v``."""
    vec = np.asarray(vec, dtype=np.complex128)
    return np.eye(vec.size, dtype=np.complex128) - 2.0 * np.outer(vec, vec.conj())


def classic_grover_matrix(dim: int, w: int) -> np.ndarray:
    """``-I_s I_w`` with ``s`` the uniform superposition."""
    s = np.full(dim, 1.0 / math.sqrt(dim))
    e_w = np.zeros(dim)
    e_w[w] = 1.0
    return -reflection_matrix(s) @ reflection_matrix(e_w)


def single_target_matrix(gamma: np.ndarray, v: np.ndarray, w: int) -> np.ndarray:
    """``-I_gamma V^{-1} I_w V`` for a single marked index."""
    e_w = np.zeros(v.shape[0])
    e_w[w] = 1.0
    return -reflection_matrix(gamma) @ v.conj().T @ reflection_matrix(e_w) @ v


# -- families ---------------------------------------------------------------


def check_degenerate(seed: int) -> list[CheckResult]:
    rng = make_rng(seed)
    worst_11 = worst_14 = 0.0
    for dim in DEGENERATE_DIMS:
        w = int(rng.integers(dim))
        prob = SearchProblem(
            TargetSet([w], dim),
            make_state(StateSpec("uniform"), dim),
            make_unitary(UnitarySpec("identity"), dim),
        )
        worst_11 = max(worst_11, float(np.max(np.abs(search_operator_matrix(prob) - classic_grover_matrix(dim, w)))))

        v = make_unitary(UnitarySpec("haar", seed=int(rng.integers(2**62))), dim)
        gamma = make_state(StateSpec("random", seed=int(rng.integers(2**62))), dim)
        prob = SearchProblem(TargetSet([w], dim), gamma, v)
        ref = single_target_matrix(gamma.amplitudes, v.matrix, w)
        worst_14 = max(worst_14, float(np.max(np.abs(search_operator_matrix(prob) - ref))))
    n = len(DEGENERATE_DIMS)
    return [
        CheckResult("degenerate/classic-grover", worst_11, 1e-12, n),
        CheckResult("degenerate/single-target-V", worst_14, 1e-12, n),
    ]


def identity_residuals(problem: SearchProblem) -> tuple[float, float]:
    """Residuals of the two closed-form images used to prove invariance.

    Returns ``(max_j ||U V^H e_tj - (V^H e_tj - 2 conj(mu_j) gamma)||,
    ||U gamma - ((1 - 4 sum|mu|^2) gamma + 2 sum_j mu_j V^H e_tj)||)``.
    """
    ov = compute_overlaps(problem)
    gamma = problem.gamma.amplitudes
    basis = subspace_basis(problem).vectors[:, 1:]
    worst_t = 0.0
    for j in range(problem.ell):
        col = basis[:, j]
        expected = col - 2.0 * np.conj(ov.mu[j]) * gamma
        worst_t = max(worst_t, float(np.linalg.norm(step_amplitudes(problem, col) - expected)))
    expected = (1.0 - 4.0 * ov.ssq) * gamma + 2.0 * (basis @ ov.mu)
    worst_g = float(np.linalg.norm(step_amplitudes(problem, gamma) - expected))
    return worst_t, worst_g


def check_lemma21(family: list[SearchProblem], seed: int, trials: int = 8) -> list[CheckResult]:
    inv = max(invariance_residual(p, trials, seed + i) for i, p in enumerate(family))
    control = perturbed_step(family[0], 1e-3, seed)
    neg = invariance_residual(family[0], trials, seed, step=control)
    ids = [identity_residuals(p) for p in family]
    n = len(family)
    return [
        CheckResult("lemma21/invariance", inv, 1e-10, n),
        CheckResult("lemma21/negative-control", neg, 5e-4, 1, at_least=True),
        CheckResult("lemma21/target-images", max(t for t, _ in ids), 1e-11, n),
        CheckResult("lemma21/gamma-image", max(g for _, g in ids), 1e-11, n),
    ]


def check_lemma22(family: list[SearchProblem], m_max: int = 100) -> list[CheckResult]:
    # the m = 0 slot gets the m = 1 allowance; U^0 gamma = gamma leaks only rounding
    worst = 0.0
    for p in family:
        leaks = subspace_leak(p, m_max)
        worst = max(worst, max(leak / max(m, 1) for m, leak in enumerate(leaks)))
    return [CheckResult("lemma22/orbit-leak-per-step", worst, 1e-11, len(family))]


def check_thm23(family: list[SearchProblem]) -> list[CheckResult]:
    dev = overlap = big = oblique = 0.0
    for p in family:
        ov = compute_overlaps(p)
        model = build_reduced_model(ov)
        window = theta_window(model)
        dev = max(dev, compare_full_reduced(p, window))
        mu = mu_state(p, ov)
        overlap = max(overlap, abs(inner_product(p.gamma, mu) - model.a / 2))
        cols = subspace_basis(p).vectors
        images = np.column_stack([step_amplitudes(p, c) for c in cols.T])
        big = max(big, float(np.max(np.abs(images - cols @ big_m_matrix(ov).T))))
        oblique = max(oblique, max(abs(oblique_norm_sq(model, c) - 1) for c in reduced_trajectory(model, window)))

    det = theta = 0.0
    for a in A_GRID:
        model = build_reduced_model(OverlapData.from_mu([a / 2]))
        det = max(det, abs(float(np.linalg.det(model.m2)) - 1.0))
        theta = max(theta, abs(math.acos(1 - a * a / 2) - 2 * math.asin(a / 2)))
        traj = reduced_trajectory(model, theta_window(model))
        oblique = max(oblique, max(abs(oblique_norm_sq(model, c) - 1) for c in traj))
    n, g = len(family), len(A_GRID)
    return [
        CheckResult("thm23/full-vs-reduced", dev, 1e-9, n),
        CheckResult("thm23/gamma-mu-overlap", overlap, 1e-12, n),
        CheckResult("thm23/big-m-action", big, 1e-10, n),
        CheckResult("thm23/det-m", det, 1e-13, g),
        CheckResult("thm23/rotation-angle", theta, 1e-12, g),
        CheckResult("thm23/oblique-norm", oblique, 1e-10, n + g),
    ]


def run_validation(scope: str = "all", seed: int = 0, problems: int = 50) -> list[CheckResult]:
    scopes = SCOPES if scope == "all" else (scope,)
    unknown = set(scopes) - set(SCOPES)
    if unknown:
        raise ValueError(f"unknown scope(s) {sorted(unknown)}; choose from all, {', '.join(SCOPES)}")
    family = problem_family(problems, seed) if set(scopes) - {"degenerate"} else []
    results: list[CheckResult] = []
    for s in scopes:
        if s == "lemma21":
            results += check_lemma21(family, seed)
        elif s == "lemma22":
            results += check_lemma22(family)
        elif s == "thm23":
            results += check_thm23(family)
        else:
            results += check_degenerate(seed)
    return results


def report(results: list[CheckResult]) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"

