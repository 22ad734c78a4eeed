"""Full-space iteration, measurement and subspace checks.

The N-dimensional trajectory ``U^m |gamma>`` is computed directly from
:func:`~multigrover.operators.search_step` and compared with the reduced
2 x 2 recursion. The invariant subspace
``span({|gamma>} + V^H(L))`` is handled through its (oblique) spanning set
and Gram matrix rather than an orthonormalized copy, so near-dependence is
reported instead of hidden.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateSubspaceError, DimensionError, PrecheckError
from .generators import StateSpec, TargetSpec, UnitarySpec, make_rng, make_state, make_targets, make_unitary
from .hilbert import LinearOperator, StateVector
from .operators import SearchProblem, TargetSet, step_amplitudes
from .reduced import (
    EPS_A,
    PROB_SLACK,
    ReducedModel,
    build_reduced_model,
    compute_overlaps,
    reduced_trajectory,
    success_probability,
)

SOLVED_TOL = 1e-12
GRAM_EIG_TOL = 1e-10


class Verdict(enum.Enum):
    PROCEED = "Proceed"
    ALREADY_SOLVED = "AlreadySolved"
    ORTHOGONAL_START = "OrthogonalStart"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TraceRow:
    m: int
    c1: float
    c2: float
    p_reduced: float
    p_full: float | None = None
    deviation: float | None = None

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "c1": self.c1,
            "c2": self.c2,
            "p_reduced": self.p_reduced,
            "p_full": self.p_full,
            "deviation": self.deviation,
        }


@dataclass(frozen=True, eq=False)
class IterationTrace:
    model: ReducedModel
    rows: tuple[TraceRow, ...]
    final_state: StateVector | None = field(default=None, repr=False)

    def max_deviation(self) -> float | None:
        devs = [r.deviation for r in self.rows if r.deviation is not None]
        return max(devs) if devs else None


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Columns ``[gamma, V^H e_t1, ..., V^H e_tl]`` and their Gram matrix."""

    vectors: np.ndarray
    gram: np.ndarray

    def complement_residual(self, w: np.ndarray) -> float:
        """Norm of the component of ``w`` orthogonal to the span."""
        coeffs = np.linalg.solve(self.gram, self.vectors.conj().T @ w)
        return float(np.linalg.norm(w - self.vectors @ coeffs))


def target_probability(targets: TargetSet, v_amps: np.ndarray) -> float:
    """``||P_L v||^2`` for amplitudes already in the measured basis."""
    return float(np.sum(np.abs(v_amps[targets.as_array()]) ** 2))


def precheck_start(problem: SearchProblem) -> Verdict:
    p0 = target_probability(problem.targets, problem.v.matvec(problem.gamma.amplitudes))
    if p0 >= 1.0 - SOLVED_TOL:
        return Verdict.ALREADY_SOLVED
    if p0 <= (EPS_A / 2) ** 2:
        return Verdict.ORTHOGONAL_START
    return Verdict.PROCEED


def _require_proceed(problem: SearchProblem):
    verdict = precheck_start(problem)
    if verdict is not Verdict.PROCEED:
        raise PrecheckError(verdict)


def run_search(problem: SearchProblem, m_max: int, record_full: bool = False) -> IterationTrace:
    """Rows ``m = 0..m_max`` of reduced (and optionally full-space) results."""
    if m_max < 0:
        raise ValueError(f"m_max must be non-negative, got {m_max}")
    _require_proceed(problem)
    model = build_reduced_model(compute_overlaps(problem))
    coeffs = reduced_trajectory(model, m_max)
    p_red = [success_probability(model, c) for c in coeffs]

    if not record_full:
        rows = tuple(TraceRow(m, c.c1, c.c2, p) for m, (c, p) in enumerate(zip(coeffs, p_red)))
        return IterationTrace(model, rows)

    rows = []
    x = problem.gamma
    for m, (c, p) in enumerate(zip(coeffs, p_red)):
        p_full = target_probability(problem.targets, problem.v.matvec(x.amplitudes))
        if p_full > 1.0 + PROB_SLACK:
            raise ValueError(f"full-space probability {p_full!r} exceeds 1 at m={m}")
        rows.append(TraceRow(m, c.c1, c.c2, p, p_full, abs(p_full - p)))
        if m < m_max:
            x = StateVector(step_amplitudes(problem, x.amplitudes))
    return IterationTrace(model, tuple(rows), final_state=x)


def evolve(problem: SearchProblem, m: int) -> StateVector:
    """``U^m |gamma>`` in the full space."""
    x = problem.gamma
    for _ in range(m):
        x = StateVector(step_amplitudes(problem, x.amplitudes))
    return x


def measure(state: StateVector, targets: TargetSet, v: LinearOperator, seed: int) -> tuple[int, bool]:
    """Sample an index from ``|V state|^2``; ``hit`` tells whether it is marked."""
    if not state.dim == targets.dim == v.dim:
        raise DimensionError("state, targets and operator dimensions differ")
    probs = np.abs(v.matvec(state.amplitudes)) ** 2
    cdf = np.cumsum(probs)
    u = make_rng(seed).random() * cdf[-1]
    k = int(np.searchsorted(cdf, u, side="right"))
    k = min(k, state.dim - 1)
    return k, k in targets.indices


def subspace_basis(problem: SearchProblem) -> SubspaceBasis:
    n, idx = problem.dim, problem.targets.as_array()
    picks = np.zeros((n, idx.size), dtype=np.complex128)
    picks[idx, np.arange(idx.size)] = 1.0
    cols = np.column_stack([problem.gamma.amplitudes, problem.v.rmatvec(picks)])
    gram = cols.conj().T @ cols
    eig = np.linalg.eigvalsh(gram)
    if eig[0] <= GRAM_EIG_TOL * eig[-1]:
        raise DegenerateSubspaceError(
            f"Gram matrix smallest eigenvalue {eig[0]:.3e}: V|gamma> is numerically inside L"
        )
    return SubspaceBasis(cols, gram)


def invariance_residual(
    problem: SearchProblem,
    trials: int,
    seed: int,
    step: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float:
    """Worst leak of ``U v`` out of the invariant subspace over random unit ``v`` in it.

    ``step`` replaces the search operator (raw amplitudes in, raw out); used
    for negative controls.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _require_proceed(problem)
    basis = subspace_basis(problem)
    if step is None:
        step = lambda amps: step_amplitudes(problem, amps)  # noqa: E731
    rng = make_rng(seed)
    k = basis.vectors.shape[1]
    worst = 0.0
    for _ in range(trials):
        coef = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        v = basis.vectors @ coef
        v /= np.linalg.norm(v)
        worst = max(worst, basis.complement_residual(step(v)))
    return worst


def perturbed_step(problem: SearchProblem, angle: float, seed: int) -> Callable[[np.ndarray], np.ndarray]:
    """``U`` followed by a rotation by ``angle`` that mixes the invariant
    subspace with an equally sized piece of its complement.

    Every unit vector of the subspace leaks exactly ``sin(angle)``.
    """
    basis = subspace_basis(problem)
    n, k = basis.vectors.shape
    if n < 2 * k:
        raise DimensionError(f"negative control needs N >= {2 * k}, got N={n}")
    q, _ = np.linalg.qr(basis.vectors)
    rng = make_rng(seed)
    p = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    # two Gram-Schmidt passes; one pass leaves O(eps * cond) overlap with q
    p -= q @ (q.conj().T @ p)
    p -= q @ (q.conj().T @ p)
    p, _ = np.linalg.qr(p)
    cos_m1, sin_a = math.cos(angle) - 1.0, math.sin(angle)

    def rotated(amps: np.ndarray) -> np.ndarray:
        w = step_amplitudes(problem, amps)
        qw, pw = q.conj().T @ w, p.conj().T @ w
        return w + cos_m1 * (q @ qw + p @ pw) + sin_a * (p @ qw - q @ pw)

    return rotated


def subspace_leak(problem: SearchProblem, m_max: int) -> list[float]:
    """``||P_perp U^m gamma||`` for ``m = 0..m_max``."""
    _require_proceed(problem)
    basis = subspace_basis(problem)
    x = problem.gamma.amplitudes
    out = [basis.complement_residual(x)]
    for _ in range(m_max):
        x = StateVector(step_amplitudes(problem, x)).amplitudes
        out.append(basis.complement_residual(x))
    return out


def compare_full_reduced(problem: SearchProblem, m_max: int) -> float:
    return run_search(problem, m_max, record_full=True).max_deviation()


def random_problem(rng: np.random.Generator, n_max: int = 256, ell_max: int = 8) -> SearchProblem:
    """One draw from the validation family: Haar ``V``, random ``gamma``."""
    ell = int(rng.integers(1, ell_max + 1))
    n = int(rng.integers(max(4, 2 * ell + 2), n_max + 1))
    v_seed, g_seed, t_seed = (int(s) for s in rng.integers(0, 2**62, size=3))
    return SearchProblem(
        targets=make_targets(TargetSpec(count=ell, seed=t_seed), n),
        gamma=make_state(StateSpec("random", seed=g_seed), n),
        v=make_unitary(UnitarySpec("haar", seed=v_seed), n),
    )


def problem_family(count: int, seed: int, n_max: int = 256, ell_max: int = 8) -> list[SearchProblem]:
    """Fixed seed schedule of ``count`` random problems; skips non-Proceed draws."""
    rng = make_rng(seed)
    out = []
    while len(out) < count:
        prob = random_problem(rng, n_max, ell_max)
        if precheck_start(prob) is Verdict.PROCEED:
            out.append(prob)
    return out


def theta_window(model: ReducedModel) -> int:
    """``2 * ceil(pi / theta)``: a full rotation plus margin."""
    return 2 * math.ceil(math.pi / model.theta)

