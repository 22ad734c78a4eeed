"""Two-dimensional reduction of the multiobject search operator.

With overlaps ``mu_j = <w_j|V|gamma>`` and ``a = 2 * sqrt(sum_j |mu_j|^2)``,
the unit vector ``|mu> = (2/a) sum_j mu_j V^H |w_j>`` satisfies

    U|gamma> = (1 - a^2)|gamma> + a|mu>,      U|mu> = |mu> - a|gamma>,

so ``span{|gamma>, |mu>}`` is invariant and the coordinates ``(c1, c2)`` of
``U^m |gamma> = c1|gamma> + c2|mu>`` follow ``c <- M^T c`` with
``M = [[1 - a^2, a], [-a, 1]]``, starting from ``(1, 0)``.

The basis is oblique: ``<gamma|mu> = a/2``. Hence the represented state has
squared norm ``c1^2 + c2^2 + a c1 c2``, which stays 1 along every trajectory.

Success probability. ``V|mu> = (2/a) sum_j mu_j |w_j>`` lies in ``L`` and has
unit norm, while the projection of ``V|gamma>`` onto ``L`` is
``sum_j mu_j |w_j> = (a/2) V|mu>``. Therefore

    P_L V (c1|gamma> + c2|mu>) = (c1 a/2 + c2) V|mu>,

and the probability of measuring a marked object is ``(c1 a/2 + c2)^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import NumericalConsistencyError, OrthogonalStartError
from .hilbert import StateVector
from .operators import SearchProblem

EPS_A = 1e-9
PROB_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class OverlapData:
    mu: np.ndarray
    ssq: float

    @classmethod
    def from_mu(cls, mu) -> "OverlapData":
        mu = np.array(mu, dtype=np.complex128).reshape(-1)
        mu.setflags(write=False)
        return cls(mu=mu, ssq=float(np.sum(np.abs(mu) ** 2)))

    @property
    def ell(self) -> int:
        return self.mu.size


@dataclass(frozen=True, eq=False)
class ReducedModel:
    a: float
    m2: np.ndarray = field(repr=False)
    theta: float
    overlaps: OverlapData = field(repr=False)


class CoefficientPair(NamedTuple):
    """Coordinates in the oblique basis: ``c1`` on ``|gamma>``, ``c2`` on ``|mu>``."""

    c1: float
    c2: float


def compute_overlaps(problem: SearchProblem) -> OverlapData:
    """``mu_j = (V gamma)[t_j]`` in ascending target order."""
    v_gamma = problem.v.matvec(problem.gamma.amplitudes)
    return OverlapData.from_mu(v_gamma[problem.targets.as_array()])


def _require_positive_a(ssq: float):
    if ssq <= (EPS_A / 2) ** 2:
        raise OrthogonalStartError(
            f"sum |mu_j|^2 = {ssq:.3e}: V|gamma> is orthogonal to the target subspace"
        )


def build_reduced_model(overlaps: OverlapData) -> ReducedModel:
    _require_positive_a(overlaps.ssq)
    a = 2.0 * math.sqrt(overlaps.ssq)
    m2 = np.array([[1.0 - a * a, a], [-a, 1.0]])
    m2.setflags(write=False)
    # clip guards ssq a hair above 1 from rounding
    theta = math.acos(min(1.0, max(-1.0, 1.0 - a * a / 2.0)))
    return ReducedModel(a=a, m2=m2, theta=theta, overlaps=overlaps)


def mu_state(problem: SearchProblem, overlaps: OverlapData) -> StateVector:
    """Full-space ``|mu> = (2/a) V^H sum_j mu_j e_{t_j}``."""
    _require_positive_a(overlaps.ssq)
    a = 2.0 * math.sqrt(overlaps.ssq)
    in_l = np.zeros(problem.dim, dtype=np.complex128)
    in_l[problem.targets.as_array()] = overlaps.mu
    return StateVector(problem.v.rmatvec(in_l) * (2.0 / a))


def big_m_matrix(overlaps: OverlapData) -> np.ndarray:
    """The ``(l+1) x (l+1)`` matrix with ``U B = B M_big^T`` for ``B = [gamma, V^H e_t1, ...]``."""
    mu = overlaps.mu
    ell = mu.size
    big = np.eye(ell + 1, dtype=np.complex128)
    big[0, 0] = 1.0 - 4.0 * overlaps.ssq
    big[0, 1:] = 2.0 * mu
    big[1:, 0] = -2.0 * np.conj(mu)
    return big


def reduced_trajectory(model: ReducedModel, m_max: int) -> list[CoefficientPair]:
    """``[(M^T)^m (1, 0) for m in 0..m_max]`` by repeated multiplication."""
    if m_max < 0:
        raise ValueError(f"iteration count must be non-negative, got {m_max}")
    a = model.a
    d = 1.0 - a * a
    c1, c2 = 1.0, 0.0
    out = [CoefficientPair(c1, c2)]
    for _ in range(m_max):
        c1, c2 = d * c1 - a * c2, a * c1 + c2
        out.append(CoefficientPair(c1, c2))
    return out


def iterate_reduced(model: ReducedModel, m: int) -> CoefficientPair:
    return reduced_trajectory(model, m)[-1]


def iterate_reduced_exact(a, m: int) -> tuple[Fraction, Fraction]:
    """Validation-only twin of :func:`iterate_reduced` in exact rationals.

    ``a`` is converted with :class:`fractions.Fraction`, so a float input is
    taken at its exact binary value.
    """
    a = Fraction(a)
    d = 1 - a * a
    c1, c2 = Fraction(1), Fraction(0)
    for _ in range(m):
        c1, c2 = d * c1 - a * c2, a * c1 + c2
    return c1, c2


def oblique_norm_sq(model: ReducedModel, c: CoefficientPair) -> float:
    """Squared norm of ``c1|gamma> + c2|mu>`` given ``<gamma|mu> = a/2``."""
    return c.c1 * c.c1 + c.c2 * c.c2 + model.a * c.c1 * c.c2


def success_probability(model: ReducedModel, c: CoefficientPair) -> float:
    p = (c.c1 * model.a / 2.0 + c.c2) ** 2
    if p < -PROB_SLACK or p > 1.0 + PROB_SLACK:
        raise NumericalConsistencyError(f"success probability {p!r} outside [0, 1]")
    return min(1.0, max(0.0, p))


def optimal_iteration_count(model: ReducedModel, mode: str = "paper") -> int:
    """Number of iterations to run.

    ``paper``: nearest integer to ``pi / (2a)``.
    ``exact``: the ``m`` in ``[0, ceil(pi/theta) + 1]`` with the largest
    reduced success probability, smallest ``m`` on ties.
    """
    if mode == "paper":
        return int(math.floor(math.pi / (2.0 * model.a) + 0.5))
    if mode == "exact":
        m_hi = math.ceil(math.pi / model.theta) + 1
        best_m, best_p = 0, -1.0
        for m, c in enumerate(reduced_trajectory(model, m_hi)):
            p = success_probability(model, c)
            if p > best_p:
                best_m, best_p = m, p
        return best_m
    raise ValueError(f"unknown mode {mode!r}; expected 'paper' or 'exact'")
