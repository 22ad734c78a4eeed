"""Reflections and the generalized search operator ``U = -I_gamma V^H I_L V``.

``U`` is never materialized on the hot path: one step costs one application
of ``V``, one of ``V^H``, a sign flip on the target amplitudes and a rank-one
update.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionError, InvalidTargetError, NormalizationError, ResourceLimitError
from .hilbert import DENSE_LIMIT, LinearOperator, StateVector


@dataclass(frozen=True)
class TargetSet:
    """Marked indices ``L``; equivalently the oracle ``f(w_k) = [k in indices]``."""

    indices: tuple[int, ...]
    dim: int

    def __init__(self, indices: Iterable[int], dim: int):
        idx = [int(i) for i in indices]
        if not idx:
            raise InvalidTargetError("at least one target index is required")
        if len(set(idx)) != len(idx):
            raise InvalidTargetError(f"duplicate target indices in {idx}")
        bad = [i for i in idx if not 0 <= i < dim]
        if bad:
            raise InvalidTargetError(f"target indices {bad} out of range [0, {dim})")
        object.__setattr__(self, "indices", tuple(sorted(idx)))
        object.__setattr__(self, "dim", int(dim))

    @property
    def ell(self) -> int:
        return len(self.indices)

    def oracle(self, k: int) -> int:
        return int(k in self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)


@dataclass(frozen=True)
class SearchProblem:
    """The tuple ``(N, L, |gamma>, V)``."""

    targets: TargetSet
    gamma: StateVector
    v: LinearOperator

    def __post_init__(self):
        dims = {self.targets.dim, self.gamma.dim, self.v.dim}
        if len(dims) != 1:
            raise DimensionError(
                f"inconsistent dimensions: targets={self.targets.dim}, "
                f"gamma={self.gamma.dim}, v={self.v.dim}"
            )
        norm = np.linalg.norm(self.gamma.amplitudes)
        if abs(norm - 1.0) > 1e-12:
            raise NormalizationError(f"gamma has norm {norm!r}")

    @property
    def dim(self) -> int:
        return self.gamma.dim

    @property
    def ell(self) -> int:
        return self.targets.ell


def _check_dim(expected: int, x: StateVector):
    if x.dim != expected:
        raise DimensionError(f"expected dimension {expected}, got {x.dim}")


def _flip_targets(amps: np.ndarray, idx: np.ndarray) -> np.ndarray:
    out = np.array(amps, dtype=np.complex128, copy=True)
    out[idx] = -out[idx]
    return out


def _reflect_about(gamma: np.ndarray, amps: np.ndarray) -> np.ndarray:
    return amps - 2.0 * np.vdot(gamma, amps) * gamma


def oracle_reflection(targets: TargetSet, x: StateVector) -> StateVector:
    """``I_L x``: negate the target amplitudes, leave the rest untouched."""
    _check_dim(targets.dim, x)
    return StateVector(_flip_targets(x.amplitudes, targets.as_array()))


def diffusion_reflection(gamma: StateVector, x: StateVector) -> StateVector:
    """``I_gamma x = x - 2 <gamma|x> gamma``."""
    _check_dim(gamma.dim, x)
    return StateVector(_reflect_about(gamma.amplitudes, x.amplitudes))


def step_amplitudes(problem: SearchProblem, amps: np.ndarray) -> np.ndarray:
    """:func:`search_step` on a bare amplitude array, without the norm check."""
    y = problem.v.matvec(amps)
    y = _flip_targets(y, problem.targets.as_array())
    y = problem.v.rmatvec(y)
    y = _reflect_about(problem.gamma.amplitudes, y)
    return -y


def search_step(problem: SearchProblem, x: StateVector) -> StateVector:
    """One application of ``U = -I_gamma V^H I_L V``.

    The global sign is kept: it does not change measurement statistics but
    the reduced recursion tracks it exactly.
    """
    _check_dim(problem.dim, x)
    return StateVector(step_amplitudes(problem, x.amplitudes))


def search_operator_matrix(problem: SearchProblem, limit: int | None = None) -> np.ndarray:
    """Dense ``U`` built column by column from :func:`search_step`."""
    limit = DENSE_LIMIT if limit is None else limit
    if problem.dim > limit:
        raise ResourceLimitError(f"dense U for N={problem.dim} exceeds limit {limit}")
    eye = np.eye(problem.dim, dtype=np.complex128)
    return np.column_stack([step_amplitudes(problem, col) for col in eye])
