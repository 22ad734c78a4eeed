"""States, unitary operators and the fast Walsh-Hadamard transform.

Indexing is 0-based: database object ``w_{j+1}`` is basis vector ``e_j``.
States and operators are immutable once built; every operation returns a
fresh object. Norms are *checked* after each unitary application, never
silently repaired, so a non-unitary operator surfaces as
:class:`NormalizationError` instead of drifting quietly.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvalidUnitaryError, NormalizationError, ResourceLimitError

NORM_TOL = 1e-12
DENSE_LIMIT = 4096


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


class StateVector:
    """Unit-norm complex amplitude vector of dimension ``N >= 2``."""

    __slots__ = ("_amps",)

    def __init__(self, amplitudes, tol: float = NORM_TOL):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size < 2:
            raise DimensionError(f"state dimension must be >= 2, got {amps.size}")
        norm = float(np.linalg.norm(amps))
        if not abs(norm - 1.0) <= tol:
            raise NormalizationError(f"state norm {norm!r} deviates from 1 by more than {tol:g}")
        amps.setflags(write=False)
        self._amps = amps

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        """Build a state by dividing ``amplitudes`` by their 2-norm."""
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise NormalizationError("cannot normalize the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, k: int, dim: int) -> "StateVector":
        if not 0 <= k < dim:
            raise DimensionError(f"basis index {k} out of range for dimension {dim}")
        amps = np.zeros(dim, dtype=np.complex128)
        amps[k] = 1.0
        return cls(amps)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def dim(self) -> int:
        return self._amps.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self._amps) ** 2

    def __array__(self, dtype=None, copy=None):
        return self._amps if dtype is None else self._amps.astype(dtype)

    def __repr__(self):
        return f"StateVector(dim={self.dim})"


def inner_product(x: StateVector, y: StateVector) -> complex:
    """Bra-ket ``<x|y>``, conjugate-linear in ``x``."""
    if x.dim != y.dim:
        raise DimensionError(f"inner product of dimensions {x.dim} and {y.dim}")
    return complex(np.vdot(x.amplitudes, y.amplitudes))


def _fwht_axis0(a: np.ndarray) -> np.ndarray:
    """Normalized Walsh-Hadamard transform along axis 0 (length ``2**n``)."""
    n = a.shape[0]
    if not _is_power_of_two(n):
        raise DimensionError(f"Walsh-Hadamard transform needs a power-of-two length, got {n}")
    rest = a.shape[1:]
    out = np.array(a, dtype=np.complex128, copy=True)
    h = 1
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    while h < n:
        # butterfly pairs (i, i + h) inside each block of width 2h
        view = out.reshape((n // (2 * h), 2, h) + rest)
        top = view[:, 0].copy()
        bot = view[:, 1]
        view[:, 0] = (top + bot) * inv_sqrt2
        view[:, 1] = (top - bot) * inv_sqrt2
        h *= 2
    return out


def fwht(x) -> np.ndarray:
    """Apply ``H^{(x)n}`` to a length-``2**n`` vector in ``O(N log N)``.

    Each butterfly stage carries a factor ``1/sqrt(2)``, so the transform is
    unitary and its own inverse.
    """
    a = np.asarray(x)
    if a.ndim != 1:
        raise DimensionError("fwht expects a one-dimensional vector")
    return _fwht_axis0(a)


class LinearOperator:
    """Base class for the ``N x N`` unitary operators used as ``V``."""

    kind = "abstract"

    def __init__(self, dim: int):
        if dim < 2:
            raise DimensionError(f"operator dimension must be >= 2, got {dim}")
        self._dim = int(dim)

    @property
    def dim(self) -> int:
        return self._dim

    def matvec(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        """Apply the adjoint (``V^{-1}`` for unitary ``V``)."""
        raise NotImplementedError

    def to_dense(self, limit: int | None = None) -> np.ndarray:
        limit = DENSE_LIMIT if limit is None else limit
        if self.dim > limit:
            raise ResourceLimitError(f"dense materialization of N={self.dim} exceeds limit {limit}")
        return self._dense()

    def _dense(self) -> np.ndarray:
        return np.column_stack([self.matvec(col) for col in np.eye(self.dim, dtype=np.complex128)])

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class IdentityOperator(LinearOperator):
    kind = "identity"

    def matvec(self, x):
        return np.array(x, dtype=np.complex128, copy=True)

    rmatvec = matvec

    def _dense(self):
        return np.eye(self.dim, dtype=np.complex128)


class WalshHadamardOperator(LinearOperator):
    """``H^{(x)n}`` on ``N = 2**n``; never materialized unless asked."""

    kind = "walsh_hadamard"

    def __init__(self, dim: int):
        if not _is_power_of_two(dim):
            raise DimensionError(f"Walsh-Hadamard operator needs N = 2^n, got N={dim}")
        super().__init__(dim)

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def matvec(self, x):
        return _fwht_axis0(np.asarray(x))

    rmatvec = matvec  # real symmetric

    def _dense(self):
        return _fwht_axis0(np.eye(self.dim, dtype=np.complex128))


class DenseOperator(LinearOperator):
    """Explicit unitary matrix, stored row-major.

    The matrix is checked on construction: its unitarity residual must not
    exceed ``1e-10 * N`` unless ``validate=False``.
    """

    kind = "dense"

    def __init__(self, matrix, validate: bool = True):
        mat = np.ascontiguousarray(matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"dense operator must be square, got shape {mat.shape}")
        super().__init__(mat.shape[0])
        mat.setflags(write=False)
        self._mat = mat
        if validate:
            res = matrix_unitarity_residual(mat)
            if res > 1e-10 * self.dim:
                raise InvalidUnitaryError(f"unitarity residual {res:.3e} exceeds {1e-10 * self.dim:.3e}")

    @property
    def matrix(self) -> np.ndarray:
        return self._mat

    def matvec(self, x):
        return self._mat @ np.asarray(x, dtype=np.complex128)

    def rmatvec(self, x):
        # M^H x = conj(M^T conj(x)); M.T is a view, so M^H is never formed
        return np.conj(self._mat.T @ np.conj(np.asarray(x, dtype=np.complex128)))

    def _dense(self):
        return self._mat.copy()


class ComposedOperator(LinearOperator):
    """Product ``ops[0] @ ops[1] @ ... @ ops[-1]``; the last factor acts first."""

    kind = "composed"

    def __init__(self, ops: Sequence[LinearOperator]):
        ops = tuple(ops)
        if not ops:
            raise DimensionError("composed operator needs at least one factor")
        dims = {op.dim for op in ops}
        if len(dims) != 1:
            raise DimensionError(f"composed factors have mismatched dimensions {sorted(dims)}")
        super().__init__(ops[0].dim)
        self.ops = ops

    def matvec(self, x):
        out = np.asarray(x, dtype=np.complex128)
        for op in reversed(self.ops):
            out = op.matvec(out)
        return out

    def rmatvec(self, x):
        out = np.asarray(x, dtype=np.complex128)
        for op in self.ops:
            out = op.rmatvec(out)
        return out


def apply(op: LinearOperator, x: StateVector, adjoint: bool = False) -> StateVector:
    """Return ``op @ x`` (or ``op^H @ x``) as a new, norm-checked state."""
    if op.dim != x.dim:
        raise DimensionError(f"operator dimension {op.dim} does not match state dimension {x.dim}")
    out = op.rmatvec(x.amplitudes) if adjoint else op.matvec(x.amplitudes)
    return StateVector(out)


def matrix_unitarity_residual(mat: np.ndarray) -> float:
    gram = mat.conj().T @ mat
    gram[np.diag_indices_from(gram)] -= 1.0
    return float(np.max(np.abs(gram)))


def unitarity_residual(op: LinearOperator, limit: int | None = None) -> float:
    """Max entrywise ``|(op^H op - I)_{jk}|``, computed on the dense matrix."""
    return matrix_unitarity_residual(op.to_dense(limit))
