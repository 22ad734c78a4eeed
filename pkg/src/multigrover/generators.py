"""Seeded constructors for unitaries ``V``, initial states and target sets.

All randomness goes through :func:`make_rng`, a PCG64 bit generator seeded
from the seed carried by the input description. Each call owns its
generator, so equal descriptions give bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvalidTargetError, InvalidUnitaryError, NormalizationError
from .hilbert import (
    DenseOperator,
    IdentityOperator,
    LinearOperator,
    StateVector,
    WalshHadamardOperator,
    matrix_unitarity_residual,
)
from .operators import TargetSet
from .serialization import load_matrix_array, load_state_array

RNG_NAME = "numpy.random.PCG64"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class UnitarySpec:
    tag: str  # identity | walsh_hadamard | haar | file
    seed: int | None = None
    path: str | None = None

    @classmethod
    def parse(cls, text: str) -> "UnitarySpec":
        head, _, arg = text.partition(":")
        head = head.strip().lower().replace("-", "_")
        if head in ("identity", "walsh_hadamard") and not arg:
            return cls(head)
        if head == "haar" and arg:
            return cls("haar", seed=int(arg))
        if head == "file" and arg:
            return cls("file", path=arg)
        raise ValueError(f"bad unitary spec {text!r}; expected identity, walsh-hadamard, haar:SEED or file:PATH")

    def __str__(self):
        if self.tag == "haar":
            return f"haar:{self.seed}"
        if self.tag == "file":
            return f"file:{self.path}"
        return self.tag.replace("_", "-")


@dataclass(frozen=True)
class StateSpec:
    tag: str  # uniform | basis | random | file
    index: int | None = None
    seed: int | None = None
    path: str | None = None

    @classmethod
    def parse(cls, text: str) -> "StateSpec":
        head, _, arg = text.partition(":")
        head = head.strip().lower()
        if head == "uniform" and not arg:
            return cls("uniform")
        if head == "basis" and arg:
            return cls("basis", index=int(arg))
        if head == "random" and arg:
            return cls("random", seed=int(arg))
        if head == "file" and arg:
            return cls("file", path=arg)
        raise ValueError(f"bad state spec {text!r}; expected uniform, basis:K, random:SEED or file:PATH")

    def __str__(self):
        if self.tag == "basis":
            return f"basis:{self.index}"
        if self.tag == "random":
            return f"random:{self.seed}"
        if self.tag == "file":
            return f"file:{self.path}"
        return self.tag


@dataclass(frozen=True)
class TargetSpec:
    """Either an explicit index list or ``count`` indices sampled with ``seed``."""

    indices: tuple[int, ...] | None = None
    count: int | None = None
    seed: int = 0

    @classmethod
    def parse(cls, text: str) -> "TargetSpec":
        head, _, arg = text.partition(":")
        head = head.strip().lower()
        try:
            if head == "idx" and arg:
                return cls(indices=tuple(int(t) for t in arg.split(",")))
            if head == "count" and arg:
                count, _, seed = arg.partition("@")
                return cls(count=int(count), seed=int(seed) if seed else 0)
        except ValueError:
            pass
        raise ValueError(f"bad target spec {text!r}; expected idx:a,b,c or count:K@SEED")

    def __str__(self):
        if self.indices is not None:
            return "idx:" + ",".join(str(i) for i in self.indices)
        return f"count:{self.count}@{self.seed}"


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``dim x dim`` unitary.

    QR of a complex Ginibre matrix, then each column of ``Q`` is multiplied by
    the phase of the matching ``R`` diagonal entry so that ``R`` has a positive
    diagonal. Without this step the result is not Haar.
    """
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def make_unitary(spec: UnitarySpec, dim: int) -> LinearOperator:
    if dim < 2:
        raise DimensionError(f"N must be >= 2, got {dim}")
    if spec.tag == "identity":
        return IdentityOperator(dim)
    if spec.tag == "walsh_hadamard":
        return WalshHadamardOperator(dim)
    if spec.tag == "haar":
        return DenseOperator(haar_unitary(dim, make_rng(spec.seed)), validate=False)
    if spec.tag == "file":
        mat = load_matrix_array(spec.path)
        if mat.shape[0] != dim:
            raise DimensionError(f"{spec.path}: matrix has dimension {mat.shape[0]}, expected {dim}")
        res = matrix_unitarity_residual(mat)
        if res > 1e-10 * dim:
            raise InvalidUnitaryError(f"{spec.path}: unitarity residual {res:.3e} exceeds {1e-10 * dim:.3e}")
        return DenseOperator(mat, validate=False)
    raise ValueError(f"unknown unitary tag {spec.tag!r}")


def make_state(spec: StateSpec, dim: int) -> StateVector:
    if dim < 2:
        raise DimensionError(f"N must be >= 2, got {dim}")
    if spec.tag == "uniform":
        return StateVector(np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128))
    if spec.tag == "basis":
        return StateVector.basis(spec.index, dim)
    if spec.tag == "random":
        rng = make_rng(spec.seed)
        z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return StateVector.normalized(z)
    if spec.tag == "file":
        amps = load_state_array(spec.path)
        if amps.size != dim:
            raise DimensionError(f"{spec.path}: state has dimension {amps.size}, expected {dim}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-10:
            raise NormalizationError(f"{spec.path}: state norm {norm!r} is not 1 within 1e-10")
        return StateVector.normalized(amps)
    raise ValueError(f"unknown state tag {spec.tag!r}")


def make_targets(spec: TargetSpec | Sequence[int], dim: int) -> TargetSet:
    if not isinstance(spec, TargetSpec):
        spec = TargetSpec(indices=tuple(spec))
    if spec.indices is not None:
        return TargetSet(spec.indices, dim)
    if spec.count is None or not 1 <= spec.count <= dim:
        raise InvalidTargetError(f"target count must be in [1, {dim}], got {spec.count}")
    picked = make_rng(spec.seed).choice(dim, size=spec.count, replace=False)
    return TargetSet(picked.tolist(), dim)
