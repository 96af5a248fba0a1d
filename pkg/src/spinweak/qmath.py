"""Small dense complex linear algebra for one and two qubits.

Joint states use the basis order path (x) spin::

    |I,up>, |I,down>, |II,up>, |II,down>

so that an index is ``2 * path + spin``. Every object here is immutable:
the wrapped arrays are copied on construction and marked read-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, UndefinedStateError

ALGEBRA_TOL = 1e-12
REALNESS_TOL = 1e-10

_DIMS = (2, 4)


def _frozen(values, shape_ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.ndim != shape_ndim:
        raise InvalidArgumentError(f"expected a {shape_ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("non-finite entry")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """A ket of dimension 2 (spin or path) or 4 (joint)."""

    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps, 1)
        if amps.shape[0] not in _DIMS:
            raise InvalidArgumentError(f"state dimension must be 2 or 4, got {amps.shape[0]}")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    @property
    def normalized(self) -> bool:
        return abs(self.norm_sq - 1.0) <= ALGEBRA_TOL

    def normalize(self) -> StateVector:
        n = self.norm_sq
        if n <= 0.0:
            raise UndefinedStateError("cannot normalize a zero-norm state")
        return StateVector(self.amps / np.sqrt(n))

    def inner(self, other: StateVector) -> complex:
        """<self|other>."""
        _check_dims(self.dim, other.dim)
        return complex(np.vdot(self.amps, other.amps))

    def __getitem__(self, k):
        return self.amps[k]

    def __len__(self):
        return self.dim


@dataclass(frozen=True, eq=False)
class Operator:
    """A square complex matrix acting on a 2- or 4-dimensional space."""

    matrix: np.ndarray
    hermitian: bool = field(init=False)
    unitary: bool = field(init=False)

    def __post_init__(self):
        m = _frozen(self.matrix, 2)
        if m.shape[0] != m.shape[1] or m.shape[0] not in _DIMS:
            raise InvalidArgumentError(f"operator must be 2x2 or 4x4, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        dag = m.conj().T
        object.__setattr__(self, "hermitian", bool(np.max(np.abs(m - dag)) <= ALGEBRA_TOL))
        eye = np.eye(m.shape[0])
        object.__setattr__(self, "unitary", bool(np.max(np.abs(dag @ m - eye)) <= ALGEBRA_TOL))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dagger(self) -> Operator:
        return Operator(self.matrix.conj().T)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            _check_dims(self.dim, other.dim)
            return Operator(self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            _check_dims(self.dim, other.dim)
            return StateVector(self.matrix @ other.amps)
        return NotImplemented

    def __add__(self, other: Operator) -> Operator:
        _check_dims(self.dim, other.dim)
        return Operator(self.matrix + other.matrix)

    def __sub__(self, other: Operator) -> Operator:
        _check_dims(self.dim, other.dim)
        return Operator(self.matrix - other.matrix)

    def __mul__(self, scalar) -> Operator:
        return Operator(complex(scalar) * self.matrix)

    __rmul__ = __mul__

    def allclose(self, other, atol: float = ALGEBRA_TOL) -> bool:
        other = other.matrix if isinstance(other, Operator) else np.asarray(other)
        return bool(np.allclose(self.matrix, other, rtol=0.0, atol=atol))


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise InvalidArgumentError(f"dimension mismatch: {a} vs {b}")


IDENTITY2 = Operator(np.eye(2))
IDENTITY4 = Operator(np.eye(4))
SIGMA_X = Operator([[0, 1], [1, 0]])
SIGMA_Y = Operator([[0, -1j], [1j, 0]])
SIGMA_Z = Operator([[1, 0], [0, -1]])
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product ``a (x) b`` of two single-qubit operators."""
    if a.dim != 2 or b.dim != 2:
        raise InvalidArgumentError("tensor expects two 2x2 operators")
    return Operator(np.kron(a.matrix, b.matrix))


def tensor_states(u: StateVector, v: StateVector) -> StateVector:
    if u.dim != 2 or v.dim != 2:
        raise InvalidArgumentError("tensor_states expects two 2-dim states")
    return StateVector(np.kron(u.amps, v.amps))


def unitary_exp(h: Operator, angle: float) -> Operator:
    """Return ``exp(-i * angle * h / 2)``.

    Only two closed forms are supported: diagonal ``h`` (elementwise phases)
    and traceless 2x2 ``h`` with ``h @ h = 1`` (Pauli-like), for which
    ``cos(angle/2) 1 - i sin(angle/2) h``. Anything else is rejected.
    """
    if not h.hermitian:
        raise InvalidArgumentError("unitary_exp requires a Hermitian generator")
    m = h.matrix
    half = 0.5 * float(angle)
    off = m - np.diag(np.diag(m))
    if np.max(np.abs(off)) <= ALGEBRA_TOL:
        return Operator(np.diag(np.exp(-1j * half * np.diag(m).real)))
    if h.dim == 2 and abs(np.trace(m)) <= ALGEBRA_TOL and abs(abs(np.linalg.det(m)) - 1.0) <= ALGEBRA_TOL:
        return Operator(np.cos(half) * np.eye(2) - 1j * np.sin(half) * m)
    raise InvalidArgumentError("generator is neither diagonal nor a traceless unit 2x2 Hermitian")


def expectation(s: StateVector, o: Operator) -> float:
    """<s|o|s> / <s|s>, returned as a real number.

    Raises for a zero-norm state, and for a non-real result, which can only
    happen for a non-Hermitian ``o``.
    """
    _check_dims(s.dim, o.dim)
    n = s.norm_sq
    if n <= 0.0:
        raise UndefinedStateError("expectation of a zero-norm state")
    val = complex(np.vdot(s.amps, o.matrix @ s.amps)) / n
    if abs(val.imag) > REALNESS_TOL:
        raise InvalidArgumentError(f"expectation has imaginary part {val.imag:.3g}; operator not Hermitian")
    return val.real
