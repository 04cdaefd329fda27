"""Dense complex linear algebra for small qubit registers.

Basis convention: qubit 1 is the most significant bit, so for two qubits the
basis order is |00>, |01>, |10>, |11>.
"""
from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import CapacityError, NumericalError, UsageError

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12

_max_qubits = 14


def max_qubits() -> int:
    return _max_qubits


def set_max_qubits(n: int) -> None:
    """Change the register cap used by every dense constructor."""
    global _max_qubits
    if n < 1:
        raise UsageError("max qubits must be positive")
    _max_qubits = int(n)


def _qubits_for_dim(dim: int) -> int:
    if dim < 2 or dim & (dim - 1):
        raise UsageError(f"dimension {dim} is not a power of two >= 2")
    n = dim.bit_length() - 1
    if n > _max_qubits:
        raise CapacityError(f"{n} qubits exceeds the configured maximum of {_max_qubits}")
    return n


PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over the 2**n computational basis."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex).reshape(-1)
        _qubits_for_dim(a.size)
        if not np.all(np.isfinite(a)):
            raise UsageError("state amplitudes must be finite")
        if abs(np.vdot(a, a).real - 1.0) > NORM_TOL:
            raise UsageError(f"state is not normalized (norm^2 = {np.vdot(a, a).real!r})")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def normalized(cls, amps) -> PureState:
        a = np.asarray(amps, dtype=complex).reshape(-1)
        norm = np.linalg.norm(a)
        if norm == 0:
            raise UsageError("cannot normalize the zero vector")
        return cls(a / norm)

    @classmethod
    def basis(cls, bits: str) -> PureState:
        """Computational basis state from a bit string, e.g. ``"01"``."""
        a = np.zeros(2 ** len(bits), dtype=complex)
        a[int(bits, 2)] = 1.0
        return cls(a)

    @property
    def n_qubits(self) -> int:
        return self.amps.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amps.size

    def __len__(self):
        return self.amps.size


@dataclass(frozen=True)
class HermitianOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = _square(self.matrix)
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=HERMITIAN_TOL):
            raise UsageError("operator is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    @property
    def is_real(self) -> bool:
        return not np.any(self.matrix.imag)


@dataclass(frozen=True)
class UnitaryOperator:
    """Square complex matrix; unitarity is checked in tests, not per call."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _square(self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def adjoint(self) -> UnitaryOperator:
        return UnitaryOperator(self.matrix.conj().T)

    def __matmul__(self, other):
        if isinstance(other, UnitaryOperator):
            return UnitaryOperator(self.matrix @ other.matrix)
        if isinstance(other, PureState):
            return apply(self, other)
        return NotImplemented


def _square(m) -> np.ndarray:
    m = np.array(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise UsageError(f"expected a square matrix, got shape {m.shape}")
    _qubits_for_dim(m.shape[0])
    if not np.all(np.isfinite(m)):
        raise UsageError("matrix entries must be finite")
    return m


def _raw(x) -> np.ndarray:
    if isinstance(x, PureState):
        return x.amps
    if isinstance(x, (HermitianOperator, UnitaryOperator)):
        return x.matrix
    return np.asarray(x, dtype=complex)


def tensor(a, b):
    """Kronecker product with ``a`` as the more significant factor.

    States combine into states, operators into operators of the same kind
    (Hermitian x Hermitian stays Hermitian). Plain arrays give plain arrays.
    """
    ra, rb = _raw(a), _raw(b)
    for r in (ra, rb):
        if r.shape[0] & (r.shape[0] - 1):
            raise UsageError(f"dimension {r.shape[0]} is not a power of two")
    dim = ra.shape[0] * rb.shape[0]
    if dim.bit_length() - 1 > _max_qubits:
        raise CapacityError(f"tensor product would exceed {_max_qubits} qubits")
    out = np.kron(ra, rb)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(out)
    if isinstance(a, HermitianOperator) and isinstance(b, HermitianOperator):
        return HermitianOperator(out)
    if isinstance(a, (HermitianOperator, UnitaryOperator)) and isinstance(
        b, (HermitianOperator, UnitaryOperator)
    ):
        return UnitaryOperator(out)
    return out


def kron_all(*factors) -> np.ndarray:
    return reduce(np.kron, (_raw(f) for f in factors))


def embed(op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    """Place a 2x2 operator on qubit ``site`` (0-based, most significant first)."""
    factors = [PAULI_I] * n_qubits
    factors[site] = np.asarray(op, dtype=complex)
    return kron_all(*factors)


def inner(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugating the first argument."""
    if a.dim != b.dim:
        raise UsageError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amps, b.amps))


def apply(u: UnitaryOperator, psi: PureState) -> PureState:
    if u.dim != psi.dim:
        raise UsageError(f"dimension mismatch: operator {u.dim} vs state {psi.dim}")
    out = u.matrix @ psi.amps
    # rescale away round-off so the 1e-12 norm invariant survives long products
    return PureState(out / np.linalg.norm(out))


class Spectral:
    """Eigendecomposition of a Hermitian operator, reusable across many times.

    Real symmetric input goes through the real solver, which is several times
    faster and keeps eigenvectors real. Instances are immutable after
    construction and safe to share between threads.
    """

    def __init__(self, h: HermitianOperator):
        m = h.matrix
        try:
            if h.is_real:
                w, v = np.linalg.eigh(np.ascontiguousarray(m.real))
            else:
                w, v = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:
            cond = np.linalg.cond(m)
            raise NumericalError(
                f"eigendecomposition failed to converge (condition number {cond:.3e})"
            ) from exc
        self.energies = w
        self.vectors = v
        self.energies.setflags(write=False)
        self.vectors.setflags(write=False)

    def unitary(self, t: float) -> UnitaryOperator:
        phases = np.exp(-1j * self.energies * t)
        return UnitaryOperator((self.vectors * phases) @ self.vectors.conj().T)

    def evolve(self, psi0: PureState, times) -> np.ndarray:
        """Amplitudes of e^{-iHt}|psi0> for each t, shape ``(len(times), dim)``."""
        if psi0.dim != self.vectors.shape[0]:
            raise UsageError("state and Hamiltonian dimensions differ")
        times = np.atleast_1d(np.asarray(times, dtype=float))
        coeffs = self.vectors.conj().T @ psi0.amps
        phases = np.exp(-1j * np.outer(times, self.energies))
        return (phases * coeffs) @ self.vectors.T


_spectral_cache: dict[bytes, Spectral] = {}
_cache_lock = threading.Lock()
_CACHE_SIZE = 4


def spectral(h: HermitianOperator) -> Spectral:
    """Cached :class:`Spectral` keyed on the matrix bytes."""
    key = hashlib.blake2b(np.ascontiguousarray(h.matrix).data, digest_size=16).digest()
    with _cache_lock:
        hit = _spectral_cache.get(key)
    if hit is not None:
        return hit
    sp = Spectral(h)
    with _cache_lock:
        if len(_spectral_cache) >= _CACHE_SIZE:
            _spectral_cache.pop(next(iter(_spectral_cache)))
        _spectral_cache[key] = sp
    return sp


def hermitian_expm(h: HermitianOperator, t: float) -> UnitaryOperator:
    """e^{-iHt} by spectral decomposition."""
    return spectral(h).unitary(t)
