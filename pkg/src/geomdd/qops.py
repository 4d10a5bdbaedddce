"""Dense complex linear algebra over tensor-product Hilbert spaces.

Everything downstream (Hamiltonian builders, propagators, fidelity
extraction) works with the three value types defined here: operators,
state vectors, and density matrices, each carrying an explicit
:class:`HilbertSpace`.  All values are immutable after construction and
all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "Tolerances",
    "TOL",
    "HilbertSpace",
    "ComplexOperator",
    "StateVector",
    "DensityMatrix",
    "tensor",
    "partial_trace",
    "expm",
    "state_fidelity",
    "sigma_x",
    "sigma_y",
    "sigma_z",
    "identity",
    "destroy",
    "basis_ket",
    "outer",
]

# Total dimension above which dense storage is refused.  The systems in
# this package never exceed ~64; anything wildly larger is a bug.
MAX_TOTAL_DIM = 1 << 14


@dataclass(frozen=True)
class Tolerances:
    """Central numerical tolerance record used by the whole package."""

    norm: float = 1e-10        # state normalization
    hermitian: float = 1e-10   # Hermiticity of density matrices / Hamiltonians
    trace: float = 1e-10       # unit-trace check
    positivity: float = -1e-8  # smallest admissible density-matrix eigenvalue
    imag_residue: float = 1e-10  # allowed imaginary part of real quantities
    unitary: float = 1e-10


TOL = Tolerances()


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered list of subsystem dimensions; index 0 is the leftmost ket factor.

    Subsystem 0 is the slowest-varying index of the flattened product
    basis, so ``|a⟩⊗|b⟩`` maps to flat index ``a * dim_b + b``.
    """

    dims: tuple[int, ...]

    def __init__(self, dims) -> None:
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise ValueError("HilbertSpace needs at least one subsystem")
        if any(d < 1 for d in dims):
            raise ValueError(f"subsystem dimensions must be >= 1, got {dims}")
        total = 1
        for d in dims:
            total *= d
            if total > MAX_TOTAL_DIM:
                raise ValueError(
                    f"total dimension overflow: product of {dims} exceeds "
                    f"dense-backend limit {MAX_TOTAL_DIM}"
                )
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self) -> int:
        return len(self.dims)


@dataclass(frozen=True)
class ComplexOperator:
    """Dense square operator on a :class:`HilbertSpace`.

    Entries are in angular-frequency units for Hamiltonians and
    dimensionless for unitaries and projectors.  Hermiticity/unitarity
    are checkable predicates, never assumed.
    """

    space: HilbertSpace
    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        entries = _freeze(self.entries)
        n = self.space.total_dim
        if entries.shape != (n, n):
            raise ValueError(
                f"operator shape {entries.shape} does not match space dimension {n}"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def dagger(self) -> "ComplexOperator":
        return ComplexOperator(self.space, self.entries.conj().T)

    def is_hermitian(self, tol: float = TOL.hermitian) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def is_unitary(self, tol: float = TOL.unitary) -> bool:
        prod = self.entries @ self.entries.conj().T
        return bool(np.max(np.abs(prod - np.eye(self.dim))) <= tol)

    def __matmul__(self, other: "ComplexOperator") -> "ComplexOperator":
        self._check_same_space(other)
        return ComplexOperator(self.space, self.entries @ other.entries)

    def __add__(self, other: "ComplexOperator") -> "ComplexOperator":
        self._check_same_space(other)
        return ComplexOperator(self.space, self.entries + other.entries)

    def __sub__(self, other: "ComplexOperator") -> "ComplexOperator":
        self._check_same_space(other)
        return ComplexOperator(self.space, self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "ComplexOperator":
        return ComplexOperator(self.space, self.entries * scalar)

    __rmul__ = __mul__

    def _check_same_space(self, other: "ComplexOperator") -> None:
        if self.space.dims != other.space.dims:
            raise ValueError(
                f"space mismatch: {self.space.dims} vs {other.space.dims}"
            )


@dataclass(frozen=True)
class StateVector:
    """Normalized dense state vector on a :class:`HilbertSpace`."""

    space: HilbertSpace
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        amps = _freeze(self.amplitudes).ravel()
        if amps.shape != (self.space.total_dim,):
            raise ValueError(
                f"amplitude length {amps.shape} does not match space "
                f"dimension {self.space.total_dim}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalize(cls, space: HilbertSpace, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        nrm = np.linalg.norm(amps)
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(space, amps / nrm)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_density_matrix(self) -> "DensityMatrix":
        amps = self.amplitudes
        return DensityMatrix(self.space, np.outer(amps, amps.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, (numerically) positive density matrix."""

    space: HilbertSpace
    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        entries = _freeze(self.entries)
        n = self.space.total_dim
        if entries.shape != (n, n):
            raise ValueError(
                f"density matrix shape {entries.shape} does not match "
                f"space dimension {n}"
            )
        object.__setattr__(self, "entries", entries)

    def validate(self, tol: Tolerances = TOL) -> "DensityMatrix":
        """Raise if the Hermiticity / trace / positivity invariants fail."""
        herm = np.max(np.abs(self.entries - self.entries.conj().T))
        if herm > tol.hermitian:
            raise ValueError(f"density matrix not Hermitian: residue {herm:.3e}")
        tr = self.trace
        if abs(tr - 1.0) > tol.trace:
            raise ValueError(f"density matrix trace {tr} != 1")
        evals = np.linalg.eigvalsh((self.entries + self.entries.conj().T) / 2)
        if evals.min() < tol.positivity:
            raise ValueError(
                f"density matrix has negative eigenvalue {evals.min():.3e}"
            )
        return self

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def min_eigenvalue(self) -> float:
        herm = (self.entries + self.entries.conj().T) / 2
        return float(np.linalg.eigvalsh(herm).min())


# ---------------------------------------------------------------------------
# constructors for common operators
# ---------------------------------------------------------------------------

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)

_Q2 = HilbertSpace((2,))


def sigma_x() -> ComplexOperator:
    return ComplexOperator(_Q2, _SX)


def sigma_y() -> ComplexOperator:
    return ComplexOperator(_Q2, _SY)


def sigma_z() -> ComplexOperator:
    return ComplexOperator(_Q2, _SZ)


def identity(space: HilbertSpace | int) -> ComplexOperator:
    if isinstance(space, int):
        space = HilbertSpace((space,))
    return ComplexOperator(space, np.eye(space.total_dim))


def destroy(n_levels: int) -> ComplexOperator:
    """Bosonic annihilation operator truncated to ``n_levels`` Fock states."""
    a = np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), k=1)
    return ComplexOperator(HilbertSpace((n_levels,)), a)


def basis_ket(space: HilbertSpace | int, index: int) -> StateVector:
    if isinstance(space, int):
        space = HilbertSpace((space,))
    amps = np.zeros(space.total_dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(space, amps)


def outer(space: HilbertSpace, i: int, j: int) -> ComplexOperator:
    """Matrix unit ``|i⟩⟨j|`` on ``space``."""
    m = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    m[i, j] = 1.0
    return ComplexOperator(space, m)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def tensor(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    """Kronecker product; result space is the concatenation of input dims."""
    space = HilbertSpace(a.space.dims + b.space.dims)  # rejects overflow
    return ComplexOperator(space, np.kron(a.entries, b.entries))


def tensor_state(a: StateVector, b: StateVector) -> StateVector:
    space = HilbertSpace(a.space.dims + b.space.dims)
    return StateVector(space, np.kron(a.amplitudes, b.amplitudes))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    rho : DensityMatrix
        State on an arbitrary tensor-product space.
    keep : iterable of int
        Indices of the subsystems to retain, in their original order.

    Returns
    -------
    DensityMatrix on the space restricted to ``keep``; the trace is
    preserved exactly up to floating point.
    """
    keep = sorted(set(int(k) for k in keep))
    dims = rho.space.dims
    if not keep:
        raise ValueError("keep set must be non-empty")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep indices {keep} out of range for dims {dims}")

    n_sub = len(dims)
    # reshape to (row multi-index, column multi-index) and contract the
    # traced subsystems pairwise
    tensor_form = rho.entries.reshape(dims + dims)
    traced = [i for i in range(n_sub) if i not in keep]
    for offset, idx in enumerate(sorted(traced)):
        ax = idx - offset  # axes shift left after each trace
        n_remaining = tensor_form.ndim // 2
        tensor_form = np.trace(tensor_form, axis1=ax, axis2=ax + n_remaining)
    kept_dims = tuple(dims[i] for i in keep)
    total = int(np.prod(kept_dims))
    out = tensor_form.reshape(total, total)
    return DensityMatrix(HilbertSpace(kept_dims), out)


def expm(a: ComplexOperator) -> ComplexOperator:
    """Matrix exponential (scaling-and-squaring via scipy)."""
    if not np.all(np.isfinite(a.entries)):
        raise ValueError("matrix exponential of non-finite entries")
    return ComplexOperator(a.space, scipy.linalg.expm(a.entries))


def state_fidelity(ideal: StateVector, rho: DensityMatrix) -> float:
    """Fidelity ``⟨ψ_ideal| ρ |ψ_ideal⟩`` of a state against a target ket."""
    if ideal.space.dims != rho.space.dims:
        raise ValueError(
            f"space mismatch: {ideal.space.dims} vs {rho.space.dims}"
        )
    amps = ideal.amplitudes
    val = complex(amps.conj() @ rho.entries @ amps)
    if abs(val.imag) > TOL.imag_residue:
        raise ValueError(f"fidelity has imaginary residue {val.imag:.3e}")
    return float(val.real)
