"""Dense complex linear algebra over small tensor-product state spaces.

Subsystems are named (``"A"``, ``"B"``, ...) and ordered. Joint basis
indices run with the last subsystem varying fastest, so for two qubits
the order is ``(11, 12, 21, 22)`` in path labels, i.e. index
``a * dim_B + b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

ALGEBRA_TOL = 1e-12
EIGEN_TOL = 1e-10


class LabelError(ValueError):
    """Subsystem labels are duplicated or unknown."""


class ShapeError(ValueError):
    """Dimensions of operands do not fit together."""


class NormalizationError(ValueError):
    """A state or distribution is not normalized."""


def _as_complex_array(data, ndim: int) -> np.ndarray:
    arr = np.array(data, dtype=np.complex128)
    if arr.ndim != ndim:
        raise ShapeError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite entries are not allowed")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateVector:
    labels: tuple[str, ...]
    dims: tuple[int, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        dims = tuple(int(d) for d in self.dims)
        if len(labels) != len(dims):
            raise ShapeError("one dimension per subsystem label is required")
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate subsystem labels in {labels}")
        if any(d < 1 for d in dims):
            raise ShapeError(f"dimensions must be positive, got {dims}")
        amps = _as_complex_array(self.amplitudes, 1)
        if amps.size != prod(dims):
            raise ShapeError(f"{amps.size} amplitudes for dims {dims}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > ALGEBRA_TOL:
            raise NormalizationError(f"squared norm is {norm2!r}, expected 1")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, labels, dims, amplitudes, normalize=False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise NormalizationError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(tuple(labels), tuple(dims), amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelError(f"unknown subsystem {label!r}; have {self.labels}") from None

    def amplitude(self, *indices: int) -> complex:
        """Amplitude at a joint basis index given one 0-based index per subsystem."""
        return complex(self.amplitudes[np.ravel_multi_index(indices, self.dims)])

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.labels, self.dims)


def basis_state(label: str, index: int, dim: int = 2) -> StateVector:
    """Computational basis state ``|index>`` (0-based) of a single subsystem."""
    if not 0 <= index < dim:
        raise ShapeError(f"index {index} out of range for dimension {dim}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector((label,), (dim,), amps)


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray = field(repr=False)
    labels: tuple[str, ...] = ()
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        rho = _as_complex_array(self.entries, 2)
        n = rho.shape[0]
        if rho.shape != (n, n) or n < 1:
            raise ShapeError(f"density matrix must be square, got {rho.shape}")
        labels = tuple(self.labels) or ("S",)
        dims = tuple(int(d) for d in self.dims) or (n,)
        if len(labels) != len(dims) or prod(dims) != n:
            raise ShapeError(f"subsystem dims {dims} do not match size {n}")
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate subsystem labels in {labels}")
        if np.max(np.abs(rho - rho.conj().T)) > ALGEBRA_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1.0) > ALGEBRA_TOL:
            raise NormalizationError(f"trace is {tr!r}, expected 1")
        if np.min(np.linalg.eigvalsh(rho)) < -EIGEN_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class UnitaryOperator:
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        u = _as_complex_array(self.entries, 2)
        n = u.shape[0]
        if u.shape != (n, n):
            raise ShapeError(f"operator must be square, got {u.shape}")
        if np.max(np.abs(u.conj().T @ u - np.eye(n))) > ALGEBRA_TOL:
            raise ValueError("operator is not unitary")
        object.__setattr__(self, "entries", u)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "UnitaryOperator") -> "UnitaryOperator":
        return UnitaryOperator(self.entries @ other.entries)


def tensor(v: StateVector, w: StateVector) -> StateVector:
    if set(v.labels) & set(w.labels):
        raise LabelError(f"subsystems {v.labels} and {w.labels} overlap")
    return StateVector(v.labels + w.labels, v.dims + w.dims, np.kron(v.amplitudes, w.amplitudes))


def _target_axes(labels: tuple[str, ...], targets: Sequence[str]) -> list[int]:
    if isinstance(targets, str):
        targets = [targets]
    if len(set(targets)) != len(targets):
        raise LabelError(f"duplicate targets {targets}")
    axes = []
    for t in targets:
        if t not in labels:
            raise LabelError(f"unknown subsystem {t!r}; have {labels}")
        axes.append(labels.index(t))
    return axes


def apply_unitary(u: UnitaryOperator, v: StateVector, targets: Sequence[str] | str) -> StateVector:
    """Apply ``u`` to the listed subsystems of ``v`` (in the listed order), identity elsewhere."""
    axes = _target_axes(v.labels, targets)
    target_dim = prod(v.dims[a] for a in axes)
    if u.dim != target_dim:
        raise ShapeError(f"operator of dim {u.dim} on subsystems of total dim {target_dim}")
    psi = v.amplitudes.reshape(v.dims)
    psi = np.moveaxis(psi, axes, range(len(axes)))
    psi = (u.entries @ psi.reshape(target_dim, -1)).reshape(psi.shape)
    psi = np.moveaxis(psi, range(len(axes)), axes)
    return StateVector(v.labels, v.dims, psi.reshape(-1))


def partial_trace(state: DensityMatrix | StateVector, keep: str | Sequence[str]) -> DensityMatrix:
    """Reduced density matrix of the subsystems in ``keep``, tracing out all others."""
    if isinstance(state, StateVector):
        labels, dims = state.labels, state.dims
        psi = state.amplitudes.reshape(dims)
        kept = _target_axes(labels, keep)
        traced = [i for i in range(len(dims)) if i not in kept]
        psi = np.transpose(psi, kept + traced)
        kd = prod(dims[i] for i in kept)
        m = psi.reshape(kd, -1)
        rho = m @ m.conj().T
    else:
        labels, dims = state.labels, state.dims
        kept = _target_axes(labels, keep)
        traced = [i for i in range(len(dims)) if i not in kept]
        n = len(dims)
        t = state.entries.reshape(dims + dims)
        t = np.transpose(t, kept + traced + [n + i for i in kept] + [n + i for i in traced])
        kd = prod(dims[i] for i in kept)
        td = prod(dims[i] for i in traced)
        rho = np.einsum("atbt->ab", t.reshape(kd, td, kd, td))
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(
        rho / np.trace(rho).real,
        tuple(labels[i] for i in kept),
        tuple(dims[i] for i in kept),
    )


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2): 1 for a pure state, 1/dim for the maximally mixed one."""
    return float(np.real(np.trace(rho.entries @ rho.entries)))


def l1_coherence(rho: DensityMatrix) -> float:
    """Sum of off-diagonal magnitudes in the computational basis."""
    mags = np.abs(rho.entries)
    return float(mags.sum() - np.trace(mags))


def born_probabilities(v: StateVector | Sequence[complex]) -> np.ndarray:
    """Outcome probabilities ``|amplitude|^2`` over the joint basis."""
    amps = v.amplitudes if isinstance(v, StateVector) else np.asarray(v, dtype=np.complex128)
    p = np.abs(amps) ** 2
    total = p.sum()
    if abs(total - 1.0) > ALGEBRA_TOL:
        raise NormalizationError(f"probabilities sum to {total!r}")
    return p
