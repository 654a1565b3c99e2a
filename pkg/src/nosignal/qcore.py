"""Finite-dimensional states, operators, and measurement updates.

The protocol layers of this package never touch raw arrays directly; they
go through the small vocabulary defined here: :class:`StateVector`,
:class:`LinearOperator`, :class:`BranchEnsemble` (a weighted mixture of
pure states, which stands in for a density matrix during non-selective
measurements), and :class:`DensityMatrix` for reduced states.

Conventions used throughout the package:

* values are immutable after construction and all operations are pure
  functions returning new values;
* a single spin-1/2 is encoded as ``|down> -> index 0``, ``|up> -> index 1``,
  so ``sigma_z |up> = +|up>`` reads ``PAULI_Z = diag(-1, +1)``;
* ``apply`` does not normalize;
* measurements are non-selective by default (selection happens at the
  protocol level, never silently in here).

Dense storage is used for dimensions up to ``DENSE_DIM_LIMIT``; factories
that build large operators switch to compressed sparse storage above it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp

# Tolerances shared by every layer of the package.
HERMITICITY_ATOL = 1e-10
RESOLUTION_ATOL = 1e-10
NORMALIZATION_ATOL = 1e-8
IMAG_RESIDUE_ATOL = 1e-10
WEIGHT_SUM_ATOL = 1e-10
BRANCH_PRUNE_THRESHOLD = 1e-14
DENSE_DIM_LIMIT = 4096

Matrix = Union[np.ndarray, sp.csr_array]


def _frozen_vector(amps) -> np.ndarray:
    arr = np.array(amps, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"state amplitudes must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("state must have dimension >= 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError("state amplitudes must be finite")
    arr.setflags(write=False)
    return arr


def _frozen_matrix(matrix) -> Matrix:
    if sp.issparse(matrix):
        mat = sp.csr_array(matrix).astype(np.complex128)
        mat.sum_duplicates()
        for buf in (mat.data, mat.indices, mat.indptr):
            buf.setflags(write=False)
        if not np.all(np.isfinite(mat.data)):
            raise ValueError("operator entries must be finite")
        return mat
    arr = np.array(matrix, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError("operator entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state: complex amplitudes over a fixed basis.

    ``basis_tag`` is an opaque label naming the basis convention; operations
    refuse to mix values whose tags differ.
    """

    amps: np.ndarray
    basis_tag: str

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen_vector(self.amps))

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        """Return the unit-norm version of this state; error on (near-)zero norm."""
        n = self.norm
        if n <= 1e-300:
            raise ValueError("cannot normalize a zero state")
        return StateVector(self.amps / n, self.basis_tag)


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """Square operator over a tagged basis, stored dense or sparse."""

    matrix: Matrix
    basis_tag: str

    def __post_init__(self):
        mat = _frozen_matrix(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be square, got shape {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def to_dense(self) -> np.ndarray:
        if self.is_sparse:
            return self.matrix.toarray()
        return np.array(self.matrix)

    def dagger(self) -> "LinearOperator":
        if self.is_sparse:
            return LinearOperator(self.matrix.conj().T.tocsr(), self.basis_tag)
        return LinearOperator(self.matrix.conj().T, self.basis_tag)

    # -- small operator algebra; binary ops require matching tags ----------

    def _check_compatible(self, other: "LinearOperator"):
        if not isinstance(other, LinearOperator):
            raise TypeError(f"expected LinearOperator, got {type(other).__name__}")
        if other.basis_tag != self.basis_tag:
            raise ValueError(f"basis mismatch: {self.basis_tag!r} vs {other.basis_tag!r}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        self._check_compatible(other)
        return LinearOperator(self.matrix @ other.matrix, self.basis_tag)

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        self._check_compatible(other)
        return LinearOperator(self.matrix + other.matrix, self.basis_tag)

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        self._check_compatible(other)
        return LinearOperator(self.matrix - other.matrix, self.basis_tag)

    def __mul__(self, scalar) -> "LinearOperator":
        return LinearOperator(self.matrix * complex(scalar), self.basis_tag)

    __rmul__ = __mul__

    # -- defect norms used by validation checks ----------------------------

    def frobenius_norm(self) -> float:
        if self.is_sparse:
            return float(sp.linalg.norm(self.matrix))
        return float(np.linalg.norm(self.matrix))

    def hermiticity_defect(self) -> float:
        return (self - self.dagger()).frobenius_norm()

    def unitarity_defect(self) -> float:
        return (self.dagger() @ self - identity(self.dim, self.basis_tag, sparse=self.is_sparse)).frobenius_norm()

    def projector_defect(self) -> float:
        idem = (self @ self - self).frobenius_norm()
        return max(idem, self.hermiticity_defect())


def identity(dim: int, basis_tag: str, sparse: bool | None = None) -> LinearOperator:
    """Identity operator; storage follows ``DENSE_DIM_LIMIT`` unless forced."""
    if sparse is None:
        sparse = dim > DENSE_DIM_LIMIT
    if sparse:
        return LinearOperator(sp.identity(dim, dtype=np.complex128, format="csr"), basis_tag)
    return LinearOperator(np.eye(dim, dtype=np.complex128), basis_tag)


@dataclass(frozen=True, eq=False)
class BranchEnsemble:
    """Weighted mixture of normalized pure states on a common basis.

    This is the package's stand-in for a density matrix during non-selective
    measurement updates: Lueders branching keeps every outcome as a weighted
    branch instead of collapsing or summing to a mixed-state matrix.
    """

    branches: tuple

    def __post_init__(self):
        branches = tuple((float(w), s) for w, s in self.branches)
        if not branches:
            raise ValueError("ensemble must hold at least one branch")
        tag = branches[0][1].basis_tag
        dim = branches[0][1].dim
        total = 0.0
        for w, state in branches:
            if not isinstance(state, StateVector):
                raise TypeError("ensemble branches must hold StateVector values")
            if not np.isfinite(w) or w < 0.0:
                raise ValueError(f"branch weight must be finite and >= 0, got {w}")
            if state.basis_tag != tag or state.dim != dim:
                raise ValueError("ensemble branches must share one basis")
            if abs(state.norm - 1.0) > NORMALIZATION_ATOL:
                raise ValueError(f"branch state not normalized: |norm - 1| = {abs(state.norm - 1.0):.3e}")
            total += w
        if abs(total - 1.0) > WEIGHT_SUM_ATOL:
            raise ValueError(f"branch weights must sum to 1, got {total!r}")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def pure(cls, state: StateVector) -> "BranchEnsemble":
        return cls(((1.0, state),))

    @property
    def branch_count(self) -> int:
        return len(self.branches)

    @property
    def basis_tag(self) -> str:
        return self.branches[0][1].basis_tag

    @property
    def dim(self) -> int:
        return self.branches[0][1].dim


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix (dense)."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        if np.linalg.norm(mat - mat.conj().T) > HERMITICITY_ATOL:
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(mat).real - 1.0) > WEIGHT_SUM_ATOL:
            raise ValueError(f"density matrix trace must be 1, got {np.trace(mat)!r}")
        if np.linalg.eigvalsh(mat).min() < -1e-10:
            raise ValueError("density matrix must be positive semidefinite")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


StateLike = Union[StateVector, BranchEnsemble]


def tensor_product(a, b):
    """Kronecker product of two states or two operators.

    The left factor varies slowest in the combined index, i.e. the joint
    basis index is ``i_a * dim_b + i_b``.  Mixing a state with an operator
    is a kind mismatch and raises ``TypeError``.

    Parameters
    ----------
    a, b : StateVector or LinearOperator
        Factors of matching kind.

    Returns
    -------
    StateVector or LinearOperator
        Product on the combined basis, tagged ``f"{a.basis_tag}*{b.basis_tag}"``.
    """
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amps, b.amps), f"{a.basis_tag}*{b.basis_tag}")
    if isinstance(a, LinearOperator) and isinstance(b, LinearOperator):
        tag = f"{a.basis_tag}*{b.basis_tag}"
        if a.is_sparse or b.is_sparse:
            return LinearOperator(sp.kron(a.matrix, b.matrix, format="csr"), tag)
        return LinearOperator(np.kron(a.matrix, b.matrix), tag)
    raise TypeError(
        f"tensor_product needs two states or two operators, got {type(a).__name__} and {type(b).__name__}"
    )


def apply(op: LinearOperator, x: StateVector) -> StateVector:
    """Apply ``op`` to ``x``.  The result is NOT normalized.

    Measurement weights are read off from the squared norm of results like
    ``apply(projector, x)``, which is why no silent renormalization happens.
    """
    if not isinstance(op, LinearOperator) or not isinstance(x, StateVector):
        raise TypeError("apply expects (LinearOperator, StateVector)")
    if op.basis_tag != x.basis_tag:
        raise ValueError(f"basis mismatch: operator {op.basis_tag!r} vs state {x.basis_tag!r}")
    if op.dim != x.dim:
        raise ValueError(f"dimension mismatch: operator {op.dim} vs state {x.dim}")
    return StateVector(op.matrix @ x.amps, x.basis_tag)


def _check_observable(obs: LinearOperator, dim: int, tag: str):
    if obs.basis_tag != tag:
        raise ValueError(f"basis mismatch: observable {obs.basis_tag!r} vs state {tag!r}")
    if obs.dim != dim:
        raise ValueError(f"dimension mismatch: observable {obs.dim} vs state {dim}")
    defect = obs.hermiticity_defect()
    if defect > HERMITICITY_ATOL:
        raise ValueError(f"observable is not Hermitian: defect {defect:.3e}")


def expectation(obs: LinearOperator, x: StateLike) -> float:
    """Expectation value of a Hermitian observable.

    Parameters
    ----------
    obs : LinearOperator
        Hermitian to within ``HERMITICITY_ATOL`` (checked).
    x : StateVector or BranchEnsemble
        Normalized state, or ensemble (weighted average over branches).

    Returns
    -------
    float
        Real expectation value; the imaginary residue (bounded by the
        hermiticity tolerance) is checked and discarded.
    """
    if isinstance(x, BranchEnsemble):
        _check_observable(obs, x.dim, x.basis_tag)
        value = 0.0 + 0.0j
        for w, state in x.branches:
            value += w * np.vdot(state.amps, obs.matrix @ state.amps)
    elif isinstance(x, StateVector):
        _check_observable(obs, x.dim, x.basis_tag)
        if abs(x.norm - 1.0) > NORMALIZATION_ATOL:
            raise ValueError(f"expectation needs a normalized state, |norm - 1| = {abs(x.norm - 1.0):.3e}")
        value = np.vdot(x.amps, obs.matrix @ x.amps)
    else:
        raise TypeError(f"expectation expects a StateVector or BranchEnsemble, got {type(x).__name__}")
    if abs(value.imag) > IMAG_RESIDUE_ATOL:
        raise ValueError(f"expectation value has imaginary residue {value.imag:.3e}")
    return float(value.real)


def _check_projector_family(projectors: Sequence[LinearOperator]):
    if len(projectors) == 0:
        raise ValueError("luders_measure needs at least one projector")
    tag = projectors[0].basis_tag
    dim = projectors[0].dim
    for p in projectors:
        if p.basis_tag != tag or p.dim != dim:
            raise ValueError("projectors must share one basis")
        if p.hermiticity_defect() > HERMITICITY_ATOL:
            raise ValueError("projectors must be Hermitian")
    for i in range(len(projectors)):
        for j in range(i + 1, len(projectors)):
            cross = (projectors[i] @ projectors[j]).frobenius_norm()
            if cross > RESOLUTION_ATOL:
                raise ValueError(f"projectors {i} and {j} are not orthogonal: |PiPj| = {cross:.3e}")
    total = projectors[0]
    for p in projectors[1:]:
        total = total + p
    defect = (total - identity(dim, tag, sparse=total.is_sparse)).frobenius_norm()
    if defect > RESOLUTION_ATOL:
        raise ValueError(f"projectors do not resolve the identity: defect {defect:.3e}")


def luders_measure(projectors: Sequence[LinearOperator], x: StateLike) -> BranchEnsemble:
    """Non-selective Lueders update for a complete family of projectors.

    Every input branch ``(w, psi)`` spawns one output branch
    ``(w * |P_i psi|^2, P_i psi / |P_i psi|)`` per outcome ``i``; branches
    whose total weight falls at or below ``BRANCH_PRUNE_THRESHOLD`` are
    dropped.  Weights across outputs still sum to 1 (within tolerance).

    Parameters
    ----------
    projectors : sequence of LinearOperator
        Mutually orthogonal projectors summing to the identity, both checked
        to ``RESOLUTION_ATOL``.
    x : StateVector or BranchEnsemble
        Input state (a bare state counts as a single branch of weight 1).

    Returns
    -------
    BranchEnsemble
    """
    _check_projector_family(projectors)
    if isinstance(x, StateVector):
        if abs(x.norm - 1.0) > NORMALIZATION_ATOL:
            raise ValueError(f"luders_measure needs a normalized state, |norm - 1| = {abs(x.norm - 1.0):.3e}")
        x = BranchEnsemble.pure(x.normalized())
    if not isinstance(x, BranchEnsemble):
        raise TypeError(f"luders_measure expects a StateVector or BranchEnsemble, got {type(x).__name__}")
    if projectors[0].basis_tag != x.basis_tag or projectors[0].dim != x.dim:
        raise ValueError("projectors and state live on different bases")
    out = []
    for w, state in x.branches:
        # Outcome probabilities are taken relative to the branch norm so the
        # output weights keep summing to 1 even after ~1e-15 rounding drift.
        base = float(np.vdot(state.amps, state.amps).real)
        for p in projectors:
            arm = p.matrix @ state.amps
            prob = float(np.vdot(arm, arm).real) / base
            weight = w * prob
            if weight > BRANCH_PRUNE_THRESHOLD:
                out.append((weight, StateVector(arm / np.linalg.norm(arm), x.basis_tag)))
    return BranchEnsemble(tuple(out))


def reduced_density(x: StateLike, keep, dims: Sequence[int]) -> DensityMatrix:
    """Partial trace onto the kept tensor factors.

    Parameters
    ----------
    x : StateVector or BranchEnsemble
        State on a tensor-product space whose factor dimensions are ``dims``
        (slowest factor first, matching :func:`tensor_product` ordering).
    keep : int or sequence of int
        Indices into ``dims`` of the factors to keep, in ascending order.
    dims : sequence of int
        Dimensions of all tensor factors; their product must equal ``x.dim``.

    Returns
    -------
    DensityMatrix
        Reduced state on the kept factors.
    """
    dims = [int(d) for d in dims]
    if isinstance(keep, (int, np.integer)):
        keep = [int(keep)]
    else:
        keep = [int(k) for k in keep]
    if any(d < 1 for d in dims):
        raise ValueError("factor dimensions must be >= 1")
    if sorted(set(keep)) != keep or not keep:
        raise ValueError("keep must list distinct factor indices in ascending order")
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices out of range for {len(dims)} factors")
    total = int(np.prod(dims))
    if isinstance(x, StateVector):
        x = BranchEnsemble.pure(x)
    if not isinstance(x, BranchEnsemble):
        raise TypeError(f"reduced_density expects a StateVector or BranchEnsemble, got {type(x).__name__}")
    if total != x.dim:
        raise ValueError(f"product of dims {total} does not match state dimension {x.dim}")
    drop = [i for i in range(len(dims)) if i not in keep]
    dim_keep = int(np.prod([dims[i] for i in keep]))
    rho = np.zeros((dim_keep, dim_keep), dtype=np.complex128)
    for w, state in x.branches:
        tensor = state.amps.reshape(dims)
        mat = np.transpose(tensor, keep + drop).reshape(dim_keep, -1)
        rho += w * (mat @ mat.conj().T)
    return DensityMatrix(rho)


# Single spin-1/2 constants in the (down, up) ordering of this package.
SPIN_TAG = "spin"
PAULI_X = LinearOperator(np.array([[0, 1], [1, 0]], dtype=np.complex128), SPIN_TAG)
PAULI_Y = LinearOperator(np.array([[0, 1j], [-1j, 0]], dtype=np.complex128), SPIN_TAG)
PAULI_Z = LinearOperator(np.array([[-1, 0], [0, 1]], dtype=np.complex128), SPIN_TAG)
SPIN_IDENTITY = identity(2, SPIN_TAG)
