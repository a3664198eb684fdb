"""Dense complex linear algebra and quantum-state primitives.

Qubit 0 is the leftmost tensor factor everywhere in this package, so the
basis index of a bit string ``b0 b1 ... b(n-1)`` is ``int("b0b1...", 2)``.
"""

from __future__ import annotations

import typing as t
from dataclasses import dataclass, field, replace
from functools import lru_cache, reduce

import numpy as np
import numpy.typing as npt

from qgan_lab.exceptions import ContractError, DimensionError, NumericError, SpecError

if t.TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from qgan_lab.quantum.encoding import ProbabilityVector

ComplexMatrix = npt.NDArray[np.complex128]

MAX_QUBITS = 10

# Construction-time invariants, derived-quantity checks, oracle comparisons.
CONSTRUCTION_TOL = 1e-10
DERIVED_TOL = 1e-9
ORACLE_TOL = 1e-8
HAMILTONIAN_TOL = 1e-12

_SINGLE_QUBIT = {
    "I": np.array([[1, 0], [0, 1]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def check_qubits(n_qubits: int) -> int:
    """Return ``n_qubits`` if it is within the desk-scale range.

    Raises:
        DimensionError: If ``n_qubits`` is outside ``1..MAX_QUBITS``.
    """
    if not 1 <= n_qubits <= MAX_QUBITS:
        msg = f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}"
        raise DimensionError(msg)
    return n_qubits


def as_complex_matrix(values: npt.ArrayLike) -> ComplexMatrix:
    """Validate and freeze a square, finite complex matrix.

    Args:
        values: Anything numpy can turn into a 2-D array.

    Returns:
        A read-only ``complex128`` copy.

    Raises:
        DimensionError: If the array is not square or is empty.
        NumericError: If any entry is NaN or infinite.
    """
    matrix = np.array(values, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:  # noqa: PLR2004
        msg = f"expected a non-empty square matrix, got shape {matrix.shape}"
        raise DimensionError(msg)
    if not np.all(np.isfinite(matrix)):
        msg = "matrix has non-finite entries"
        raise NumericError(msg)
    matrix.setflags(write=False)
    return matrix


def hermitian_defect(matrix: ComplexMatrix) -> float:
    """Largest entrywise deviation ``max |A - A^dagger|``."""
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def unitary_defect(matrix: ComplexMatrix) -> float:
    """Largest entrywise deviation ``max |U^dagger U - I|``."""
    identity = np.eye(matrix.shape[0], dtype=np.complex128)
    return float(np.max(np.abs(matrix.conj().T @ matrix - identity)))


def _require_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        msg = f"dimension mismatch: {a.shape} vs {b.shape}"
        raise DimensionError(msg)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite state.

    Attributes:
        matrix: The read-only ``2^n x 2^n`` complex matrix.
    """

    matrix: ComplexMatrix = field(repr=False)

    def __post_init__(self) -> None:
        """Freeze the matrix and check the state invariants."""
        matrix = as_complex_matrix(self.matrix)
        dim = matrix.shape[0]
        if dim & (dim - 1):
            msg = f"density matrix dimension {dim} is not a power of two"
            raise DimensionError(msg)
        if hermitian_defect(matrix) >= CONSTRUCTION_TOL:
            msg = "density matrix is not Hermitian"
            raise ContractError(msg)
        trace = np.trace(matrix)
        if abs(trace - 1) >= CONSTRUCTION_TOL:
            msg = f"density matrix trace is {trace.real:.12g}, expected 1"
            raise ContractError(msg)
        min_eig = float(np.linalg.eigvalsh(matrix)[0])
        if min_eig < -CONSTRUCTION_TOL:
            msg = f"density matrix has negative eigenvalue {min_eig:.3e}"
            raise ContractError(msg)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension ``2^n``."""
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        """Number of qubits the state lives on."""
        return self.dim.bit_length() - 1

    def eigenvalues(self) -> npt.NDArray[np.float64]:
        """Ascending spectrum of the state."""
        return np.linalg.eigvalsh(self.matrix)


def basis_state(index: int, n_qubits: int) -> DensityMatrix:
    """Return the computational basis projector ``|index><index|``."""
    dim = 2 ** check_qubits(n_qubits)
    if not 0 <= index < dim:
        msg = f"basis index {index} out of range for {n_qubits} qubits"
        raise DimensionError(msg)
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    matrix[index, index] = 1.0
    return DensityMatrix(matrix)


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    """Return ``I / 2^n``."""
    dim = 2 ** check_qubits(n_qubits)
    return DensityMatrix(np.eye(dim, dtype=np.complex128) / dim)


def purity(rho: DensityMatrix) -> float:
    """Return ``Tr(rho^2)``."""
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, qubit 0 first.

    Attributes:
        ops: Label over ``IXYZ``, one character per qubit, e.g. ``"XZ"``.
    """

    ops: str

    def __post_init__(self) -> None:
        """Normalize the label and reject unknown characters."""
        ops = self.ops.upper()
        if not ops or set(ops) - set(_SINGLE_QUBIT):
            msg = f"invalid Pauli label '{self.ops}'"
            raise SpecError(msg)
        object.__setattr__(self, "ops", ops)

    @property
    def n_qubits(self) -> int:
        """Number of qubits the string acts on."""
        return len(self.ops)

    @classmethod
    def on_qubits(cls, n_qubits: int, paulis: dict[int, str]) -> PauliString:
        """Build a string that is identity except on the given qubits.

        Args:
            n_qubits: Total number of qubits.
            paulis: Mapping of qubit index to ``"X"``, ``"Y"`` or ``"Z"``.

        Returns:
            The Pauli string.
        """
        return cls("".join(paulis.get(q, "I") for q in range(n_qubits)))

    def __str__(self) -> str:
        return self.ops


@lru_cache(maxsize=512)
def _pauli_matrix_cached(ops: str) -> ComplexMatrix:
    matrix = reduce(np.kron, (_SINGLE_QUBIT[op] for op in ops))
    matrix = np.ascontiguousarray(matrix, dtype=np.complex128)
    matrix.setflags(write=False)
    return matrix


def pauli_matrix(s: PauliString) -> ComplexMatrix:
    """Return the ``2^n x 2^n`` matrix of a Pauli string.

    Raises:
        DimensionError: If the string is longer than ``MAX_QUBITS``.
    """
    check_qubits(s.n_qubits)
    return _pauli_matrix_cached(s.ops)


Term = tuple[float, PauliString]


@dataclass(frozen=True)
class HamiltonianSpec:
    """Trainable Pauli-string Hamiltonian plus a fixed enhancement term.

    The assembled operator is ``sum_k theta_k P_k + lam * sum_j c_j Q_j``.

    Attributes:
        n_qubits: Number of qubits every term acts on.
        base_terms: ``(theta_k, P_k)`` pairs; the thetas are trainable.
        enhancement_terms: ``(c_j, Q_j)`` pairs forming the fixed term ``V``.
        lam: Weight of the enhancement term, ``>= 0``.
        evolution_time: Time ``t`` in ``exp(-i H t)``.
    """

    n_qubits: int
    base_terms: tuple[Term, ...]
    enhancement_terms: tuple[Term, ...] = ()
    lam: float = 0.0
    evolution_time: float = 1.0

    def __post_init__(self) -> None:
        """Coerce term lists to tuples and check qubit counts."""
        check_qubits(self.n_qubits)
        object.__setattr__(self, "base_terms", _as_terms(self.base_terms))
        object.__setattr__(self, "enhancement_terms", _as_terms(self.enhancement_terms))
        for _, pauli in (*self.base_terms, *self.enhancement_terms):
            if pauli.n_qubits != self.n_qubits:
                msg = (
                    f"term '{pauli}' acts on {pauli.n_qubits} qubits, "
                    f"spec declares {self.n_qubits}"
                )
                raise SpecError(msg)
        if self.lam < 0:
            msg = f"lambda must be >= 0, got {self.lam}"
            raise SpecError(msg)

    @classmethod
    def from_paulis(
        cls,
        paulis: Sequence[PauliString],
        theta: npt.ArrayLike | None = None,
        *,
        enhancement: Sequence[PauliString] = (),
        lam: float = 0.0,
        evolution_time: float = 1.0,
    ) -> HamiltonianSpec:
        """Build a spec from an ansatz and a coefficient vector.

        Enhancement terms all get coefficient 1.0. ``theta`` defaults to zeros.
        """
        if not paulis:
            msg = "an ansatz needs at least one Pauli term"
            raise SpecError(msg)
        coeffs = np.zeros(len(paulis)) if theta is None else np.asarray(theta, dtype=float)
        if coeffs.shape != (len(paulis),):
            msg = f"expected {len(paulis)} coefficients, got shape {coeffs.shape}"
            raise SpecError(msg)
        return cls(
            n_qubits=paulis[0].n_qubits,
            base_terms=tuple(zip(coeffs.tolist(), paulis)),
            enhancement_terms=tuple((1.0, q) for q in enhancement),
            lam=lam,
            evolution_time=evolution_time,
        )

    @property
    def theta(self) -> npt.NDArray[np.float64]:
        """Trainable coefficient vector."""
        return np.array([c for c, _ in self.base_terms], dtype=float)

    @property
    def paulis(self) -> tuple[PauliString, ...]:
        """Pauli strings of the trainable terms, in coefficient order."""
        return tuple(p for _, p in self.base_terms)

    def with_theta(self, theta: npt.ArrayLike) -> HamiltonianSpec:
        """Return a copy with new trainable coefficients."""
        coeffs = np.asarray(theta, dtype=float)
        if coeffs.shape != (len(self.base_terms),):
            msg = f"expected {len(self.base_terms)} coefficients, got shape {coeffs.shape}"
            raise SpecError(msg)
        return replace(self, base_terms=tuple(zip(coeffs.tolist(), self.paulis)))


def _as_terms(terms: Iterable[tuple[float, PauliString | str]]) -> tuple[Term, ...]:
    out = []
    for coeff, pauli in terms:
        term = pauli if isinstance(pauli, PauliString) else PauliString(pauli)
        out.append((float(coeff), term))
    return tuple(out)


def _weighted_sum(terms: tuple[Term, ...], dim: int) -> ComplexMatrix:
    total = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, pauli in terms:
        if not np.isfinite(coeff):
            msg = f"non-finite coefficient on term '{pauli}'"
            raise NumericError(msg)
        total += coeff * pauli_matrix(pauli)
    return total


def assemble_hamiltonian(spec: HamiltonianSpec) -> ComplexMatrix:
    """Return ``H + lam * V`` as a dense Hermitian matrix.

    With ``lam == 0`` the enhancement terms are never touched, so the result
    is bit-for-bit the base Hamiltonian.

    Raises:
        NumericError: If any coefficient is not finite.
        ContractError: If the assembled matrix is not Hermitian.
    """
    dim = 2**spec.n_qubits
    matrix = _weighted_sum(spec.base_terms, dim)
    if spec.lam != 0 and spec.enhancement_terms:
        matrix += spec.lam * _weighted_sum(spec.enhancement_terms, dim)
    if hermitian_defect(matrix) >= HAMILTONIAN_TOL:
        msg = "assembled Hamiltonian is not Hermitian"
        raise ContractError(msg)
    matrix.setflags(write=False)
    return matrix


def hermitian_eigh(matrix: ComplexMatrix) -> tuple[npt.NDArray[np.float64], ComplexMatrix]:
    """Eigendecomposition of a Hermitian matrix.

    Raises:
        ContractError: If ``matrix`` is not Hermitian within 1e-10.
        NumericError: If the eigensolver does not converge.
    """
    if hermitian_defect(matrix) >= CONSTRUCTION_TOL:
        msg = f"matrix is not Hermitian (defect {hermitian_defect(matrix):.3e})"
        raise ContractError(msg)
    try:
        return np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        msg = f"Hermitian eigensolver failed: {exc}"
        raise NumericError(msg) from exc


def evolve_unitary(h: ComplexMatrix, t: float) -> ComplexMatrix:
    """Return ``exp(-i H t)`` through ``H = V diag(w) V^dagger``.

    Args:
        h: Hermitian generator.
        t: Evolution time.

    Returns:
        The unitary, read-only.
    """
    h = as_complex_matrix(h)
    eigvals, eigvecs = hermitian_eigh(h)
    if t == 0:
        unitary = np.eye(h.shape[0], dtype=np.complex128)
    else:
        unitary = (eigvecs * np.exp(-1j * eigvals * t)) @ eigvecs.conj().T
    unitary.setflags(write=False)
    return unitary


def conjugate(u: ComplexMatrix, rho: DensityMatrix) -> DensityMatrix:
    """Return the evolved state ``U rho U^dagger``.

    Raises:
        DimensionError: If ``U`` and ``rho`` differ in dimension.
        ContractError: If ``U`` is not unitary within 1e-10.
    """
    _require_same_dim(u, rho.matrix)
    if unitary_defect(u) >= CONSTRUCTION_TOL:
        msg = "evolution operator is not unitary"
        raise ContractError(msg)
    evolved = u @ rho.matrix @ u.conj().T
    return DensityMatrix((evolved + evolved.conj().T) / 2)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Return ``1/2 sum |eig(rho - sigma)|``, clipped to ``[0, 1]``."""
    _require_same_dim(rho.matrix, sigma.matrix)
    eigvals = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(np.clip(0.5 * np.sum(np.abs(eigvals)), 0.0, 1.0))


def _psd_sqrt(matrix: ComplexMatrix) -> ComplexMatrix:
    eigvals, eigvecs = hermitian_eigh(matrix)
    if eigvals[0] < -DERIVED_TOL:
        msg = f"negative eigenvalue {eigvals[0]:.3e} in a positive operator"
        raise NumericError(msg)
    return (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Return the Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``.

    Raises:
        DimensionError: On mismatched dimensions.
        NumericError: If an intermediate operator has an eigenvalue below
            ``-1e-9``.
    """
    _require_same_dim(rho.matrix, sigma.matrix)
    root = _psd_sqrt(rho.matrix)
    inner = root @ sigma.matrix @ root
    inner = (inner + inner.conj().T) / 2
    eigvals = np.linalg.eigvalsh(inner)
    if eigvals[0] < -DERIVED_TOL:
        msg = f"negative eigenvalue {eigvals[0]:.3e} in fidelity"
        raise NumericError(msg)
    value = np.sum(np.sqrt(np.clip(eigvals, 0.0, None))) ** 2
    return float(np.clip(value, 0.0, 1.0))


def measure_probabilities(rho: DensityMatrix) -> ProbabilityVector:
    """Computational-basis readout of a state.

    Raises:
        NumericError: If the diagonal sums further than 1e-9 from one.
    """
    from qgan_lab.quantum.encoding import ProbabilityVector  # noqa: PLC0415

    probs = np.clip(np.real(np.diag(rho.matrix)), 0.0, None)
    total = float(np.sum(probs))
    if abs(total - 1) > DERIVED_TOL:
        msg = f"measurement probabilities sum to {total:.12g}"
        raise NumericError(msg)
    return ProbabilityVector(probs / total)


def dephase(rho: DensityMatrix) -> DensityMatrix:
    """Computational-basis measurement channel: drop every off-diagonal entry.

    The result is the state ``sum_i p_i |i><i|`` of the measured outcomes,
    the same form ``encode_distribution`` gives a target distribution.
    """
    diagonal = np.real(np.diag(rho.matrix))
    return DensityMatrix(np.diag(diagonal).astype(np.complex128))
