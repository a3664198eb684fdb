"""Quantum generator and discriminator, and the objectives of their game.

The generator evolves ``rho_0`` under ``exp(-i (H_G + lam V_G) t)``. The
discriminator evolves a state under its own Hamiltonian and reads out the
projector ``|0><0|`` on qubit 0; that expectation is the probability ``D``
that the state is real. By default the discriminator is shown the measured
generator output rather than the coherent state; see ``GeneratorOutput``.
"""

from __future__ import annotations

import math
import typing as t
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import product

import numpy as np
import numpy.typing as npt

from qgan_lab.exceptions import ContractError, DimensionError, NumericError, SpecError
from qgan_lab.qgan.gradients import fd_gradient
from qgan_lab.quantum.core import (
    ComplexMatrix,
    DensityMatrix,
    HamiltonianSpec,
    as_complex_matrix,
    assemble_hamiltonian,
    basis_state,
    conjugate,
    dephase,
    evolve_unitary,
    hermitian_defect,
)

if t.TYPE_CHECKING:
    from qgan_lab.qgan.gradients import Vector

# Scores are clamped to [SCORE_FLOOR, 1 - SCORE_FLOOR] before any log.
SCORE_FLOOR = 1e-9
PROJECTOR_TOL = 1e-12
GRID_TIE_TOL = 1e-12
MIN_GRID_STEPS = 11
MAX_GRID_PARAMETERS = 2


class ObjectiveMode(str, Enum):
    """Which objective the adversarial game is played on."""

    PROBABILISTIC = "probabilistic"
    LITERAL = "literal"


class GeneratorOutput(str, Enum):
    """What the discriminator is shown of the generated state.

    ``SAMPLES`` is the measured output, the diagonal state of the
    computational-basis outcome distribution, in the same form as the encoded
    target. ``STATE`` is the coherent generated state itself.
    """

    SAMPLES = "samples"
    STATE = "state"


def _unitary(spec: HamiltonianSpec) -> ComplexMatrix:
    return evolve_unitary(assemble_hamiltonian(spec), spec.evolution_time)


@dataclass(frozen=True)
class GeneratorModel:
    """Hamiltonian-evolution generator.

    Attributes:
        spec: Generator Hamiltonian; the base coefficients are trainable.
        initial_state: State the evolution starts from, ``|0...0>`` by default.
    """

    spec: HamiltonianSpec
    initial_state: DensityMatrix | None = None

    def __post_init__(self) -> None:
        """Default ``rho_0`` and check it matches the Hamiltonian."""
        if self.initial_state is None:
            object.__setattr__(self, "initial_state", basis_state(0, self.spec.n_qubits))
        elif self.initial_state.n_qubits != self.spec.n_qubits:
            msg = "initial state and generator Hamiltonian differ in qubit count"
            raise DimensionError(msg)

    def unitary(self) -> ComplexMatrix:
        """Return ``U_G``."""
        return _unitary(self.spec)

    def with_theta(self, theta: npt.ArrayLike) -> GeneratorModel:
        """Return a copy with new trainable coefficients."""
        return replace(self, spec=self.spec.with_theta(theta))


def readout_projector(n_qubits: int) -> ComplexMatrix:
    """``|0><0|`` on qubit 0 tensored with identity on the rest."""
    half = 2 ** (n_qubits - 1)
    projector = np.kron(np.diag([1.0, 0.0]), np.eye(half)).astype(np.complex128)
    return as_complex_matrix(projector)


@dataclass(frozen=True)
class DiscriminatorModel:
    """Hamiltonian-evolution discriminator with a projective readout.

    Attributes:
        spec: Discriminator Hamiltonian; the base coefficients are trainable.
        readout: Projector whose expectation is the "real" score.
    """

    spec: HamiltonianSpec
    readout: ComplexMatrix | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        """Default the readout and check it is a projector of the right size."""
        if self.readout is None:
            object.__setattr__(self, "readout", readout_projector(self.spec.n_qubits))
            return
        projector = as_complex_matrix(self.readout)
        if projector.shape[0] != 2**self.spec.n_qubits:
            msg = "readout projector and discriminator Hamiltonian differ in dimension"
            raise DimensionError(msg)
        idempotent = float(np.max(np.abs(projector @ projector - projector)))
        if idempotent >= PROJECTOR_TOL or hermitian_defect(projector) >= PROJECTOR_TOL:
            msg = "readout operator is not an orthogonal projector"
            raise ContractError(msg)
        object.__setattr__(self, "readout", projector)

    def unitary(self) -> ComplexMatrix:
        """Return ``U_D``."""
        return _unitary(self.spec)

    def with_theta(self, theta: npt.ArrayLike) -> DiscriminatorModel:
        """Return a copy with new trainable coefficients."""
        return replace(self, spec=self.spec.with_theta(theta))


def generate(g: GeneratorModel) -> DensityMatrix:
    """Return the generated state ``U_G rho_0 U_G^dagger``."""
    return conjugate(g.unitary(), g.initial_state)


def generator_output(
    g: GeneratorModel,
    output: GeneratorOutput = GeneratorOutput.STATE,
) -> DensityMatrix:
    """Return what the discriminator is shown of ``generate(g)``."""
    rho_g = generate(g)
    if GeneratorOutput(output) is GeneratorOutput.SAMPLES:
        return dephase(rho_g)
    return rho_g


def _score(readout: ComplexMatrix, u_d: ComplexMatrix, rho: DensityMatrix) -> float:
    if rho.matrix.shape != u_d.shape:
        msg = f"state dimension {rho.dim} does not match discriminator {u_d.shape[0]}"
        raise DimensionError(msg)
    evolved = u_d @ rho.matrix @ u_d.conj().T
    value = float(np.real(np.trace(readout @ evolved)))
    if not -PROJECTOR_TOL <= value <= 1 + PROJECTOR_TOL:
        msg = f"discriminator score {value!r} outside [0, 1]"
        raise NumericError(msg)
    return min(max(value, 0.0), 1.0)


def discriminate(d: DiscriminatorModel, rho: DensityMatrix) -> float:
    """Return ``D(rho) = Tr(M U_D rho U_D^dagger)`` in ``[0, 1]``."""
    return _score(d.readout, d.unitary(), rho)


def _log_score(score: float) -> float:
    return math.log(min(max(score, SCORE_FLOOR), 1 - SCORE_FLOOR))


def _log_complement(score: float) -> float:
    return math.log(1 - min(max(score, SCORE_FLOOR), 1 - SCORE_FLOOR))


def discriminator_objective(
    rho_r: DensityMatrix,
    rho_g: DensityMatrix,
    d: DiscriminatorModel,
) -> float:
    """``log D(rho_r) + log(1 - D(rho_g))``, the quantity the discriminator maximizes."""
    u_d = d.unitary()
    return _log_score(_score(d.readout, u_d, rho_r)) + _log_complement(
        _score(d.readout, u_d, rho_g),
    )


def loss_discriminator(
    rho_r: DensityMatrix,
    g: GeneratorModel,
    d: DiscriminatorModel,
    output: GeneratorOutput = GeneratorOutput.STATE,
) -> float:
    """Cross-entropy loss ``-[log D(rho_r) + log(1 - D(rho_g))]``."""
    return -discriminator_objective(rho_r, generator_output(g, output), d)


def loss_generator(
    g: GeneratorModel,
    d: DiscriminatorModel,
    output: GeneratorOutput = GeneratorOutput.STATE,
) -> float:
    """Non-saturating generator loss ``-log D(rho_g)``."""
    return -_log_score(discriminate(d, generator_output(g, output)))


def objective_literal(rho_r: DensityMatrix, g: GeneratorModel, d: DiscriminatorModel) -> float:
    """``Re Tr(rho_r U_D) + Re Tr(rho_g U_G U_D)`` with ``rho_g = generate(g)``.

    ``U_G`` is applied once more to the already generated state, exactly as
    the trace expression reads.
    """
    u_g = g.unitary()
    u_d = d.unitary()
    if rho_r.matrix.shape != u_d.shape or u_g.shape != u_d.shape:
        msg = "objective operands differ in dimension"
        raise DimensionError(msg)
    rho_g = conjugate(u_g, g.initial_state)
    real_term = np.trace(rho_r.matrix @ u_d)
    generated_term = np.trace(rho_g.matrix @ u_g @ u_d)
    return float(np.real(real_term) + np.real(generated_term))


def grid_search_discriminator(
    rho_r: DensityMatrix,
    rho_g: DensityMatrix,
    d: DiscriminatorModel,
    grid_steps: int = 101,
) -> tuple[Vector, float]:
    """Exhaustively maximize the discriminator objective over ``[-pi, pi]^k``.

    Points are scanned in row-major order and a later point only replaces
    the incumbent if it is better by more than ``GRID_TIE_TOL``.

    Args:
        rho_r: Real state.
        rho_g: Frozen generated state.
        d: Discriminator whose ansatz (at most two parameters) is searched.
        grid_steps: Points per axis, at least 11.

    Returns:
        The best parameter vector and its objective value.

    Raises:
        SpecError: If the ansatz has more than two parameters.
        ContractError: If ``grid_steps`` is below 11.
    """
    k = len(d.spec.base_terms)
    if k > MAX_GRID_PARAMETERS:
        msg = f"grid search supports at most {MAX_GRID_PARAMETERS} parameters, got {k}"
        raise SpecError(msg)
    if grid_steps < MIN_GRID_STEPS:
        msg = f"grid_steps must be >= {MIN_GRID_STEPS}, got {grid_steps}"
        raise ContractError(msg)
    axis = np.linspace(-np.pi, np.pi, grid_steps)
    best_theta = np.full(k, -np.pi)
    best_value = -math.inf
    for point in product(axis, repeat=k):
        theta = np.array(point)
        value = discriminator_objective(rho_r, rho_g, d.with_theta(theta))
        if value > best_value + GRID_TIE_TOL:
            best_theta, best_value = theta, value
    return best_theta, best_value


def train_discriminator(
    rho_r: DensityMatrix,
    rho_g: DensityMatrix,
    d: DiscriminatorModel,
    *,
    learning_rate: float = 0.05,
    steps: int = 1000,
    fd_step: float = 1e-4,
) -> DiscriminatorModel:
    """Gradient ascent on the discriminator objective against a frozen ``rho_g``.

    Returns:
        The discriminator at its final parameters.
    """

    def objective(theta: Vector) -> float:
        return discriminator_objective(rho_r, rho_g, d.with_theta(theta))

    theta = d.spec.theta
    for _ in range(steps):
        theta = theta + learning_rate * fd_gradient(objective, theta, fd_step)
    return d.with_theta(theta)
