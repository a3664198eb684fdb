"""Quantum GAN training run."""

from __future__ import annotations

import typing as t

from qgan_lab.qgan.ansatz import resolve_ansatz, resolve_enhancement
from qgan_lab.qgan.gradients import bounded_step, fd_gradient
from qgan_lab.qgan.models import (
    DiscriminatorModel,
    GeneratorModel,
    ObjectiveMode,
    discriminator_objective,
    generate,
    generator_output,
    loss_generator,
    objective_literal,
)
from qgan_lab.quantum.core import HamiltonianSpec, fidelity, measure_probabilities
from qgan_lab.quantum.encoding import encode_distribution
from qgan_lab.trainers.base_trainer import AdversarialTrainer, TrainingResult

if t.TYPE_CHECKING:
    from qgan_lab.config import TrainingConfig
    from qgan_lab.qgan.gradients import Vector
    from qgan_lab.quantum.core import DensityMatrix
    from qgan_lab.quantum.encoding import ProbabilityVector


class QuantumGanTrainer(AdversarialTrainer):
    """Hamiltonian-evolution generator against a Hamiltonian-evolution discriminator.

    In probabilistic mode the discriminator descends the cross-entropy loss
    and the generator descends ``-log D(rho_g)``, both evaluated on the
    configured generator output. In literal mode the discriminator ascends
    the trace objective and the generator descends it. Every update is
    scaled down to at most ``max_step`` in Euclidean norm.
    """

    name = "qgan"

    def __init__(self, config: TrainingConfig, target: ProbabilityVector) -> None:
        """Build both models and draw their initial parameters.

        The generator parameters are drawn before the discriminator's.
        """
        super().__init__(config, target)
        n = config.n_qubits
        self.rho_r = encode_distribution(target)
        gen_paulis = resolve_ansatz(config.generator_ansatz, n)
        disc_paulis = resolve_ansatz(config.discriminator_ansatz, n)
        enhancement = resolve_enhancement(config.enhancement, n)
        theta_g = self.initial_parameters(len(gen_paulis))
        theta_d = self.initial_parameters(len(disc_paulis))
        self.generator = GeneratorModel(
            HamiltonianSpec.from_paulis(
                gen_paulis,
                theta_g,
                enhancement=enhancement,
                lam=config.lambda_g,
                evolution_time=config.evolution_time,
            ),
        )
        self.discriminator = DiscriminatorModel(
            HamiltonianSpec.from_paulis(
                disc_paulis,
                theta_d,
                enhancement=enhancement,
                lam=config.lambda_d,
                evolution_time=config.evolution_time,
            ),
        )

    @property
    def literal(self) -> bool:
        """Whether the game is played on the literal trace objective."""
        return self.config.objective_mode is ObjectiveMode.LITERAL

    def _step(self, learning_rate: float, gradient: Vector) -> Vector:
        return bounded_step(learning_rate * gradient, self.config.max_step)

    def discriminator_step(self) -> None:
        """Move ``theta_D`` uphill on the discriminator's objective."""
        if self.literal:

            def objective(theta: Vector) -> float:
                return objective_literal(
                    self.rho_r,
                    self.generator,
                    self.discriminator.with_theta(theta),
                )

        else:
            rho_g = generator_output(self.generator, self.config.generator_output)

            def objective(theta: Vector) -> float:
                return discriminator_objective(
                    self.rho_r,
                    rho_g,
                    self.discriminator.with_theta(theta),
                )

        theta = self.discriminator.spec.theta
        gradient = fd_gradient(objective, theta, self.config.fd_step)
        step = self._step(self.config.learning_rate_d, gradient)
        self.discriminator = self.discriminator.with_theta(theta + step)

    def generator_step(self) -> None:
        """Move ``theta_G`` downhill on the generator's loss."""
        if self.literal:

            def loss(theta: Vector) -> float:
                return objective_literal(
                    self.rho_r,
                    self.generator.with_theta(theta),
                    self.discriminator,
                )

        else:

            def loss(theta: Vector) -> float:
                return loss_generator(
                    self.generator.with_theta(theta),
                    self.discriminator,
                    self.config.generator_output,
                )

        theta = self.generator.spec.theta
        gradient = fd_gradient(loss, theta, self.config.fd_step)
        step = self._step(self.config.learning_rate_g, gradient)
        self.generator = self.generator.with_theta(theta - step)

    def losses(self) -> tuple[float, float]:
        """Current ``(loss_g, loss_d)``; in literal mode ``(J, -J)``."""
        if self.literal:
            value = objective_literal(self.rho_r, self.generator, self.discriminator)
            return value, -value
        output = self.config.generator_output
        rho_g = generator_output(self.generator, output)
        loss_d = -discriminator_objective(self.rho_r, rho_g, self.discriminator)
        return loss_generator(self.generator, self.discriminator, output), loss_d

    def generated_state(self) -> DensityMatrix:
        """Current ``rho_g``."""
        return generate(self.generator)

    def generated_distribution(self) -> ProbabilityVector:
        """Computational-basis readout of ``rho_g``."""
        return measure_probabilities(self.generated_state())

    def fidelity_to_target(self) -> float:
        """Fidelity of ``rho_g`` to the encoded target ``rho_r``."""
        return fidelity(self.generated_state(), self.rho_r)

    def parameters(self) -> tuple[Vector, Vector]:
        """Current ``(theta_G, theta_D)``."""
        return self.generator.spec.theta, self.discriminator.spec.theta


def train(config: TrainingConfig, target: ProbabilityVector) -> TrainingResult:
    """Train the quantum GAN on ``target``; deterministic given ``config.seed``."""
    return QuantumGanTrainer(config, target).train()
