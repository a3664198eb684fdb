"""Classical GAN training run."""

from __future__ import annotations

import typing as t

import numpy as np

from qgan_lab.classical import (
    ClassicalGanModel,
    discriminator_loss,
    discriminator_loss_gradient,
    generator_loss,
    generator_loss_gradient,
)
from qgan_lab.trainers.base_trainer import AdversarialTrainer, TrainingResult

if t.TYPE_CHECKING:
    from qgan_lab.classical import Vector
    from qgan_lab.config import TrainingConfig
    from qgan_lab.quantum.encoding import ProbabilityVector


class ClassicalGanTrainer(AdversarialTrainer):
    """Softmax generator against a logistic discriminator, analytic gradients.

    Uses the same schedule, seeding and convergence rule as the quantum run
    so iteration counts are comparable.
    """

    name = "classical"

    def __init__(self, config: TrainingConfig, target: ProbabilityVector) -> None:
        """Draw the initial logits, then the initial discriminator weights."""
        super().__init__(config, target)
        dim = len(target)
        phi = self.initial_parameters(dim)
        w = self.initial_parameters(dim + 1)
        self.model = ClassicalGanModel(phi, w)

    def discriminator_step(self) -> None:
        """Gradient descent on the discriminator cross-entropy."""
        phi, w = self.model.generator_logits, self.model.discriminator_weights
        grad = discriminator_loss_gradient(self.target, phi, w)
        self.model = ClassicalGanModel(phi, w - self.config.learning_rate_d * grad)

    def generator_step(self) -> None:
        """Gradient descent on the non-saturating generator loss."""
        phi, w = self.model.generator_logits, self.model.discriminator_weights
        grad = generator_loss_gradient(phi, w)
        self.model = ClassicalGanModel(phi - self.config.learning_rate_g * grad, w)

    def losses(self) -> tuple[float, float]:
        """Current ``(loss_g, loss_d)``."""
        phi, w = self.model.generator_logits, self.model.discriminator_weights
        return generator_loss(phi, w), discriminator_loss(self.target, phi, w)

    def generated_distribution(self) -> ProbabilityVector:
        """``softmax(phi)``."""
        return self.model.generator_probs()

    def fidelity_to_target(self) -> float:
        """Fidelity of the diagonal encodings, ``(sum sqrt(p q))^2``."""
        overlap = np.sum(np.sqrt(self.generated_distribution().probs * self.target.probs))
        return float(min(overlap**2, 1.0))

    def parameters(self) -> tuple[Vector, Vector]:
        """Current ``(phi, w)``."""
        return self.model.generator_logits, self.model.discriminator_weights


def train_classical(config: TrainingConfig, target: ProbabilityVector) -> TrainingResult:
    """Train the classical baseline on ``target``; deterministic given ``config.seed``."""
    return ClassicalGanTrainer(config, target).train()
