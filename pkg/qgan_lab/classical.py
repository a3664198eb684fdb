"""Classical GAN baseline on the same discrete-distribution task.

The generator is a softmax over outcomes, so the noise input of a usual GAN
is marginalized out. The discriminator is a per-outcome logistic score
``sigmoid(w[x] + bias)``. Losses are exact expectations over outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from qgan_lab.exceptions import DimensionError, NumericError
from qgan_lab.quantum.encoding import ProbabilityVector

Vector = npt.NDArray[np.float64]


@dataclass(frozen=True)
class ClassicalGanModel:
    """Parameters of the classical baseline.

    Attributes:
        generator_logits: ``phi``, one logit per outcome.
        discriminator_weights: ``w``, one score per outcome followed by the bias.
    """

    generator_logits: Vector
    discriminator_weights: Vector

    def __post_init__(self) -> None:
        """Check the weight vector is one longer than the logits."""
        phi = np.asarray(self.generator_logits, dtype=float)
        w = np.asarray(self.discriminator_weights, dtype=float)
        if w.shape != (phi.size + 1,):
            msg = f"expected {phi.size + 1} discriminator weights, got {w.size}"
            raise DimensionError(msg)
        object.__setattr__(self, "generator_logits", phi)
        object.__setattr__(self, "discriminator_weights", w)

    def generator_probs(self) -> ProbabilityVector:
        """Distribution the generator produces."""
        return classical_generator_probs(self.generator_logits)


def _softmax(phi: Vector) -> Vector:
    shifted = np.exp(phi - np.max(phi))
    return shifted / np.sum(shifted)


def classical_generator_probs(phi: npt.ArrayLike) -> ProbabilityVector:
    """Softmax of the logits, computed with max-subtraction.

    Raises:
        NumericError: If a logit is not finite.
    """
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        msg = "generator logits must be finite"
        raise NumericError(msg)
    return ProbabilityVector(_softmax(phi))


def _logits(w: Vector) -> Vector:
    return w[:-1] + w[-1]


def classical_discriminator(w: npt.ArrayLike, outcome: int) -> float:
    """``sigmoid(w[outcome] + bias)``.

    Raises:
        DimensionError: If ``outcome`` is not a valid index.
    """
    w = np.asarray(w, dtype=float)
    if not 0 <= outcome < w.size - 1:
        msg = f"outcome {outcome} out of range [0, {w.size - 1})"
        raise DimensionError(msg)
    z = w[outcome] + w[-1]
    return float(0.5 * (1 + np.tanh(z / 2)))


def _softplus(z: Vector) -> Vector:
    return np.logaddexp(0.0, z)


def _sigmoid(z: Vector) -> Vector:
    return 0.5 * (1 + np.tanh(z / 2))


def discriminator_loss(target: ProbabilityVector, phi: Vector, w: Vector) -> float:
    """``-sum p_r log D - sum p_g log(1 - D)`` in log-sigmoid form."""
    z = _logits(w)
    p_g = _softmax(phi)
    return float(np.sum(target.probs * _softplus(-z)) + np.sum(p_g * _softplus(z)))


def generator_loss(phi: Vector, w: Vector) -> float:
    """``-sum p_g log D``."""
    return float(np.sum(_softmax(phi) * _softplus(-_logits(w))))


def discriminator_loss_gradient(target: ProbabilityVector, phi: Vector, w: Vector) -> Vector:
    """Gradient of ``discriminator_loss`` with respect to ``w`` (bias last)."""
    d = _sigmoid(_logits(w))
    per_outcome = -target.probs * (1 - d) + _softmax(phi) * d
    return np.append(per_outcome, np.sum(per_outcome))


def generator_loss_gradient(phi: Vector, w: Vector) -> Vector:
    """Gradient of ``generator_loss`` with respect to ``phi``.

    With ``s = -log D`` it is ``p_g * (s - E_pg[s])``.
    """
    p_g = _softmax(phi)
    s = _softplus(-_logits(w))
    return p_g * (s - np.dot(p_g, s))
