"""Alternating minimax training loop shared by every model family."""

from __future__ import annotations

import abc
import logging
import typing as t
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import pendulum

from qgan_lab.exceptions import DimensionError, NumericError
from qgan_lab.metrics import iterations_to_convergence, kl_divergence, tv_distance

if t.TYPE_CHECKING:
    import numpy.typing as npt

    from qgan_lab.config import TrainingConfig
    from qgan_lab.quantum.encoding import ProbabilityVector

# How often per-iteration losses are logged at DEBUG level.
LOG_EVERY = 100


@dataclass(frozen=True)
class IterationRecord:
    """Metrics captured at the end of one training iteration."""

    iteration: int
    loss_g: float
    loss_d: float
    tv_to_target: float
    fidelity_to_target: float
    wall_time_ms: float


@dataclass(frozen=True)
class TrainingResult:
    """Outcome of a training run.

    Attributes:
        history: One record per completed iteration.
        converged: Whether the convergence window was reached.
        iterations_to_convergence: Iteration closing the window, if converged.
        final_generated: Generated distribution after the last iteration.
        target: Distribution the run was fitted to.
        generator_parameters: Trained generator parameters.
        discriminator_parameters: Trained discriminator parameters.
        error: Why the run aborted, or None.
    """

    history: tuple[IterationRecord, ...]
    converged: bool
    iterations_to_convergence: int | None
    final_generated: ProbabilityVector
    target: ProbabilityVector
    generator_parameters: tuple[float, ...] = ()
    discriminator_parameters: tuple[float, ...] = ()
    error: str | None = None

    @property
    def final_tv(self) -> float:
        """TV distance of the final generated distribution to the target."""
        return tv_distance(self.final_generated, self.target)

    @property
    def final_kl(self) -> float:
        """``KL(target || generated)`` at the end of the run."""
        return kl_divergence(self.target, self.final_generated)

    @property
    def final_fidelity(self) -> float:
        """Fidelity recorded in the last iteration, or 0 without history."""
        return self.history[-1].fidelity_to_target if self.history else 0.0

    @property
    def wall_time_ms(self) -> float:
        """Total wall time of the recorded iterations."""
        return sum(record.wall_time_ms for record in self.history)


@dataclass
class _Stopwatch:
    started: pendulum.DateTime = field(default_factory=pendulum.now)

    def lap_ms(self) -> float:
        now = pendulum.now()
        elapsed = (now - self.started).total_seconds() * 1000
        self.started = now
        return elapsed


class AdversarialTrainer(abc.ABC):
    """Base class for generator/discriminator training runs.

    Subclasses hold the model parameters and implement the discriminator
    step, the generator step and the metric hooks; this class owns the
    schedule, the convergence rule and the history.
    """

    name: t.ClassVar[str] = "adversarial"

    def __init__(self, config: TrainingConfig, target: ProbabilityVector) -> None:
        """Create a trainer.

        Args:
            config: Training settings.
            target: Distribution to learn.

        Raises:
            DimensionError: If the target does not have ``2^n_qubits`` entries.
        """
        if len(target) != 2**config.n_qubits:
            msg = f"target has {len(target)} outcomes, expected {2**config.n_qubits}"
            raise DimensionError(msg)
        self.config = config
        self.target = target
        self.rng = np.random.default_rng(config.seed)

    @cached_property
    def logger(self) -> logging.Logger:
        """Logger for this trainer."""
        return logging.getLogger(f"qgan_lab.trainers.{self.name}")

    def initial_parameters(self, size: int) -> npt.NDArray[np.float64]:
        """Draw ``size`` parameters i.i.d. uniform on ``[-init_scale, init_scale]``."""
        scale = self.config.init_scale
        return self.rng.uniform(-scale, scale, size=size)

    @abc.abstractmethod
    def discriminator_step(self) -> None:
        """Take one gradient step that improves the discriminator."""

    @abc.abstractmethod
    def generator_step(self) -> None:
        """Take one gradient step that improves the generator."""

    @abc.abstractmethod
    def losses(self) -> tuple[float, float]:
        """Return the current ``(loss_g, loss_d)``."""

    @abc.abstractmethod
    def generated_distribution(self) -> ProbabilityVector:
        """Return the distribution the generator currently produces."""

    @abc.abstractmethod
    def fidelity_to_target(self) -> float:
        """Return the fidelity of the generated state to the target state."""

    @abc.abstractmethod
    def parameters(self) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Return the current ``(generator, discriminator)`` parameters."""

    def _record(
        self,
        iteration: int,
        stopwatch: _Stopwatch,
    ) -> tuple[IterationRecord, ProbabilityVector]:
        loss_g, loss_d = self.losses()
        if not (np.isfinite(loss_g) and np.isfinite(loss_d)):
            msg = f"non-finite loss at iteration {iteration}"
            raise NumericError(msg)
        generated = self.generated_distribution()
        record = IterationRecord(
            iteration=iteration,
            loss_g=loss_g,
            loss_d=loss_d,
            tv_to_target=tv_distance(generated, self.target),
            fidelity_to_target=self.fidelity_to_target(),
            wall_time_ms=stopwatch.lap_ms(),
        )
        return record, generated

    def train(self) -> TrainingResult:
        """Run the alternating schedule until convergence or the iteration budget.

        Each iteration takes ``d_steps_per_g_step`` discriminator steps and
        then one generator step. A numeric failure ends the run early and the
        partial history is kept.

        Raises:
            NumericError: If not even the initial generator can be evaluated.

        Returns:
            The training result.
        """
        config = self.config
        started = pendulum.now()
        stopwatch = _Stopwatch()
        history: list[IterationRecord] = []
        streak = 0
        error = None
        generated = self.generated_distribution()
        self.logger.info(
            "Starting %s run: seed=%d lambda_g=%g lambda_d=%g",
            self.name,
            config.seed,
            config.lambda_g,
            config.lambda_d,
        )
        try:
            for iteration in range(1, config.max_iterations + 1):
                for _ in range(config.d_steps_per_g_step):
                    self.discriminator_step()
                self.generator_step()
                record, generated = self._record(iteration, stopwatch)
                history.append(record)
                if iteration % LOG_EVERY == 0:
                    self.logger.debug(
                        "iteration %d: loss_g=%.6g loss_d=%.6g tv=%.6g",
                        iteration,
                        record.loss_g,
                        record.loss_d,
                        record.tv_to_target,
                    )
                streak = streak + 1 if record.tv_to_target < config.epsilon else 0
                if streak >= config.patience:
                    break
        except NumericError as exc:
            error = str(exc)
            self.logger.warning(
                "%s run aborted after %d iterations: %s",
                self.name,
                len(history),
                error,
            )

        reached = iterations_to_convergence(
            [r.tv_to_target for r in history],
            config.epsilon,
            config.patience,
        )
        gen_params, disc_params = self.parameters()
        result = TrainingResult(
            history=tuple(history),
            converged=reached is not None,
            iterations_to_convergence=reached,
            final_generated=generated,
            target=self.target,
            generator_parameters=tuple(gen_params.tolist()),
            discriminator_parameters=tuple(disc_params.tolist()),
            error=error,
        )
        self.logger.info(
            "Finished %s run in %s: converged=%s iterations=%s",
            self.name,
            (pendulum.now() - started).in_words(),
            result.converged,
            reached,
        )
        return result

