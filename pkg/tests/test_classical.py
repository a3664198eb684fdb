"""Tests for the classical GAN baseline."""

from __future__ import annotations

import math

import numpy as np
import pytest

from qgan_lab.classical import (
    ClassicalGanModel,
    classical_discriminator,
    classical_generator_probs,
    discriminator_loss,
    discriminator_loss_gradient,
    generator_loss,
    generator_loss_gradient,
)
from qgan_lab.exceptions import DimensionError, NumericError
from qgan_lab.qgan.gradients import fd_gradient
from qgan_lab.quantum.encoding import ProbabilityVector
from qgan_lab.validation import relative_gap


class TestGeneratorProbs:
    def test_symmetric(self):
        np.testing.assert_allclose(classical_generator_probs([0.0, 0.0]).probs, [0.5, 0.5])

    def test_closed_form(self):
        np.testing.assert_allclose(classical_generator_probs([math.log(3), 0.0]).probs, [0.75, 0.25])

    def test_shift_invariant(self, rng):
        phi = rng.normal(size=8)
        np.testing.assert_allclose(
            classical_generator_probs(phi + 17.0).probs,
            classical_generator_probs(phi).probs,
            atol=1e-12,
        )

    def test_sums_to_one_for_large_logits(self):
        probs = classical_generator_probs([800.0, 0.0, -800.0, 1.0]).probs
        assert np.sum(probs) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(NumericError):
            classical_generator_probs([math.inf, 0.0])


class TestDiscriminator:
    def test_zero_weights(self):
        for outcome in range(4):
            assert classical_discriminator(np.zeros(5), outcome) == 0.5

    def test_large_weight(self):
        assert classical_discriminator([10.0, 0.0, 0.0], 0) == pytest.approx(1 / (1 + math.exp(-10)))
        assert classical_discriminator([10.0, 0.0, 0.0], 0) == pytest.approx(0.99995, abs=1e-5)

    def test_bias_only(self):
        b = 1.3
        expected = 1 / (1 + math.exp(-b))
        for outcome in range(2):
            assert classical_discriminator([0.0, 0.0, b], outcome) == pytest.approx(expected)

    def test_out_of_range_outcome(self):
        with pytest.raises(DimensionError):
            classical_discriminator([0.0, 0.0, 0.0], 2)

    def test_model_requires_bias(self):
        with pytest.raises(DimensionError):
            ClassicalGanModel(np.zeros(2), np.zeros(2))


class TestLosses:
    def test_discriminator_loss_matches_definition(self, rng):
        target = ProbabilityVector([0.75, 0.25])
        phi, w = rng.normal(size=2), rng.normal(size=3)
        p_g = classical_generator_probs(phi).probs
        d = np.array([classical_discriminator(w, x) for x in range(2)])
        expected = -np.sum(target.probs * np.log(d)) - np.sum(p_g * np.log(1 - d))
        assert discriminator_loss(target, phi, w) == pytest.approx(expected)

    def test_generator_loss_matches_definition(self, rng):
        phi, w = rng.normal(size=4), rng.normal(size=5)
        p_g = classical_generator_probs(phi).probs
        d = np.array([classical_discriminator(w, x) for x in range(4)])
        assert generator_loss(phi, w) == pytest.approx(-np.sum(p_g * np.log(d)))

    def test_analytic_gradients_match_finite_differences(self, rng):
        target = ProbabilityVector([0.1, 0.2, 0.3, 0.4])
        for _ in range(20):
            phi, w = rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 5)
            fd_g = fd_gradient(lambda x, w=w: generator_loss(x, w), phi, 1e-5)
            fd_d = fd_gradient(lambda x, phi=phi: discriminator_loss(target, phi, x), w, 1e-5)
            assert relative_gap(generator_loss_gradient(phi, w), fd_g, floor=1e-6) < 1e-5
            assert relative_gap(discriminator_loss_gradient(target, phi, w), fd_d, floor=1e-6) < 1e-5
