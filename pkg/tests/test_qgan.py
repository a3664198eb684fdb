"""Tests for the quantum generator, discriminator and their objectives."""

from __future__ import annotations

import math

import numpy as np
import pytest

from qgan_lab.exceptions import ContractError, DimensionError, NumericError, SpecError
from qgan_lab.qgan.ansatz import (
    default_ansatz,
    default_enhancement,
    local_xyz_ansatz,
    resolve_ansatz,
    resolve_enhancement,
)
from qgan_lab.qgan.gradients import bounded_step, fd_gradient
from qgan_lab.qgan.models import (
    DiscriminatorModel,
    GeneratorModel,
    GeneratorOutput,
    discriminate,
    discriminator_objective,
    generate,
    generator_output,
    grid_search_discriminator,
    loss_discriminator,
    loss_generator,
    objective_literal,
    readout_projector,
    train_discriminator,
)
from qgan_lab.quantum.core import (
    HamiltonianSpec,
    PauliString,
    basis_state,
    dephase,
    maximally_mixed,
    measure_probabilities,
)
from qgan_lab.quantum.encoding import encode_distribution
from qgan_lab.validation import random_density_matrix, relative_gap


def paulis(*labels: str) -> tuple[PauliString, ...]:
    return tuple(PauliString(label) for label in labels)


def generator(labels: tuple[str, ...], theta=None, **kwargs) -> GeneratorModel:
    initial_state = kwargs.pop("initial_state", None)
    return GeneratorModel(HamiltonianSpec.from_paulis(paulis(*labels), theta, **kwargs), initial_state)


def discriminator(labels: tuple[str, ...], theta=None, **kwargs) -> DiscriminatorModel:
    return DiscriminatorModel(HamiltonianSpec.from_paulis(paulis(*labels), theta, **kwargs))


def labels_of(strings: tuple[PauliString, ...]) -> list[str]:
    return [str(s) for s in strings]


class TestAnsatz:
    def test_default_ansatz(self):
        assert labels_of(default_ansatz(1)) == ["X", "Z"]
        assert labels_of(default_ansatz(2)) == ["XI", "ZI", "IX", "IZ", "ZZ"]

    def test_local_xyz(self):
        assert labels_of(local_xyz_ansatz(1)) == ["X", "Y", "Z"]

    def test_default_enhancement(self):
        assert default_enhancement(1) == ()
        assert labels_of(default_enhancement(3)) == ["XXI", "YYI", "XIX", "YIY", "IXX", "IYY"]

    def test_resolve_named_set(self):
        assert resolve_ansatz(["default"], 2) == default_ansatz(2)
        assert resolve_ansatz(["LOCAL_XYZ"], 1) == local_xyz_ansatz(1)

    def test_resolve_explicit_labels(self):
        assert labels_of(resolve_ansatz(["xy", "ZZ"], 2)) == ["XY", "ZZ"]

    def test_resolve_rejects_wrong_length(self):
        with pytest.raises(SpecError):
            resolve_ansatz(["X", "ZZ"], 2)

    def test_resolve_rejects_unknown_name(self):
        with pytest.raises(SpecError):
            resolve_ansatz(["fancy"], 2)

    def test_resolve_enhancement(self):
        assert resolve_enhancement("none", 3) == ()
        with pytest.raises(SpecError):
            resolve_enhancement("bogus", 2)


class TestGenerate:
    def test_zero_parameters_leave_initial_state(self):
        rho = generate(generator(("X", "Z")))
        np.testing.assert_allclose(rho.matrix, np.diag([1, 0]), atol=1e-12)

    def test_y_rotation(self):
        rho = generate(generator(("Y",), [math.pi / 4]))
        np.testing.assert_allclose(measure_probabilities(rho).probs, [0.5, 0.5], atol=1e-12)

    def test_lambda_zero_ignores_enhancement(self, rng):
        theta = rng.uniform(-1, 1, 5)
        bare = generate(generator(tuple(labels_of(default_ansatz(2))), theta))
        enhanced = generate(
            generator(
                tuple(labels_of(default_ansatz(2))),
                theta,
                enhancement=default_enhancement(2),
                lam=0.0,
            ),
        )
        assert np.array_equal(bare.matrix, enhanced.matrix)

    def test_enhancement_changes_state(self, rng):
        theta = rng.uniform(-1, 1, 5)
        labels = tuple(labels_of(default_ansatz(2)))
        bare = generate(generator(labels, theta))
        enhanced = generate(generator(labels, theta, enhancement=default_enhancement(2), lam=0.5))
        assert not np.allclose(bare.matrix, enhanced.matrix)

    def test_initial_state_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            generator(("X",), initial_state=basis_state(0, 2))


class TestDiscriminate:
    def test_projector_on_its_subspace(self):
        assert discriminate(discriminator(("X",)), basis_state(0, 1)) == pytest.approx(1.0)

    def test_orthogonal_state(self):
        assert discriminate(discriminator(("X",)), basis_state(1, 1)) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("n_qubits", [1, 2, 3])
    def test_maximally_mixed(self, n_qubits):
        d = discriminator(tuple(labels_of(default_ansatz(n_qubits))))
        assert discriminate(d, maximally_mixed(n_qubits)) == pytest.approx(0.5)

    def test_affine_in_state(self, rng):
        d = discriminator(tuple(labels_of(default_ansatz(2))), rng.uniform(-1, 1, 5))
        a, b = random_density_matrix(rng, 2), random_density_matrix(rng, 2)
        mix = type(a)(0.3 * a.matrix + 0.7 * b.matrix)
        expected = 0.3 * discriminate(d, a) + 0.7 * discriminate(d, b)
        assert discriminate(d, mix) == pytest.approx(expected, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            discriminate(discriminator(("X",)), basis_state(0, 2))

    def test_readout_projector(self):
        np.testing.assert_array_equal(readout_projector(2), np.diag([1, 1, 0, 0]))

    def test_rejects_non_projector_readout(self):
        spec = HamiltonianSpec.from_paulis(paulis("X"))
        with pytest.raises(ContractError):
            DiscriminatorModel(spec, np.diag([0.5, 0.0]))
        with pytest.raises(DimensionError):
            DiscriminatorModel(spec, np.diag([1.0, 0.0, 0.0, 0.0]))


class TestObjectiveLiteral:
    def test_identity_unitaries(self, rng):
        value = objective_literal(random_density_matrix(rng, 1), generator(("X", "Z")), discriminator(("X", "Z")))
        assert value == pytest.approx(2.0, abs=1e-9)

    def test_traceless_pauli_under_mixed_states(self):
        g = generator(("Z",), initial_state=maximally_mixed(1))
        d = discriminator(("X",), [math.pi / 2])
        assert objective_literal(maximally_mixed(1), g, d) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("phi", [0.3, 1.0, 2.5])
    def test_diagonal_discriminator(self, phi):
        d = discriminator(("Z",), [phi])
        value = objective_literal(basis_state(0, 1), generator(("Z",)), d)
        assert value == pytest.approx(2 * math.cos(phi), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            objective_literal(basis_state(0, 2), generator(("Z",)), discriminator(("Z",)))


class TestLosses:
    def test_perfect_discriminator(self):
        g = generator(("X",), initial_state=basis_state(1, 1))
        loss = loss_discriminator(basis_state(0, 1), g, discriminator(("X",)))
        assert loss == pytest.approx(-2 * math.log(1 - 1e-9), rel=1e-6)
        assert loss == pytest.approx(2e-9, rel=1e-6)

    def test_maximally_confused(self):
        g = generator(("X",), initial_state=maximally_mixed(1))
        loss = loss_discriminator(maximally_mixed(1), g, discriminator(("X",)))
        assert loss == pytest.approx(2 * math.log(2))

    def test_generator_loss_clamp_boundaries(self):
        d = discriminator(("X",))
        assert loss_generator(generator(("X",)), d) == pytest.approx(1e-9, rel=1e-6)
        half = generator(("X",), initial_state=maximally_mixed(1))
        assert loss_generator(half, d) == pytest.approx(math.log(2))
        fooled = generator(("X",), initial_state=basis_state(1, 1))
        assert loss_generator(fooled, d) == pytest.approx(-math.log(1e-9))
        assert loss_generator(fooled, d) == pytest.approx(20.7, abs=0.05)

    def test_discriminator_objective_is_negated_loss(self, rng):
        g = generator(("X", "Z"), rng.uniform(-1, 1, 2))
        d = discriminator(("X", "Z"), rng.uniform(-1, 1, 2))
        rho_r = random_density_matrix(rng, 1)
        assert discriminator_objective(rho_r, generate(g), d) == -loss_discriminator(rho_r, g, d)

    def test_losses_default_to_the_coherent_state(self, rng):
        g = generator(("X", "Z"), rng.uniform(-1, 1, 2))
        d = discriminator(("X", "Z"), rng.uniform(-1, 1, 2))
        rho_r = random_density_matrix(rng, 1)
        assert loss_generator(g, d) == loss_generator(g, d, GeneratorOutput.STATE)
        assert loss_discriminator(rho_r, g, d) == -discriminator_objective(rho_r, generate(g), d)

    def test_samples_output_hides_coherences_from_the_discriminator(self):
        # |+> and I/2 have the same outcome distribution; only their coherence differs.
        plus = generator(("Y",), [math.pi / 4])
        d = discriminator(("Y",), [-math.pi / 4])
        assert discriminate(d, generate(plus)) == pytest.approx(1.0)
        assert loss_generator(plus, d, GeneratorOutput.SAMPLES) == pytest.approx(math.log(2))


class TestGeneratorOutput:
    def test_state_is_the_generated_state(self, rng):
        g = generator(("X", "Y", "Z"), rng.uniform(-1, 1, 3))
        np.testing.assert_array_equal(generator_output(g).matrix, generate(g).matrix)

    def test_samples_is_the_encoded_outcome_distribution(self, rng):
        g = generator(("XI", "YZ", "ZX"), rng.uniform(-1, 1, 3))
        samples = generator_output(g, GeneratorOutput.SAMPLES)
        encoded = encode_distribution(measure_probabilities(generate(g)))
        np.testing.assert_allclose(samples.matrix, encoded.matrix, atol=1e-12)
        np.testing.assert_array_equal(samples.matrix, dephase(generate(g)).matrix)

    def test_accepts_the_config_string(self):
        g = generator(("Y",), [0.3])
        np.testing.assert_array_equal(
            generator_output(g, "samples").matrix,
            generator_output(g, GeneratorOutput.SAMPLES).matrix,
        )


class TestFdGradient:
    def test_quadratic_is_exact(self):
        grad = fd_gradient(lambda x: float(np.sum(x**2)), [1.0, 2.0], 1e-4)
        np.testing.assert_allclose(grad, [2.0, 4.0], atol=1e-6)

    def test_constant(self):
        np.testing.assert_array_equal(fd_gradient(lambda _: 3.0, [0.1, 0.2, 0.3], 1e-4), [0, 0, 0])

    def test_rejects_non_positive_step(self):
        with pytest.raises(ContractError):
            fd_gradient(lambda _: 0.0, [1.0], 0.0)

    def test_non_finite_value_names_coordinate(self):
        def f(x: np.ndarray) -> float:
            return math.inf if x[1] > 2.0 else float(x[0])

        with pytest.raises(NumericError, match="coordinate 1"):
            fd_gradient(f, [1.0, 2.0], 1e-4)

    def test_step_halving_consistency(self, rng):
        g = generator(("X", "Z"))
        d = discriminator(("X", "Z"), rng.uniform(-1, 1, 2))
        theta = rng.uniform(-1, 1, 2)

        def loss(x: np.ndarray) -> float:
            return loss_generator(g.with_theta(x), d)

        coarse = fd_gradient(loss, theta, 1e-4)
        fine = fd_gradient(loss, theta, 1e-5)
        assert relative_gap(coarse, fine, floor=1e-4) < 1e-3


class TestBoundedStep:
    def test_short_step_is_unchanged(self):
        np.testing.assert_array_equal(bounded_step(np.array([0.03, -0.04]), 0.1), [0.03, -0.04])

    def test_long_step_is_scaled_to_the_bound(self):
        step = bounded_step(np.array([3.0, -4.0]), 0.1)
        assert float(np.linalg.norm(step)) == pytest.approx(0.1)
        np.testing.assert_allclose(step, [0.06, -0.08])

    def test_zero_step(self):
        np.testing.assert_array_equal(bounded_step(np.zeros(3), 0.1), np.zeros(3))

    @pytest.mark.parametrize("max_norm", [0.0, -1.0])
    def test_rejects_non_positive_bound(self, max_norm):
        with pytest.raises(ContractError):
            bounded_step(np.array([1.0]), max_norm)


class TestGridSearch:
    def test_indistinguishable_states_return_grid_origin(self):
        rho = maximally_mixed(1)
        theta, value = grid_search_discriminator(rho, rho, discriminator(("X", "Z")), grid_steps=21)
        np.testing.assert_array_equal(theta, [-math.pi, -math.pi])
        assert value == pytest.approx(2 * math.log(0.5))

    def test_orthogonal_states(self):
        rho_r, rho_g = basis_state(0, 1), basis_state(1, 1)
        d = discriminator(("X",))
        theta, value = grid_search_discriminator(rho_r, rho_g, d)
        best = d.with_theta(theta)
        assert discriminate(best, rho_r) == pytest.approx(1.0, abs=1e-9)
        assert discriminate(best, rho_g) == pytest.approx(0.0, abs=1e-9)
        assert math.sin(theta[0]) == pytest.approx(0.0, abs=1e-9)
        assert value == pytest.approx(2 * math.log(1 - 1e-9), abs=1e-12)

    def test_rejects_three_parameters(self):
        rho = maximally_mixed(1)
        with pytest.raises(SpecError):
            grid_search_discriminator(rho, rho, discriminator(("X", "Y", "Z")))

    def test_rejects_coarse_grid(self):
        rho = maximally_mixed(1)
        with pytest.raises(ContractError):
            grid_search_discriminator(rho, rho, discriminator(("X",)), grid_steps=10)

    def test_trained_discriminator_matches_grid_optimum(self):
        rho_r, rho_g = basis_state(0, 1), basis_state(1, 1)
        start = discriminator(("X",), [0.08])
        _, best = grid_search_discriminator(rho_r, rho_g, start)
        trained = train_discriminator(rho_r, rho_g, start, steps=300)
        assert discriminator_objective(rho_r, rho_g, trained) >= best - 0.05
