"""Invariant and oracle checks run by ``qgan-lab validate``.

Every check is seeded, so repeated runs print identical text.
"""

from __future__ import annotations

import logging
import math
import typing as t
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import permutations, product

import numpy as np

from qgan_lab.classical import (
    classical_generator_probs,
    discriminator_loss,
    discriminator_loss_gradient,
    generator_loss,
    generator_loss_gradient,
)
from qgan_lab.config import TrainingConfig
from qgan_lab.metrics import iterations_to_convergence, kl_divergence, tv_distance
from qgan_lab.qgan.ansatz import default_ansatz, default_enhancement
from qgan_lab.qgan.gradients import fd_gradient
from qgan_lab.qgan.models import (
    DiscriminatorModel,
    GeneratorModel,
    GeneratorOutput,
    discriminate,
    discriminator_objective,
    generate,
    generator_output,
    grid_search_discriminator,
    loss_generator,
    objective_literal,
    train_discriminator,
)
from qgan_lab.quantum.core import (
    CONSTRUCTION_TOL,
    DERIVED_TOL,
    ORACLE_TOL,
    DensityMatrix,
    HamiltonianSpec,
    PauliString,
    assemble_hamiltonian,
    basis_state,
    conjugate,
    evolve_unitary,
    fidelity,
    maximally_mixed,
    measure_probabilities,
    pauli_matrix,
    purity,
    trace_distance,
    unitary_defect,
)
from qgan_lab.quantum.encoding import (
    ProbabilityVector,
    empirical_distribution,
    encode_distribution,
)
from qgan_lab.trainers.quantum_trainer import train

if t.TYPE_CHECKING:
    from collections.abc import Callable

    import numpy.typing as npt

SEED = 20240229
RANDOM_TRIALS = 25
GRADIENT_POINTS = 100
TAYLOR_TERMS = 40
ORACLE_HAMILTONIANS = 20
GRID_STEPS = 101
GRID_MARGIN = 0.05


class CheckFailure(AssertionError):
    """A validation check found a violated property."""


def require(condition: bool, message: str) -> None:  # noqa: FBT001
    """Raise ``CheckFailure`` with ``message`` unless ``condition`` holds."""
    if not condition:
        raise CheckFailure(message)


def relative_gap(a: npt.ArrayLike, b: npt.ArrayLike, floor: float) -> float:
    """``|a - b| / max(|a|, |b|, floor)`` in the 2-norm."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)), floor)
    return float(np.linalg.norm(a - b)) / scale


def random_hermitian(rng: np.random.Generator, n_qubits: int, norm: float) -> np.ndarray:
    """Random Hermitian matrix scaled to spectral norm ``norm``.

    Every entry is then bounded by ``norm`` as well.
    """
    dim = 2**n_qubits
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    herm = (raw + raw.conj().T) / 2
    return herm * (norm / np.linalg.norm(herm, 2))


def random_density_matrix(rng: np.random.Generator, n_qubits: int) -> DensityMatrix:
    """Random full-rank mixed state ``G G^dagger / Tr``."""
    dim = 2**n_qubits
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real)


def random_probability_vector(rng: np.random.Generator, n_qubits: int) -> ProbabilityVector:
    """Random point of the probability simplex over ``2^n`` outcomes."""
    return ProbabilityVector(rng.dirichlet(np.ones(2**n_qubits)))


def taylor_exponential(h: np.ndarray, t_: float, terms: int = TAYLOR_TERMS) -> np.ndarray:
    """``sum_{k <= terms} (-i H t)^k / k!``."""
    generator = -1j * t_ * h
    total = np.eye(h.shape[0], dtype=np.complex128)
    term = total.copy()
    for k in range(1, terms + 1):
        term = term @ generator / k
        total = total + term
    return total


@dataclass(frozen=True)
class Check:
    """A named property check; ``func`` raises on failure."""

    name: str
    func: Callable[[], None]


@dataclass(frozen=True)
class CheckOutcome:
    """Result of one check."""

    name: str
    passed: bool
    detail: str = ""

    def __str__(self) -> str:
        if self.passed:
            return f"PASS {self.name}"
        return f"FAIL {self.name}: {self.detail}"


@dataclass
class ValidationSuite:
    """Ordered collection of checks."""

    checks: list[Check] = field(default_factory=list)

    @cached_property
    def logger(self) -> logging.Logger:
        """Logger for the suite."""
        return logging.getLogger(__name__)

    def register(self, name: str) -> Callable[[Callable[[], None]], Callable[[], None]]:
        """Decorator adding a check under ``name``."""

        def decorator(func: Callable[[], None]) -> Callable[[], None]:
            self.checks.append(Check(name, func))
            return func

        return decorator

    def run(self) -> list[CheckOutcome]:
        """Run every check in registration order."""
        outcomes = []
        for check in self.checks:
            try:
                check.func()
            except Exception as exc:  # noqa: BLE001
                outcome = CheckOutcome(check.name, passed=False, detail=f"{type(exc).__name__}: {exc}")
            else:
                outcome = CheckOutcome(check.name, passed=True)
            self.logger.debug("%s", outcome)
            outcomes.append(outcome)
        return outcomes


def _check_pauli_matrices() -> None:
    require(np.array_equal(pauli_matrix(PauliString("I")), np.eye(2)), "I is not identity")
    require(np.array_equal(pauli_matrix(PauliString("Z")), np.diag([1, -1])), "Z is not diag(1,-1)")
    require(np.array_equal(pauli_matrix(PauliString("XX")), np.fliplr(np.eye(4))), "XX is not anti-diagonal")
    labels = ["".join(p) for n in (1, 2) for p in product("IXYZ", repeat=n)]
    for label in labels:
        m = pauli_matrix(PauliString(label))
        require(np.array_equal(m, m.conj().T), f"{label} is not Hermitian")
        require(np.array_equal(m @ m, np.eye(m.shape[0])), f"{label} squared is not identity")


def _random_spec(rng: np.random.Generator, n_qubits: int, lam: float) -> HamiltonianSpec:
    paulis = default_ansatz(n_qubits)
    return HamiltonianSpec.from_paulis(
        paulis,
        rng.uniform(-2, 2, size=len(paulis)),
        enhancement=default_enhancement(n_qubits),
        lam=lam,
    )


def _check_lambda_ablation() -> None:
    rng = np.random.default_rng(SEED)
    for n in (1, 2, 3):
        spec = _random_spec(rng, n, lam=0.0)
        bare = replace(spec, enhancement_terms=())
        require(
            np.array_equal(assemble_hamiltonian(spec), assemble_hamiltonian(bare)),
            f"lambda=0 changed the {n}-qubit Hamiltonian",
        )
        g_with = GeneratorModel(spec)
        g_bare = GeneratorModel(bare)
        require(
            np.array_equal(generate(g_with).matrix, generate(g_bare).matrix),
            f"lambda=0 changed the {n}-qubit generated state",
        )
    spec = HamiltonianSpec(1, ((1.0, "Z"),), ((1.0, "X"),), lam=2.0)
    require(
        np.array_equal(assemble_hamiltonian(spec), np.array([[1, 2], [2, -1]])),
        "Z + 2X assembled incorrectly",
    )


def _check_unitarity() -> None:
    rng = np.random.default_rng(SEED)
    for n in (1, 2, 3):
        for _ in range(RANDOM_TRIALS):
            spec = _random_spec(rng, n, lam=float(rng.uniform(0, 2)))
            u = evolve_unitary(assemble_hamiltonian(spec), spec.evolution_time)
            defect = unitary_defect(u)
            require(defect < CONSTRUCTION_TOL, f"unitarity defect {defect:.3e} on {n} qubits")


def _check_evolution_group() -> None:
    rng = np.random.default_rng(SEED)
    for _ in range(RANDOM_TRIALS):
        h = random_hermitian(rng, 2, norm=3.0)
        t1, t2 = rng.uniform(-2, 2, size=2)
        lhs = evolve_unitary(h, t1) @ evolve_unitary(h, t2)
        rhs = evolve_unitary(h, t1 + t2)
        require(np.max(np.abs(lhs - rhs)) < DERIVED_TOL, "U(t1) U(t2) != U(t1 + t2)")
    require(np.array_equal(evolve_unitary(random_hermitian(rng, 2, 1.0), 0.0), np.eye(4)), "U(0) != I")


def _check_conjugation() -> None:
    rng = np.random.default_rng(SEED)
    for n in (1, 2, 3):
        for _ in range(RANDOM_TRIALS):
            rho = random_density_matrix(rng, n)
            u = evolve_unitary(random_hermitian(rng, n, norm=2.0), 1.0)
            evolved = conjugate(u, rho)
            gap = np.max(np.abs(evolved.eigenvalues() - rho.eigenvalues()))
            require(gap < DERIVED_TOL, f"spectrum moved by {gap:.3e}")


def _check_trace_distance() -> None:
    rng = np.random.default_rng(SEED)
    for _ in range(RANDOM_TRIALS):
        a, b, c = (random_density_matrix(rng, 2) for _ in range(3))
        ab, ba = trace_distance(a, b), trace_distance(b, a)
        require(abs(ab - ba) < DERIVED_TOL, "trace distance is not symmetric")
        require(
            trace_distance(a, c) <= ab + trace_distance(b, c) + DERIVED_TOL,
            "triangle inequality violated",
        )
        u = evolve_unitary(random_hermitian(rng, 2, norm=2.0), 1.0)
        rotated = trace_distance(conjugate(u, a), conjugate(u, b))
        require(abs(rotated - ab) < DERIVED_TOL, "trace distance not unitarily invariant")
    require(trace_distance(basis_state(0, 1), basis_state(1, 1)) > 1 - DERIVED_TOL, "orthogonal states")


def _check_fidelity() -> None:
    rng = np.random.default_rng(SEED)
    for _ in range(RANDOM_TRIALS):
        a, b = random_density_matrix(rng, 2), random_density_matrix(rng, 2)
        f_ab, f_ba = fidelity(a, b), fidelity(b, a)
        require(abs(f_ab - f_ba) < DERIVED_TOL, "fidelity is not symmetric")
        dist = trace_distance(a, b)
        # F is the squared fidelity, so the lower bound uses its square root.
        require(1 - math.sqrt(f_ab) <= dist + DERIVED_TOL, "1 - sqrt(F) <= T violated")
        require(dist <= math.sqrt(max(1 - f_ab, 0.0)) + DERIVED_TOL, "T <= sqrt(1 - F) violated")
    diag = fidelity(encode_distribution(ProbabilityVector([0.75, 0.25])), maximally_mixed(1))
    expected = (math.sqrt(0.375) + math.sqrt(0.125)) ** 2
    require(abs(diag - expected) < DERIVED_TOL, f"diagonal fidelity {diag} != {expected}")


def _check_exponential_oracle() -> None:
    rng = np.random.default_rng(SEED)
    for index in range(ORACLE_HAMILTONIANS):
        h = random_hermitian(rng, 3, norm=float(rng.uniform(1, 5)))
        gap = float(np.max(np.abs(evolve_unitary(h, 1.0) - taylor_exponential(h, 1.0))))
        require(gap < ORACLE_TOL, f"Hamiltonian {index}: exponential differs from Taylor by {gap:.3e}")


def _check_encoding() -> None:
    rng = np.random.default_rng(SEED)
    for n in (1, 2, 3):
        for _ in range(RANDOM_TRIALS):
            p = random_probability_vector(rng, n)
            rho = encode_distribution(p)
            back = measure_probabilities(rho)
            require(np.max(np.abs(back.probs - p.probs)) < 1e-12, "encode/measure round trip drifted")
            require(abs(purity(rho) - float(np.sum(p.probs**2))) < 1e-12, "purity != sum p^2")
    samples = [0, 1, 1, 3, 2, 0]
    reference = empirical_distribution(samples, 2).probs
    for order in permutations(samples):
        require(
            np.array_equal(empirical_distribution(list(order), 2).probs, reference),
            "empirical distribution depends on sample order",
        )


def _check_generator_validity() -> None:
    rng = np.random.default_rng(SEED)
    for n in (1, 2):
        for _ in range(RANDOM_TRIALS):
            g = GeneratorModel(_random_spec(rng, n, lam=float(rng.uniform(0, 1))))
            generate(g)


def _check_measured_output() -> None:
    # A generator that reproduces the target outcomes is indistinguishable from it.
    rng = np.random.default_rng(SEED)
    for n in (1, 2):
        for _ in range(RANDOM_TRIALS):
            g = GeneratorModel(_random_spec(rng, n, lam=float(rng.uniform(0, 1))))
            d = DiscriminatorModel(_random_spec(rng, n, lam=0.5))
            shown = generator_output(g, GeneratorOutput.SAMPLES)
            rho_r = encode_distribution(measure_probabilities(generate(g)))
            require(np.max(np.abs(shown.matrix - rho_r.matrix)) < 1e-12, "measured output != encoding")
            gap = abs(discriminate(d, shown) - discriminate(d, rho_r))
            require(gap < DERIVED_TOL, "discriminator separates equal outcome distributions")


def _check_discriminator_affine() -> None:
    rng = np.random.default_rng(SEED)
    for _ in range(RANDOM_TRIALS):
        d = DiscriminatorModel(_random_spec(rng, 2, lam=0.5))
        a, b = random_density_matrix(rng, 2), random_density_matrix(rng, 2)
        alpha = float(rng.uniform())
        mix = DensityMatrix(alpha * a.matrix + (1 - alpha) * b.matrix)
        lhs = discriminate(d, mix)
        rhs = alpha * discriminate(d, a) + (1 - alpha) * discriminate(d, b)
        require(abs(lhs - rhs) < DERIVED_TOL, "discriminator is not affine in the state")


def _check_literal_identity() -> None:
    rng = np.random.default_rng(SEED)
    for n in (1, 2):
        paulis = default_ansatz(n)
        g = GeneratorModel(HamiltonianSpec.from_paulis(paulis))
        d = DiscriminatorModel(HamiltonianSpec.from_paulis(paulis))
        value = objective_literal(random_density_matrix(rng, n), g, d)
        require(abs(value - 2.0) < DERIVED_TOL, f"identity objective is {value}, expected 2")


def _check_fd_quadratic() -> None:
    grad = fd_gradient(lambda x: float(np.sum(x**2)), [1.0, 2.0], 1e-4)
    require(np.max(np.abs(grad - [2.0, 4.0])) < 1e-6, f"quadratic gradient {grad}")


def _check_fd_step_consistency() -> None:
    rng = np.random.default_rng(SEED)
    paulis = default_ansatz(1)
    for _ in range(GRADIENT_POINTS):
        d = DiscriminatorModel(HamiltonianSpec.from_paulis(paulis, rng.uniform(-1, 1, len(paulis))))
        g = GeneratorModel(HamiltonianSpec.from_paulis(paulis))
        theta = rng.uniform(-1, 1, len(paulis))

        def loss(x: np.ndarray, g: GeneratorModel = g, d: DiscriminatorModel = d) -> float:
            return loss_generator(g.with_theta(x), d)

        coarse = fd_gradient(loss, theta, 1e-4)
        fine = fd_gradient(loss, theta, 1e-5)
        gap = relative_gap(coarse, fine, floor=1e-4)
        require(gap < 1e-3, f"h=1e-4 and h=1e-5 gradients differ by {gap:.3e}")


def _check_classical_gradients() -> None:
    rng = np.random.default_rng(SEED)
    target = ProbabilityVector([0.75, 0.25])
    for _ in range(GRADIENT_POINTS):
        phi = rng.uniform(-1, 1, 2)
        w = rng.uniform(-1, 1, 3)
        fd_g = fd_gradient(lambda x, w=w: generator_loss(x, w), phi, 1e-5)
        fd_d = fd_gradient(lambda x, phi=phi: discriminator_loss(target, phi, x), w, 1e-5)
        gap_g = relative_gap(generator_loss_gradient(phi, w), fd_g, floor=1e-6)
        gap_d = relative_gap(discriminator_loss_gradient(target, phi, w), fd_d, floor=1e-6)
        require(gap_g < 1e-5, f"generator gradient off by {gap_g:.3e}")
        require(gap_d < 1e-5, f"discriminator gradient off by {gap_d:.3e}")
        shifted = classical_generator_probs(phi + 3.0).probs
        require(np.max(np.abs(shifted - classical_generator_probs(phi).probs)) < 1e-12, "softmax not shift invariant")


def grid_oracle_instances() -> list[tuple[str, DensityMatrix, DensityMatrix, tuple[str, ...]]]:
    """One-qubit ``(name, rho_r, frozen rho_g, ansatz)`` cases for the grid oracle."""
    plus = DensityMatrix(np.array([[0.5, 0.5], [0.5, 0.5]]))
    return [
        ("orthogonal", basis_state(0, 1), basis_state(1, 1), ("X",)),
        ("mixed-target", encode_distribution(ProbabilityVector([0.75, 0.25])), maximally_mixed(1), ("X", "Z")),
        ("superposition", basis_state(0, 1), plus, ("Y", "Z")),
    ]


def _check_grid_oracle() -> None:
    rng = np.random.default_rng(SEED)
    for name, rho_r, rho_g, labels in grid_oracle_instances():
        paulis = tuple(PauliString(label) for label in labels)
        start = DiscriminatorModel(HamiltonianSpec.from_paulis(paulis, rng.uniform(-0.1, 0.1, len(paulis))))
        _, best = grid_search_discriminator(rho_r, rho_g, start, GRID_STEPS)
        trained = train_discriminator(rho_r, rho_g, start, learning_rate=0.05, steps=1000)
        reached = discriminator_objective(rho_r, rho_g, trained)
        require(reached >= best - GRID_MARGIN, f"{name}: trained {reached:.6f} vs grid {best:.6f}")


def _check_metrics() -> None:
    rng = np.random.default_rng(SEED)
    for _ in range(RANDOM_TRIALS):
        p, q, r = (random_probability_vector(rng, 2) for _ in range(3))
        require(abs(tv_distance(p, q) - tv_distance(q, p)) < 1e-12, "TV is not symmetric")
        require(tv_distance(p, p) == 0, "TV(p, p) != 0")
        require(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12, "TV triangle violated")
        require(kl_divergence(p, q) >= -1e-12, "KL is negative")
        quantum = trace_distance(encode_distribution(p), encode_distribution(q))
        require(abs(quantum - tv_distance(p, q)) < CONSTRUCTION_TOL, "TV != trace distance of encodings")
    tvs = [0.5, 0.009, 0.009, 0.2, 0.005, 0.005, 0.005]
    require(iterations_to_convergence(tvs, 0.01, 3) == 7, "convergence window scan")


def _check_training_determinism() -> None:
    config = TrainingConfig(n_qubits=1, max_iterations=25, seed=7)
    target = ProbabilityVector([0.75, 0.25])
    first, second = train(config, target), train(config, target)

    def strip(result: t.Any) -> list[tuple[float, ...]]:  # noqa: ANN401
        return [(r.iteration, r.loss_g, r.loss_d, r.tv_to_target, r.fidelity_to_target) for r in result.history]

    require(strip(first) == strip(second), "identical seeds gave different histories")
    require(first.generator_parameters == second.generator_parameters, "final parameters differ")


def _check_injected_non_hermitian() -> None:
    evolve_unitary(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def default_suite(*, inject_non_hermitian: bool = False) -> ValidationSuite:
    """Every invariant check plus the exponential and grid-search oracles.

    Args:
        inject_non_hermitian: Add a check that evolves a non-Hermitian
            Hamiltonian and therefore fails.

    Returns:
        The suite, in run order.
    """
    suite = ValidationSuite()
    for name, func in (
        ("pauli-matrices", _check_pauli_matrices),
        ("lambda-zero-ablation", _check_lambda_ablation),
        ("unitarity", _check_unitarity),
        ("evolution-group-property", _check_evolution_group),
        ("conjugation-preserves-spectrum", _check_conjugation),
        ("trace-distance-metric", _check_trace_distance),
        ("fidelity-relations", _check_fidelity),
        ("exponential-taylor-oracle", _check_exponential_oracle),
        ("encoding-round-trip", _check_encoding),
        ("generated-state-validity", _check_generator_validity),
        ("measured-output-matches-target-encoding", _check_measured_output),
        ("discriminator-affine", _check_discriminator_affine),
        ("literal-objective-identity", _check_literal_identity),
        ("fd-gradient-quadratic", _check_fd_quadratic),
        ("fd-gradient-step-consistency", _check_fd_step_consistency),
        ("classical-analytic-gradients", _check_classical_gradients),
        ("grid-search-discriminator-oracle", _check_grid_oracle),
        ("distribution-metrics", _check_metrics),
        ("training-determinism", _check_training_determinism),
    ):
        suite.register(name)(func)
    if inject_non_hermitian:
        suite.register("injected-non-hermitian-hamiltonian")(_check_injected_non_hermitian)
    return suite


def validate(
    echo: Callable[[str], None] = print,
    *,
    inject_non_hermitian: bool = False,
) -> int:
    """Run the default suite, echo one line per check and a summary.

    Returns:
        0 if every check passed, else 2.
    """
    outcomes = default_suite(inject_non_hermitian=inject_non_hermitian).run()
    for outcome in outcomes:
        echo(str(outcome))
    passed = sum(outcome.passed for outcome in outcomes)
    echo(f"{passed}/{len(outcomes)} checks passed")
    return 0 if passed == len(outcomes) else 2
