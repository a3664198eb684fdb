"""Experiment configuration: schema, flat-file parser and frozen config types.

Config files hold one ``key = value`` per line. ``#`` starts a comment and
lists are comma-separated, e.g.::

    n_qubits = 1
    target = 0.75, 0.25
    lambda_sweep = 0.0, 0.5
"""

from __future__ import annotations

import math
import typing as t
from dataclasses import dataclass, field, replace
from pathlib import Path

from jsonschema import Draft7Validator
from singer_sdk import typing as th  # JSON schema typing helpers

from qgan_lab.exceptions import (
    ArtifactIOError,
    ConfigSyntaxError,
    ConfigValueError,
    QganLabError,
    UnknownConfigKeyError,
)
from qgan_lab.qgan.ansatz import resolve_ansatz, resolve_enhancement
from qgan_lab.qgan.models import GeneratorOutput, ObjectiveMode
from qgan_lab.quantum.core import MAX_QUBITS
from qgan_lab.quantum.encoding import DatasetSpec

if t.TYPE_CHECKING:
    from collections.abc import Iterator

UINT64_MAX = 2**64 - 1

METHOD_CLASSICAL = "classical"
METHOD_QGAN = "qgan"

config_jsonschema = th.PropertiesList(
    th.Property(
        "n_qubits",
        th.IntegerType,
        required=True,
        description="Number of qubits; the target has 2^n outcomes",
    ),
    th.Property(
        "target",
        th.ArrayType(th.NumberType),
        description="Inline target probabilities, one per outcome",
    ),
    th.Property(
        "dataset",
        th.StringType,
        description="Sample file with one outcome index per line",
    ),
    th.Property(
        "methods",
        th.ArrayType(th.StringType),
        default=[METHOD_CLASSICAL, METHOD_QGAN],
        description="Model families to train",
    ),
    th.Property(
        "generator_ansatz",
        th.ArrayType(th.StringType),
        default=["default"],
        description="Named Pauli-term set or explicit Pauli labels",
    ),
    th.Property(
        "discriminator_ansatz",
        th.ArrayType(th.StringType),
        default=["default"],
        description="Named Pauli-term set or explicit Pauli labels",
    ),
    th.Property(
        "enhancement",
        th.StringType,
        default="default",
        description="Named enhancement term set V",
    ),
    th.Property("lambda_g", th.NumberType, default=0.0, description="Generator enhancement weight"),
    th.Property(
        "lambda_d",
        th.NumberType,
        default=0.0,
        description="Discriminator enhancement weight",
    ),
    th.Property(
        "lambda_sweep",
        th.ArrayType(th.NumberType),
        default=[],
        description="Enhancement weights to sweep; each sets both lambda_g and lambda_d",
    ),
    th.Property(
        "objective_mode",
        th.StringType,
        default=ObjectiveMode.PROBABILISTIC.value,
        allowed_values=[mode.value for mode in ObjectiveMode],
        description="Objective the game is played on",
    ),
    th.Property(
        "generator_output",
        th.StringType,
        default=GeneratorOutput.SAMPLES.value,
        allowed_values=[output.value for output in GeneratorOutput],
        description="What the discriminator is shown of the generated state",
    ),
    th.Property("learning_rate_g", th.NumberType, default=0.05),
    th.Property("learning_rate_d", th.NumberType, default=0.05),
    th.Property("fd_step", th.NumberType, default=1e-4, description="Finite-difference step"),
    th.Property(
        "max_step",
        th.NumberType,
        default=0.1,
        description="Largest Euclidean norm of one quantum parameter update",
    ),
    th.Property("max_iterations", th.IntegerType, default=5000),
    th.Property("d_steps_per_g_step", th.IntegerType, default=1),
    th.Property(
        "epsilon",
        th.NumberType,
        default=0.01,
        description="TV distance below which an iteration counts as converged",
    ),
    th.Property(
        "patience",
        th.IntegerType,
        default=10,
        description="Consecutive converged iterations required",
    ),
    th.Property("seeds", th.ArrayType(th.IntegerType), default=[1]),
    th.Property("evolution_time", th.NumberType, default=1.0),
    th.Property(
        "init_scale",
        th.NumberType,
        default=0.1,
        description="Half-width of the uniform parameter initialization",
    ),
    th.Property("output_dir", th.StringType, default="results"),
    th.Property("workers", th.IntegerType, default=1, description="Parallel training runs"),
).to_dict()

# Range constraints layered onto the generated schema.
_BOUNDS: dict[str, dict[str, t.Any]] = {
    "n_qubits": {"minimum": 1, "maximum": MAX_QUBITS},
    "target": {"minItems": 2},
    "methods": {
        "minItems": 1,
        "uniqueItems": True,
        "items": {"type": "string", "enum": [METHOD_CLASSICAL, METHOD_QGAN]},
    },
    "generator_ansatz": {"minItems": 1},
    "discriminator_ansatz": {"minItems": 1},
    "lambda_g": {"minimum": 0},
    "lambda_d": {"minimum": 0},
    "lambda_sweep": {"items": {"type": "number", "minimum": 0}},
    "learning_rate_g": {"exclusiveMinimum": 0, "maximum": 10},
    "learning_rate_d": {"exclusiveMinimum": 0, "maximum": 10},
    "fd_step": {"exclusiveMinimum": 0, "maximum": 0.1},
    "max_step": {"exclusiveMinimum": 0, "maximum": 10},
    "max_iterations": {"minimum": 1},
    "d_steps_per_g_step": {"minimum": 1},
    "epsilon": {"exclusiveMinimum": 0, "exclusiveMaximum": 1},
    "patience": {"minimum": 1},
    "seeds": {
        "minItems": 1,
        "uniqueItems": True,
        "items": {"type": "integer", "minimum": 0, "maximum": UINT64_MAX},
    },
    "evolution_time": {"exclusiveMinimum": 0},
    "init_scale": {"minimum": 0},
    "workers": {"minimum": 1},
}
for _key, _bounds in _BOUNDS.items():
    config_jsonschema["properties"][_key].update(_bounds)
config_jsonschema["additionalProperties"] = False

_validator = Draft7Validator(config_jsonschema)


@dataclass(frozen=True)
class TrainingConfig:
    """Everything one training run needs.

    Attributes mirror the config keys of the same names; ``seed`` is a single
    seed rather than a list.
    """

    n_qubits: int
    generator_ansatz: tuple[str, ...] = ("default",)
    discriminator_ansatz: tuple[str, ...] = ("default",)
    enhancement: str = "default"
    lambda_g: float = 0.0
    lambda_d: float = 0.0
    objective_mode: ObjectiveMode = ObjectiveMode.PROBABILISTIC
    generator_output: GeneratorOutput = GeneratorOutput.SAMPLES
    learning_rate_g: float = 0.05
    learning_rate_d: float = 0.05
    fd_step: float = 1e-4
    max_iterations: int = 5000
    d_steps_per_g_step: int = 1
    epsilon: float = 0.01
    patience: int = 10
    seed: int = 1
    evolution_time: float = 1.0
    init_scale: float = 0.1
    max_step: float = 0.1

    def __post_init__(self) -> None:
        """Coerce list-valued fields and check every range."""
        object.__setattr__(self, "generator_ansatz", tuple(self.generator_ansatz))
        object.__setattr__(self, "discriminator_ansatz", tuple(self.discriminator_ansatz))
        object.__setattr__(self, "objective_mode", ObjectiveMode(self.objective_mode))
        object.__setattr__(self, "generator_output", GeneratorOutput(self.generator_output))
        for key in _FINITE_KEYS:
            value = getattr(self, key)
            _check_range(key, value, math.isfinite(value))
        _check_range("n_qubits", self.n_qubits, 1 <= self.n_qubits <= MAX_QUBITS)
        _check_range("epsilon", self.epsilon, 0 < self.epsilon < 1)
        _check_range("fd_step", self.fd_step, 0 < self.fd_step <= 0.1)  # noqa: PLR2004
        _check_range("learning_rate_g", self.learning_rate_g, 0 < self.learning_rate_g <= 10)  # noqa: PLR2004
        _check_range("learning_rate_d", self.learning_rate_d, 0 < self.learning_rate_d <= 10)  # noqa: PLR2004
        _check_range("max_iterations", self.max_iterations, self.max_iterations >= 1)
        _check_range("d_steps_per_g_step", self.d_steps_per_g_step, self.d_steps_per_g_step >= 1)
        _check_range("patience", self.patience, self.patience >= 1)
        _check_range("seed", self.seed, 0 <= self.seed <= UINT64_MAX)
        _check_range("lambda_g", self.lambda_g, self.lambda_g >= 0)
        _check_range("lambda_d", self.lambda_d, self.lambda_d >= 0)
        _check_range("evolution_time", self.evolution_time, self.evolution_time > 0)
        _check_range("init_scale", self.init_scale, self.init_scale >= 0)
        _check_range("max_step", self.max_step, 0 < self.max_step <= 10)  # noqa: PLR2004
        for key in ("generator_ansatz", "discriminator_ansatz"):
            try:
                resolve_ansatz(getattr(self, key), self.n_qubits)
            except QganLabError as exc:
                raise ConfigValueError(key, str(exc)) from exc
        try:
            resolve_enhancement(self.enhancement, self.n_qubits)
        except QganLabError as exc:
            raise ConfigValueError("enhancement", str(exc)) from exc


# Keys whose values must be finite; the range checks alone let infinity through.
_FINITE_KEYS = (
    "lambda_g",
    "lambda_d",
    "learning_rate_g",
    "learning_rate_d",
    "fd_step",
    "evolution_time",
    "init_scale",
    "max_step",
)


def _check_range(key: str, value: object, ok: bool) -> None:  # noqa: FBT001
    if not ok:
        raise ConfigValueError(key, f"value {value!r} is out of range")


@dataclass(frozen=True)
class RunSpec:
    """One (method, lambda, seed) combination of an experiment."""

    method: str
    lambda_label: str
    training: TrainingConfig

    @property
    def seed(self) -> int:
        """Seed of this run."""
        return self.training.seed

    @property
    def method_label(self) -> str:
        """Key this run is aggregated under in the compare report."""
        if self.method == METHOD_CLASSICAL:
            return METHOD_CLASSICAL
        return f"{METHOD_QGAN}_lambda_{self.lambda_label}"

    @property
    def history_filename(self) -> str:
        """``<method>_<lambda>_<seed>.csv``."""
        return f"{self.method}_{self.lambda_label}_{self.seed}.csv"


def format_lambda(value: float) -> str:
    """Shortest stable text for a lambda value, e.g. ``0`` or ``0.5``."""
    return format(value, "g")


@dataclass(frozen=True)
class ExperimentConfig:
    """A full experiment: training settings plus what to sweep and where to write.

    Attributes:
        training: Base training settings; ``seed`` is replaced per run.
        dataset: Where the target distribution comes from.
        methods: Model families to run, in order.
        lambda_sweep: Enhancement weights to sweep; empty means the single
            ``lambda_g``/``lambda_d`` pair of ``training``.
        seeds: Seeds to run every combination with.
        output_dir: Directory for history files and the report.
        workers: Number of runs to execute in parallel.
    """

    training: TrainingConfig
    dataset: DatasetSpec
    methods: tuple[str, ...] = (METHOD_CLASSICAL, METHOD_QGAN)
    lambda_sweep: tuple[float, ...] = ()
    seeds: tuple[int, ...] = (1,)
    output_dir: Path = field(default_factory=lambda: Path("results"))
    workers: int = 1

    def __post_init__(self) -> None:
        """Check the sweep lists."""
        if not self.seeds:
            raise ConfigValueError("seeds", "at least one seed is required")
        if not self.methods:
            raise ConfigValueError("methods", "at least one method is required")
        if self.workers < 1:
            raise ConfigValueError("workers", f"value {self.workers!r} is out of range")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigValueError("seeds", "seeds must be distinct")
        for lam in self.lambda_sweep:
            _check_range("lambda_sweep", lam, math.isfinite(lam) and lam >= 0)
        # Runs are named by the formatted value, so 0 and 0.0 collide.
        labels = [format_lambda(lam) for lam in self.lambda_sweep]
        if len(set(labels)) != len(labels):
            raise ConfigValueError("lambda_sweep", f"repeated values in {labels}")

    def run_specs(self) -> Iterator[RunSpec]:
        """Expand into one run per (method, lambda, seed), in a fixed order."""
        for method in self.methods:
            if method == METHOD_CLASSICAL:
                lambdas: list[tuple[str, TrainingConfig]] = [("none", self.training)]
            elif self.lambda_sweep:
                lambdas = [
                    (format_lambda(lam), replace(self.training, lambda_g=lam, lambda_d=lam))
                    for lam in self.lambda_sweep
                ]
            else:
                lambdas = [(format_lambda(self.training.lambda_g), self.training)]
            for label, training in lambdas:
                for seed in self.seeds:
                    yield RunSpec(method, label, replace(training, seed=seed))


def _coerce(key: str, raw: str, line_number: int) -> object:
    prop = config_jsonschema["properties"][key]
    kind = prop["type"]
    kind = next(k for k in kind if k != "null") if isinstance(kind, list) else kind
    if kind == "array":
        item_kind = prop["items"]["type"]
        item_kind = (
            next(k for k in item_kind if k != "null") if isinstance(item_kind, list) else item_kind
        )
        items = [item.strip() for item in raw.split(",")]
        if any(not item for item in items):
            raise ConfigSyntaxError(line_number, f"empty list item in '{key}'")
        return [_coerce_scalar(key, item_kind, item) for item in items]
    return _coerce_scalar(key, kind, raw)


def _coerce_scalar(key: str, kind: str, raw: str) -> object:
    try:
        if kind == "integer":
            return int(raw, 10)
        if kind == "number":
            return float(raw)
    except ValueError:
        raise ConfigValueError(key, f"'{raw}' is not a valid {kind}") from None
    return raw


def read_config_file(path: Path) -> dict[str, t.Any]:
    """Parse a flat ``key = value`` file into raw, typed values.

    Raises:
        ArtifactIOError: If the file cannot be read.
        ConfigSyntaxError: On a malformed, duplicate or undecodable line.
        UnknownConfigKeyError: On a key outside the schema.
        ConfigValueError: If a value does not parse as its schema type.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        msg = f"cannot read config {path}: {exc}"
        raise ArtifactIOError(msg) from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line_number = data.count(b"\n", 0, exc.start) + 1
        raise ConfigSyntaxError(line_number, "not valid UTF-8 text") from None
    raw: dict[str, t.Any] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        key, sep, value = content.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigSyntaxError(line_number, "expected 'key = value'")
        if not value:
            raise ConfigSyntaxError(line_number, f"missing value for '{key}'")
        if key not in config_jsonschema["properties"]:
            raise UnknownConfigKeyError(key, line_number)
        if key in raw:
            raise ConfigSyntaxError(line_number, f"duplicate key '{key}'")
        raw[key] = _coerce(key, value, line_number)
    return raw


def apply_defaults(raw: dict[str, t.Any]) -> dict[str, t.Any]:
    """Return ``raw`` with schema defaults filled in for absent keys."""
    merged = dict(raw)
    for key, prop in config_jsonschema["properties"].items():
        if key not in merged and "default" in prop:
            merged[key] = prop["default"]
    return merged


def validate_config(values: dict[str, t.Any]) -> None:
    """Check values against the config schema.

    Raises:
        ConfigValueError: Naming the first offending key.
    """
    errors = sorted(_validator.iter_errors(values), key=lambda e: list(e.absolute_path))
    if not errors:
        return
    first = errors[0]
    key = str(first.absolute_path[0]) if first.absolute_path else "config"
    error = ConfigValueError(key, first.message)
    error.errors = [e.message for e in errors]
    raise error


def build_config(
    values: dict[str, t.Any],
    *,
    base_dir: Path | None = None,
) -> ExperimentConfig:
    """Validate raw values, apply defaults and build an ``ExperimentConfig``.

    Args:
        values: Typed key/value pairs, e.g. from ``read_config_file``.
        base_dir: Directory relative dataset paths are resolved against.

    Returns:
        The experiment configuration.
    """
    merged = apply_defaults(values)
    validate_config(merged)
    if ("target" in merged) == ("dataset" in merged):
        raise ConfigValueError("target", "set exactly one of 'target' or 'dataset'")
    n_qubits = merged["n_qubits"]
    if "target" in merged:
        dataset = DatasetSpec(n_qubits=n_qubits, probabilities=tuple(merged["target"]))
    else:
        path = Path(merged["dataset"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        dataset = DatasetSpec(n_qubits=n_qubits, path=path)
    training = TrainingConfig(
        n_qubits=n_qubits,
        generator_ansatz=tuple(merged["generator_ansatz"]),
        discriminator_ansatz=tuple(merged["discriminator_ansatz"]),
        enhancement=merged["enhancement"],
        lambda_g=merged["lambda_g"],
        lambda_d=merged["lambda_d"],
        objective_mode=ObjectiveMode(merged["objective_mode"]),
        generator_output=GeneratorOutput(merged["generator_output"]),
        learning_rate_g=merged["learning_rate_g"],
        learning_rate_d=merged["learning_rate_d"],
        fd_step=merged["fd_step"],
        max_iterations=merged["max_iterations"],
        d_steps_per_g_step=merged["d_steps_per_g_step"],
        epsilon=merged["epsilon"],
        patience=merged["patience"],
        seed=merged["seeds"][0],
        evolution_time=merged["evolution_time"],
        init_scale=merged["init_scale"],
        max_step=merged["max_step"],
    )
    return ExperimentConfig(
        training=training,
        dataset=dataset,
        methods=tuple(merged["methods"]),
        lambda_sweep=tuple(merged["lambda_sweep"]),
        seeds=tuple(merged["seeds"]),
        output_dir=Path(merged["output_dir"]),
        workers=merged["workers"],
    )


def parse_config(path: Path | str) -> ExperimentConfig:
    """Read, validate and default an experiment config file."""
    path = Path(path)
    return build_config(read_config_file(path), base_dir=path.parent)
