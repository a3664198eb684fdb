"""Tests for the flat config parser, schema validation and run expansion."""

from __future__ import annotations

import math
from pathlib import Path

import pytest
from singer_sdk.exceptions import ConfigValidationError

from qgan_lab.config import (
    ExperimentConfig,
    TrainingConfig,
    build_config,
    format_lambda,
    parse_config,
    read_config_file,
)
from qgan_lab.exceptions import (
    ArtifactIOError,
    ConfigSyntaxError,
    ConfigValueError,
    UnknownConfigKeyError,
)
from qgan_lab.qgan.models import GeneratorOutput, ObjectiveMode
from qgan_lab.quantum.encoding import DatasetSpec

MINIMAL = "n_qubits = 1\ntarget = 0.75, 0.25\n"


class TestParseConfig:
    def test_minimal_file_gets_defaults(self, write_config):
        config = parse_config(write_config(MINIMAL))
        training = config.training
        assert config.dataset.probabilities == (0.75, 0.25)
        assert config.methods == ("classical", "qgan")
        assert config.lambda_sweep == ()
        assert config.seeds == (1,)
        assert config.output_dir == Path("results")
        assert config.workers == 1
        assert training.generator_ansatz == ("default",)
        assert training.objective_mode is ObjectiveMode.PROBABILISTIC
        assert training.learning_rate_g == training.learning_rate_d == 0.05
        assert training.fd_step == 1e-4
        assert training.max_iterations == 5000
        assert training.d_steps_per_g_step == 1
        assert training.epsilon == 0.01
        assert training.patience == 10
        assert training.init_scale == 0.1
        assert training.evolution_time == 1.0
        assert training.generator_output is GeneratorOutput.SAMPLES
        assert training.max_step == 0.1

    def test_comments_blank_lines_and_lists(self, write_config):
        path = write_config(
            "# experiment\n"
            "\n"
            "n_qubits = 2   # two qubits\n"
            "target = 0.5, 0, 0, 0.5\n"
            "methods = qgan\n"
            "generator_ansatz = XI, IX, ZZ\n"
            "seeds = 1, 2, 18446744073709551615\n"
            "objective_mode = literal\n",
        )
        config = parse_config(path)
        assert config.methods == ("qgan",)
        assert config.training.generator_ansatz == ("XI", "IX", "ZZ")
        assert config.seeds == (1, 2, 2**64 - 1)
        assert config.training.objective_mode is ObjectiveMode.LITERAL

    def test_epsilon_out_of_range_names_key(self, write_config):
        with pytest.raises(ConfigValueError, match="epsilon") as excinfo:
            parse_config(write_config(MINIMAL + "epsilon = 1.5\n"))
        assert excinfo.value.key == "epsilon"

    def test_unknown_key(self, write_config):
        with pytest.raises(UnknownConfigKeyError) as excinfo:
            parse_config(write_config(MINIMAL + "temperature = 3\n"))
        assert excinfo.value.key == "temperature"
        assert excinfo.value.line_number == 3

    def test_syntax_error_carries_line_number(self, write_config):
        with pytest.raises(ConfigSyntaxError, match="line 2") as excinfo:
            parse_config(write_config("n_qubits = 1\ntarget 0.75 0.25\n"))
        assert excinfo.value.line_number == 2

    def test_duplicate_key(self, write_config):
        with pytest.raises(ConfigSyntaxError):
            parse_config(write_config(MINIMAL + "n_qubits = 2\n"))

    def test_value_of_wrong_type(self, write_config):
        with pytest.raises(ConfigValueError, match="n_qubits"):
            parse_config(write_config("n_qubits = one\ntarget = 0.75, 0.25\n"))

    def test_unknown_method(self, write_config):
        with pytest.raises(ConfigValueError, match="methods"):
            parse_config(write_config(MINIMAL + "methods = classical, gan\n"))

    def test_too_many_qubits(self, write_config):
        with pytest.raises(ConfigValueError, match="n_qubits"):
            parse_config(write_config("n_qubits = 11\ntarget = 0.5, 0.5\n"))

    def test_needs_exactly_one_target_source(self, write_config):
        with pytest.raises(ConfigValueError):
            parse_config(write_config("n_qubits = 1\n"))
        with pytest.raises(ConfigValueError):
            parse_config(write_config(MINIMAL + "dataset = samples.txt\n"))

    def test_dataset_path_is_relative_to_config(self, write_config, tmp_path):
        config = parse_config(write_config("n_qubits = 1\ndataset = samples.txt\n"))
        assert config.dataset.path == tmp_path / "samples.txt"

    def test_bad_ansatz_label(self, write_config):
        with pytest.raises(ConfigValueError, match="generator_ansatz"):
            parse_config(write_config(MINIMAL + "generator_ansatz = XX\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ArtifactIOError):
            read_config_file(tmp_path / "missing.cfg")


    def test_undecodable_bytes_carry_line_number(self, tmp_path):
        path = tmp_path / "experiment.cfg"
        path.write_bytes(b"n_qubits = 1\n\xff = 2\ntarget = 1, 0\n")
        with pytest.raises(ConfigSyntaxError, match="UTF-8") as excinfo:
            read_config_file(path)
        assert excinfo.value.line_number == 2

    def test_infinite_lambda_names_key(self, write_config):
        with pytest.raises(ConfigValueError) as excinfo:
            parse_config(write_config(MINIMAL + "lambda_g = inf\n"))
        assert excinfo.value.key == "lambda_g"

    def test_generator_output_and_step_bound(self, write_config):
        config = parse_config(write_config(MINIMAL + "generator_output = state\nmax_step = 0.5\n"))
        assert config.training.generator_output is GeneratorOutput.STATE
        assert config.training.max_step == 0.5

    def test_unknown_generator_output(self, write_config):
        with pytest.raises(ConfigValueError, match="generator_output"):
            parse_config(write_config(MINIMAL + "generator_output = amplitudes\n"))

    def test_errors_are_config_validation_errors(self, write_config):
        with pytest.raises(ConfigValidationError):
            parse_config(write_config(MINIMAL + "patience = 0\n"))


class TestTrainingConfig:
    @pytest.mark.parametrize(
        ("key", "value"),
        [
            ("epsilon", 0.0),
            ("fd_step", 0.2),
            ("learning_rate_g", 11.0),
            ("learning_rate_d", 0.0),
            ("max_iterations", 0),
            ("seed", -1),
            ("lambda_g", -0.5),
            ("lambda_g", math.inf),
            ("lambda_d", math.nan),
            ("learning_rate_g", math.inf),
            ("evolution_time", math.inf),
            ("max_step", 0.0),
            ("max_step", 10.5),
        ],
    )
    def test_range_checks(self, key, value):
        with pytest.raises(ConfigValueError) as excinfo:
            TrainingConfig(n_qubits=1, **{key: value})
        assert excinfo.value.key == key

    def test_unknown_enhancement(self):
        with pytest.raises(ConfigValueError, match="enhancement"):
            TrainingConfig(n_qubits=2, enhancement="dense")


class TestRunSpecs:
    def _config(self, **kwargs) -> ExperimentConfig:
        return build_config({"n_qubits": 1, "target": [0.75, 0.25], **kwargs})

    def test_lambda_sweep_gives_two_qgan_runs_per_seed(self):
        runs = list(self._config(methods=["qgan"], lambda_sweep=[0.0, 0.5], seeds=[1, 2]).run_specs())
        assert [(r.lambda_label, r.seed) for r in runs] == [("0", 1), ("0", 2), ("0.5", 1), ("0.5", 2)]
        assert [r.training.lambda_g for r in runs] == [0.0, 0.0, 0.5, 0.5]
        assert [r.training.lambda_d for r in runs] == [0.0, 0.0, 0.5, 0.5]

    def test_full_sweep_order_and_names(self):
        runs = list(self._config(lambda_sweep=[0.0, 0.5], seeds=[1, 2, 3]).run_specs())
        assert len(runs) == 9
        assert runs[0].history_filename == "classical_none_1.csv"
        assert runs[0].method_label == "classical"
        assert runs[3].history_filename == "qgan_0_1.csv"
        assert runs[-1].history_filename == "qgan_0.5_3.csv"
        assert runs[-1].method_label == "qgan_lambda_0.5"

    def test_without_sweep_uses_lambda_g(self):
        runs = list(self._config(methods=["qgan"], lambda_g=0.25).run_specs())
        assert [r.lambda_label for r in runs] == ["0.25"]

    def test_format_lambda(self):
        assert format_lambda(0.0) == "0"
        assert format_lambda(1.0) == "1"
        assert format_lambda(0.125) == "0.125"

    def test_empty_seeds(self):
        with pytest.raises(ConfigValueError):
            ExperimentConfig(
                training=TrainingConfig(n_qubits=1),
                dataset=DatasetSpec(n_qubits=1, probabilities=(1.0, 0.0)),
                seeds=(),
            )

    @pytest.mark.parametrize("sweep", [[0.0, 0.0], [0, 0.0], [0.5, 0.25, 0.5]])
    def test_repeated_lambda_values(self, sweep):
        with pytest.raises(ConfigValueError) as excinfo:
            self._config(lambda_sweep=sweep)
        assert excinfo.value.key == "lambda_sweep"

    def test_infinite_lambda_in_sweep(self):
        with pytest.raises(ConfigValueError, match="lambda_sweep"):
            ExperimentConfig(
                training=TrainingConfig(n_qubits=1),
                dataset=DatasetSpec(n_qubits=1, probabilities=(1.0, 0.0)),
                lambda_sweep=(0.0, math.inf),
            )

    def test_repeated_seeds(self):
        with pytest.raises(ConfigValueError) as excinfo:
            self._config(seeds=[1, 2, 1])
        assert excinfo.value.key == "seeds"
