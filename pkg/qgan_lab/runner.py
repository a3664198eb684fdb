"""Experiment runner: sweeps, per-run history files and the compare report."""

from __future__ import annotations

import csv
import json
import logging
import typing as t
from concurrent.futures import ProcessPoolExecutor
from functools import cached_property
from pathlib import Path

import pendulum
from jsonschema import Draft7Validator

from qgan_lab.config import METHOD_CLASSICAL, ExperimentConfig, RunSpec
from qgan_lab.exceptions import (
    EXIT_IO,
    EXIT_NUMERIC,
    ArtifactIOError,
    NumericError,
    QganLabError,
)
from qgan_lab.metrics import build_compare_report, report_jsonschema
from qgan_lab.quantum.encoding import load_dataset
from qgan_lab.trainers.base_trainer import IterationRecord, TrainingResult
from qgan_lab.trainers.classical_trainer import train_classical
from qgan_lab.trainers.quantum_trainer import train

if t.TYPE_CHECKING:
    from collections.abc import Sequence

    from qgan_lab.metrics import CompareReport
    from qgan_lab.quantum.encoding import ProbabilityVector

HISTORY_HEADER = ("iteration", "loss_g", "loss_d", "tv", "fidelity", "wall_time_ms")
REPORT_FILENAME = "report.json"

EXIT_OK = 0


def format_float(value: float) -> str:
    """17 significant digits, enough to read back the identical double."""
    return format(value, ".17g")


def write_history(path: Path, history: Sequence[IterationRecord]) -> None:
    """Write a run's history as CSV.

    Raises:
        ArtifactIOError: If the file cannot be written.
    """
    try:
        with Path(path).open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(HISTORY_HEADER)
            for record in history:
                writer.writerow(
                    [
                        record.iteration,
                        format_float(record.loss_g),
                        format_float(record.loss_d),
                        format_float(record.tv_to_target),
                        format_float(record.fidelity_to_target),
                        format_float(record.wall_time_ms),
                    ],
                )
    except OSError as exc:
        msg = f"cannot write history {path}: {exc}"
        raise ArtifactIOError(msg) from exc


def read_history(path: Path) -> list[IterationRecord]:
    """Read a history CSV written by ``write_history``.

    Raises:
        ArtifactIOError: If the file cannot be read or has the wrong header.
    """
    try:
        with Path(path).open(encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        msg = f"cannot read history {path}: {exc}"
        raise ArtifactIOError(msg) from exc
    if not rows or tuple(rows[0]) != HISTORY_HEADER:
        msg = f"{path} does not start with the history header"
        raise ArtifactIOError(msg)
    return [
        IterationRecord(
            iteration=int(row[0]),
            loss_g=float(row[1]),
            loss_d=float(row[2]),
            tv_to_target=float(row[3]),
            fidelity_to_target=float(row[4]),
            wall_time_ms=float(row[5]),
        )
        for row in rows[1:]
    ]


def train_run(run: RunSpec, target: ProbabilityVector) -> TrainingResult:
    """Train one (method, lambda, seed) combination."""
    if run.method == METHOD_CLASSICAL:
        return train_classical(run.training, target)
    return train(run.training, target)


def write_report(path: Path, report: CompareReport) -> None:
    """Validate the report against its schema and write it as sorted JSON.

    Raises:
        ArtifactIOError: If the file cannot be written.
    """
    payload = report.to_dict()
    Draft7Validator(report_jsonschema).validate(payload)
    try:
        Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    except OSError as exc:
        msg = f"cannot write report {path}: {exc}"
        raise ArtifactIOError(msg) from exc


class ExperimentRunner:
    """Runs every combination of an experiment and writes its artifacts."""

    def __init__(self, config: ExperimentConfig) -> None:
        """Create a runner for ``config``."""
        self.config = config

    @cached_property
    def logger(self) -> logging.Logger:
        """Logger for the runner."""
        return logging.getLogger(__name__)

    @cached_property
    def target(self) -> ProbabilityVector:
        """The experiment's target distribution."""
        return load_dataset(self.config.dataset)

    def _prepare_output_dir(self) -> Path:
        output_dir = self.config.output_dir
        try:
            output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            msg = f"cannot create output directory {output_dir}: {exc}"
            raise ArtifactIOError(msg) from exc
        return output_dir

    def _train_all(self, runs: Sequence[RunSpec]) -> list[TrainingResult]:
        target = self.target
        if self.config.workers == 1:
            return [train_run(run, target) for run in runs]
        with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
            return list(pool.map(train_run, runs, [target] * len(runs)))

    def run_one(self, method: str) -> tuple[RunSpec, TrainingResult]:
        """Train the first run of ``method`` and write its history file.

        Raises:
            QganLabError: If ``method`` is not configured.
        """
        runs = [run for run in self.config.run_specs() if run.method == method]
        if not runs:
            msg = f"method '{method}' is not part of this config"
            raise QganLabError(msg)
        run = runs[0]
        output_dir = self._prepare_output_dir()
        result = train_run(run, self.target)
        write_history(output_dir / run.history_filename, result.history)
        return run, result

    def compare(self) -> tuple[CompareReport, list[TrainingResult]]:
        """Run the full sweep, write every history file and ``report.json``."""
        output_dir = self._prepare_output_dir()
        runs = list(self.config.run_specs())
        started = pendulum.now()
        self.logger.info("Running %d training runs with %d worker(s)", len(runs), self.config.workers)
        results = self._train_all(runs)
        grouped: dict[str, list[tuple[int, TrainingResult]]] = {}
        for run, result in zip(runs, results):
            write_history(output_dir / run.history_filename, result.history)
            grouped.setdefault(run.method_label, []).append((run.seed, result))
        report = build_compare_report(grouped)
        write_report(output_dir / REPORT_FILENAME, report)
        self.logger.info(
            "Wrote %d history files and %s in %s",
            len(runs),
            REPORT_FILENAME,
            (pendulum.now() - started).in_words(),
        )
        return report, results


def exit_code_for(results: Sequence[TrainingResult]) -> int:
    """``EXIT_NUMERIC`` if any run aborted on a numeric error, else ``EXIT_OK``."""
    return EXIT_NUMERIC if any(result.error for result in results) else EXIT_OK


def run(config: ExperimentConfig) -> int:
    """Execute every (method, lambda, seed) combination of ``config``.

    Returns:
        0 on success, 2 if any run hit a numeric failure (the other runs are
        still written), 3 on an I/O failure.
    """
    runner = ExperimentRunner(config)
    try:
        _, results = runner.compare()
    except ArtifactIOError as exc:
        runner.logger.error("%s", exc)  # noqa: TRY400
        return EXIT_IO
    except NumericError as exc:
        runner.logger.error("%s", exc)  # noqa: TRY400
        return EXIT_NUMERIC
    return exit_code_for(results)
