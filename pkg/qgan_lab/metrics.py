"""Distribution metrics, the convergence statistic and the compare report."""

from __future__ import annotations

import statistics
import typing as t
from dataclasses import asdict, dataclass

import numpy as np
from singer_sdk import typing as th

from qgan_lab.exceptions import ContractError, DimensionError

if t.TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from qgan_lab.quantum.encoding import ProbabilityVector
    from qgan_lab.trainers.base_trainer import TrainingResult

KL_FLOOR = 1e-12

ARCHITECTURE_NOTE = (
    "Iteration counts are relative to the classical baseline chosen here "
    "(softmax generator, logistic discriminator, exact expectation losses); "
    "a different classical architecture would give different counts."
)


def _require_same_length(p: ProbabilityVector, q: ProbabilityVector) -> None:
    if len(p) != len(q):
        msg = f"length mismatch: {len(p)} vs {len(q)}"
        raise DimensionError(msg)


def tv_distance(p: ProbabilityVector, q: ProbabilityVector) -> float:
    """Total variation distance ``1/2 sum |p_i - q_i|``."""
    _require_same_length(p, q)
    return float(min(0.5 * np.sum(np.abs(p.probs - q.probs)), 1.0))


def kl_divergence(p: ProbabilityVector, q: ProbabilityVector) -> float:
    """``KL(p || q)`` with ``q`` floored at 1e-12 and ``0 log 0 = 0``."""
    _require_same_length(p, q)
    support = p.probs > 0
    ratio = p.probs[support] / np.maximum(q.probs[support], KL_FLOOR)
    return float(max(np.sum(p.probs[support] * np.log(ratio)), 0.0))


def iterations_to_convergence(history: Sequence[float], epsilon: float, k: int) -> int | None:
    """First 1-based iteration closing a run of ``k`` values below ``epsilon``.

    Returns:
        The iteration number, or None if no such window exists.
    """
    if k < 1:
        msg = f"window length must be >= 1, got {k}"
        raise ContractError(msg)
    streak = 0
    for i, value in enumerate(history, start=1):
        streak = streak + 1 if value < epsilon else 0
        if streak >= k:
            return i
    return None


def median_or_none(values: Sequence[float]) -> float | None:
    """Median of ``values``; mean of the central pair for even lengths."""
    return statistics.median(values) if values else None


@dataclass(frozen=True)
class MethodSummary:
    """Per-method aggregate over seeds."""

    seeds: list[int]
    iterations_to_convergence: list[int | None]
    median_iterations: float | None
    converged_fraction: float
    final_tv: list[float]
    final_fidelity: list[float]
    final_kl: list[float]
    errors: list[str | None]
    wall_time_ms: list[float]
    median_wall_time_ms: float | None


@dataclass(frozen=True)
class CompareReport:
    """Convergence-speed comparison across model families.

    Attributes:
        methods: Summary per method label, e.g. ``classical`` or
            ``qgan_lambda_0.5``.
        speedup: For every quantum method, classical median iterations
            divided by that method's median; None when either is None.
        note: How to read the iteration counts.
    """

    methods: dict[str, MethodSummary]
    speedup: dict[str, float | None]
    note: str = ARCHITECTURE_NOTE

    def to_dict(self) -> dict[str, t.Any]:
        """Plain-data form, as written to ``report.json``."""
        return asdict(self)


def _summarize(runs: Sequence[tuple[int, TrainingResult]]) -> MethodSummary:
    counts = [result.iterations_to_convergence for _, result in runs]
    converged = [c for c, (_, r) in zip(counts, runs) if r.converged and c is not None]
    return MethodSummary(
        seeds=[seed for seed, _ in runs],
        iterations_to_convergence=counts,
        median_iterations=median_or_none(converged),
        converged_fraction=len(converged) / len(runs),
        final_tv=[result.final_tv for _, result in runs],
        final_fidelity=[result.final_fidelity for _, result in runs],
        final_kl=[result.final_kl for _, result in runs],
        errors=[result.error for _, result in runs],
        wall_time_ms=[result.wall_time_ms for _, result in runs],
        median_wall_time_ms=median_or_none(
            [result.wall_time_ms for _, result in runs if result.converged],
        ),
    )


def build_compare_report(
    results: Mapping[str, Sequence[tuple[int, TrainingResult]]],
) -> CompareReport:
    """Aggregate per-method, per-seed results.

    Args:
        results: ``(seed, result)`` pairs keyed by method label. The label
            ``classical`` is the baseline for the speedup ratios.

    Returns:
        The report.

    Raises:
        ContractError: If there are no methods or a method has no runs.
    """
    if not results:
        msg = "cannot build a report without methods"
        raise ContractError(msg)
    methods = {}
    for label, runs in results.items():
        if not runs:
            msg = f"method '{label}' has no runs"
            raise ContractError(msg)
        methods[label] = _summarize(runs)
    baseline = methods.get("classical")
    speedup: dict[str, float | None] = {}
    for label, summary in methods.items():
        if label == "classical":
            continue
        if baseline is None or baseline.median_iterations is None or not summary.median_iterations:
            speedup[label] = None
        else:
            speedup[label] = baseline.median_iterations / summary.median_iterations
    return CompareReport(methods=methods, speedup=speedup)


report_jsonschema = th.PropertiesList(
    th.Property(
        "methods",
        th.ObjectType(
            additional_properties=th.ObjectType(
                th.Property("seeds", th.ArrayType(th.IntegerType), required=True),
                th.Property(
                    "iterations_to_convergence",
                    th.ArrayType(th.IntegerType),
                    required=True,
                ),
                th.Property("median_iterations", th.NumberType, required=True),
                th.Property("converged_fraction", th.NumberType, required=True),
                th.Property("final_tv", th.ArrayType(th.NumberType), required=True),
                th.Property("final_fidelity", th.ArrayType(th.NumberType), required=True),
                th.Property("final_kl", th.ArrayType(th.NumberType), required=True),
                th.Property("errors", th.ArrayType(th.StringType), required=True),
                th.Property("wall_time_ms", th.ArrayType(th.NumberType), required=True),
                th.Property("median_wall_time_ms", th.NumberType, required=True),
            ),
        ),
        required=True,
    ),
    th.Property("speedup", th.ObjectType(additional_properties=th.NumberType()), required=True),
    th.Property("note", th.StringType, required=True),
).to_dict()

# Per-seed lists and speedups may hold nulls.
_summary_schema = report_jsonschema["properties"]["methods"]["additionalProperties"]
for _key in ("iterations_to_convergence", "final_tv", "final_fidelity", "final_kl", "errors"):
    _items = _summary_schema["properties"][_key]["items"]
    _kinds = _items["type"] if isinstance(_items["type"], list) else [_items["type"]]
    _items["type"] = [*_kinds, "null"]
for _key in ("median_iterations", "median_wall_time_ms"):
    _summary_schema["properties"][_key]["type"] = ["number", "null"]
report_jsonschema["properties"]["speedup"]["additionalProperties"] = {"type": ["number", "null"]}
