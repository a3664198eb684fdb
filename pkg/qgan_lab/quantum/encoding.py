"""Classical data to quantum states.

A discrete distribution ``p`` over ``2^n`` outcomes is encoded as the mixture
``sum_i p_i |i><i|`` of computational basis states.
"""

from __future__ import annotations

import typing as t
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import numpy.typing as npt

from qgan_lab.exceptions import (
    ArtifactIOError,
    DatasetParseError,
    DatasetRangeError,
    DataError,
    NormalizationError,
)
from qgan_lab.quantum.core import DERIVED_TOL, DensityMatrix, check_qubits

if t.TYPE_CHECKING:
    from collections.abc import Sequence


@dataclass(frozen=True)
class ProbabilityVector:
    """Nonnegative weights over ``2^n`` outcomes that sum to one.

    Attributes:
        probs: Read-only float array of length ``2^n``.
    """

    probs: npt.NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        """Freeze the array and check length, sign and normalization."""
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size < 2 or probs.size & (probs.size - 1):  # noqa: PLR2004
            msg = f"probability vector length must be a power of two >= 2, got {probs.size}"
            raise DatasetRangeError(msg)
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            msg = "probabilities must be finite and nonnegative"
            raise NormalizationError(msg)
        total = float(np.sum(probs))
        if abs(total - 1) > DERIVED_TOL:
            msg = f"probabilities sum to {total:.12g}, expected 1"
            raise NormalizationError(msg)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def n_qubits(self) -> int:
        """Number of qubits needed to index every outcome."""
        return self.probs.size.bit_length() - 1

    def __len__(self) -> int:
        return self.probs.size

    def __repr__(self) -> str:
        return f"ProbabilityVector({self.probs.tolist()})"


@dataclass(frozen=True)
class DatasetSpec:
    """Where a target distribution comes from.

    Exactly one of ``probabilities`` and ``path`` is set.

    Attributes:
        n_qubits: Number of qubits, fixing the outcome count ``2^n``.
        probabilities: Inline target probabilities.
        path: Sample file with one outcome index per line.
    """

    n_qubits: int
    probabilities: tuple[float, ...] | None = None
    path: Path | None = None

    def __post_init__(self) -> None:
        """Check that exactly one source is given."""
        if (self.probabilities is None) == (self.path is None):
            msg = "a dataset needs exactly one of inline probabilities or a sample path"
            raise DataError(msg)


def empirical_distribution(samples: Sequence[int], n_qubits: int) -> ProbabilityVector:
    """Normalized histogram of outcome indices.

    Raises:
        DataError: If ``samples`` is empty.
        DatasetRangeError: If a sample falls outside ``[0, 2^n)``.
    """
    dim = 2 ** check_qubits(n_qubits)
    values = np.asarray(samples, dtype=np.int64)
    if values.size == 0:
        msg = "cannot estimate a distribution from zero samples"
        raise DataError(msg)
    bad = values[(values < 0) | (values >= dim)]
    if bad.size:
        msg = f"sample {int(bad[0])} out of range [0, {dim})"
        raise DatasetRangeError(msg)
    counts = np.bincount(values, minlength=dim)
    return ProbabilityVector(counts / values.size)


def encode_distribution(p: ProbabilityVector) -> DensityMatrix:
    """Return the diagonal state ``sum_i p_i |i><i|``."""
    return DensityMatrix(np.diag(p.probs).astype(np.complex128))


def sample_outcomes(p: ProbabilityVector, n_samples: int, seed: int) -> npt.NDArray[np.int64]:
    """Draw ``n_samples`` outcome indices from ``p`` with a seeded generator."""
    rng = np.random.default_rng(seed)
    return rng.choice(len(p), size=n_samples, p=p.probs)


def _read_samples(path: Path) -> list[int]:
    try:
        data = path.read_bytes()
    except OSError as exc:
        msg = f"cannot read sample file {path}: {exc}"
        raise ArtifactIOError(msg) from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line_number = data.count(b"\n", 0, exc.start) + 1
        raise DatasetParseError(line_number, "not valid UTF-8 text") from None
    samples = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        token = line.strip()
        if not token:
            raise DatasetParseError(line_number, "empty line")
        try:
            value = int(token, 10)
        except ValueError:
            raise DatasetParseError(line_number, f"'{token}' is not an integer") from None
        if value < 0:
            raise DatasetParseError(line_number, f"{value} is negative")
        samples.append(value)
    return samples


def load_dataset(spec: DatasetSpec) -> ProbabilityVector:
    """Resolve a dataset spec to the target distribution.

    Raises:
        ArtifactIOError: If the sample file cannot be read.
        DatasetParseError: If a line is not UTF-8 text or not a nonnegative integer.
        DatasetRangeError: On length or range violations.
        NormalizationError: If inline probabilities do not sum to one.
    """
    dim = 2 ** check_qubits(spec.n_qubits)
    if spec.probabilities is not None:
        if len(spec.probabilities) != dim:
            msg = f"inline target has {len(spec.probabilities)} entries, expected {dim}"
            raise DatasetRangeError(msg)
        return ProbabilityVector(np.asarray(spec.probabilities, dtype=float))
    return empirical_distribution(_read_samples(Path(spec.path)), spec.n_qubits)
