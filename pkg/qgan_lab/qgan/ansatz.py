"""Named Pauli-term sets for the generator, discriminator and enhancement."""

from __future__ import annotations

import typing as t
from itertools import combinations

from qgan_lab.exceptions import SpecError
from qgan_lab.quantum.core import PauliString, check_qubits

if t.TYPE_CHECKING:
    from collections.abc import Callable, Sequence


def default_ansatz(n_qubits: int) -> tuple[PauliString, ...]:
    """``X_q`` and ``Z_q`` on every qubit, then nearest-neighbour ``Z_q Z_(q+1)``."""
    check_qubits(n_qubits)
    local = [
        PauliString.on_qubits(n_qubits, {q: op}) for q in range(n_qubits) for op in "XZ"
    ]
    coupling = [
        PauliString.on_qubits(n_qubits, {q: "Z", q + 1: "Z"}) for q in range(n_qubits - 1)
    ]
    return (*local, *coupling)


def local_xyz_ansatz(n_qubits: int) -> tuple[PauliString, ...]:
    """``X_q``, ``Y_q`` and ``Z_q`` on every qubit."""
    check_qubits(n_qubits)
    return tuple(
        PauliString.on_qubits(n_qubits, {q: op}) for q in range(n_qubits) for op in "XYZ"
    )


def default_enhancement(n_qubits: int) -> tuple[PauliString, ...]:
    """Entangling ``X_q X_q' + Y_q Y_q'`` over every qubit pair; empty for one qubit."""
    check_qubits(n_qubits)
    return tuple(
        PauliString.on_qubits(n_qubits, {q: op, r: op})
        for q, r in combinations(range(n_qubits), 2)
        for op in "XY"
    )


def no_enhancement(n_qubits: int) -> tuple[PauliString, ...]:
    """No enhancement term."""
    check_qubits(n_qubits)
    return ()


ANSATZ_SETS: dict[str, Callable[[int], tuple[PauliString, ...]]] = {
    "default": default_ansatz,
    "local_xyz": local_xyz_ansatz,
}

ENHANCEMENT_SETS: dict[str, Callable[[int], tuple[PauliString, ...]]] = {
    "default": default_enhancement,
    "none": no_enhancement,
}


def resolve_ansatz(names: Sequence[str], n_qubits: int) -> tuple[PauliString, ...]:
    """Turn a config ansatz entry into Pauli strings.

    Args:
        names: Either a single set name from ``ANSATZ_SETS`` or explicit
            Pauli labels of length ``n_qubits``.
        n_qubits: Number of qubits.

    Returns:
        The trainable Pauli strings in coefficient order.

    Raises:
        SpecError: On an empty entry, a bad label or a label of the wrong length.
    """
    if not names:
        msg = "ansatz is empty"
        raise SpecError(msg)
    if len(names) == 1 and names[0].lower() in ANSATZ_SETS:
        return ANSATZ_SETS[names[0].lower()](n_qubits)
    paulis = tuple(PauliString(name) for name in names)
    for pauli in paulis:
        if pauli.n_qubits != n_qubits:
            msg = f"ansatz term '{pauli}' does not act on {n_qubits} qubits"
            raise SpecError(msg)
    return paulis


def resolve_enhancement(name: str, n_qubits: int) -> tuple[PauliString, ...]:
    """Look up a named enhancement term set."""
    try:
        return ENHANCEMENT_SETS[name.lower()](n_qubits)
    except KeyError:
        msg = f"unknown enhancement '{name}', expected one of {sorted(ENHANCEMENT_SETS)}"
        raise SpecError(msg) from None
