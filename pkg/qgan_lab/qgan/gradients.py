"""Central finite-difference gradients."""

from __future__ import annotations

import typing as t

import numpy as np
import numpy.typing as npt

from qgan_lab.exceptions import ContractError, NumericError

if t.TYPE_CHECKING:
    from collections.abc import Callable

Vector = npt.NDArray[np.float64]


def fd_gradient(f: Callable[[Vector], float], theta: npt.ArrayLike, h: float) -> Vector:
    """Estimate ``grad f(theta)`` by central differences.

    Coordinates are evaluated in index order, ``theta + h e_k`` before
    ``theta - h e_k``, so the result is reproducible bit-for-bit.

    Args:
        f: Real-valued function of a parameter vector.
        theta: Point to differentiate at.
        h: Step size, ``> 0``.

    Returns:
        The gradient estimate, same length as ``theta``.

    Raises:
        ContractError: If ``h`` is not positive.
        NumericError: If ``f`` is not finite at an evaluation point.
    """
    if not h > 0:
        msg = f"finite-difference step must be positive, got {h}"
        raise ContractError(msg)
    x0 = np.array(theta, dtype=float)
    grad = np.zeros_like(x0)
    for k in range(x0.size):
        x = x0.copy()
        x[k] = x0[k] + h
        f_plus = float(f(x))
        x[k] = x0[k] - h
        f_minus = float(f(x))
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            msg = f"objective is not finite when probing coordinate {k}"
            raise NumericError(msg)
        grad[k] = (f_plus - f_minus) / (2 * h)
    return grad


def bounded_step(step: npt.ArrayLike, max_norm: float) -> Vector:
    """Scale ``step`` down so its Euclidean norm is at most ``max_norm``.

    The direction is kept. Steps already within the bound are returned
    unchanged, bit for bit.

    Raises:
        ContractError: If ``max_norm`` is not positive.
    """
    if not max_norm > 0:
        msg = f"step bound must be positive, got {max_norm}"
        raise ContractError(msg)
    vector = np.array(step, dtype=float)
    norm = float(np.linalg.norm(vector))
    if norm <= max_norm:
        return vector
    return vector * (max_norm / norm)
