"""Closed-form model of the Grover rotation in the plane spanned by |A> and |B>.

Everything here is oracle-free: the functions only depend on ``N = 2**n``
and the number of marked items ``a``, and serve as ground truth for the
state-vector simulations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateAngleError, NoSolutionsError, ParameterError

MAX_QUBITS = 30
ROUND_GUARD = 1e-9


@dataclass(frozen=True)
class RotationModel:
    """Two-dimensional description of Grover dynamics.

    Attributes:
        n: number of qubits.
        N: domain size ``2**n``.
        a: number of marked items.
        theta_a: half rotation angle ``arcsin(sqrt(a / N))`` in radians.
    """

    n: int
    N: int
    a: int
    theta_a: float

    @property
    def b(self) -> int:
        return self.N - self.a

    @property
    def degenerate(self) -> bool:
        return self.a == 0 or self.a == self.N


def make_model(n: int, a: int) -> RotationModel:
    if not isinstance(n, (int,)) or isinstance(n, bool) or not 1 <= n <= MAX_QUBITS:
        raise ParameterError(f"qubit count must be an integer in [1, {MAX_QUBITS}], got {n!r}")
    N = 1 << n
    if not isinstance(a, int) or isinstance(a, bool) or not 0 <= a <= N:
        raise ParameterError(f"marked count must be an integer in [0, {N}], got {a!r}")
    if a == N:
        theta = math.pi / 2
    else:
        theta = math.asin(math.sqrt(a / N))
    return RotationModel(n=n, N=N, a=a, theta_a=theta)


def success_prob(model: RotationModel, k: int) -> float:
    """Probability of measuring a marked item after ``k`` Grover iterations."""
    if k < 0:
        raise ParameterError(f"iteration count must be non-negative, got {k}")
    if model.a == 0:
        return 0.0
    if model.a == model.N:
        return 1.0
    return math.sin((2 * k + 1) * model.theta_a) ** 2


def optimal_k(model: RotationModel) -> int:
    """Iteration count putting (2k+1)*theta_a nearest to pi/2.

    ``(pi/2 - theta_a) / (2 theta_a)`` rounded to the nearest integer, ties
    toward the smaller count. Then ``|pi/2 - (2k+1) theta_a| <= theta_a``,
    so the success probability is at least ``1 - a/N``. (Plain flooring
    does not give that bound: for n=3, a=1 it leaves 0.78 < 7/8.)
    """
    if model.a == 0:
        raise NoSolutionsError("no marked items: the optimal iteration count is undefined")
    if model.a == model.N:
        return 0
    return iterations_for_angle(model.theta_a)


def iterations_for_angle(theta: float) -> int:
    """Nearest integer to (pi/2 - theta) / (2 theta), ties down, for 0 < theta <= pi/2."""
    x = (math.pi / 2 - theta) / (2 * theta)
    return int(math.floor(x + 0.5 - ROUND_GUARD))


def _require_nondegenerate(model: RotationModel) -> None:
    if model.degenerate:
        raise DegenerateAngleError(
            f"a={model.a} of N={model.N} makes sin(2*theta_a) vanish"
        )


def p_m(model: RotationModel, m: int) -> float:
    """Success probability when k is drawn uniformly from {0, ..., m-1}.

    Equal to ``1/2 - sin(4 m theta) / (4 m sin(2 theta))``.
    """
    _require_nondegenerate(model)
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m!r}")
    m = int(m)
    theta = model.theta_a
    return 0.5 - math.sin(4 * m * theta) / (4 * m * math.sin(2 * theta))


def critical_m(model: RotationModel) -> float:
    """Schedule bound ``1/sin(2 theta_a)`` beyond which ``p_m >= 1/4``."""
    _require_nondegenerate(model)
    return 1.0 / math.sin(2 * model.theta_a)
