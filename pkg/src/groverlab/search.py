"""Grover search with known and unknown solution counts, and a classical baseline."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analytic
from ._random import as_rng
from .errors import NoSolutionsError, ParameterError
from .sv import OracleSpec, StateVector, apply_grover_iteration, measure, uniform_state

DEFAULT_LAMBDA = 6 / 5
CLASSICAL_PROBES = 4


@dataclass(frozen=True)
class SearchParams:
    """Schedule parameters for the unknown-count search.

    ``max_m`` defaults to ``sqrt(N)`` of the oracle being searched.
    """

    lam: float = DEFAULT_LAMBDA
    max_m: float | None = None
    rng_seed: int | None = None

    def __post_init__(self):
        if not 1 < self.lam < 4 / 3:
            raise ParameterError(f"growth factor must lie in (1, 4/3), got {self.lam}")
        if self.max_m is not None and self.max_m < 1:
            raise ParameterError("schedule cap must be at least 1")


@dataclass(frozen=True)
class Loop:
    m: float | None
    k: int
    measured: int
    hit: bool

    def to_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "measured": self.measured, "hit": self.hit}


@dataclass
class SearchOutcome:
    """Result of one search run.

    ``total_queries`` counts Grover iterations (oracle queries); for the
    classical baseline it counts classical evaluations instead.
    ``evaluations`` counts classical membership checks in every mode.
    """

    found: int | None
    total_queries: int
    loops: list[Loop] = field(default_factory=list)
    evaluations: int = 0

    @property
    def success(self) -> bool:
        return self.found is not None

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "totalQueries": self.total_queries,
            "loops": [loop.to_dict() for loop in self.loops],
        }


def grover_state(oracle: OracleSpec, k: int) -> StateVector:
    """G^k |h> for the oracle's marked set."""
    state = uniform_state(oracle.n)
    for _ in range(k):
        state = apply_grover_iteration(state, oracle)
    return state


def search_known(oracle: OracleSpec, a: int, rng=None) -> SearchOutcome:
    """Grover search when the number of marked items ``a`` is known.

    ``a`` is trusted as given; a wrong value just degrades success.
    """
    rng = as_rng(rng)
    if a < 1:
        raise NoSolutionsError("search_known needs a >= 1")
    k = analytic.optimal_k(analytic.make_model(oracle.n, a))
    x = measure(grover_state(oracle, k), rng)
    hit = oracle.evaluate(x)
    return SearchOutcome(
        found=x if hit else None,
        total_queries=k,
        loops=[Loop(m=None, k=k, measured=x, hit=hit)],
        evaluations=1,
    )


def _probe_classically(oracle: OracleSpec, rng: np.random.Generator, cap: int | None) -> tuple[int | None, int]:
    """Uniform probing without replacement; returns (found, evaluations)."""
    order = rng.permutation(oracle.N)
    if cap is not None:
        order = order[:cap]
    hits = oracle.mask[order]
    if hits.any():
        first = int(np.argmax(hits))
        oracle.charge_evaluations(first + 1)
        return int(order[first]), first + 1
    oracle.charge_evaluations(len(order))
    return None, len(order)


def classical_baseline(oracle: OracleSpec, rng=None, max_evaluations: int | None = None) -> SearchOutcome:
    """Random probing without replacement.

    Expected number of evaluations is ``(N + 1) / (a + 1)``.
    """
    found, evals = _probe_classically(oracle, as_rng(rng), max_evaluations)
    return SearchOutcome(found=found, total_queries=evals, evaluations=evals)


def run_schedule(
    prepare: Callable[[], object],
    iterate: Callable[[object], object],
    sample: Callable[[object, np.random.Generator], int],
    is_good: Callable[[int], bool],
    max_m: float,
    lam: float,
    rng: np.random.Generator,
) -> SearchOutcome:
    """Exponential schedule shared by search and amplitude amplification.

    ``m`` grows geometrically as a real number; k is drawn from
    ``{0, ..., ceil(m) - 1}``.
    """
    m = 1.0
    total = 0
    loops = []
    while m <= max_m:
        k = int(rng.integers(0, math.ceil(m)))
        state = prepare()
        for _ in range(k):
            state = iterate(state)
        x = sample(state, rng)
        hit = is_good(x)
        total += k
        loops.append(Loop(m=m, k=k, measured=x, hit=hit))
        if hit:
            return SearchOutcome(found=x, total_queries=total, loops=loops, evaluations=len(loops))
        m *= lam
    return SearchOutcome(found=None, total_queries=total, loops=loops, evaluations=len(loops))


def search_unknown(oracle: OracleSpec, params: SearchParams | None = None, rng=None) -> SearchOutcome:
    """Grover search without knowing the number of marked items.

    When more than half the domain is marked, up to four classical probes are
    tried first; the quantum schedule runs only if they all miss.
    """
    params = params or SearchParams()
    rng = as_rng(rng if rng is not None else params.rng_seed)
    max_m = params.max_m if params.max_m is not None else math.sqrt(oracle.N)
    pre_evals = 0
    if 2 * oracle.a > oracle.N:
        found, pre_evals = _probe_classically(oracle, rng, CLASSICAL_PROBES)
        if found is not None:
            return SearchOutcome(found=found, total_queries=0, evaluations=pre_evals)
    n = oracle.n
    out = run_schedule(
        prepare=lambda: uniform_state(n),
        iterate=lambda s: apply_grover_iteration(s, oracle),
        sample=measure,
        is_good=oracle.evaluate,
        max_m=max_m,
        lam=params.lam,
        rng=rng,
    )
    out.evaluations += pre_evals
    return out


def solution_distribution(oracle: OracleSpec, k: int) -> dict[int, float]:
    """Exact probability of each marked index after ``k`` iterations."""
    if oracle.a == 0:
        raise NoSolutionsError("no marked items")
    probs = grover_state(oracle, k).probabilities()
    return {x: float(probs[x]) for x in sorted(oracle.marked)}
