"""Amplitude estimation and quantum counting by phase estimation on G.

G has eigenvalues ``exp(+-2i theta)``, so the phase fraction is
``theta / pi`` and a measured code ``y`` decodes to ``theta~ = pi y / 2**t``
and ``alpha~ = sin(theta~)**2``.

Two simulation paths are provided. The full path simulates the whole
``t + n`` qubit register. The fast path uses that U|0> lies in the span of
the two eigenvectors with equal weight: it samples the eigenbranch and then
the code from the exact one-eigenvector output distribution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sv
from ._random import as_rng
from .amplify import Amplifier, grover_amplifier
from .errors import DegenerateAngleError, ParameterError, SizeLimitError
from .search import (
    CLASSICAL_PROBES,
    Loop,
    SearchOutcome,
    SearchParams,
    classical_baseline,
    search_known,
    search_unknown,
)

FAST_MAX_T = 30
SUCCESS_FLOOR = 8 / math.pi**2


@dataclass(frozen=True)
class PhaseEstimate:
    t: int
    y: int
    theta_tilde: float
    alpha_tilde: float
    a_tilde: float | None = None


def decode(y: int, t: int, N: int | None = None) -> PhaseEstimate:
    """Turn a measured code into angle / amplitude (and count) estimates.

    The amplitude is computed from the folded code ``min(y, 2**t - y)`` so
    that ``y`` and ``2**t - y`` decode identically.
    """
    T = 1 << t
    if not 0 <= y < T:
        raise ParameterError(f"code {y} outside [0, {T})")
    folded = min(y, T - y)
    theta = math.pi * y / T
    alpha = math.sin(math.pi * folded / T) ** 2
    return PhaseEstimate(t=t, y=int(y), theta_tilde=theta, alpha_tilde=alpha,
                         a_tilde=None if N is None else N * alpha)


def single_branch_distribution(phase: float, t: int) -> np.ndarray:
    """Pr[y] for phase estimation on an exact eigenvector with eigenvalue exp(i phase).

    ``|2**-t sum_j exp(i j (phase - 2 pi y / 2**t))|**2`` in closed (Fejer) form.
    """
    T = 1 << t
    y = np.arange(T)
    delta = phase - 2 * np.pi * y / T
    delta = np.mod(delta + np.pi, 2 * np.pi) - np.pi
    half = delta / 2
    den = T * np.sin(half)
    num = np.sin(T * half)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(den == 0, 1.0, num / den)
    return ratio**2


def fast_distribution(theta: float, t: int) -> np.ndarray:
    """Exact code distribution for input U|0>: equal mixture of the two eigenbranches."""
    if not 1 <= t <= FAST_MAX_T:
        raise SizeLimitError(f"precision t={t} outside [1, {FAST_MAX_T}]")
    return 0.5 * (single_branch_distribution(2 * theta, t) + single_branch_distribution(-2 * theta, t))


def _full_register(amp: Amplifier, t: int) -> sv.StateVector:
    n = amp.n
    if t < 1 or t + n > sv.MAX_QUBITS:
        raise SizeLimitError(f"t + n = {t + n} exceeds the full-register cap of {sv.MAX_QUBITS}")
    ancilla = sv.uniform_state(t).amps
    state = sv.StateVector(np.kron(ancilla, amp.initial_amplitudes()))
    for j in range(t):
        state = sv.controlled_power(amp.iterate_array, j, state, control=n + j, n=n)
    return sv.inverse_qft(state, t, offset=n)


def full_distribution(amp: Amplifier, t: int) -> np.ndarray:
    """Exact code distribution from the full ``t + n`` qubit simulation."""
    probs = _full_register(amp, t).probabilities().reshape(1 << t, amp.dim)
    return probs.sum(axis=1)


def _require_proper(amp: Amplifier) -> None:
    if not 0 < amp.p < 1:
        raise DegenerateAngleError(f"p = {amp.p}: phase estimation needs 0 < p < 1")


def phase_estimate_full(amp: Amplifier, t: int, rng=None) -> PhaseEstimate:
    """Phase estimation with the whole register simulated, input U|0>."""
    _require_proper(amp)
    rng = as_rng(rng)
    idx = sv.measure(_full_register(amp, t), rng)
    return decode(idx >> amp.n, t, None if amp.oracle is None else amp.dim)


def _sample_fast(theta: float, t: int, rng: np.random.Generator) -> int:
    sign = 1.0 if rng.random() < 0.5 else -1.0
    probs = single_branch_distribution(sign * 2 * theta, t)
    cdf = np.cumsum(probs)
    y = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(y, (1 << t) - 1)


def phase_estimate_fast(amp: Amplifier, t: int, rng=None) -> PhaseEstimate:
    """Phase estimation through the two-dimensional invariant subspace.

    Charges the oracle (if any) with the ``2**t - 1`` applications of G the
    circuit would make.
    """
    _require_proper(amp)
    if not 1 <= t <= FAST_MAX_T:
        raise SizeLimitError(f"precision t={t} outside [1, {FAST_MAX_T}]")
    rng = as_rng(rng)
    y = _sample_fast(amp.theta, t, rng)
    if amp.oracle is not None:
        amp.oracle.charge((1 << t) - 1)
    return decode(y, t, None if amp.oracle is None else amp.dim)


def count_marked(oracle: sv.OracleSpec, t: int, rng=None, method: str = "fast",
                 short_circuit: bool = False) -> PhaseEstimate:
    """Estimate the number of marked items as ``N sin(pi y / 2**t)**2``.

    With ``short_circuit`` the degenerate counts 0 and N are answered without
    running phase estimation; otherwise phase estimation runs and lands on
    codes 0 or ``2**(t-1)`` respectively.
    """
    rng = as_rng(rng)
    N = oracle.N
    if short_circuit and oracle.a in (0, N):
        return decode(0 if oracle.a == 0 else 1 << (t - 1), t, N)
    amp = grover_amplifier(oracle)
    if method == "full":
        if 0 < oracle.a < N:
            return phase_estimate_full(amp, t, rng)
        idx = sv.measure(_full_register(amp, t), rng)
        return decode(idx >> amp.n, t, N)
    if method != "fast":
        raise ParameterError(f"unknown method {method!r}")
    if not 1 <= t <= FAST_MAX_T:
        raise SizeLimitError(f"precision t={t} outside [1, {FAST_MAX_T}]")
    y = _sample_fast(amp.theta, t, rng)
    oracle.charge((1 << t) - 1)
    return decode(y, t, N)


def round_count(a_tilde: float) -> int:
    """Nearest integer, ties toward the smaller count, at least 1."""
    return max(1, math.ceil(a_tilde - 0.5))


def search_via_counting(oracle: sv.OracleSpec, t: int, rng=None, method: str = "fast",
                        escalations: int = 3, params: SearchParams | None = None) -> SearchOutcome:
    """Count first, then run the known-count search with the estimate.

    On a miss the precision grows by one qubit (doubling the number of
    phase codes), at most ``escalations`` times, before falling back to the
    unknown-count schedule. ``total_queries`` includes the phase-estimation
    queries.
    """
    rng = as_rng(rng)
    start = oracle.queries
    loops: list[Loop] = []
    evaluations = 0
    for attempt in range(escalations + 1):
        est = count_marked(oracle, min(t + attempt, FAST_MAX_T), rng, method=method)
        a_hat = round_count(est.a_tilde)
        if 2 * a_hat >= oracle.N:
            out = classical_baseline(oracle, rng, max_evaluations=CLASSICAL_PROBES)
            evaluations += out.evaluations
        else:
            out = search_known(oracle, a_hat, rng)
            loops.extend(out.loops)
            evaluations += out.evaluations
        if out.found is not None:
            return SearchOutcome(found=out.found, total_queries=oracle.queries - start,
                                 loops=loops, evaluations=evaluations)
    out = search_unknown(oracle, params, rng)
    loops.extend(out.loops)
    return SearchOutcome(found=out.found, total_queries=oracle.queries - start, loops=loops,
                         evaluations=evaluations + out.evaluations)


def phase_codes(theta: float, t: int) -> tuple[float, float]:
    """Real-valued codes of the two eigenphases, in [0, 2**t)."""
    T = 1 << t
    c = T * theta / math.pi
    return c % T, (T - c) % T


def concentration_mass(probs: np.ndarray, theta: float, t: int, width: float = 1.0) -> float:
    """Probability of codes within ``width`` (circularly) of either true code."""
    T = 1 << t
    y = np.arange(T)
    near = np.zeros(T, dtype=bool)
    for c in phase_codes(theta, t):
        d = np.abs(y - c)
        near |= np.minimum(d, T - d) <= width + 1e-12
    return float(probs[near].sum())


def nearest_code_error(n: int, a: int, t: int) -> float:
    """|N sin(pi y*/2**t)**2 - a| for the code y* nearest to the true phase."""
    N = 1 << n
    theta = math.asin(math.sqrt(a / N))
    y_star = round((1 << t) * theta / math.pi)
    return abs(N * math.sin(math.pi * y_star / (1 << t)) ** 2 - a)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
