"""Amplitude amplification for an arbitrary state preparation U and predicate chi.

The amplification operator is ``G = -U Z_0 U^dagger Z_chi``, including the
global minus sign, so that its eigenvalues on the good/bad plane are
``exp(+-2i theta)`` with ``sin(theta)**2 = p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._random import as_rng
from .analytic import iterations_for_angle
from .errors import DegenerateAngleError, DimensionError, InvariantViolation, NoSolutionsError, NotUnitaryError
from .search import CLASSICAL_PROBES, Loop, SearchParams, run_schedule
from .sv import (
    OracleSpec,
    StateVector,
    diffuse_blocks,
    hadamard_blocks,
    measure,
    zero_phase_blocks,
)

MATRIX_MAX_QUBITS = 10
UNITARY_TOL = 1e-9
EIGEN_TOL = 1e-9
P_SNAP = 1e-12

Action = Callable[[np.ndarray], np.ndarray]


@dataclass
class InvocationTally:
    u: int = 0
    u_adj: int = 0

    @property
    def total(self) -> int:
        return self.u + self.u_adj


@dataclass(frozen=True, eq=False)
class Amplifier:
    """State preparation ``U`` on ``n`` qubits together with a good-set predicate.

    Build with :func:`make_amplifier` or :func:`grover_amplifier`. Actions map
    arrays whose last axis has length ``2**n`` row-wise.
    """

    n: int
    good: np.ndarray
    p: float
    apply_u: Action
    apply_u_adj: Action
    matrix: np.ndarray | None = None
    oracle: OracleSpec | None = None
    diffusion_kernel: bool = False

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def theta(self) -> float:
        return math.asin(math.sqrt(min(max(self.p, 0.0), 1.0)))

    def is_good(self, x: int) -> bool:
        if self.oracle is not None:
            return self.oracle.evaluate(x)
        return bool(self.good[x])

    def initial_amplitudes(self, tally: InvocationTally | None = None) -> np.ndarray:
        e0 = np.zeros(self.dim, dtype=np.complex128)
        e0[0] = 1.0
        if tally is not None:
            tally.u += 1
        return np.asarray(self.apply_u(e0), dtype=np.complex128)

    def prepare(self, tally: InvocationTally | None = None) -> StateVector:
        """U|0>."""
        return StateVector(self.initial_amplitudes(tally))

    def reflect_good(self, arr: np.ndarray) -> np.ndarray:
        """Z_chi along the last axis."""
        if self.oracle is not None:
            return self.oracle.phase(arr)
        return np.where(self.good, -arr, arr)

    def iterate_array(self, arr: np.ndarray, tally: InvocationTally | None = None) -> np.ndarray:
        out = self.reflect_good(arr)
        if tally is not None:
            tally.u += 1
            tally.u_adj += 1
        if self.diffusion_kernel:
            # -H Z_0 H is exactly inversion about the mean
            return diffuse_blocks(out, self.n)
        out = self.apply_u_adj(out)
        out = zero_phase_blocks(out, self.n)
        return -self.apply_u(out)

    def iterate(self, state: StateVector, tally: InvocationTally | None = None) -> StateVector:
        if state.dim != self.dim:
            raise DimensionError(f"state of dimension {state.dim} given to a {self.n}-qubit amplifier")
        return StateVector(self.iterate_array(state.amps, tally))


def _good_mask(chi, n: int) -> tuple[np.ndarray, OracleSpec | None]:
    N = 1 << n
    if isinstance(chi, OracleSpec):
        if chi.n != n:
            raise DimensionError(f"oracle on {chi.n} qubits given to a {n}-qubit amplifier")
        return chi.mask, chi
    if callable(chi):
        mask = np.fromiter((bool(chi(x)) for x in range(N)), dtype=bool, count=N)
        return mask, None
    arr = np.asarray(chi)
    if arr.dtype == bool:
        if arr.shape != (N,):
            raise DimensionError(f"good mask must have length {N}")
        return arr.copy(), None
    mask = np.zeros(N, dtype=bool)
    idx = np.asarray(list(chi) if not isinstance(chi, np.ndarray) else chi, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= N):
        raise DimensionError(f"good indices must lie in [0, {N})")
    mask[idx] = True
    return mask, None


def make_amplifier(U, chi, *, adjoint: Action | None = None, n: int | None = None) -> Amplifier:
    """Build an amplifier from ``U`` and a predicate.

    ``U`` is either an explicit ``2**n x 2**n`` unitary matrix (``n <= 10``)
    or a callable acting row-wise on the last axis, in which case ``adjoint``
    and ``n`` are required. ``chi`` may be a callable on indices, an iterable
    of good indices, a boolean mask or an :class:`OracleSpec` (whose query
    counter then records every ``Z_chi``).
    """
    if callable(U) and not isinstance(U, np.ndarray):
        if adjoint is None or n is None:
            raise ValueError("a black-box U needs an explicit adjoint action and qubit count")
        apply_u, apply_u_adj, matrix = U, adjoint, None
        _check_action_unitary(apply_u, apply_u_adj, n)
    else:
        matrix = np.asarray(U, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError("U must be a square matrix")
        dim = matrix.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise DimensionError(f"U has dimension {dim}, not a power of two")
        n = dim.bit_length() - 1
        if n > MATRIX_MAX_QUBITS:
            raise DimensionError(f"explicit matrices are limited to {MATRIX_MAX_QUBITS} qubits")
        err = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim))))
        if err > UNITARY_TOL:
            raise NotUnitaryError(f"U^dagger U deviates from identity by {err:.3g}")
        mt, mc = matrix.T, matrix.conj()
        apply_u = lambda arr: arr @ mt  # noqa: E731
        apply_u_adj = lambda arr: arr @ mc  # noqa: E731
    mask, oracle = _good_mask(chi, n)
    e0 = np.zeros(1 << n, dtype=np.complex128)
    e0[0] = 1.0
    psi = np.asarray(apply_u(e0))
    p = float(np.sum(np.abs(psi[mask]) ** 2))
    # round-off must not turn an all-good or no-good predicate into a tiny rotation
    if p < P_SNAP:
        p = 0.0
    elif p > 1 - P_SNAP:
        p = 1.0
    return Amplifier(n=n, good=mask, p=p, apply_u=apply_u, apply_u_adj=apply_u_adj,
                     matrix=matrix, oracle=oracle)


def _check_action_unitary(u: Action, u_adj: Action, n: int, probes: int = 3) -> None:
    rng = np.random.default_rng(0)
    dim = 1 << n
    for _ in range(probes):
        x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        x /= np.linalg.norm(x)
        ux = np.asarray(u(x))
        if abs(np.linalg.norm(ux) - 1) > UNITARY_TOL or np.linalg.norm(np.asarray(u_adj(ux)) - x) > UNITARY_TOL:
            raise NotUnitaryError("U action is not norm preserving or the adjoint does not invert it")


def grover_amplifier(oracle: OracleSpec) -> Amplifier:
    """U = H^n with the oracle as predicate; G coincides with the Grover iteration."""
    n = oracle.n
    hadamard = lambda arr: hadamard_blocks(arr, n)  # noqa: E731
    return Amplifier(n=n, good=oracle.mask, p=oracle.a / oracle.N, apply_u=hadamard,
                     apply_u_adj=hadamard, oracle=oracle, diffusion_kernel=True)


@dataclass
class AmplifyOutcome:
    found: int | None
    iterations: int
    invocations: int
    loops: list[Loop] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.found is not None


def optimal_iterations(p: float) -> int:
    """Optimal number of G applications for success probability ``p`` (same rule as the Grover case)."""
    if p <= 0:
        raise NoSolutionsError("p = 0: nothing to amplify")
    return iterations_for_angle(math.asin(math.sqrt(min(p, 1.0))))


def amplify_known(amp: Amplifier, rng=None) -> AmplifyOutcome:
    """Apply G the optimal number of times to U|0> and measure once."""
    rng = as_rng(rng)
    k = optimal_iterations(amp.p)
    tally = InvocationTally()
    state = amp.prepare(tally)
    for _ in range(k):
        state = amp.iterate(state, tally)
    x = measure(state, rng)
    hit = amp.is_good(x)
    return AmplifyOutcome(found=x if hit else None, iterations=k, invocations=tally.total,
                          loops=[Loop(m=None, k=k, measured=x, hit=hit)])


def amplify_unknown(amp: Amplifier, params: SearchParams | None = None, rng=None) -> AmplifyOutcome:
    """Exponential-schedule amplification when ``p`` is not known.

    Mirrors :func:`groverlab.search.search_unknown` with G in place of the
    Grover iteration; the schedule cap defaults to ``sqrt(2**n)``.
    """
    params = params or SearchParams()
    rng = as_rng(rng if rng is not None else params.rng_seed)
    max_m = params.max_m if params.max_m is not None else math.sqrt(amp.dim)
    tally = InvocationTally()
    if amp.p > 0.5:
        # cheap classical route: run U and measure, up to a few times
        for _ in range(CLASSICAL_PROBES):
            x = measure(amp.prepare(tally), rng)
            if amp.is_good(x):
                return AmplifyOutcome(found=x, iterations=0, invocations=tally.total)
    out = run_schedule(
        prepare=lambda: amp.prepare(tally),
        iterate=lambda s: amp.iterate(s, tally),
        sample=measure,
        is_good=amp.is_good,
        max_m=max_m,
        lam=params.lam,
        rng=rng,
    )
    return AmplifyOutcome(found=out.found, iterations=out.total_queries, invocations=tally.total,
                          loops=out.loops)


@dataclass(frozen=True)
class EigenStructure:
    """Eigen-decomposition of G on the plane spanned by the good and bad parts of U|0>.

    ``psi_good`` and ``psi_bad`` are the normalised projections of U|0>;
    ``psi_plus/minus = (psi_good +- i psi_bad) / sqrt(2)``.
    """

    theta_alpha: float
    psi_good: StateVector
    psi_bad: StateVector
    psi_plus: StateVector
    psi_minus: StateVector
    lambda_plus: complex
    lambda_minus: complex
    residual_plus: float
    residual_minus: float


def eigen_structure(amp: Amplifier) -> EigenStructure:
    if not 0 < amp.p < 1:
        raise DegenerateAngleError(f"p = {amp.p}: the good/bad plane degenerates")
    psi = amp.initial_amplitudes()
    good = np.where(amp.good, psi, 0)
    bad = np.where(amp.good, 0, psi)
    good /= np.linalg.norm(good)
    bad /= np.linalg.norm(bad)
    plus = (good + 1j * bad) / math.sqrt(2)
    minus = (good - 1j * bad) / math.sqrt(2)
    theta = amp.theta
    lam_p, lam_m = np.exp(2j * theta), np.exp(-2j * theta)
    res_p = float(np.linalg.norm(_g_matrix_free(amp, plus) - lam_p * plus))
    res_m = float(np.linalg.norm(_g_matrix_free(amp, minus) - lam_m * minus))
    if max(res_p, res_m) > EIGEN_TOL:
        raise InvariantViolation(f"eigen-equation residuals {res_p:.3g}, {res_m:.3g} exceed {EIGEN_TOL}")
    return EigenStructure(theta, StateVector(good), StateVector(bad), StateVector(plus),
                          StateVector(minus), complex(lam_p), complex(lam_m), res_p, res_m)


def _g_matrix_free(amp: Amplifier, vec: np.ndarray) -> np.ndarray:
    # bypasses the oracle counter: structural checks are not queries
    out = np.where(amp.good, -vec, vec)
    if amp.diffusion_kernel:
        return diffuse_blocks(out, amp.n)
    return -amp.apply_u(zero_phase_blocks(amp.apply_u_adj(out), amp.n))


def plane_matrix(amp: Amplifier) -> np.ndarray:
    """2x2 matrix of G restricted to (psi_good, psi_bad)."""
    es = eigen_structure(amp)
    basis = [es.psi_good.amps, es.psi_bad.amps]
    return np.array([[np.vdot(bi, _g_matrix_free(amp, bj)) for bj in basis] for bi in basis])

