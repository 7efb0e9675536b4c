"""Numerical verifier for the hybrid-argument lower bound on unstructured search.

A k-query algorithm is a list of unitaries ``U_0 .. U_k`` on ``m`` qubits;
the oracle acts on the low ``n`` qubits as the phase oracle ``Z_r`` (or as
the identity in the reference run). For each marked element ``r`` we follow
both runs step by step and record

* ``D[j] = ||psi_r^(j) - phi^(j)||``
* ``E[j] = ||Z_r phi^(j) - phi^(j)||``
* ``proj[j] = ||Pi_r phi^(j)||``

together with the acceptance probabilities and the trace distance of the
final states. Distances are raw Euclidean norms, with no phase alignment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._random import as_rng, haar_unitary, unitarity_error
from .errors import DimensionError, NotUnitaryError, ParameterError
from .sv import OracleSpec, StateVector, apply_bitflip_oracle, apply_phase_oracle, hadamard_matrix

MAX_QUBITS = 10
STEP_SLACK = 1e-9
SUM_SLACK = 1e-6


@dataclass(frozen=True, eq=False)
class AlgorithmSpec:
    """k-query algorithm ``U_k O U_{k-1} ... U_1 O U_0 |0^m>``.

    The final decision is bit ``output_bit`` of the measured index, unless
    ``accept`` lists the accepting basis indices explicitly.
    """

    n: int
    m: int
    unitaries: tuple
    output_bit: int = 0
    accept: frozenset | None = None

    def __post_init__(self):
        if self.m < self.n or self.n < 1:
            raise ParameterError(f"need 1 <= n <= m, got n={self.n}, m={self.m}")
        if self.m > MAX_QUBITS:
            raise DimensionError(f"m={self.m} exceeds {MAX_QUBITS} qubits")
        if not self.unitaries:
            raise ParameterError("at least U_0 is required")
        dim = 1 << self.m
        for j, u in enumerate(self.unitaries):
            if u.shape != (dim, dim):
                raise DimensionError(f"U_{j} has shape {u.shape}, expected {(dim, dim)}")
            if unitarity_error(u) > STEP_SLACK:
                raise NotUnitaryError(f"U_{j} is not unitary")
        if not 0 <= self.output_bit < self.m:
            raise ParameterError(f"output bit {self.output_bit} outside the register")

    @property
    def k(self) -> int:
        return len(self.unitaries) - 1

    @property
    def N(self) -> int:
        return 1 << self.n

    def accept_mask(self) -> np.ndarray:
        dim = 1 << self.m
        if self.accept is not None:
            mask = np.zeros(dim, dtype=bool)
            mask[list(self.accept)] = True
            return mask
        return (np.arange(dim) >> self.output_bit) & 1 == 1


def random_algorithm(n: int, m: int, k: int, rng=None, output_bit: int = 0) -> AlgorithmSpec:
    """k-query algorithm with i.i.d. Haar-random unitaries."""
    if m > MAX_QUBITS:
        raise DimensionError(f"m={m} exceeds {MAX_QUBITS} qubits")
    if k < 0:
        raise ParameterError("query count must be non-negative")
    rng = as_rng(rng)
    dim = 1 << m
    return AlgorithmSpec(n=n, m=m, unitaries=tuple(haar_unitary(dim, rng) for _ in range(k + 1)),
                         output_bit=output_bit)


def hadamard_query_algorithm(n: int, k: int = 1, final_hadamard: bool = False) -> AlgorithmSpec:
    """U_0 = H^n, then k queries separated by identities (or a final H^n).

    With ``final_hadamard`` the algorithm accepts on the all-zeros outcome.
    """
    dim = 1 << n
    h = hadamard_matrix(n)
    rest = [np.eye(dim, dtype=np.complex128) for _ in range(k)]
    if final_hadamard and k >= 1:
        rest[-1] = h
    return AlgorithmSpec(n=n, m=n, unitaries=(h, *rest),
                         accept=frozenset({0}) if final_hadamard else None)


def with_bitflip_ancilla(alg: AlgorithmSpec) -> AlgorithmSpec:
    """Same algorithm on ``m + 1`` qubits with a |-> ancilla as top qubit.

    Running it with the bit-flip oracle targeting that ancilla reproduces
    the phase-oracle run tensored with |->.
    """
    x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    h = hadamard_matrix(1)
    prep = h @ x  # |0> -> |->
    eye = np.eye(2, dtype=np.complex128)
    first = np.kron(prep, alg.unitaries[0])
    rest = [np.kron(eye, u) for u in alg.unitaries[1:]]
    return AlgorithmSpec(n=alg.n, m=alg.m + 1, unitaries=(first, *rest),
                         output_bit=alg.output_bit, accept=None if alg.accept is None else
                         frozenset(set(alg.accept) | {i | (1 << alg.m) for i in alg.accept}))


@dataclass
class HybridTranscript:
    r: int
    k: int
    D: np.ndarray
    E: np.ndarray
    proj: np.ndarray
    p_r: float
    q: float
    td: float
    final_psi: StateVector = field(repr=False)
    final_phi: StateVector = field(repr=False)

    @property
    def advantage(self) -> float:
        return abs(self.p_r - self.q)


def trace_distance_pure(x: StateVector, y: StateVector) -> float:
    """sqrt(1 - |<x|y>|^2) for normalised pure states."""
    overlap = abs(np.vdot(x.amps, y.amps)) ** 2
    return math.sqrt(max(0.0, 1.0 - overlap))


def run_hybrid(alg: AlgorithmSpec, r: int, bitflip_target: int | None = None) -> HybridTranscript:
    """Follow the marked run (oracle Z_r) and the unmarked run (identity) side by side.

    With ``bitflip_target`` the marked run uses the bit-flip oracle on that
    qubit instead of the phase oracle.
    """
    if not 0 <= r < alg.N:
        raise ParameterError(f"marked element {r} outside [0, {alg.N})")
    oracle = OracleSpec(alg.n, [r])
    identity = OracleSpec(alg.n, [])
    dim = 1 << alg.m
    low = np.arange(dim) & (alg.N - 1)
    on_r = low == r

    def query(o, s):
        if bitflip_target is None:
            return apply_phase_oracle(s, o)
        return apply_bitflip_oracle(s, o, bitflip_target)

    start = np.zeros(dim, dtype=np.complex128)
    start[0] = 1.0
    psi = StateVector(alg.unitaries[0] @ start)
    phi = StateVector(psi.amps.copy())
    k = alg.k
    D = np.empty(k + 1)
    E = np.empty(k + 1)
    proj = np.empty(k + 1)
    for j in range(k + 1):
        D[j] = np.linalg.norm(psi.amps - phi.amps)
        E[j] = np.linalg.norm(query(oracle, phi).amps - phi.amps)
        proj[j] = np.linalg.norm(phi.amps[on_r])
        if j == k:
            break
        u = alg.unitaries[j + 1]
        psi = StateVector(u @ query(oracle, psi).amps)
        phi = StateVector(u @ query(identity, phi).amps)
    acc = alg.accept_mask()
    p_r = float(np.sum(np.abs(psi.amps[acc]) ** 2))
    q = float(np.sum(np.abs(phi.amps[acc]) ** 2))
    return HybridTranscript(r=r, k=k, D=D, E=E, proj=proj, p_r=p_r, q=q,
                            td=trace_distance_pure(psi, phi), final_psi=psi, final_phi=phi)


@dataclass
class ClaimReport:
    ok: bool
    min_slack: float

    def __bool__(self):
        return self.ok


def check_claim_de(tr: HybridTranscript, slack: float = STEP_SLACK) -> ClaimReport:
    """D[j+1] <= D[j] + E[j] and E[j] <= 2 proj[j] for j < k.

    ``min_slack`` is the smallest gap (right side minus left side); it is
    ``inf`` when k = 0 and the claim is vacuous.
    """
    if tr.k == 0:
        return ClaimReport(ok=True, min_slack=math.inf)
    gaps = np.concatenate([
        tr.D[:-1] + tr.E[:-1] - tr.D[1:],
        2 * tr.proj[:-1] - tr.E[:-1],
    ])
    worst = float(gaps.min())
    return ClaimReport(ok=worst >= -slack, min_slack=worst)


def all_transcripts(alg: AlgorithmSpec) -> list[HybridTranscript]:
    return [run_hybrid(alg, r) for r in range(alg.N)]


@dataclass
class SumBoundReport:
    ok: bool
    sum_d: float
    bound: float
    min_d: float
    min_bound: float

    def __bool__(self):
        return self.ok


def check_sum_bound(alg: AlgorithmSpec, transcripts: list[HybridTranscript] | None = None) -> SumBoundReport:
    """sum_r D_r^k <= 2 k sqrt(N), and hence min_r D_r^k <= 2 k / sqrt(N)."""
    transcripts = transcripts if transcripts is not None else all_transcripts(alg)
    final = np.array([tr.D[-1] for tr in transcripts])
    k, N = alg.k, alg.N
    sum_d = float(final.sum())
    bound = 2 * k * math.sqrt(N)
    min_d = float(final.min())
    min_bound = 2 * k / math.sqrt(N)
    ok = sum_d <= bound + SUM_SLACK and min_d <= min_bound + STEP_SLACK
    return SumBoundReport(ok=ok, sum_d=sum_d, bound=bound, min_d=min_d, min_bound=min_bound)


@dataclass
class AdvantageReport:
    ok: bool
    advantage: float
    bound: float
    pointwise_ok: bool
    td_norm_ok: bool

    def __bool__(self):
        return self.ok


def check_advantage(alg: AlgorithmSpec, transcripts: list[HybridTranscript] | None = None) -> AdvantageReport:
    """|p_r - q| <= td_r <= D_r^k for all r, and |mean_r p_r - q| <= 2k/sqrt(N)."""
    transcripts = transcripts if transcripts is not None else all_transcripts(alg)
    pointwise = all(tr.advantage <= tr.td + STEP_SLACK for tr in transcripts)
    td_norm = all(tr.td <= tr.D[-1] + STEP_SLACK for tr in transcripts)
    q = transcripts[0].q
    adv = abs(float(np.mean([tr.p_r for tr in transcripts])) - q)
    bound = 2 * alg.k / math.sqrt(alg.N)
    ok = pointwise and td_norm and adv <= bound + SUM_SLACK
    return AdvantageReport(ok=ok, advantage=adv, bound=bound, pointwise_ok=pointwise, td_norm_ok=td_norm)


@dataclass
class VerificationReport:
    claim_de: bool
    min_claim_slack: float
    sum_bound: SumBoundReport
    advantage: AdvantageReport

    @property
    def ok(self) -> bool:
        return self.claim_de and self.sum_bound.ok and self.advantage.ok

    def __bool__(self):
        return self.ok


def verify_algorithm(alg: AlgorithmSpec) -> VerificationReport:
    """Run every check of the hybrid argument on one algorithm, sharing transcripts."""
    transcripts = all_transcripts(alg)
    claims = [check_claim_de(tr) for tr in transcripts]
    return VerificationReport(
        claim_de=all(c.ok for c in claims),
        min_claim_slack=min(c.min_slack for c in claims),
        sum_bound=check_sum_bound(alg, transcripts),
        advantage=check_advantage(alg, transcripts),
    )
