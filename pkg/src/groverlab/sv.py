"""Dense state-vector substrate.

Register layout: qubit 0 is the least significant bit of the basis index.
Operators that act on "the low n qubits" treat the amplitude array as
``2**(m-n)`` contiguous blocks of length ``2**n`` and act on every block.

All public operations return a new :class:`StateVector`; inputs are never
modified in place.
"""
from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DimensionError, NormDriftError, ParameterError, SizeLimitError

MAX_QUBITS = 24
NORM_TOL = 1e-9
MEASURE_NORM_TOL = 1e-6


@dataclass
class StateVector:
    """``2**m`` complex amplitudes."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.ndim != 1:
            raise DimensionError("amplitudes must be a one-dimensional array")
        size = amps.shape[0]
        if size < 2 or size & (size - 1):
            raise DimensionError(f"length {size} is not a power of two >= 2")
        if size.bit_length() - 1 > MAX_QUBITS:
            raise SizeLimitError(f"{size.bit_length() - 1} qubits exceeds the cap of {MAX_QUBITS}")
        self.amps = amps

    @property
    def m(self) -> int:
        return self.amps.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.amps.copy())


class OracleSpec:
    """Marked subset of ``{0, ..., 2**n - 1}`` with query bookkeeping.

    ``queries`` counts quantum oracle applications, ``evaluations`` counts
    classical membership checks. Both counters are lock-protected so that
    replicas sharing an oracle may run in threads.
    """

    def __init__(self, n: int, marked: Iterable[int] = ()):
        if not 1 <= n <= MAX_QUBITS:
            raise ParameterError(f"oracle qubit count must be in [1, {MAX_QUBITS}], got {n}")
        N = 1 << n
        marked = frozenset(int(x) for x in marked)
        bad = [x for x in marked if not 0 <= x < N]
        if bad:
            raise ParameterError(f"marked indices {sorted(bad)[:5]} outside [0, {N})")
        self.n = n
        self.marked = marked
        mask = np.zeros(N, dtype=bool)
        if marked:
            mask[np.fromiter(marked, dtype=np.int64)] = True
        mask.setflags(write=False)
        self._mask = mask
        self._signs = np.where(mask, -1.0, 1.0)
        self._lock = threading.Lock()
        self._queries = 0
        self._evaluations = 0

    def __repr__(self):
        return f"OracleSpec(n={self.n}, a={len(self.marked)}, queries={self._queries})"

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def a(self) -> int:
        return len(self.marked)

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def queries(self) -> int:
        return self._queries

    @property
    def evaluations(self) -> int:
        return self._evaluations

    def charge(self, count: int = 1) -> None:
        """Record ``count`` oracle applications.

        Used by the phase oracle itself, and by fast paths that account for
        oracle applications they evaluate analytically.
        """
        if count < 0:
            raise ParameterError("query counter never decreases")
        with self._lock:
            self._queries += count

    def charge_evaluations(self, count: int = 1) -> None:
        if count < 0:
            raise ParameterError("evaluation counter never decreases")
        with self._lock:
            self._evaluations += count

    def evaluate(self, x: int) -> bool:
        """Classical evaluation of f(x)."""
        self.charge_evaluations(1)
        return bool(self._mask[int(x)])

    def phase(self, arr: np.ndarray) -> np.ndarray:
        """Apply Z_f along the last axis blocks of a raw array, counting one query."""
        out = _phase_blocks(arr, self._signs)
        self.charge(1)
        return out


def _check_block(size: int, n: int) -> None:
    if n < 1 or size % (1 << n):
        raise DimensionError(f"cannot act on {n} low qubits of a {size}-amplitude array")


def _phase_blocks(arr: np.ndarray, signs: np.ndarray) -> np.ndarray:
    block = signs.shape[0]
    _check_block(arr.size, block.bit_length() - 1)
    return (arr.reshape(-1, block) * signs).reshape(arr.shape)


def diffuse_blocks(arr: np.ndarray, n: int) -> np.ndarray:
    """Inversion about the mean over every contiguous block of ``2**n`` amplitudes."""
    _check_block(arr.size, n)
    blocks = arr.reshape(-1, 1 << n)
    mean = blocks.mean(axis=1, keepdims=True)
    return (2 * mean - blocks).reshape(arr.shape)


def hadamard_blocks(arr: np.ndarray, n: int) -> np.ndarray:
    """Walsh-Hadamard transform on the low ``n`` qubits of a raw array."""
    _check_block(arr.size, n)
    out = np.array(arr, dtype=np.complex128).reshape(-1)
    s = 1 / math.sqrt(2)
    for q in range(n):
        v = out.reshape(-1, 2, 1 << q)
        lo = v[:, 0, :].copy()
        hi = v[:, 1, :]
        v[:, 0, :] = (lo + hi) * s
        v[:, 1, :] = (lo - hi) * s
    return out.reshape(np.shape(arr))


def zero_phase_blocks(arr: np.ndarray, n: int) -> np.ndarray:
    """Z_0: negate the amplitude of index 0 within every block of ``2**n``."""
    _check_block(arr.size, n)
    out = np.array(arr, dtype=np.complex128).reshape(-1, 1 << n)
    out[:, 0] *= -1
    return out.reshape(np.shape(arr))


def uniform_state(n: int) -> StateVector:
    """|h> = H^n |0^n>."""
    if not 1 <= n <= MAX_QUBITS:
        raise SizeLimitError(f"uniform state on {n} qubits: allowed range is [1, {MAX_QUBITS}]")
    N = 1 << n
    return StateVector(np.full(N, 1 / math.sqrt(N), dtype=np.complex128))


def basis_state(m: int, index: int = 0) -> StateVector:
    if not 1 <= m <= MAX_QUBITS:
        raise SizeLimitError(f"{m} qubits outside [1, {MAX_QUBITS}]")
    if not 0 <= index < (1 << m):
        raise ParameterError(f"basis index {index} outside register of {m} qubits")
    amps = np.zeros(1 << m, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


def from_amplitudes(amps, normalize: bool = False) -> StateVector:
    """Wrap amplitudes, checking (or enforcing) unit norm."""
    state = StateVector(np.array(amps, dtype=np.complex128))
    norm = state.norm()
    if normalize:
        if norm == 0:
            raise ParameterError("cannot normalise the zero vector")
        state.amps /= norm
    elif abs(norm - 1) > NORM_TOL:
        raise ParameterError(f"state has norm {norm}, expected 1")
    return state


def _oracle_fits(state: StateVector, n: int) -> None:
    if state.m < n:
        raise DimensionError(f"operator on {n} qubits does not fit a {state.m}-qubit state")


def apply_phase_oracle(state: StateVector, oracle: OracleSpec) -> StateVector:
    """Z_f on the low ``oracle.n`` qubits; counts one query."""
    _oracle_fits(state, oracle.n)
    return StateVector(oracle.phase(state.amps))


def apply_zero_phase(state: StateVector, n: int) -> StateVector:
    _oracle_fits(state, n)
    return StateVector(zero_phase_blocks(state.amps, n))


def hadamard_layer(state: StateVector, n: int) -> StateVector:
    _oracle_fits(state, n)
    return StateVector(hadamard_blocks(state.amps, n))


def apply_diffusion(state: StateVector, n: int) -> StateVector:
    """R_h = 2|h><h| - I on the low ``n`` qubits, as inversion about the mean."""
    _oracle_fits(state, n)
    return StateVector(diffuse_blocks(state.amps, n))


def apply_grover_iteration(state: StateVector, oracle: OracleSpec) -> StateVector:
    """G = R_h Z_f: oracle first, then diffusion."""
    return apply_diffusion(apply_phase_oracle(state, oracle), oracle.n)


def apply_bitflip_oracle(state: StateVector, oracle: OracleSpec, target: int) -> StateVector:
    """O_f: |x>|y> -> |x>|y xor f(x)> with ``y`` stored in qubit ``target``.

    ``x`` is read from the low ``oracle.n`` qubits. Counts one query.
    """
    if not oracle.n <= target < state.m:
        raise DimensionError(f"target qubit {target} must lie in [{oracle.n}, {state.m})")
    idx = np.arange(state.dim)
    hit = oracle.mask[idx & (oracle.N - 1)]
    partner = np.where(hit, idx ^ (1 << target), idx)
    oracle.charge(1)
    return StateVector(state.amps[partner])


def _fourier(state: StateVector, t: int, offset: int, inverse: bool) -> StateVector:
    if t < 1 or offset < 0 or offset + t > state.m:
        raise DimensionError(f"qubits [{offset}, {offset + t}) not inside a {state.m}-qubit state")
    view = state.amps.reshape(-1, 1 << t, 1 << offset)
    # numpy's ifft carries the e^{+2 pi i jk/T} kernel
    out = np.fft.fft(view, axis=1, norm="ortho") if inverse else np.fft.ifft(view, axis=1, norm="ortho")
    return StateVector(out.reshape(-1))


def qft(state: StateVector, t: int, offset: int = 0) -> StateVector:
    """Fourier transform with kernel exp(2 pi i jk / 2**t) / sqrt(2**t).

    Acts on qubits ``offset .. offset + t - 1``; qubit ``offset`` is the
    least significant bit of the transformed register value.
    """
    return _fourier(state, t, offset, inverse=False)


def inverse_qft(state: StateVector, t: int, offset: int = 0) -> StateVector:
    return _fourier(state, t, offset, inverse=True)


def controlled_power(
    op: Callable[[np.ndarray], np.ndarray],
    j: int,
    state: StateVector,
    control: int,
    n: int,
) -> StateVector:
    """Apply ``op`` ``2**j`` times to the low ``n``-qubit register where ``control`` is 1.

    ``op`` maps an array whose last axis has length ``2**n`` to an array of
    the same shape, acting row-wise.
    """
    if j < 0:
        raise ParameterError("exponent index must be non-negative")
    if not n <= control < state.m:
        raise DimensionError(f"control qubit {control} must lie in [{n}, {state.m})")
    out = state.amps.copy()
    view = out.reshape(-1, 2, 1 << control)
    branch = view[:, 1, :].reshape(-1, 1 << n)
    for _ in range(1 << j):
        branch = op(branch)
    view[:, 1, :] = branch.reshape(view.shape[0], 1 << control)
    return StateVector(out)


def measure(state: StateVector, rng: np.random.Generator) -> int:
    """Sample a basis index with probability |amp|^2."""
    probs = state.probabilities()
    total = probs.sum()
    if abs(total - 1) > MEASURE_NORM_TOL:
        raise NormDriftError(f"state norm^2 drifted to {total}")
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(idx, state.dim - 1)


def _same_dim(x: StateVector, y: StateVector) -> None:
    if x.dim != y.dim:
        raise DimensionError(f"dimensions differ: {x.dim} vs {y.dim}")


def inner_product(x: StateVector, y: StateVector) -> complex:
    """<x|y>, conjugate-linear in the first argument."""
    _same_dim(x, y)
    return complex(np.vdot(x.amps, y.amps))


def norm_diff(x: StateVector, y: StateVector) -> float:
    """||x - y|| with no global-phase alignment."""
    _same_dim(x, y)
    return float(np.linalg.norm(x.amps - y.amps))


def project_marked_mass(state: StateVector, oracle: OracleSpec) -> float:
    """Total probability on indices whose low ``oracle.n`` bits are marked.

    Take the square root for the projection norm ||Pi_A state||.
    """
    _oracle_fits(state, oracle.n)
    probs = state.probabilities().reshape(-1, oracle.N)
    return float(probs[:, oracle.mask].sum())


def dump_state(state: StateVector) -> str:
    """JSON array of [re, im] pairs, index 0 first."""
    return json.dumps([[float(z.real), float(z.imag)] for z in state.amps])


def load_state(text: str) -> StateVector:
    pairs = json.loads(text)
    return StateVector(np.array([complex(re, im) for re, im in pairs]))


def hadamard_matrix(n: int) -> np.ndarray:
    """Explicit H^n as a dense matrix (small n only)."""
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
    out = np.ones((1, 1), dtype=np.complex128)
    for _ in range(n):
        out = np.kron(out, h)
    return out
