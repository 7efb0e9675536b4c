"""Seeding helpers and Haar-random unitaries."""
from __future__ import annotations

import numpy as np


def as_rng(rng=None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def trial_rng(seed: int, *index: int) -> np.random.Generator:
    """Independent stream for trial ``index`` of an experiment seeded with ``seed``.

    Counter-based: the stream for a given index never depends on how many
    trials are run.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(index)))


def derived_seed(seed: int, *index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=tuple(index)).generate_state(1, np.uint64)[0])


def haar_unitary(dim: int, rng=None) -> np.ndarray:
    """Haar-distributed ``dim x dim`` unitary.

    QR of a complex Ginibre matrix, with the columns rephased by the signs of
    R's diagonal so the result is exactly Haar (Mezzadri's correction).
    """
    rng = as_rng(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def unitarity_error(u: np.ndarray) -> float:
    """max |U^dagger U - I| entrywise."""
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
