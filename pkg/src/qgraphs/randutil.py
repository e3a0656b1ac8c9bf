"""Seeded random matrix helpers shared by search and test corpora."""

from __future__ import annotations

import numpy as np


def complex_gaussian(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase-fixed diagonal."""
    q, r = np.linalg.qr(complex_gaussian(rng, n, n))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_projection(rng: np.random.Generator, n: int, rank: int) -> np.ndarray:
    u = haar_unitary(rng, n)
    return u[:, :rank] @ u[:, :rank].conj().T


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = complex_gaussian(rng, n, n)
    return (a + a.conj().T) / 2.0
