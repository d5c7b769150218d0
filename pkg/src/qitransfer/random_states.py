"""Random states for tests, sweeps and benchmarks.

All functions take a ``numpy.random.Generator`` so callers control seeding.
"""

import numpy as np

from .states import CorrelationMatrix, DensityState, PauliVector


def haar_pure_vector(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def haar_pure_state(rng, qubits=1):
    v = haar_pure_vector(rng, 2**qubits)
    return DensityState(np.outer(v, v.conj()))


def random_bloch(rng, radius=None):
    """Uniform direction; length ``radius`` or uniform in the ball when None."""
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    if radius is None:
        radius = rng.random() ** (1.0 / 3.0)
    return radius * v


def random_qubit(rng, radius=None):
    return PauliVector.from_bloch(random_bloch(rng, radius)).to_density()


def random_channel(rng, n_pure=4):
    """Convex mixture of ``n_pure`` Haar-random two-qubit pure states."""
    w = rng.random(n_pure)
    w /= w.sum()
    rho = sum(wi * haar_pure_state(rng, 2).rho for wi in w)
    return DensityState(rho)


def random_unitary(rng, dim=2):
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def classical_mixture(rng, rank, weights=None):
    """Mixture of ``rank`` random product states.

    Its correlation matrix ``sum_i p_i a_i b_i^T`` has rank ``rank`` for
    generic draws (rank <= 4).
    """
    if weights is None:
        weights = rng.random(rank) + 0.1
    weights = np.asarray(weights, dtype=float) / np.sum(weights)
    r = np.zeros((4, 4))
    for p in weights:
        a = np.concatenate([[1.0], random_bloch(rng)])
        b = np.concatenate([[1.0], random_bloch(rng)])
        r += p * np.outer(a, b)
    r[0, 0] = 1.0
    return CorrelationMatrix(r).to_density()
