"""Finite-shot Pauli tomography of Bob's collapsed qubit.

Randomness comes from numpy's PCG64 bit generator. A user seed is expanded
with ``SeedSequence.spawn`` into one independent 64-bit seed per measurement
axis, and every :class:`ShotRecord` stores the seed that produced it, so a
record can be regenerated on its own.
"""

from dataclasses import dataclass, field

import numpy as np

from . import protocol
from .exceptions import RankDeficientError
from .states import as_correlation, as_density, to_bloch

GENERATOR = "numpy.random.PCG64"


@dataclass(frozen=True)
class ShotRecord:
    axis: int
    shots: int
    plus_counts: int
    seed: int

    def __post_init__(self):
        if self.axis not in (1, 2, 3):
            raise ValueError(f"axis must be 1, 2 or 3, got {self.axis}")
        if self.shots < 1 or not 0 <= self.plus_counts <= self.shots:
            raise ValueError(f"invalid counts {self.plus_counts}/{self.shots}")


def child_seeds(seed, count):
    """Derive ``count`` independent 64-bit seeds from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def sample_pauli(rho, axis, shots, seed):
    """Measure ``sigma_axis`` ``shots`` times on a single-qubit state."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
    expectation = to_bloch(rho)[axis - 1]
    p_plus = float(np.clip(0.5 * (1.0 + expectation), 0.0, 1.0))
    rng = np.random.Generator(np.random.PCG64(seed))
    plus = int(rng.binomial(shots, p_plus))
    return ShotRecord(axis=axis, shots=int(shots), plus_counts=plus, seed=int(seed))


def estimate_bloch(records):
    """Bloch vector estimate and standard errors from one record per axis.

    Components are clipped to [-1, 1] individually. The clipped vector may
    still lie outside the Bloch ball; that is reported, not corrected.
    """
    by_axis = {rec.axis: rec for rec in records}
    if sorted(by_axis) != [1, 2, 3] or len(records) != 3:
        raise ValueError("need exactly one ShotRecord per axis 1, 2, 3")
    s_hat = np.empty(3)
    stderr = np.empty(3)
    for k in (1, 2, 3):
        rec = by_axis[k]
        p = rec.plus_counts / rec.shots
        s_hat[k - 1] = 2.0 * p - 1.0
        stderr[k - 1] = 2.0 * np.sqrt(p * (1.0 - p) / rec.shots)
    return np.clip(s_hat, -1.0, 1.0), stderr


def project_to_ball(c):
    """Radially shrink a Bloch vector into the unit ball."""
    c = np.asarray(c, dtype=float)
    norm = np.linalg.norm(c)
    return c / norm if norm > 1.0 else c


@dataclass(frozen=True)
class TomographyEstimate:
    s_hat: np.ndarray
    s_stderr: np.ndarray
    c_hat: np.ndarray
    c_cov: np.ndarray
    outcome: protocol.BellOutcome
    probability: float
    seed: int = None
    records: tuple = field(default=())

    def mahalanobis2(self, c_true):
        """Squared Mahalanobis distance of ``c_true`` under ``c_cov``."""
        diff = self.c_hat - np.asarray(c_true, dtype=float)
        return float(diff @ np.linalg.pinv(self.c_cov) @ diff)


def remote_tomography(rho_c, rho_ab, outcome, shots, seed, physical=False):
    """Estimate the sender's Bloch vector from finite-shot tomography on Bob's side.

    ``shots`` is the total budget, split evenly over the three axes. With
    ``shots=None`` the exact collapsed Bloch vector is used (infinite-shot
    limit) and the covariance is zero.

    The covariance is propagated linearly. Differentiating ``T(s) c = s - r_0``
    gives ``dc/ds = D T^-1`` with ``D = 1 + sum_j e_j r_j0 c_j``, so
    ``c_cov = D^2 T^-1 diag(stderr^2) T^-T``. For channels with a maximally
    mixed A marginal, D is 1.

    Raises
    ------
    RankDeficientError
        If the channel's correlation matrix is not full rank.
    """
    outcome = protocol.BellOutcome.coerce(outcome)
    rho_c = as_density(rho_c, qubits=1)
    rho_ab = as_density(rho_ab, qubits=2)
    r = as_correlation(rho_ab)
    cls = protocol.rank_classify(r)
    if cls.rank < 4:
        raise RankDeficientError(
            f"remote tomography needs a full-rank channel, got rank {cls.rank}",
            classification=cls,
        )
    res = protocol.collapse(rho_c, rho_ab, outcome)

    if shots is None:
        s_hat, stderr, records = res.s, np.zeros(3), ()
    else:
        if shots < 3:
            raise ValueError(f"need at least one shot per axis, got {shots} total")
        base, extra = divmod(int(shots), 3)
        seeds = child_seeds(seed, 3)
        records = tuple(
            sample_pauli(res.rho_b, axis, base + (axis <= extra), seeds[axis - 1])
            for axis in (1, 2, 3)
        )
        s_hat, stderr = estimate_bloch(records)

    t = protocol.coefficient_matrix(r, s_hat, outcome)
    t_inv = np.linalg.inv(t)
    c_hat = t_inv @ (s_hat - r.marginal_b)
    den = 1.0 + outcome.signs @ (r.marginal_a * c_hat)
    jac = den * t_inv
    c_cov = jac @ np.diag(stderr**2) @ jac.T
    c_cov = 0.5 * (c_cov + c_cov.T)
    if physical:
        c_hat = project_to_ball(c_hat)
    return TomographyEstimate(
        s_hat=s_hat,
        s_stderr=stderr,
        c_hat=c_hat,
        c_cov=c_cov,
        outcome=outcome,
        probability=res.probability,
        seed=seed,
        records=records,
    )
