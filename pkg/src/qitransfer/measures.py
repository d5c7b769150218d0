"""Entropies, concurrence and quantum discord of two-qubit states (all in bits)."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .linalg import partial_trace
from .states import PAULIS, as_correlation, as_density

_YY = np.kron(PAULIS[2], PAULIS[2])

GRID_PHI = 64
GRID_THETA = 32
MAX_REFINE_EVALS = 200


def entropy(rho):
    """Von Neumann entropy ``-sum lambda log2 lambda``."""
    lam = np.linalg.eigvalsh(as_density(rho).rho)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)))


def mutual_information(rho_ab):
    rho = as_density(rho_ab, qubits=2).rho
    s_a = entropy(partial_trace(rho, 0))
    s_b = entropy(partial_trace(rho, 1))
    return s_a + s_b - entropy(rho)


@dataclass(frozen=True)
class ConcurrenceResult:
    concurrence: float
    spin_flip_eigs: np.ndarray


def _psd_sqrt(rho):
    lam, vec = np.linalg.eigh(rho)
    return (vec * np.sqrt(np.clip(lam, 0.0, None))) @ vec.conj().T


def concurrence(rho_ab):
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the square roots of the eigenvalues of ``rho rho~`` with
    ``rho~ = (Y x Y) rho* (Y x Y)``. They are taken as singular values of
    ``sqrt(rho) sqrt(rho~)``, which avoids square roots of round-off noise.
    """
    rho = as_density(rho_ab, qubits=2).rho
    root = _psd_sqrt(rho)
    root_tilde = _YY @ root.conj() @ _YY
    lam = np.linalg.svd(root @ root_tilde, compute_uv=False)
    value = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
    return ConcurrenceResult(float(value), lam)


def _binary_entropy_of_length(length):
    # entropy of a qubit whose Bloch vector has the given length
    p = np.clip(0.5 * (1.0 + np.asarray(length)), 0.0, 1.0)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.where(p > 0, p * np.log2(p), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
    return out


def _directions(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1
    )


def _classical_correlation(r, n):
    """``S(B) - sum_pm p_pm S(B | pm)`` for the projective measurement along n on A.

    ``r`` is the correlation matrix with the measured qubit as the row index;
    ``n`` has shape (..., 3).
    """
    a, b, m = r[1:, 0], r[0, 1:], r[1:, 1:]
    na = n @ a
    nm = n @ m
    s_b = _binary_entropy_of_length(np.linalg.norm(b))
    cond = 0.0
    for sign in (1.0, -1.0):
        p = 0.5 * (1.0 + sign * na)
        with np.errstate(divide="ignore", invalid="ignore"):
            bloch = (b + sign * nm) / (2.0 * p)[..., None]
        length = np.where(p > 1e-15, np.linalg.norm(np.nan_to_num(bloch), axis=-1), 0.0)
        cond = cond + np.where(p > 1e-15, p * _binary_entropy_of_length(length), 0.0)
    return s_b - cond


@dataclass(frozen=True)
class DiscordResult:
    discord: float
    classical_correlation: float
    mutual_information: float
    optimal_measurement: tuple
    optimizer_evals: int
    side: str = "A"


def discord(rho_ab, side="A"):
    """Quantum discord with projective measurements on ``side``.

    The classical correlation is maximised over measurement directions
    ``(theta, phi)`` first on a 64 x 32 grid, then by Nelder-Mead started from
    the best grid point with at most 200 further evaluations. Both stages
    are deterministic.
    """
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    rho = as_density(rho_ab, qubits=2)
    r = np.array(as_correlation(rho).r)
    if side == "B":
        r = r.T
    mi = mutual_information(rho)

    theta = np.linspace(0.0, np.pi, GRID_THETA)
    phi = np.arange(GRID_PHI) * (2.0 * np.pi / GRID_PHI)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    values = _classical_correlation(r, _directions(tt, pp))
    i, j = np.unravel_index(np.argmax(values), values.shape)
    start = np.array([theta[i], phi[j]])
    best_j = float(values[i, j])
    best_x = start

    def objective(x):
        return -float(_classical_correlation(r, _directions(x[0], x[1])))

    simplex = np.array(
        [start, start + [np.pi / GRID_THETA, 0.0], start + [0.0, 2 * np.pi / GRID_PHI]]
    )
    res = minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "maxfev": MAX_REFINE_EVALS,
            "xatol": 1e-10,
            "fatol": 1e-13,
        },
    )
    if -res.fun > best_j:
        best_j, best_x = -float(res.fun), res.x
    disc = max(mi - best_j, 0.0)
    theta_opt = float(np.mod(best_x[0], 2 * np.pi))
    phi_opt = float(np.mod(best_x[1], 2 * np.pi))
    # fold back into theta in [0, pi]
    if theta_opt > np.pi:
        theta_opt = 2 * np.pi - theta_opt
        phi_opt = float(np.mod(phi_opt + np.pi, 2 * np.pi))
    return DiscordResult(
        discord=float(disc),
        classical_correlation=float(mi - disc),
        mutual_information=float(mi),
        optimal_measurement=(theta_opt, phi_opt),
        optimizer_evals=int(values.size + res.nfev),
        side=side,
    )
