"""Small dense linear algebra for 1-3 qubit states.

Everything here works on plain numpy arrays at dimensions 2, 4 or 8. The
decompositions delegate to LAPACK through numpy; the wrappers add the input
validation and the ordering conventions (eigenvalues ascending, singular
values descending) the rest of the package relies on.
"""

import numpy as np

from ._tolerances import TAU_HERM, TAU_RANK
from .exceptions import DimensionError, NotHermitianError, SingularSystemError

ALLOWED_DIMS = (2, 4, 8)


def check_matrix(a, *, dims=ALLOWED_DIMS, dtype=complex, name="matrix"):
    """Validate a square finite matrix and return it as an ndarray.

    Parameters
    ----------
    a : array-like
        Candidate matrix.
    dims : tuple of int
        Accepted side lengths.
    dtype : numpy dtype
        Target dtype of the returned array.
    name : str
        Used in error messages.
    """
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] not in dims:
        raise DimensionError(f"{name} dimension {arr.shape[0]} not in {dims}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def kron(a, b):
    a = check_matrix(a, name="a")
    b = check_matrix(b, name="b")
    if a.shape[0] * b.shape[0] > 8:
        raise DimensionError(
            f"kron result dimension {a.shape[0] * b.shape[0]} exceeds 8"
        )
    return np.kron(a, b)


def partial_trace(rho, keep, dims=None):
    """Trace out every qubit except ``keep``.

    Parameters
    ----------
    rho : array-like, shape (d, d)
        Operator on ``len(dims)`` qubits, first factor most significant.
    keep : int
        Index of the subsystem to keep.
    dims : sequence of int, optional
        Subsystem dimensions; defaults to all 2s. Their product must equal d.

    Returns
    -------
    ndarray of shape (dims[keep], dims[keep])
    """
    rho = check_matrix(rho, name="rho")
    if dims is None:
        dims = [2] * int(round(np.log2(rho.shape[0])))
    dims = list(dims)
    if any(d != 2 for d in dims):
        raise DimensionError(f"only qubit subsystems are supported, got {dims}")
    if int(np.prod(dims)) != rho.shape[0]:
        raise DimensionError(f"dims {dims} do not multiply to {rho.shape[0]}")
    if not 0 <= keep < len(dims):
        raise DimensionError(f"keep={keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    t = rho.reshape(dims + dims)
    # contract every pair (i, i+n) except the kept one
    row = list(range(n))
    col = [i + n if i == keep else i for i in range(n)]
    return np.einsum(t, row + col, [keep, keep + n])


def is_hermitian(h, tol=TAU_HERM):
    h = np.asarray(h)
    return bool(np.max(np.abs(h - h.conj().T)) <= tol)


def hermitian_eig(h):
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real, ascending.
    eigenvectors : ndarray
        Columns are the orthonormal eigenvectors.
    """
    h = check_matrix(h, name="h")
    if not is_hermitian(h):
        raise NotHermitianError(
            f"input deviates from Hermitian by {np.max(np.abs(h - h.conj().T)):.3e}"
        )
    h = 0.5 * (h + h.conj().T)
    return np.linalg.eigh(h)


def svd4(m):
    """SVD of a real 4x4 matrix: ``m = U @ diag(d) @ W.T``.

    Singular values come back descending; ``U`` and ``W`` are real
    orthogonal.
    """
    m = check_matrix(m, dims=(4,), dtype=float, name="m")
    u, d, wt = np.linalg.svd(m)
    return u, d, wt.T


def solve3(a, b, tau_rank=TAU_RANK):
    """Solve a 3x3 real system and report its condition number.

    Raises
    ------
    SingularSystemError
        If ``|det(a)| < tau_rank * ||a||_2**3``. The error carries the
        numerical rank and the singular values.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (3, 3) or b.shape != (3,):
        raise DimensionError(f"expected (3,3) and (3,), got {a.shape} and {b.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("non-finite entries in linear system")
    sv = np.linalg.svd(a, compute_uv=False)
    scale = sv[0]
    # det(a / scale) == det(a) / scale**3 without underflow
    if scale == 0.0 or abs(np.linalg.det(a / scale)) < tau_rank:
        rank = int(np.sum(sv > tau_rank * scale)) if scale > 0 else 0
        raise SingularSystemError(
            f"coefficient matrix is rank deficient (numerical rank {rank})",
            rank=rank,
            singular_values=sv,
        )
    return np.linalg.solve(a, b), float(sv[0] / sv[-1])
