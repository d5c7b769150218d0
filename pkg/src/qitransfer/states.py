"""Qubit and two-qubit state representations and conversions between them.

A single qubit is stored as its Pauli coefficients ``c = (1, c1, c2, c3)``
with ``rho = (1/2) sum_i c_i sigma_i``. A two-qubit channel is stored as its
correlation matrix ``r_ij = Tr(rho sigma_i x sigma_j)`` with
``rho = (1/4) sum_ij r_ij sigma_i x sigma_j``. Pauli index 0 is the identity.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from ._tolerances import TAU_HERM, TAU_PSD, TAU_RANK
from .exceptions import (
    DimensionError,
    NormalizationError,
    StateFormatError,
    UnphysicalStateError,
)

PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
# PAULI_PAIRS[i, j] = sigma_i (x) sigma_j
PAULI_PAIRS = np.einsum("iab,jcd->ijacbd", PAULIS, PAULIS).reshape(4, 4, 4, 4)


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityState:
    """Validated density matrix of one or two qubits.

    Construction checks Hermiticity and unit trace to ``TAU_HERM`` and that
    the smallest eigenvalue is at least ``-TAU_PSD``. States failing the
    positivity check are rejected, never clipped.
    """

    rho: np.ndarray
    qubits: int = field(default=0)

    def __post_init__(self):
        rho = linalg.check_matrix(self.rho, dims=(2, 4), name="rho")
        qubits = {2: 1, 4: 2}[rho.shape[0]]
        if self.qubits not in (0, qubits):
            raise DimensionError(f"{self.qubits} qubits incompatible with shape {rho.shape}")
        if not linalg.is_hermitian(rho):
            raise UnphysicalStateError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1) > TAU_HERM:
            raise UnphysicalStateError(f"density matrix has trace {tr.real:.12g}, expected 1")
        rho = 0.5 * (rho + rho.conj().T)
        lam_min = float(np.linalg.eigvalsh(rho)[0])
        if lam_min < -TAU_PSD:
            raise UnphysicalStateError(
                f"density matrix not positive semidefinite (min eigenvalue {lam_min:.3e})",
                min_eigenvalue=lam_min,
            )
        object.__setattr__(self, "rho", _frozen(rho))
        object.__setattr__(self, "qubits", qubits)

    @property
    def dim(self):
        return self.rho.shape[0]

    def purity(self):
        return float(np.real(np.trace(self.rho @ self.rho)))

    def __eq__(self, other):
        if not isinstance(other, DensityState):
            return NotImplemented
        return self.qubits == other.qubits and np.array_equal(self.rho, other.rho)

    __hash__ = None


@dataclass(frozen=True)
class PauliVector:
    """Pauli coefficients ``(1, c1, c2, c3)`` of a physical qubit."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (4,):
            raise DimensionError(f"PauliVector needs 4 coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise UnphysicalStateError("Pauli coefficients must be finite")
        if c[0] != 1.0:
            raise UnphysicalStateError(f"c0 must be exactly 1, got {c[0]!r}")
        if c[1:] @ c[1:] > 1 + TAU_HERM:
            raise UnphysicalStateError(
                f"Bloch vector length {np.linalg.norm(c[1:]):.12g} exceeds 1"
            )
        object.__setattr__(self, "c", _frozen(c))

    @classmethod
    def from_bloch(cls, bloch):
        return cls(np.concatenate([[1.0], np.asarray(bloch, dtype=float)]))

    @property
    def bloch(self):
        return self.c[1:]

    def to_density(self):
        return DensityState(0.5 * np.einsum("i,iab->ab", self.c, PAULIS))

    def __eq__(self, other):
        if not isinstance(other, PauliVector):
            return NotImplemented
        return np.array_equal(self.c, other.c)

    __hash__ = None


@dataclass(frozen=True)
class CorrelationMatrix:
    """Real 4x4 correlation matrix of a physical two-qubit state."""

    r: np.ndarray

    def __post_init__(self):
        r = linalg.check_matrix(self.r, dims=(4,), dtype=float, name="r")
        if r[0, 0] != 1.0:
            raise UnphysicalStateError(f"r00 must be exactly 1, got {r[0, 0]!r}")
        if np.max(np.abs(r)) > 1 + TAU_HERM:
            raise UnphysicalStateError("correlation entries must lie in [-1, 1]")
        lam_min = float(np.linalg.eigvalsh(_rho_from_r(r))[0])
        if lam_min < -TAU_PSD:
            raise UnphysicalStateError(
                f"correlation matrix describes a non-PSD state (min eigenvalue {lam_min:.3e})",
                min_eigenvalue=lam_min,
            )
        object.__setattr__(self, "r", _frozen(r))

    @property
    def marginal_a(self):
        """Bloch vector of qubit A, ``r_j0``."""
        return self.r[1:, 0]

    @property
    def marginal_b(self):
        """Bloch vector of qubit B, ``r_0k``."""
        return self.r[0, 1:]

    @property
    def block(self):
        """Lower-right 3x3 block ``r_jk``, j, k >= 1."""
        return self.r[1:, 1:]

    def to_density(self):
        return DensityState(_rho_from_r(self.r))

    def __eq__(self, other):
        if not isinstance(other, CorrelationMatrix):
            return NotImplemented
        return np.array_equal(self.r, other.r)

    __hash__ = None


def _rho_from_r(r):
    rho = 0.25 * np.einsum("ij,ijab->ab", r, PAULI_PAIRS)
    return 0.5 * (rho + rho.conj().T)


def qubit_from_bloch(c1, c2, c3):
    return PauliVector(np.array([1.0, c1, c2, c3])).to_density()


def to_bloch(rho):
    """Bloch vector ``Tr(rho sigma_k)``, k = 1..3, of a single-qubit state."""
    rho = as_density(rho, qubits=1).rho
    return np.real(np.einsum("ab,kba->k", rho, PAULIS[1:]))


def pauli_vector(rho):
    return PauliVector(np.concatenate([[1.0], to_bloch(rho)]))


def channel_from_correlation(r):
    if not isinstance(r, CorrelationMatrix):
        r = CorrelationMatrix(r)
    return r.to_density()


def correlation_from_channel(rho):
    rho = as_density(rho, qubits=2).rho
    r = np.real(np.einsum("ab,ijba->ij", rho, PAULI_PAIRS))
    r[0, 0] = 1.0
    return CorrelationMatrix(r)


def as_density(state, qubits=None):
    """Coerce ``state`` to a :class:`DensityState`.

    Accepts a DensityState, PauliVector, CorrelationMatrix or a raw matrix.
    """
    if isinstance(state, DensityState):
        out = state
    elif isinstance(state, (PauliVector, CorrelationMatrix)):
        out = state.to_density()
    else:
        out = DensityState(state)
    if qubits is not None and out.qubits != qubits:
        raise DimensionError(f"expected a {qubits}-qubit state, got {out.qubits} qubits")
    return out


def as_correlation(state):
    if isinstance(state, CorrelationMatrix):
        return state
    return correlation_from_channel(state)


def product_state(rho_a, rho_b):
    a = as_density(rho_a, qubits=1)
    b = as_density(rho_b, qubits=1)
    return DensityState(linalg.kron(a.rho, b.rho))


def bell_vector(m, n):
    """Amplitudes of ``(|0,n> + (-1)^m |1,1-n>) / sqrt(2)``."""
    if m not in (0, 1) or n not in (0, 1):
        raise ValueError(f"Bell indices must be bits, got ({m}, {n})")
    v = np.zeros(4, dtype=complex)
    v[n] = 1.0
    v[2 + (1 - n)] = (-1) ** m
    return v / np.sqrt(2)


def werner(x):
    """Werner channel ``x |b00><b00| + (1 - x) I/4``.

    Uses ``|b00> = (|00> + |11>)/sqrt(2)`` so the correlation matrix is
    ``diag(1, x, -x, x)``.
    """
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"Werner parameter must lie in [0, 1], got {x}")
    b = bell_vector(0, 0)
    return DensityState(x * np.outer(b, b.conj()) + (1 - x) * np.eye(4) / 4)


def is_security_form(rho, tol=TAU_HERM):
    """True when qubit A is maximally mixed (``r_j0 = 0`` for j = 1..3).

    For such channels the four Bell outcomes are equally likely for every
    input, so the classical message reveals nothing about the input.
    """
    r = as_correlation(rho)
    return bool(np.max(np.abs(r.marginal_a)) <= tol)


def to_security_form(rho):
    """Zero the A-marginal of a channel; raises if the result is unphysical."""
    r = np.array(as_correlation(rho).r)
    r[1:, 0] = 0.0
    return CorrelationMatrix(r).to_density()


@dataclass(frozen=True)
class PseudoTerm:
    """One normalized term ``p * mu_A (x) mu_B`` of a pseudo-mixture."""

    p: float
    alpha_a: np.ndarray
    alpha_b: np.ndarray
    physical_a: bool
    physical_b: bool

    def correlation(self):
        return self.p * np.outer(self.alpha_a, self.alpha_b)


@dataclass(frozen=True)
class RawTerm:
    """SVD term ``(d/4) A (x) B`` whose identity component vanishes.

    Kept instead of a normalized term where the normalization divides by zero.
    """

    d: float
    u: np.ndarray
    w: np.ndarray

    def correlation(self):
        return self.d * np.outer(self.u, self.w)


@dataclass(frozen=True)
class PseudoMixture:
    terms: tuple
    raw_terms: tuple = ()
    singular_values: np.ndarray = None

    @property
    def weights(self):
        return np.array([t.p for t in self.terms])

    def __len__(self):
        return len(self.terms) + len(self.raw_terms)

    def correlation(self):
        r = np.zeros((4, 4))
        for t in self.terms + self.raw_terms:
            r += t.correlation()
        return r

    def rebuild(self):
        """Density matrix ``sum p_i mu_A^i (x) mu_B^i`` plus any raw terms."""
        return _rho_from_r(self.correlation())


def _spread_identity_component(u, w, idx):
    # Within a block of equal singular values any orthogonal mixing of columns
    # leaves U D W^T unchanged. A Householder reflection spreads row 0 evenly.
    k = len(idx)
    row = u[0, idx]
    norm = np.linalg.norm(row)
    if k < 2 or norm < TAU_RANK:
        return
    target = np.full(k, norm / np.sqrt(k))
    v = row - target
    vv = v @ v
    if vv < 1e-30:
        return
    h = np.eye(k) - 2.0 * np.outer(v, v) / vv
    u[:, idx] = u[:, idx] @ h
    w[:, idx] = w[:, idx] @ h


def pseudo_mixture(r, strict=False):
    """Decompose a channel into ``sum_i p_i mu_A^i (x) mu_B^i`` via the SVD of R.

    With ``R = U diag(d) W^T``, term i has weight ``p_i = d_i U_0i W_0i`` and
    factor coefficients ``alpha_j = U_ji / U_0i`` (and likewise from W). The
    weights sum to one but may be negative, and a factor is physical only
    when its Bloch part has length <= 1.

    Singular values below ``TAU_RANK * d_max`` are dropped. Inside a block of
    degenerate singular values the basis is rotated so the identity
    components are spread evenly. A retained term whose identity component
    is still below ``TAU_RANK`` cannot be normalized: it is kept as a
    :class:`RawTerm`, or ``NormalizationError`` is raised when ``strict``.
    """
    r = as_correlation(r).r
    u, d, w = linalg.svd4(r)
    u, w = u.copy(), w.copy()
    keep = d > TAU_RANK * d[0]
    n_keep = int(keep.sum())

    start = 0
    while start < n_keep:
        stop = start + 1
        while stop < n_keep and abs(d[stop] - d[start]) <= TAU_RANK * d[0]:
            stop += 1
        _spread_identity_component(u, w, list(range(start, stop)))
        start = stop

    terms, raw = [], []
    for i in range(n_keep):
        u0, w0 = u[0, i], w[0, i]
        if abs(u0) < TAU_RANK or abs(w0) < TAU_RANK:
            if strict:
                raise NormalizationError(
                    f"term {i} (singular value {d[i]:.6g}) has identity component "
                    f"U0={u0:.3e}, W0={w0:.3e}; normalized factors are undefined"
                )
            raw.append(RawTerm(float(d[i]), _frozen(u[:, i]), _frozen(w[:, i])))
            continue
        alpha_a = u[:, i] / u0
        alpha_b = w[:, i] / w0
        terms.append(
            PseudoTerm(
                p=float(d[i] * u0 * w0),
                alpha_a=_frozen(alpha_a),
                alpha_b=_frozen(alpha_b),
                physical_a=bool(alpha_a[1:] @ alpha_a[1:] <= 1 + TAU_HERM),
                physical_b=bool(alpha_b[1:] @ alpha_b[1:] <= 1 + TAU_HERM),
            )
        )
    return PseudoMixture(tuple(terms), tuple(raw), _frozen(d))


# --- JSON state format -----------------------------------------------------

def _require(obj, key, kind):
    if key not in obj:
        raise StateFormatError(f"'{kind}' state is missing field '{key}'", field=key)
    return obj[key]


def _numeric_array(value, shape, field_name):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFormatError(f"field '{field_name}' is not numeric: {exc}", field=field_name)
    if arr.shape != shape:
        raise StateFormatError(
            f"field '{field_name}' has shape {arr.shape}, expected {shape}", field=field_name
        )
    if not np.all(np.isfinite(arr)):
        raise StateFormatError(f"field '{field_name}' has non-finite entries", field=field_name)
    return arr


def state_from_dict(obj):
    """Build a DensityState from the JSON object model.

    Recognised kinds: ``pauli`` (``c``), ``correlation`` (``r``), ``dense``
    (``re``, optional ``im``) and ``werner`` (``x``). Structural problems
    raise :class:`StateFormatError`; physics violations raise
    :class:`UnphysicalStateError`.
    """
    if not isinstance(obj, dict):
        raise StateFormatError("state must be a JSON object", field="<root>")
    kind = _require(obj, "kind", "<state>")
    if kind == "pauli":
        return PauliVector(_numeric_array(_require(obj, "c", kind), (4,), "c")).to_density()
    if kind == "correlation":
        return CorrelationMatrix(_numeric_array(_require(obj, "r", kind), (4, 4), "r")).to_density()
    if kind == "dense":
        re = np.array(_require(obj, "re", kind), dtype=object)
        if re.ndim != 2 or re.shape[0] != re.shape[1] or re.shape[0] not in (2, 4):
            raise StateFormatError(f"field 're' has unsupported shape {re.shape}", field="re")
        shape = re.shape
        re = _numeric_array(obj["re"], shape, "re")
        im = _numeric_array(obj.get("im", np.zeros(shape)), shape, "im")
        return DensityState(re + 1j * im)
    if kind == "werner":
        x = _require(obj, "x", kind)
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise StateFormatError("field 'x' must be a number", field="x")
        if not 0.0 <= x <= 1.0:
            raise UnphysicalStateError(f"Werner parameter {x} outside [0, 1]")
        return werner(x)
    raise StateFormatError(f"unknown state kind {kind!r}", field="kind")


def state_to_dict(state, kind=None):
    """Serialize a state; ``kind`` defaults to 'pauli' for one qubit, 'correlation' for two."""
    state = as_density(state)
    if kind is None:
        kind = "pauli" if state.qubits == 1 else "correlation"
    if kind == "pauli":
        return {"kind": "pauli", "c": [1.0] + [float(v) for v in to_bloch(state)]}
    if kind == "correlation":
        return {"kind": "correlation", "r": correlation_from_channel(state).r.tolist()}
    if kind == "dense":
        return {"kind": "dense", "re": state.rho.real.tolist(), "im": state.rho.imag.tolist()}
    raise ValueError(f"unknown state kind {kind!r}")


def loads_state(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
        ) from exc
    return state_from_dict(obj)


def load_state(path):
    with open(path, encoding="utf-8") as fh:
        return loads_state(fh.read())
