"""Bell-measurement collapse and reconstruction of the sender's qubit.

Alice holds qubit A of a two-qubit channel AB and an unknown qubit C. She
projects CA onto a Bell state ``|b_mn>`` and sends ``(m, n)`` to Bob, whose
qubit collapses to a state with Bloch vector ``s``. For each outcome ``s``
depends on the input Bloch vector ``c`` through

    s_k = (r_0k + sum_j e_j r_jk c_j) / (1 + sum_j e_j r_j0 c_j)

with signs ``e = ((-1)^m, -(-1)^(m+n), (-1)^n)``. Rearranged, this is a 3x3
linear system ``T c = s - r_0`` that Bob can solve whenever the channel's
correlation matrix has full rank, because ``D det(T) = -det(R)`` where D is
the denominator above.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import linalg
from ._tolerances import TAU_RANK
from .exceptions import RankDeficientError, SingularSystemError, UndefinedCollapseError
from .states import (
    DensityState,
    PseudoMixture,
    as_correlation,
    as_density,
    bell_vector,
    pseudo_mixture,
    to_bloch,
)


class BellOutcome(NamedTuple):
    m: int
    n: int

    @classmethod
    def coerce(cls, value):
        """Accept a BellOutcome, an ``(m, n)`` pair or a two-character string like ``"01"``."""
        if isinstance(value, str):
            if len(value) != 2 or any(ch not in "01" for ch in value):
                raise ValueError(f"outcome string must be two bits, got {value!r}")
            value = (int(value[0]), int(value[1]))
        m, n = value
        if m not in (0, 1) or n not in (0, 1):
            raise ValueError(f"Bell outcome must be a pair of bits, got {value!r}")
        return cls(int(m), int(n))

    @property
    def signs(self):
        """Per-axis signs ``e_j`` entering the collapse formula."""
        m, n = self
        return np.array([(-1) ** m, -((-1) ** (m + n)), (-1) ** n], dtype=float)

    def __str__(self):
        return f"{self.m}{self.n}"


OUTCOMES = tuple(BellOutcome(m, n) for m in (0, 1) for n in (0, 1))


def bell_state(outcome):
    outcome = BellOutcome.coerce(outcome)
    v = bell_vector(*outcome)
    return DensityState(np.outer(v, v.conj()))


@dataclass(frozen=True)
class CollapseResult:
    outcome: BellOutcome
    probability: float
    s: np.ndarray
    rho_b: DensityState


def collapse(rho_c, rho_ab, outcome):
    """Project ``rho_C (x) rho_AB`` onto ``|b_mn><b_mn|`` on CA and return Bob's state.

    This is the direct 8x8 computation and serves as the reference for
    :func:`s_vector_analytic`.

    Raises
    ------
    UndefinedCollapseError
        If the outcome probability does not exceed ``TAU_RANK``.
    """
    outcome = BellOutcome.coerce(outcome)
    rho_c = as_density(rho_c, qubits=1)
    rho_ab = as_density(rho_ab, qubits=2)
    joint = linalg.kron(rho_c.rho, rho_ab.rho)
    proj = linalg.kron(bell_state(outcome).rho, np.eye(2))
    unnorm = linalg.partial_trace(proj @ joint @ proj, keep=2, dims=[2, 2, 2])
    prob = float(np.real(np.trace(unnorm)))
    if prob <= TAU_RANK:
        raise UndefinedCollapseError(
            f"outcome {outcome} has probability {prob:.3e}; collapsed state undefined",
            probability=prob,
        )
    rho_b = DensityState(unnorm / prob)
    return CollapseResult(outcome, prob, to_bloch(rho_b), rho_b)


def _bloch(c):
    c = np.asarray(getattr(c, "c", c), dtype=float)
    if c.shape == (4,):
        c = c[1:]
    if c.shape != (3,):
        raise ValueError(f"expected a Bloch vector of length 3 (or 4 with c0), got {c.shape}")
    return c


def denominator(r, c, outcome):
    """``1 + sum_j e_j r_j0 c_j``; four times the outcome probability."""
    r = as_correlation(r)
    eps = BellOutcome.coerce(outcome).signs
    return float(1.0 + eps @ (r.marginal_a * _bloch(c)))


def outcome_probabilities(r, c):
    return np.array([denominator(r, c, o) / 4.0 for o in OUTCOMES])


def s_vector_analytic(r, c, outcome):
    """Closed-form Bloch vector of Bob's collapsed qubit."""
    r = as_correlation(r)
    eps = BellOutcome.coerce(outcome).signs
    c = _bloch(c)
    den = 1.0 + eps @ (r.marginal_a * c)
    if abs(den) <= TAU_RANK:
        raise UndefinedCollapseError(
            f"outcome {BellOutcome.coerce(outcome)} has vanishing probability", probability=den / 4
        )
    return (r.marginal_b + (eps * c) @ r.block) / den


def coefficient_matrix(r, s, outcome):
    """Matrix T with ``T[k, j] = e_j (r_jk - r_j0 s_k)`` so that ``T c = s - r_0``."""
    r = as_correlation(r)
    eps = BellOutcome.coerce(outcome).signs
    s = np.asarray(s, dtype=float)
    return (r.block.T - np.outer(s, r.marginal_a)) * eps


def noise_gain(t):
    """``||T^-1||_2``: worst-case amplification of an error in s into c.

    Unlike the condition number this is not scale invariant, so it grows as
    ``1/x`` for a Werner channel with parameter x.
    """
    sv = np.linalg.svd(np.asarray(t, dtype=float), compute_uv=False)
    return float(1.0 / sv[-1]) if sv[-1] > 0 else float("inf")


@dataclass(frozen=True)
class RankClassification:
    rank: int
    affine_dim: int
    singular_values: np.ndarray
    basis: PseudoMixture


def rank_classify(r):
    """Numerical rank of R and the dimension of the region Bob's states can reach.

    Rank 1 is a product channel (a single point), rank 2 a line, rank 3 a
    plane and rank 4 a solid region of the Bloch ball.
    """
    basis = pseudo_mixture(r)
    d = basis.singular_values
    rank = int(np.sum(d > TAU_RANK * d[0]))
    return RankClassification(rank, rank - 1, d, basis)


def _pure_candidates(t, c_min):
    _, sv, vt = np.linalg.svd(t)
    if np.sum(sv > TAU_RANK * sv[0]) != 2:
        return []
    gap = 1.0 - c_min @ c_min
    if gap < 0:
        return []
    v = vt[-1]
    # c_min is orthogonal to the null direction v
    step = np.sqrt(gap)
    if step == 0:
        return [c_min]
    return [c_min + step * v, c_min - step * v]


def reconstruct(r, s, outcome):
    """Recover the input Bloch vector from Bob's Bloch vector ``s``.

    Returns
    -------
    c : ndarray of shape (3,)
        Reconstructed Bloch vector ``(c1, c2, c3)``.
    cond : float
        Condition number ``sigma_max / sigma_min`` of the coefficient matrix,
        the worst-case amplification of relative error. See
        :func:`noise_gain` for the absolute amplification.

    Raises
    ------
    RankDeficientError
        The solution is not unique. For rank-3 channels the error carries the
        minimum-norm solution and the unit-length solutions on the same line.
    """
    r = as_correlation(r)
    outcome = BellOutcome.coerce(outcome)
    s = np.asarray(s, dtype=float)
    t = coefficient_matrix(r, s, outcome)
    rhs = s - r.marginal_b
    # T is singular exactly when R is; for low-rank R, T is pure round-off
    # and a scale-relative test on T alone cannot see that.
    cls = rank_classify(r)
    if cls.rank < 4:
        _raise_rank_deficient(cls, t, rhs)
    try:
        return linalg.solve3(t, rhs)
    except SingularSystemError as exc:
        _raise_rank_deficient(cls, t, rhs, exc)


def _raise_rank_deficient(cls, t, rhs, cause=None):
    min_norm, pure = None, []
    if cls.rank == 3:
        min_norm = np.linalg.lstsq(t, rhs, rcond=TAU_RANK)[0]
        pure = _pure_candidates(t, min_norm)
    detail = f" ({cause})" if cause is not None else ""
    raise RankDeficientError(
        f"channel correlation matrix has rank {cls.rank}; "
        f"input cannot be uniquely reconstructed{detail}",
        classification=cls,
        min_norm=min_norm,
        pure_candidates=pure,
    ) from cause


@dataclass
class OutcomeReport:
    """What Bob obtains for one Bell outcome.

    ``status`` is ``"ok"``, ``"zero_probability"`` (outcome cannot occur) or
    ``"rank_deficient"`` (no unique reconstruction).
    """

    outcome: BellOutcome
    status: str
    probability: float
    collapse: CollapseResult = None
    reconstructed: np.ndarray = None
    cond: float = None
    det_t: float = None
    noise_gain: float = None
    min_norm: np.ndarray = None
    pure_candidates: list = field(default_factory=list)
    message: str = None


@dataclass
class TransmissionRecord:
    input_bloch: np.ndarray
    correlation: np.ndarray
    reports: tuple
    classification: RankClassification
    det_r: float

    @property
    def full_rank(self):
        return self.classification.rank == 4

    def det_identity_residual(self):
        """Max over defined outcomes of ``|D det(T) + det(R)|``."""
        res = [
            abs(4.0 * rep.probability * rep.det_t + self.det_r)
            for rep in self.reports
            if rep.det_t is not None
        ]
        return max(res) if res else None

    def max_error(self):
        errs = [
            np.max(np.abs(rep.reconstructed - self.input_bloch))
            for rep in self.reports
            if rep.reconstructed is not None
        ]
        return max(errs) if errs else None


def transmit(rho_c, rho_ab):
    """Run all four Bell outcomes and reconstruct the input from each.

    Outcomes that cannot occur or cannot be inverted are reported with a
    status marker; they never abort the remaining outcomes.
    """
    rho_c = as_density(rho_c, qubits=1)
    rho_ab = as_density(rho_ab, qubits=2)
    r = as_correlation(rho_ab)
    cls = rank_classify(r)
    reports = []
    for outcome in OUTCOMES:
        try:
            res = collapse(rho_c, rho_ab, outcome)
        except UndefinedCollapseError as exc:
            reports.append(
                OutcomeReport(outcome, "zero_probability", exc.probability, message=str(exc))
            )
            continue
        t = coefficient_matrix(r, res.s, outcome)
        det_t = float(np.linalg.det(t))
        try:
            c, cond = reconstruct(r, res.s, outcome)
        except RankDeficientError as exc:
            reports.append(
                OutcomeReport(
                    outcome,
                    "rank_deficient",
                    res.probability,
                    collapse=res,
                    det_t=det_t,
                    min_norm=exc.min_norm,
                    pure_candidates=exc.pure_candidates,
                    message=str(exc),
                )
            )
            continue
        reports.append(
            OutcomeReport(outcome, "ok", res.probability, res, c, cond, det_t, noise_gain(t))
        )
    return TransmissionRecord(
        input_bloch=to_bloch(rho_c),
        correlation=np.array(r.r),
        reports=tuple(reports),
        classification=cls,
        det_r=float(np.linalg.det(r.r)),
    )
