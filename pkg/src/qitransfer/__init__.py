"""Quantum information transmission through discordant two-qubit channels.

Simulates Bell-measurement collapse of an unknown qubit through a shared
two-qubit channel, reconstructs the input from Bob's collapsed state, and
characterises channels by correlation-matrix rank, discord and concurrence.
"""

from .exceptions import (
    DimensionError,
    NormalizationError,
    NotHermitianError,
    QITransferError,
    RankDeficientError,
    SingularSystemError,
    StateFormatError,
    UndefinedCollapseError,
    UnphysicalStateError,
)
from .linalg import hermitian_eig, kron, partial_trace, solve3, svd4
from .measures import concurrence, discord, entropy, mutual_information
from .protocol import (
    OUTCOMES,
    BellOutcome,
    bell_state,
    coefficient_matrix,
    collapse,
    rank_classify,
    reconstruct,
    s_vector_analytic,
    transmit,
)
from .states import (
    CorrelationMatrix,
    DensityState,
    PauliVector,
    channel_from_correlation,
    correlation_from_channel,
    is_security_form,
    pseudo_mixture,
    qubit_from_bloch,
    to_bloch,
    werner,
)
from .tomography import estimate_bloch, remote_tomography, sample_pauli

__version__ = "0.1.0"
