"""Numerical tolerances shared by every module.

Rank decisions in the linear solver, the SVD classifier and the
pseudo-mixture truncation all use ``TAU_RANK`` so they stay consistent.
"""

TAU_HERM = 1e-9   # absolute, max-entry Hermiticity / trace / physicality
TAU_EIG = 1e-10
TAU_SVD = 1e-10
TAU_SOLVE = 1e-9
TAU_RANK = 1e-8   # relative
TAU_PSD = 1e-8    # most negative eigenvalue allowed
TAU_OPT = 1e-4    # bits, discord optimizer


def as_dict():
    return {
        "tau_herm": TAU_HERM,
        "tau_eig": TAU_EIG,
        "tau_svd": TAU_SVD,
        "tau_solve": TAU_SOLVE,
        "tau_rank": TAU_RANK,
        "tau_psd": TAU_PSD,
        "tau_opt": TAU_OPT,
    }
