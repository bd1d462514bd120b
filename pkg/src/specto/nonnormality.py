"""Measures of how far a square matrix is from normal.

A matrix is normal when it commutes with its adjoint; only then is it
unitarily diagonalizable and only then do eigenvalues tell the whole
stability story. Two indices are exposed: the Henrici number (commutator
norm over squared Frobenius norm, scale invariant, 0 iff normal) and the
Schur departure ||N||_F, the strictly upper triangular mass left over after
unitary triangularization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .matrix import Matrix, frobenius_norm, schur

__all__ = [
    "NonNormalityReport",
    "commutator_norm",
    "henrici_number",
    "schur_departure",
    "is_normal",
    "nonnormality_report",
]

DEFAULT_NORMALITY_TOL = 1e-10


@dataclass(frozen=True)
class NonNormalityReport:
    henrici: float
    schur_departure: float
    is_normal: bool
    commutator_norm: float


def commutator_norm(w: Matrix) -> float:
    """||W W* - W* W||_F."""
    if not w.is_square:
        raise ValueError(f"commutator_norm requires a square matrix, got {w.shape}")
    a = w.array
    return float(np.linalg.norm(a @ a.conj().T - a.conj().T @ a))


def henrici_number(w: Matrix) -> float:
    """Scale-invariant non-normality index ||W W* - W* W||_F / ||W||_F^2.

    Zero (within rounding) iff W is normal. The zero matrix is degenerate;
    it is reported as 0 with a warning.
    """
    if not w.is_square:
        raise ValueError(f"henrici_number requires a square matrix, got {w.shape}")
    fro = frobenius_norm(w)
    if fro == 0.0:
        warnings.warn(
            "henrici_number of the zero matrix is degenerate; returning 0",
            RuntimeWarning,
            stacklevel=2,
        )
        return 0.0
    return commutator_norm(w) / fro**2


def schur_departure(w: Matrix) -> tuple[np.ndarray, float]:
    """Eigenvalues plus ||N||_F, the strict upper triangle of the Schur T.

    N itself is not unique but its Frobenius norm is, and it satisfies
    ||N||_F^2 = ||W||_F^2 - sum |lambda_i|^2.
    """
    factors = schur(w)
    return factors.eigenvalues, frobenius_norm(factors.n_strict)


def is_normal(w: Matrix, tol: float = DEFAULT_NORMALITY_TOL) -> bool:
    """True iff the commutator norm is <= tol * max(1, ||W||_F^2)."""
    return commutator_norm(w) <= tol * max(1.0, frobenius_norm(w) ** 2)


def nonnormality_report(w: Matrix, tol: float = DEFAULT_NORMALITY_TOL) -> NonNormalityReport:
    _, departure = schur_departure(w)
    fro = frobenius_norm(w)
    comm = commutator_norm(w)
    return NonNormalityReport(
        henrici=0.0 if fro == 0.0 else comm / fro**2,
        schur_departure=departure,
        is_normal=comm <= tol * max(1.0, fro**2),
        commutator_norm=comm,
    )
