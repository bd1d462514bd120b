"""Dense complex matrices and the factorizations the rest of the toolkit consumes.

Everything is double precision. Real input is promoted to complex128 so the
whole toolkit runs on a single scalar type; the heavy kernels (SVD, eigen,
Schur) delegate to LAPACK through numpy/scipy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError

__all__ = [
    "Matrix",
    "SchurFactors",
    "frobenius_norm",
    "two_norm",
    "singular_values",
    "eigenvalues",
    "spectral_radius",
    "schur",
    "mat_power_norms",
]


class Matrix:
    """Immutable dense matrix of complex128 entries.

    Entries must all be finite; the backing array is write-locked so
    instances are safe to share across threads.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=np.complex128, order="C")
        if a.ndim != 2:
            raise ValueError(f"matrix entries must be 2-D, got {a.ndim}-D")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"matrix dimensions must be positive, got {a.shape}")
        if not np.isfinite(a).all():
            raise ValueError("matrix entries must be finite (no NaN/Inf)")
        a.setflags(write=False)
        self._a = a

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the underlying (rows, cols) complex array."""
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_real(self) -> bool:
        return not self._a.imag.any()

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(np.eye(n))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(np.zeros((rows, cols)))

    @classmethod
    def diag(cls, values) -> "Matrix":
        return cls(np.diag(np.asarray(values)))

    def transpose(self) -> "Matrix":
        return Matrix(self._a.T)

    def adjoint(self) -> "Matrix":
        """Conjugate transpose."""
        return Matrix(self._a.conj().T)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch for @: {self.shape} x {other.shape}")
        return Matrix(self._a @ other._a)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch for +: {self.shape} vs {other.shape}")
        return Matrix(self._a + other._a)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch for -: {self.shape} vs {other.shape}")
        return Matrix(self._a - other._a)

    def __mul__(self, scalar) -> "Matrix":
        return Matrix(self._a * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Matrix":
        return Matrix(-self._a)

    def __getitem__(self, key) -> complex:
        return complex(self._a[key])

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols})"


@dataclass(frozen=True)
class SchurFactors:
    """Complex Schur form W = Q T Q* with T split into diagonal and strict part.

    ``eigenvalues`` is the diagonal of T; ``n_strict`` is the strictly upper
    triangular remainder. Q and T are unique only up to phases and eigenvalue
    ordering, so consumers should rely on the reconstruction invariants, not
    on element values.
    """

    q: Matrix
    t: Matrix
    eigenvalues: np.ndarray
    n_strict: Matrix


def _require_square(m: Matrix, op: str) -> None:
    if not m.is_square:
        raise ValueError(f"{op} requires a square matrix, got {m.shape}")


def frobenius_norm(m: Matrix) -> float:
    """sqrt of the sum of squared entry magnitudes."""
    return float(np.linalg.norm(m.array))


def singular_values(m: Matrix) -> np.ndarray:
    """All min(rows, cols) singular values, descending."""
    try:
        return np.linalg.svd(m.array, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc


def two_norm(m: Matrix) -> float:
    """Spectral norm: the largest singular value."""
    return float(singular_values(m)[0])


def eigenvalues(m: Matrix) -> np.ndarray:
    """The n eigenvalues (with multiplicity) of a square matrix."""
    _require_square(m, "eigenvalues")
    try:
        return np.linalg.eigvals(m.array)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc


def spectral_radius(m: Matrix) -> float:
    """Largest eigenvalue modulus."""
    return float(np.abs(eigenvalues(m)).max())


def schur(m: Matrix) -> SchurFactors:
    """Complex Schur decomposition W = Q T Q*, T upper triangular."""
    _require_square(m, "schur")
    try:
        t, q = scipy.linalg.schur(m.array, output="complex")
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Schur decomposition failed: {exc}") from exc
    t = np.triu(t)  # LAPACK already zeros the lower part; make it structural
    return SchurFactors(
        q=Matrix(q),
        t=Matrix(t),
        eigenvalues=np.diag(t).copy(),
        n_strict=Matrix(np.triu(t, 1)),
    )


def mat_power_norms(m: Matrix, l_max: int) -> np.ndarray:
    """Spectral norms of W^0 .. W^l_max; entry 0 is exactly 1."""
    _require_square(m, "mat_power_norms")
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    norms = np.empty(l_max + 1)
    norms[0] = 1.0
    p = np.eye(m.rows, dtype=np.complex128)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, l_max + 1):
            p = p @ m.array
            if not np.isfinite(p).all():
                raise NumericalError(f"matrix power overflowed at exponent {k}")
            norms[k] = np.linalg.svd(p, compute_uv=False)[0]
    return norms
