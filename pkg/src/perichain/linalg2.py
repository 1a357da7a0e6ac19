"""Overflow-safe 2x2 complex linear algebra.

Every quantity in the transfer-matrix formalism lives in 2x2 complex
arithmetic, so this module is the numerical bedrock of the package.  Plain
Python ``complex`` is faster than array machinery at this size and keeps the
algebra exact to machine precision, so there are no third-party imports.

Powers of a unit-determinant matrix grow like ``exp(kappa * n)`` whenever the
energy lies outside a spectral band; :class:`ScaledMat2` keeps the stored
entries normalized and accumulates the scale in log space, which makes powers
up to ``n ~ 1e9`` safe.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "Mat2",
    "ScaledMat2",
    "EigenPair",
    "Mat2OverflowError",
    "IDENTITY2",
    "ZERO2",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "eig2",
    "power_scaled",
]

#: Default threshold below which an eigenvalue discriminant counts as zero.
DEFECT_TOL = 1e-10


class Mat2OverflowError(ArithmeticError):
    """A plain Mat2 product overflowed; use power_scaled / ScaledMat2 instead."""


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class Mat2:
    """Immutable 2x2 complex matrix with finite entries.

    Row-major entries ``a11, a12, a21, a22``.  All operations are pure and
    return new instances, so values can be shared freely across workers.
    """

    a11: complex
    a12: complex
    a21: complex
    a22: complex

    def __post_init__(self) -> None:
        for entry in (self.a11, self.a12, self.a21, self.a22):
            if not _finite(complex(entry)):
                raise ValueError(f"Mat2 entries must be finite, got {entry!r}")

    def __matmul__(self, other: "Mat2") -> "Mat2":
        a, b = self, other
        prod = (
            a.a11 * b.a11 + a.a12 * b.a21,
            a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21,
            a.a21 * b.a12 + a.a22 * b.a22,
        )
        if not all(_finite(p) for p in prod):
            raise Mat2OverflowError(
                "matrix product overflowed; carry long products as "
                "ScaledMat2 (see power_scaled)"
            )
        return Mat2(*prod)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 + other.a11,
            self.a12 + other.a12,
            self.a21 + other.a21,
            self.a22 + other.a22,
        )

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 - other.a11,
            self.a12 - other.a12,
            self.a21 - other.a21,
            self.a22 - other.a22,
        )

    def __mul__(self, z: complex) -> "Mat2":
        return Mat2(self.a11 * z, self.a12 * z, self.a21 * z, self.a22 * z)

    __rmul__ = __mul__

    def det(self) -> complex:
        return self.a11 * self.a22 - self.a12 * self.a21

    def trace(self) -> complex:
        return self.a11 + self.a22

    def conj(self) -> "Mat2":
        """Entrywise complex conjugate."""
        return Mat2(
            self.a11.conjugate(),
            self.a12.conjugate(),
            self.a21.conjugate(),
            self.a22.conjugate(),
        )

    def dagger(self) -> "Mat2":
        """Conjugate transpose."""
        return Mat2(
            self.a11.conjugate(),
            self.a21.conjugate(),
            self.a12.conjugate(),
            self.a22.conjugate(),
        )

    def apply(self, v: tuple[complex, complex]) -> tuple[complex, complex]:
        """Matrix-vector product."""
        return (
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        )

    def max_abs(self) -> float:
        return max(abs(self.a11), abs(self.a12), abs(self.a21), abs(self.a22))


IDENTITY2 = Mat2(1.0, 0.0, 0.0, 1.0)
ZERO2 = Mat2(0.0, 0.0, 0.0, 0.0)
SIGMA_X = Mat2(0.0, 1.0, 1.0, 0.0)
SIGMA_Y = Mat2(0.0, -1.0j, 1.0j, 0.0)
SIGMA_Z = Mat2(1.0, 0.0, 0.0, -1.0)


@dataclass(frozen=True)
class EigenPair:
    """Eigen decomposition of a 2x2 matrix.

    When ``defective`` is true the matrix is a nontrivial Jordan block: there
    is a single eigenvalue (``lambda_plus == lambda_minus``) and a single
    eigenvector reported in both slots.  Eigenvectors have unit norm.
    """

    lambda_plus: complex
    lambda_minus: complex
    v_plus: tuple[complex, complex]
    v_minus: tuple[complex, complex]
    defective: bool


def _unit(v: tuple[complex, complex]) -> tuple[complex, complex]:
    norm = math.hypot(abs(v[0]), abs(v[1]))
    return (v[0] / norm, v[1] / norm)


def _eigvec(m: Mat2, lam: complex) -> tuple[complex, complex]:
    # Row relations of (m - lam*I) give two candidate null vectors; pick the
    # better conditioned one.
    cand_a = (m.a12, lam - m.a11)
    cand_b = (lam - m.a22, m.a21)
    na = abs(cand_a[0]) + abs(cand_a[1])
    nb = abs(cand_b[0]) + abs(cand_b[1])
    if na == 0.0 and nb == 0.0:
        return (1.0 + 0.0j, 0.0j)
    return _unit(cand_a if na >= nb else cand_b)


def eig2(m: Mat2, tol: float = DEFECT_TOL) -> EigenPair:
    """Eigenvalues and eigenvectors of a 2x2 matrix via the quadratic formula.

    ``lambda = tr/2 +- sqrt((tr/2)**2 - det)``.  The matrix is reported as
    defective when the discriminant magnitude falls below ``tol`` while the
    matrix is not a scalar multiple of the identity (a genuine Jordan block,
    as opposed to a degenerate but diagonalizable matrix).  In the defective
    case both eigenvalue slots carry ``tr/2``, the only meaningful value.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    half_tr = m.trace() / 2
    disc = half_tr * half_tr - m.det()
    scalar_defect = (m - half_tr * IDENTITY2).max_abs()
    if abs(disc) < tol and scalar_defect >= tol:
        vec = _eigvec(m, half_tr)
        return EigenPair(half_tr, half_tr, vec, vec, defective=True)
    if scalar_defect < tol and abs(disc) < tol:
        # scalar matrix: any orthonormal basis is an eigenbasis
        return EigenPair(
            half_tr, half_tr, (1.0 + 0.0j, 0.0j), (0.0j, 1.0 + 0.0j), defective=False
        )
    root = cmath.sqrt(disc)
    lam_p = half_tr + root
    lam_m = half_tr - root
    return EigenPair(lam_p, lam_m, _eigvec(m, lam_p), _eigvec(m, lam_m), defective=False)


@dataclass(frozen=True)
class ScaledMat2:
    """A 2x2 matrix stored as ``mat * exp(log_scale)``.

    ``mat`` is kept with max-entry magnitude of one (inside the nominal
    [1/2, 2] normalization window), so arbitrarily long products never
    overflow; the growth is tracked entirely in ``log_scale``.  The zero
    matrix uses ``log_scale = -inf`` as a sentinel.
    """

    mat: Mat2
    log_scale: float

    @classmethod
    def from_mat2(cls, m: Mat2) -> "ScaledMat2":
        return cls._renormalized(m, 0.0)

    @classmethod
    def _renormalized(cls, m: Mat2, log_scale: float) -> "ScaledMat2":
        scale = m.max_abs()
        if scale == 0.0:
            return cls(ZERO2, float("-inf"))
        return cls(m * (1.0 / scale), log_scale + math.log(scale))

    def __matmul__(self, other: "ScaledMat2") -> "ScaledMat2":
        if math.isinf(self.log_scale) or math.isinf(other.log_scale):
            return ScaledMat2(ZERO2, float("-inf"))
        return self._renormalized(self.mat @ other.mat, self.log_scale + other.log_scale)

    def log_max_abs(self) -> float:
        """log of the max-entry magnitude of the represented matrix."""
        scale = self.mat.max_abs()
        if scale == 0.0:
            return float("-inf")
        return self.log_scale + math.log(scale)

    def reconstruct(self) -> Mat2:
        """Materialize the represented matrix as a plain Mat2.

        Raises Mat2OverflowError when the true entries exceed double range.
        """
        if math.isinf(self.log_scale) and self.log_scale < 0:
            return ZERO2
        if self.log_scale > 700.0:
            raise Mat2OverflowError(
                f"entries ~ exp({self.log_scale:.3g}) exceed double precision"
            )
        return self.mat * math.exp(self.log_scale)


def power_scaled(m: Mat2, n: int) -> ScaledMat2:
    """``m ** n`` by square-and-multiply with renormalization at every step.

    Cost is O(log n) 2x2 products; scaling keeps any power representable, so
    ``n`` up to ~1e9 is safe even far outside spectral bands.  ``n = 0``
    returns the identity with ``log_scale = 0``.
    """
    if n < 0:
        raise ValueError("exponent must be non-negative")
    result = ScaledMat2(IDENTITY2, 0.0)
    base = ScaledMat2.from_mat2(m)
    while n:
        if n & 1:
            result = result @ base
        n >>= 1
        if n:
            base = base @ base
    return result
