"""Site and unit-cell transfer matrices of a periodic tight-binding chain.

A chain with nearest-neighbour hopping (set to 1, the unit of energy) and
on-site energies repeating with period ``q`` is fully described, at a given
energy, by the product of the ``q`` site matrices ``[[e - eps_l, -1], [1, 0]]``.
The unit-cell matrix has determinant one and an antilinear symmetry that
forces its eigenvalues to be either real or a complex-conjugate pair; the
crossover between the two regimes happens at an exceptional point where the
matrix degenerates to a Jordan block.  This module builds the matrices,
implements the symmetry action, classifies the regime at a given energy and
evaluates the localization length / Lyapunov growth rate outside the bands.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .linalg2 import IDENTITY2, SIGMA_X, Mat2, power_scaled

__all__ = [
    "PeriodicPotential",
    "SpectralClass",
    "SpectralClassification",
    "InBandError",
    "SYMMETRY_UNITARY",
    "site_transfer",
    "unit_cell_transfer",
    "unit_cell_transfer_with_derivative",
    "symmetry_conjugate",
    "symmetry_conjugate_via_rotation",
    "classify",
    "localization_length",
    "lyapunov",
]

#: Default tolerance on the trace discriminant used by classify().
CLASSIFY_TOL = 1e-10

#: Default number of unit cells used by lyapunov(); cost is O(log n).
LYAPUNOV_CELLS = 10**6


class InBandError(ValueError):
    """Localization length requested at an energy inside or at a band."""


@dataclass(frozen=True)
class PeriodicPotential:
    """On-site energies of one unit cell; hopping is fixed to 1.

    ``eps[l]`` is the on-site energy of site ``l + 1`` within the cell (in
    units of the hopping), and the pattern repeats with period ``q = len(eps)``.
    """

    eps: tuple[float, ...]

    def __init__(self, eps: Sequence[float]):
        values = tuple(float(e) for e in eps)
        if len(values) < 1:
            raise ValueError("a unit cell needs at least one site")
        if not all(math.isfinite(e) for e in values):
            raise ValueError("on-site energies must be finite")
        object.__setattr__(self, "eps", values)

    @property
    def q(self) -> int:
        """Unit-cell length in sites."""
        return len(self.eps)

    def shifted(self, offset: float) -> "PeriodicPotential":
        """Potential with a constant added to every on-site energy."""
        return PeriodicPotential(tuple(e + offset for e in self.eps))


class SpectralClass(enum.Enum):
    """Regime of the unit-cell matrix at a given energy."""

    S_SYMMETRIC = "s-symmetric"
    EXCEPTIONAL_POINT = "exceptional-point"
    S_BROKEN = "s-broken"
    DEGENERATE_DIAGONALIZABLE = "degenerate-diagonalizable"


@dataclass(frozen=True)
class SpectralClassification:
    """Classification tag together with the diagnostic ``(tr/2)**2 - 1``."""

    tag: SpectralClass
    discriminant: float


def site_transfer(energy: float, eps_site: float) -> Mat2:
    """Transfer matrix of a single site: ``[[energy - eps_site, -1], [1, 0]]``."""
    return Mat2(energy - eps_site, -1.0, 1.0, 0.0)


def unit_cell_transfer(pot: PeriodicPotential, energy: float) -> Mat2:
    """Ordered product of the site matrices over one unit cell.

    Site 1 is applied first (rightmost factor), site ``q`` last (leftmost).
    The result always has determinant one.
    """
    acc = site_transfer(energy, pot.eps[0])
    for eps_site in pot.eps[1:]:
        acc = site_transfer(energy, eps_site) @ acc
    return acc


def unit_cell_transfer_with_derivative(
    pot: PeriodicPotential, energy: float
) -> tuple[Mat2, Mat2]:
    """Unit-cell matrix together with its exact energy derivative.

    Forward-mode differentiation through the product: each site matrix has
    the constant derivative ``[[1, 0], [0, 0]]``.  The exact derivative lets
    callers polish roots of trace conditions to machine precision, which a
    finite difference cannot.
    """
    acc = site_transfer(energy, pot.eps[0])
    dacc = Mat2(1.0, 0.0, 0.0, 0.0)
    for eps_site in pot.eps[1:]:
        site = site_transfer(energy, eps_site)
        # d(site @ acc) = dsite @ acc + site @ dacc, with dsite = [[1,0],[0,0]]
        dacc = Mat2(acc.a11, acc.a12, 0.0, 0.0) + site @ dacc
        acc = site @ acc
    return acc, dacc


_INV_SQRT2 = 1.0 / math.sqrt(2.0)

#: Unitary rotation to the basis in which the antilinear symmetry is sigma_x
#: followed by conjugation (the same rotation diagonalizes sigma_y).
SYMMETRY_UNITARY = Mat2(_INV_SQRT2, _INV_SQRT2, 1.0j * _INV_SQRT2, -1.0j * _INV_SQRT2)


def symmetry_conjugate(m: Mat2) -> Mat2:
    """Action of the antilinear symmetry ``S = U sx K U^+`` on a matrix.

    Written out, ``S m S^-1 = A conj(m) A^-1`` with ``A = U sx conj(U^+)``,
    and for this particular rotation ``A`` is exactly the identity, so the
    symmetry acts as plain entrywise conjugation.  Implementing the collapsed
    form keeps the action exact; the sandwich route through
    ``SYMMETRY_UNITARY`` is checked against it in the test suite.

    Every site and unit-cell transfer matrix at real energy (real entries) is
    a fixed point; a matrix like ``i * I`` is not, because conjugation flips
    the phase.
    """
    return m.conj()


def symmetry_conjugate_via_rotation(m: Mat2) -> Mat2:
    """Same action built explicitly as ``U sx conj(U^+ m U) sx U^+``.

    Kept for verification; accumulates a few ulps of rounding that the
    collapsed form avoids.
    """
    u = SYMMETRY_UNITARY
    return u @ SIGMA_X @ (u.dagger() @ m @ u).conj() @ SIGMA_X @ u.dagger()


def trace_discriminant(pot: PeriodicPotential, energy: float) -> float:
    """``(tr/2)**2 - 1`` of the unit-cell matrix; negative inside bands."""
    half_tr = unit_cell_transfer(pot, energy).trace().real / 2.0
    return half_tr * half_tr - 1.0


def classify(
    pot: PeriodicPotential, energy: float, tol: float = CLASSIFY_TOL
) -> SpectralClassification:
    """Classify the spectral regime of the unit-cell matrix at ``energy``.

    Positive discriminant means real eigenvalues (symmetric regime), negative
    means a conjugate pair on the unit circle (broken regime).  Within ``tol``
    of zero the matrix either degenerates to a Jordan block (exceptional
    point) or equals ``+-identity`` (a band touching, still diagonalizable).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cell = unit_cell_transfer(pot, energy)
    half_tr = cell.trace().real / 2.0
    disc = half_tr * half_tr - 1.0
    if disc > tol:
        tag = SpectralClass.S_SYMMETRIC
    elif disc < -tol:
        tag = SpectralClass.S_BROKEN
    else:
        sign = 1.0 if half_tr >= 0.0 else -1.0
        if (cell - sign * IDENTITY2).max_abs() < tol:
            tag = SpectralClass.DEGENERATE_DIAGONALIZABLE
        else:
            tag = SpectralClass.EXCEPTIONAL_POINT
    return SpectralClassification(tag, disc)


def localization_length(pot: PeriodicPotential, mu: float) -> float:
    """Decay length (in sites) of the conductance outside the bands.

    ``1/xi = (2/q) * log(|tr/2| + sqrt((tr/2)**2 - 1))``, defined only for
    ``|tr| > 2`` (strictly outside every band).
    """
    half_tr = abs(unit_cell_transfer(pot, mu).trace().real) / 2.0
    if half_tr <= 1.0:
        raise InBandError(
            f"localization length undefined at mu={mu!r}: energy lies inside "
            "or at a band (|tr| <= 2)"
        )
    return pot.q / (2.0 * math.acosh(half_tr))


def lyapunov(pot: PeriodicPotential, mu: float, n: int = LYAPUNOV_CELLS) -> float:
    """Growth rate per unit cell of the n-cell transfer product.

    ``(1/n) * log(max-entry magnitude)`` of the n-th matrix power, computed
    through the scaled representation so any ``n`` is safe.  Approaches
    ``acosh(|tr|/2)`` outside bands and zero inside.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    return power_scaled(unit_cell_transfer(pot, mu), n).log_max_abs() / n
