"""Bath self-energies and two-terminal zero-temperature conductance.

The chain couples to one bath at each end.  A bath enters through its
spectral weight ``J(w)`` and the retarded boundary self-energy
``S(w) = P-integral - i J(w)/2``.  The conductance at chemical potential
``mu`` is ``g = J_1 J_N / (2 pi |D|^2)`` where ``D`` is the determinant of
the dressed tridiagonal system matrix ``mu*I - H - Sigma``.

``D`` is evaluated two independent ways:

* :func:`boundary_determinant` expands the tridiagonal determinant as a
  product of site transfer matrices with boundary dressing, carried in the
  scaled representation so the log-magnitude is available at any size;
* :func:`conductance_dense_oracle` assembles the full matrix and uses a
  generic dense solve, deliberately avoiding the recursion so it can act as
  an independent cross-check.

Conductance is carried in log space throughout: outside the bands ``|D|``
exceeds double range beyond a few hundred sites, so ``log_g`` is the
authoritative field and ``g`` underflows gracefully to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .linalg2 import power_scaled
from .transfer import PeriodicPotential, unit_cell_transfer

__all__ = [
    "WideBand",
    "SemiInfiniteLead",
    "Bath",
    "ConductanceResult",
    "ClosedBathError",
    "SizeCapError",
    "boundary_determinant",
    "conductance",
    "conductance_dense_oracle",
]

LOG_2PI = math.log(2.0 * math.pi)

#: Dense-oracle size cap; the dense solve is O(N^3).
DENSE_SIZE_CAP = 4096


class ClosedBathError(ValueError):
    """A bath has zero spectral weight at the requested energy."""


class SizeCapError(ValueError):
    """Dense oracle requested beyond its size cap."""


@dataclass(frozen=True)
class WideBand:
    """Flat-band bath: constant spectral weight, purely imaginary self-energy."""

    gamma: float

    def __post_init__(self) -> None:
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ValueError("gamma must be positive and finite")

    def spectral(self, omega: float) -> float:
        return self.gamma

    def self_energy(self, omega: float) -> complex:
        # principal-value integral of a flat, infinitely wide band vanishes
        return -0.5j * self.gamma


@dataclass(frozen=True)
class SemiInfiniteLead:
    """Semi-infinite uniform chain with hopping ``t_bath``, coupled by ``kappa``.

    Self-energy is ``kappa**2`` times the lead surface propagator, with the
    retarded branch: complex inside the lead band ``|w| < 2 t_bath``, real and
    evanescent outside.  The lead band must cover every system band for
    transport runs; ``t_bath = 5`` is a comfortable default for potentials of
    order one.
    """

    t_bath: float
    kappa: float

    def __post_init__(self) -> None:
        if not (self.t_bath > 0.0 and math.isfinite(self.t_bath)):
            raise ValueError("t_bath must be positive and finite")
        if not (self.kappa > 0.0 and math.isfinite(self.kappa)):
            raise ValueError("kappa must be positive and finite")

    def spectral(self, omega: float) -> float:
        half_bw = 2.0 * self.t_bath
        if abs(omega) >= half_bw:
            return 0.0
        return (self.kappa / self.t_bath) ** 2 * math.sqrt(half_bw**2 - omega**2)

    def self_energy(self, omega: float) -> complex:
        pref = self.kappa**2 / (2.0 * self.t_bath**2)
        half_bw = 2.0 * self.t_bath
        if abs(omega) <= half_bw:
            return pref * (omega - 1j * math.sqrt(half_bw**2 - omega**2))
        return pref * (omega - math.copysign(math.sqrt(omega**2 - half_bw**2), omega))


Bath = Union[WideBand, SemiInfiniteLead]


@dataclass(frozen=True)
class ConductanceResult:
    """Conductance in natural units (quantum of conductance = 1/(2 pi)).

    ``log_g`` is authoritative; ``g = exp(log_g)`` underflows to 0.0 for long
    chains outside the bands.  ``log_abs_det`` is the log-magnitude of the
    dressed system determinant the conductance derives from.
    """

    g: float
    log_g: float
    log_abs_det: float


def boundary_determinant(
    pot: PeriodicPotential,
    n_cells: int,
    mu: float,
    sigma_first: complex,
    sigma_last: complex,
) -> tuple[float, complex]:
    """Log-magnitude and phase of the dressed tridiagonal determinant.

    Expanding the determinant of ``mu*I - H - Sigma`` from the last site
    toward the first turns it into the n-cell transfer product acting on a
    boundary vector: the first-site self-energy rides in the start vector and
    the last-site one in the closing row,

        D = (1, -sigma_last) . [T(mu)]^n . (1, sigma_first)^T,

    with the unit-cell matrix ordered site-1-rightmost.  Matches the dense
    determinant for any pair of (possibly different) self-energies.

    Returns ``(log|D|, D/|D|)``; a vanishing determinant yields
    ``(-inf, 1+0j)``.
    """
    if n_cells < 1:
        raise ValueError("n_cells must be at least 1")
    if n_cells * pot.q < 2:
        raise ValueError("the chain needs at least two sites")
    power = power_scaled(unit_cell_transfer(pot, mu), n_cells)
    v0, v1 = power.mat.apply((1.0 + 0.0j, complex(sigma_first)))
    reduced = v0 - complex(sigma_last) * v1
    mag = abs(reduced)
    if mag == 0.0:
        return float("-inf"), 1.0 + 0.0j
    return power.log_scale + math.log(mag), reduced / mag


def _spectral_weights(bath_left: Bath, bath_right: Bath, mu: float) -> tuple[float, float]:
    j_first = bath_left.spectral(mu)
    j_last = bath_right.spectral(mu)
    if j_first <= 0.0 or j_last <= 0.0:
        raise ClosedBathError(
            f"bath spectral weight vanishes at mu={mu!r} "
            f"(left={j_first!r}, right={j_last!r}); the bath band must cover mu"
        )
    return j_first, j_last


def conductance(
    pot: PeriodicPotential,
    n_cells: int,
    mu: float,
    bath_left: Bath,
    bath_right: Bath,
) -> ConductanceResult:
    """Zero-temperature conductance of ``n_cells`` unit cells between two baths."""
    j_first, j_last = _spectral_weights(bath_left, bath_right, mu)
    log_abs_det, _ = boundary_determinant(
        pot,
        n_cells,
        mu,
        bath_left.self_energy(mu),
        bath_right.self_energy(mu),
    )
    log_g = math.log(j_first) + math.log(j_last) - LOG_2PI - 2.0 * log_abs_det
    return ConductanceResult(g=_safe_exp(log_g), log_g=log_g, log_abs_det=log_abs_det)


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return float("inf")


def conductance_dense_oracle(
    pot: PeriodicPotential,
    n_cells: int,
    mu: float,
    bath_left: Bath,
    bath_right: Bath,
    size_cap: int = DENSE_SIZE_CAP,
) -> ConductanceResult:
    """Conductance from a dense solve of the full system matrix.

    Assembles the tridiagonal ``mu*I - H - Sigma`` explicitly and extracts
    the corner propagator with a generic linear solve (never the determinant
    recursion, which would not be independent).  Intended as an oracle for
    :func:`conductance`; cost grows as ``N**3`` so sizes are capped.
    """
    n_sites = n_cells * pot.q
    if n_sites > size_cap:
        raise SizeCapError(f"dense oracle capped at {size_cap} sites, got {n_sites}")
    if n_cells < 1 or n_sites < 2:
        raise ValueError("the chain needs at least two sites")
    j_first, j_last = _spectral_weights(bath_left, bath_right, mu)

    diag = np.empty(n_sites, dtype=complex)
    for i in range(n_sites):
        diag[i] = mu - pot.eps[i % pot.q]
    diag[0] -= bath_left.self_energy(mu)
    diag[-1] -= bath_right.self_energy(mu)
    matrix = np.diag(diag)
    off = -np.ones(n_sites - 1)
    matrix += np.diag(off, k=1) + np.diag(off, k=-1)

    rhs = np.zeros(n_sites, dtype=complex)
    rhs[-1] = 1.0
    corner = complex(np.linalg.solve(matrix, rhs)[0])

    abs_corner = abs(corner)
    if abs_corner == 0.0:
        return ConductanceResult(g=0.0, log_g=float("-inf"), log_abs_det=float("inf"))
    log_g = (
        math.log(j_first) + math.log(j_last) - LOG_2PI + 2.0 * math.log(abs_corner)
    )
    return ConductanceResult(
        g=_safe_exp(log_g), log_g=log_g, log_abs_det=-math.log(abs_corner)
    )


def dense_corner_propagator(
    pot: PeriodicPotential,
    n_cells: int,
    mu: float,
    sigma_first: complex,
    sigma_last: complex,
) -> complex:
    """Corner element ``(1, N)`` of the inverse dressed system matrix.

    Exposed for the identity check ``|corner| * |D| = 1`` against
    :func:`boundary_determinant`; same dense route as the oracle.
    """
    n_sites = n_cells * pot.q
    if n_sites > DENSE_SIZE_CAP:
        raise SizeCapError(f"dense solve capped at {DENSE_SIZE_CAP} sites")
    diag = np.empty(n_sites, dtype=complex)
    for i in range(n_sites):
        diag[i] = mu - pot.eps[i % pot.q]
    diag[0] -= sigma_first
    diag[-1] -= sigma_last
    matrix = np.diag(diag)
    off = -np.ones(n_sites - 1)
    matrix += np.diag(off, k=1) + np.diag(off, k=-1)
    rhs = np.zeros(n_sites, dtype=complex)
    rhs[-1] = 1.0
    return complex(np.linalg.solve(matrix, rhs)[0])
