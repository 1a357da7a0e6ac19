"""Built-in verification suites: invariants and oracle cross-checks.

Each suite runs a deterministic, seeded batch of checks and reports the
worst observed error next to its tolerance, so a tightened tolerance shows
which suites sit close to the numerical floor.  The suites back the
``verify`` command and double as the property layer of the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bands import band_edges, bands
from .linalg2 import IDENTITY2, Mat2, eig2, power_scaled
from .negf import (
    Bath,
    SemiInfiniteLead,
    WideBand,
    boundary_determinant,
    conductance,
    conductance_dense_oracle,
    dense_corner_propagator,
)
from .transfer import (
    PeriodicPotential,
    SpectralClass,
    classify,
    symmetry_conjugate,
    unit_cell_transfer,
)

__all__ = ["SuiteResult", "run_all", "REFERENCE_POTENTIAL"]

REFERENCE_POTENTIAL = PeriodicPotential([-0.5, 0.5])

_SEED = 20240817


@dataclass(frozen=True)
class SuiteResult:
    name: str
    checks: int
    failures: int
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


class _Tally:
    def __init__(self, name: str, tolerance: float):
        self.name = name
        self.tolerance = tolerance
        self.checks = 0
        self.failures = 0
        self.max_error = 0.0

    def add(self, error: float) -> None:
        self.checks += 1
        if not (error <= self.tolerance):
            self.failures += 1
        if math.isnan(error):
            self.max_error = math.inf
        else:
            self.max_error = max(self.max_error, error)

    def result(self) -> SuiteResult:
        return SuiteResult(
            self.name, self.checks, self.failures, self.max_error, self.tolerance
        )


def _random_potentials(rng: np.random.Generator, count: int, max_q: int = 5):
    for _ in range(count):
        q = int(rng.integers(1, max_q + 1))
        yield PeriodicPotential(rng.uniform(-1.0, 1.0, q).tolist())


def _random_energy(rng: np.random.Generator, pot: PeriodicPotential) -> float:
    return float(rng.uniform(min(pot.eps) - 2.5, max(pot.eps) + 2.5))


def _random_mat2(rng: np.random.Generator) -> Mat2:
    entries = rng.normal(size=4) + 1j * rng.normal(size=4)
    return Mat2(*[complex(z) for z in entries])


def suite_linalg(tol: float | None = None, samples: int = 200) -> list[SuiteResult]:
    """Determinant multiplicativity, eigen residuals and scaled powers."""
    products = _Tally("linalg-determinants", 1e-12 if tol is None else tol)
    residuals = _Tally("linalg-eigen-residuals", 1e-10 if tol is None else tol)
    powers = _Tally("linalg-scaled-powers", 1e-10 if tol is None else tol)
    unit_det = _Tally("linalg-unit-determinant", 1e-9 if tol is None else tol)
    rng = np.random.default_rng(_SEED)
    for _ in range(samples):
        a, b = _random_mat2(rng), _random_mat2(rng)
        prod = a @ b
        products.add(abs(prod.det() - a.det() * b.det()) / max(abs(prod.det()), 1e-30))
        pair = eig2(a)
        products.add(
            abs(pair.lambda_plus * pair.lambda_minus - a.det()) / max(abs(a.det()), 1e-30)
        )
        for lam, vec in ((pair.lambda_plus, pair.v_plus), (pair.lambda_minus, pair.v_minus)):
            mv = a.apply(vec)
            resid = max(abs(mv[0] - lam * vec[0]), abs(mv[1] - lam * vec[1]))
            residuals.add(resid / a.max_abs())
    # scaled powers against naive products of a unit-determinant matrix
    rng2 = np.random.default_rng(_SEED + 1)
    for _ in range(40):
        pot = next(_random_potentials(rng2, 1))
        cell = unit_cell_transfer(pot, _random_energy(rng2, pot))
        naive = IDENTITY2
        for n in range(1, 33):
            naive = naive @ cell
            scaled = power_scaled(cell, n)
            rebuilt = scaled.reconstruct()
            powers.add((rebuilt - naive).max_abs() / max(naive.max_abs(), 1e-30))
            # det(mat) cancels to rounding noise once exp(2*log_scale) dwarfs
            # 1/eps, so the unit-determinant identity is only testable below
            if scaled.log_scale <= 7.0:
                unit_det.add(
                    abs(scaled.mat.det() * math.exp(2.0 * scaled.log_scale) - 1.0)
                )
    return [products.result(), residuals.result(), powers.result(), unit_det.result()]


def suite_symmetry(tol: float | None = None, samples: int = 1000) -> SuiteResult:
    """det = 1, invariance under the antilinear symmetry, eigenvalue dichotomy.

    The determinant deviation is measured relative to the magnitude of the
    products entering it: the unit-cell entries themselves carry rounding
    proportional to their size, which no determinant algorithm can undo.
    """
    tally = _Tally("symmetry", 1e-12 if tol is None else tol)
    rng = np.random.default_rng(_SEED + 2)
    for pot in _random_potentials(rng, samples):
        energy = _random_energy(rng, pot)
        cell = unit_cell_transfer(pot, energy)
        tally.add(abs(cell.det() - 1.0) / max(1.0, cell.max_abs() ** 2))
        tally.add((symmetry_conjugate(cell) - cell).max_abs())
        pair = eig2(cell)
        real_defect = max(abs(pair.lambda_plus.imag), abs(pair.lambda_minus.imag))
        conj_defect = abs(pair.lambda_plus - pair.lambda_minus.conjugate())
        tally.add(min(real_defect, conj_defect))
    return tally.result()


def suite_band_edges(tol: float | None = None, samples: int = 50) -> SuiteResult:
    """Edge residuals, edge counting and spectral class at every edge."""
    tally = _Tally("band-edges", 1e-10 if tol is None else tol)
    rng = np.random.default_rng(_SEED + 3)
    for pot in _random_potentials(rng, samples):
        edges = band_edges(pot)
        endpoint_count = sum(2 if e.touching else 1 for e in edges)
        tally.add(abs(endpoint_count - 2 * pot.q))
        for edge in edges:
            half = unit_cell_transfer(pot, edge.energy).trace().real / 2.0
            tally.add(abs(half * half - 1.0))
            tag = classify(pot, edge.energy).tag
            expected = (
                SpectralClass.DEGENERATE_DIAGONALIZABLE
                if edge.touching
                else SpectralClass.EXCEPTIONAL_POINT
            )
            tally.add(0.0 if tag is expected else 1.0)
    return tally.result()


def suite_self_energy(
    bath_left: Bath,
    bath_right: Bath,
    pot: PeriodicPotential,
    tol: float | None = None,
    sigma_im_bias: float = 0.0,
) -> SuiteResult:
    """Retarded-branch and spectral-weight checks for the configured baths.

    ``sigma_im_bias`` shifts the imaginary part before checking the retarded
    condition; a positive bias is a deliberate fault injection that must make
    the suite fail.
    """
    tally = _Tally("self-energy", 1e-12 if tol is None else tol)
    omegas = [x / 10.0 for x in range(-120, 121)]
    for bath in (bath_left, bath_right):
        for omega in omegas:
            sigma = bath.self_energy(omega)
            weight = bath.spectral(omega)
            tally.add(max(0.0, sigma.imag + sigma_im_bias))
            tally.add(max(0.0, -weight))
            tally.add(abs(sigma.imag + weight / 2.0))
            if isinstance(bath, WideBand):
                tally.add(abs(sigma - (-0.5j * bath.gamma)))
            elif isinstance(bath, SemiInfiniteLead):
                # surface propagator solves t^2 g^2 - w g + 1 = 0
                g = sigma / bath.kappa**2
                resid = bath.t_bath**2 * g * g - omega * g + 1.0
                tally.add(abs(resid))
        if isinstance(bath, SemiInfiniteLead):
            for band in bands(pot):
                covered = (
                    abs(band.lower) < 2.0 * bath.t_bath
                    and abs(band.upper) < 2.0 * bath.t_bath
                )
                tally.add(0.0 if covered else 1.0)
    return tally.result()


def _oracle_cases(rng: np.random.Generator):
    pots = [
        PeriodicPotential([0.0]),
        REFERENCE_POTENTIAL,
        PeriodicPotential([0.0, 0.0]),
        next(_random_potentials(rng, 1, max_q=3)),
        next(_random_potentials(rng, 1, max_q=4)),
    ]
    baths = [WideBand(1.0), WideBand(0.5), SemiInfiniteLead(5.0, 1.0)]
    mus = [0.0, 0.3, 0.5, 1.0, -1.7]
    for pot in pots:
        sizes = [n for n in (2, 4, 8, 16, 32, 64) if n % pot.q == 0]
        for mu in mus:
            for n_sites in sizes[:3] if pot.q > 2 else sizes:
                for bath in baths:
                    yield pot, mu, n_sites // pot.q, bath
    # a handful of asymmetric bath pairs
    for _ in range(20):
        pot = next(_random_potentials(rng, 1, max_q=3))
        mu = _random_energy(rng, pot)
        n_cells = int(rng.integers(1, max(2, 48 // pot.q)))
        if n_cells * pot.q < 2:
            n_cells = 2
        yield pot, mu, n_cells, None


def suite_oracle(tol: float | None = None) -> SuiteResult:
    """Transfer-product conductance against the dense-solve oracle."""
    tally = _Tally("oracle-equivalence", 1e-10 if tol is None else tol)
    rng = np.random.default_rng(_SEED + 4)
    asym = (WideBand(0.7), SemiInfiniteLead(4.0, 0.8))
    for pot, mu, n_cells, bath in _oracle_cases(rng):
        left, right = (bath, bath) if bath is not None else asym
        if left.spectral(mu) <= 0.0 or right.spectral(mu) <= 0.0:
            continue
        fast = conductance(pot, n_cells, mu, left, right)
        dense = conductance_dense_oracle(pot, n_cells, mu, left, right)
        tally.add(abs(math.expm1(fast.log_g - dense.log_g)))
    return tally.result()


def suite_determinant_identity(tol: float | None = None) -> SuiteResult:
    """|corner propagator| * |determinant| = 1 for the dressed system matrix."""
    tally = _Tally("determinant-identity", 1e-9 if tol is None else tol)
    rng = np.random.default_rng(_SEED + 5)
    for _ in range(60):
        pot = next(_random_potentials(rng, 1, max_q=3))
        mu = _random_energy(rng, pot)
        n_cells = int(rng.integers(1, 13))
        if n_cells * pot.q < 2:
            n_cells = 2
        sigma_first = complex(rng.normal() * 0.3, -abs(rng.normal()) * 0.5 - 0.05)
        sigma_last = complex(rng.normal() * 0.3, -abs(rng.normal()) * 0.5 - 0.05)
        log_det, _ = boundary_determinant(pot, n_cells, mu, sigma_first, sigma_last)
        corner = dense_corner_propagator(pot, n_cells, mu, sigma_first, sigma_last)
        err = abs(math.log(abs(corner)) + log_det) / max(1.0, abs(log_det))
        tally.add(err)
    return tally.result()


def run_all(
    pot: PeriodicPotential | None = None,
    bath_left: Bath | None = None,
    bath_right: Bath | None = None,
    tol: float | None = None,
    sigma_im_bias: float = 0.0,
) -> list[SuiteResult]:
    """Run every verification suite and return their results.

    ``tol`` replaces each suite's default tolerance when given (used to probe
    how close the implementation sits to the numerical floor).
    """
    pot = pot if pot is not None else REFERENCE_POTENTIAL
    bath_left = bath_left if bath_left is not None else WideBand(1.0)
    bath_right = bath_right if bath_right is not None else WideBand(1.0)
    return [
        *suite_linalg(tol),
        suite_symmetry(tol),
        suite_band_edges(tol),
        suite_self_energy(bath_left, bath_right, pot, tol, sigma_im_bias),
        suite_oracle(tol),
        suite_determinant_identity(tol),
    ]
