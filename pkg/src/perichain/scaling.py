"""System-size scaling of the conductance and transport-regime classification.

Three regimes occur, keyed to where the chemical potential sits relative to
the band structure: inside a band the conductance oscillates but stays of
order one (ballistic), exactly at a band edge it falls off as ``N**-2``
(subdiffusive), and in a gap it decays exponentially with the localization
length.  The classifier fits both laws to log-conductance data and picks the
regime, cross-checking against the spectral location.

In-band data oscillates with system size (the transfer eigenvalues are pure
phases), which makes a raw log-log slope noisy on sparse geometric grids.
``classify_transport`` therefore samples each target size with a small window
of neighbouring cell counts and averages the log-conductance, which cancels
the oscillation without biasing the monotone regimes.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .bands import BandLocation, in_band
from .negf import Bath, conductance
from .transfer import PeriodicPotential

__all__ = [
    "TransportRegime",
    "RegimeReport",
    "MuSweepRow",
    "DegenerateFitError",
    "NonDecayingError",
    "fit_powerlaw",
    "fit_exponential",
    "classify_transport",
    "mu_sweep",
]

#: |delta| below which a power-law fit counts as ballistic.
BALLISTIC_DELTA = 0.1

#: Exponential-fit quality required to call a decay localized.
LOCALIZED_R2 = 0.999

#: Half-width (in unit cells) of the phase-averaging window.
PHASE_WINDOW = 8

#: Power-law fits skip sizes below this many cells (pre-asymptotic regime).
MIN_FIT_CELLS = 64


class DegenerateFitError(ValueError):
    """Fit abscissae do not span an interval."""


class NonDecayingError(ValueError):
    """Exponential fit requested on non-decaying data."""


class TransportRegime(enum.Enum):
    BALLISTIC = "ballistic"
    SUBDIFFUSIVE = "subdiffusive"
    LOCALIZED = "localized"


@dataclass(frozen=True)
class RegimeReport:
    """Outcome of a size-scaling classification at one chemical potential.

    ``delta`` is populated for ballistic/subdiffusive fits, ``xi_fit`` for a
    localized decay; ``r_squared`` belongs to whichever fit was selected.
    ``agrees_with_spectrum`` flags whether the fitted regime matches the one
    the band structure predicts at this energy.
    """

    regime: TransportRegime
    delta: float | None
    xi_fit: float | None
    r_squared: float
    n_values: tuple[int, ...]
    log_g: tuple[float, ...]
    band_location: BandLocation
    agrees_with_spectrum: bool


@dataclass(frozen=True)
class MuSweepRow:
    mu: float
    log_g: tuple[float, ...]
    band_location: BandLocation


def _linear_fit(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares slope, intercept and r**2."""
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    if sxx == 0.0:
        raise DegenerateFitError("fit abscissae are all equal")
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    ss_tot = sum((y - mean_y) ** 2 for y in ys)
    if ss_tot == 0.0:
        return slope, intercept, 1.0
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    return slope, intercept, 1.0 - ss_res / ss_tot


def _check_fit_input(ns: Sequence[int], log_gs: Sequence[float]) -> None:
    if len(ns) != len(log_gs):
        raise ValueError("ns and log_gs must have equal length")
    if len(ns) < 4:
        raise ValueError("need at least 4 points for a fit")
    if len(set(ns)) == 1:
        raise DegenerateFitError("fit abscissae are all equal")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly increasing")


def fit_powerlaw(ns: Sequence[int], log_gs: Sequence[float]) -> tuple[float, float]:
    """Exponent of ``g ~ N**-delta`` from log-log least squares.

    Returns ``(delta, r_squared)``.
    """
    _check_fit_input(ns, log_gs)
    slope, _, r_squared = _linear_fit([math.log(n) for n in ns], list(log_gs))
    return -slope, r_squared


def fit_exponential(ns: Sequence[int], log_gs: Sequence[float]) -> tuple[float, float]:
    """Decay length of ``g ~ exp(-N/xi)`` from semi-log least squares.

    Returns ``(xi_fit, r_squared)``; raises NonDecayingError when the slope
    is not negative.
    """
    _check_fit_input(ns, log_gs)
    slope, _, r_squared = _linear_fit([float(n) for n in ns], list(log_gs))
    if slope >= 0.0:
        raise NonDecayingError(f"log g grows with N (slope {slope:.3g})")
    return -1.0 / slope, r_squared


def _cells_of(ns: Sequence[int], q: int) -> list[int]:
    cells = []
    for n in ns:
        if n % q != 0 or n <= 0:
            raise ValueError(f"system size {n} is not a positive multiple of q={q}")
        cells.append(n // q)
    return cells


def _log_g_point(
    pot: PeriodicPotential, mu: float, bath_left: Bath, bath_right: Bath, cells: int
) -> float:
    return conductance(pot, cells, mu, bath_left, bath_right).log_g


def _log_g_phase_averaged(
    pot: PeriodicPotential,
    mu: float,
    bath_left: Bath,
    bath_right: Bath,
    cells: int,
    window: int,
) -> float:
    # keep the window symmetric when clipped at small sizes, otherwise the
    # average is biased toward larger chains in the decaying regimes
    half = min(window, cells - 1)
    values = [
        _log_g_point(pot, mu, bath_left, bath_right, c)
        for c in range(cells - half, cells + half + 1)
    ]
    return sum(values) / len(values)


def classify_transport(
    pot: PeriodicPotential,
    mu: float,
    bath_left: Bath,
    bath_right: Bath,
    ns: Sequence[int],
    phase_window: int = PHASE_WINDOW,
    min_fit_cells: int = MIN_FIT_CELLS,
    workers: int = 1,
) -> RegimeReport:
    """Fit the size scaling of the conductance and name the regime.

    ``ns`` are total site counts (multiples of ``q``, strictly increasing,
    spanning at least two decades).  A localized call requires the semi-log
    fit to be essentially exact (r**2 >= 0.999) and better than the log-log
    one; otherwise the power-law exponent over the asymptotic tail
    (``N >= q * min_fit_cells`` where enough points remain) decides between
    ballistic and subdiffusive.
    """
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly increasing")
    cells = _cells_of(ns, pot.q)
    if ns[-1] < 100 * ns[0]:
        raise ValueError("ns must span at least two decades for reliable fits")

    def sample(c: int) -> float:
        return _log_g_phase_averaged(pot, mu, bath_left, bath_right, c, phase_window)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            log_gs = list(pool.map(sample, cells))
    else:
        log_gs = [sample(c) for c in cells]

    tail = [i for i, c in enumerate(cells) if c >= min_fit_cells]
    if len(tail) < 4:
        tail = list(range(len(cells)))
    delta, r2_pow = fit_powerlaw(
        [ns[i] for i in tail], [log_gs[i] for i in tail]
    )

    xi_fit: float | None = None
    r2_exp = -math.inf
    try:
        xi_fit, r2_exp = fit_exponential(list(ns), log_gs)
    except NonDecayingError:
        xi_fit = None

    if xi_fit is not None and r2_exp >= LOCALIZED_R2 and r2_exp >= r2_pow:
        regime = TransportRegime.LOCALIZED
        report_delta = None
        r_squared = r2_exp
    else:
        xi_fit = None
        report_delta = delta
        r_squared = r2_pow
        if abs(delta) < BALLISTIC_DELTA:
            regime = TransportRegime.BALLISTIC
        else:
            regime = TransportRegime.SUBDIFFUSIVE

    location = in_band(pot, mu)
    expected = {
        BandLocation.INSIDE: TransportRegime.BALLISTIC,
        BandLocation.EDGE: TransportRegime.SUBDIFFUSIVE,
        BandLocation.OUTSIDE: TransportRegime.LOCALIZED,
    }[location]
    return RegimeReport(
        regime=regime,
        delta=report_delta,
        xi_fit=xi_fit,
        r_squared=r_squared,
        n_values=tuple(int(n) for n in ns),
        log_g=tuple(log_gs),
        band_location=location,
        agrees_with_spectrum=regime is expected,
    )


def mu_sweep(
    pot: PeriodicPotential,
    mu_grid: Sequence[float],
    ns: Sequence[int],
    bath_left: Bath,
    bath_right: Bath,
    workers: int = 1,
) -> list[MuSweepRow]:
    """Raw log-conductance table over a chemical-potential grid.

    One row per ``mu`` with a log-g column per system size (no phase
    averaging: a single ``(mu, N)`` cell is exactly one conductance call).
    Rows are returned in grid order regardless of worker scheduling.
    """
    cells = _cells_of(ns, pot.q)

    def row(mu: float) -> MuSweepRow:
        log_gs = tuple(
            _log_g_point(pot, mu, bath_left, bath_right, c) for c in cells
        )
        return MuSweepRow(float(mu), log_gs, in_band(pot, mu))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(row, mu_grid))
    return [row(mu) for mu in mu_grid]
