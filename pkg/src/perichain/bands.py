"""Band structure: edges, band intervals and the dispersion relation.

Band edges are the energies where ``|trace| = 2`` for the unit-cell matrix,
i.e. the roots of ``f(e) = (tr/2)**2 - 1``.  Simple roots are bracketed by a
dense scan and polished by bisection plus Newton steps with the exact trace
derivative.  Band touchings are double roots of ``f`` and cannot be
bracketed; they are located as roots of the trace derivative (simple there)
and accepted when ``|f|`` is tiny, which pins them to machine precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .transfer import (
    PeriodicPotential,
    unit_cell_transfer,
    unit_cell_transfer_with_derivative,
)

__all__ = [
    "Band",
    "BandEdge",
    "BandLocation",
    "WindowTooSmallError",
    "NoRootError",
    "band_edges",
    "bands",
    "dispersion",
    "in_band",
]

#: Default energy tolerance for edge refinement.
EDGE_TOL = 1e-12

#: |f| threshold below which a trace extremum counts as a band touching.
TOUCH_TOL = 1e-9

#: Default padding of the search window beyond the extremal on-site energies;
#: bands lie within one bandwidth (2) of those, plus 0.5 safety.
WINDOW_PAD = 2.5

#: Minimum scan density per unit-cell site.
GRID_PER_SITE = 64


class WindowTooSmallError(ValueError):
    """The search window clips a band (f <= 0 at a boundary)."""


class NoRootError(RuntimeError):
    """A bisection bracket was invalid; indicates band bookkeeping problems."""


@dataclass(frozen=True)
class BandEdge:
    """A band-edge energy with its trace sign and root multiplicity.

    ``trace_sign = +1`` is a ``k = 0`` edge (trace ``+2``), ``-1`` a
    ``k = +-pi`` edge (trace ``-2``).  A touching is a double root shared by
    two bands.
    """

    energy: float
    trace_sign: int
    touching: bool = False

    @property
    def k_label(self) -> str:
        return "0" if self.trace_sign > 0 else "pi"

    @property
    def multiplicity(self) -> str:
        return "touching" if self.touching else "simple"


@dataclass(frozen=True)
class Band:
    """Closed energy interval of one band; 1-based ``index``."""

    lower: float
    upper: float
    index: int


class BandLocation(enum.Enum):
    INSIDE = "inside"
    EDGE = "edge"
    OUTSIDE = "outside"


def _trace(pot: PeriodicPotential, energy: float) -> float:
    return unit_cell_transfer(pot, energy).trace().real


def _trace_and_deriv(pot: PeriodicPotential, energy: float) -> tuple[float, float]:
    cell, dcell = unit_cell_transfer_with_derivative(pot, energy)
    return cell.trace().real, dcell.trace().real


def _f(pot: PeriodicPotential, energy: float) -> float:
    half = _trace(pot, energy) / 2.0
    return half * half - 1.0


def default_window(pot: PeriodicPotential) -> tuple[float, float]:
    return (min(pot.eps) - WINDOW_PAD, max(pot.eps) + WINDOW_PAD)


def _bisect_f(pot: PeriodicPotential, a: float, b: float, fa: float, tol: float) -> float:
    """Refine a sign-change bracket of f, then polish with Newton steps."""
    for _ in range(200):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        fm = _f(pot, mid)
        if fm == 0.0:
            a = b = mid
            break
        if (fa < 0.0) == (fm < 0.0):
            a, fa = mid, fm
        else:
            b = mid
    root = 0.5 * (a + b)
    # Newton with the exact derivative: f' = (tr/2) * tr'
    for _ in range(4):
        tr, dtr = _trace_and_deriv(pot, root)
        f_val = (tr / 2.0) ** 2 - 1.0
        df = 0.5 * tr * dtr
        if df == 0.0:
            break
        step = f_val / df
        if not math.isfinite(step) or abs(step) > max(tol * 1e3, 1e-9):
            break
        root -= step
    return root


def _trace_extrema(
    pot: PeriodicPotential, grid: Sequence[float], dtr_vals: Sequence[float]
) -> list[float]:
    """Roots of the trace derivative, bisected to machine precision."""
    extrema = []
    for i in range(len(grid) - 1):
        da, db = dtr_vals[i], dtr_vals[i + 1]
        if da == 0.0:
            extrema.append(grid[i])
            continue
        if (da < 0.0) == (db < 0.0):
            continue
        a, b = grid[i], grid[i + 1]
        for _ in range(200):
            if b - a <= 1e-15 * max(1.0, abs(a), abs(b)):
                break
            mid = 0.5 * (a + b)
            _, dm = _trace_and_deriv(pot, mid)
            if dm == 0.0:
                a = b = mid
                break
            if (da < 0.0) == (dm < 0.0):
                a, da = mid, dm
            else:
                b = mid
        extrema.append(0.5 * (a + b))
    return extrema


def band_edges(
    pot: PeriodicPotential,
    window: tuple[float, float] | None = None,
    grid_points: int | None = None,
    tol: float = EDGE_TOL,
    touch_tol: float = TOUCH_TOL,
) -> list[BandEdge]:
    """All band edges inside ``window``, sorted by energy.

    The window must enclose every band: ``f`` has to be positive at both
    boundaries, otherwise WindowTooSmallError is raised.  ``grid_points``
    (default and minimum ``64 * q``) controls the scan that brackets simple
    roots and trace extrema.
    """
    if window is None:
        window = default_window(pot)
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    min_points = GRID_PER_SITE * pot.q
    if grid_points is None:
        grid_points = min_points
    elif grid_points < min_points:
        raise ValueError(f"grid_points must be >= {min_points} for q={pot.q}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    step = (hi - lo) / (grid_points - 1)
    grid = [lo + i * step for i in range(grid_points)]
    traces: list[float] = []
    dtraces: list[float] = []
    for e in grid:
        tr, dtr = _trace_and_deriv(pot, e)
        traces.append(tr)
        dtraces.append(dtr)
    f_vals = [(t / 2.0) ** 2 - 1.0 for t in traces]

    if f_vals[0] <= 0.0 or f_vals[-1] <= 0.0:
        raise WindowTooSmallError(
            f"window {window} clips a band; widen it (f = {f_vals[0]:.3g} at lo, "
            f"{f_vals[-1]:.3g} at hi)"
        )

    roots: list[float] = []
    for i in range(len(grid) - 1):
        fa, fb = f_vals[i], f_vals[i + 1]
        if fa == 0.0:
            roots.append(_bisect_f(pot, grid[i], grid[i], fa, tol))
            continue
        if (fa < 0.0) != (fb < 0.0):
            roots.append(_bisect_f(pot, grid[i], grid[i + 1], fa, tol))
    # dedupe grid-point coincidences
    roots.sort()
    simple = [r for i, r in enumerate(roots) if i == 0 or r - roots[i - 1] > tol * 10]

    touchings: list[float] = []
    for e_star in _trace_extrema(pot, grid, dtraces):
        if abs(_f(pot, e_star)) >= touch_tol:
            continue
        if any(abs(e_star - r) < 1e-5 for r in simple):
            continue
        if any(abs(e_star - t) < 1e-9 for t in touchings):
            continue
        touchings.append(e_star)

    edges = [
        BandEdge(r, 1 if _trace(pot, r) > 0.0 else -1, touching=False) for r in simple
    ] + [
        BandEdge(t, 1 if _trace(pot, t) > 0.0 else -1, touching=True) for t in touchings
    ]
    edges.sort(key=lambda e: e.energy)
    return edges


def bands(
    pot: PeriodicPotential,
    window: tuple[float, float] | None = None,
    grid_points: int | None = None,
    tol: float = EDGE_TOL,
) -> list[Band]:
    """The ``q`` band intervals, paired from consecutive edges.

    Touchings count as the shared endpoint of two bands.  Midpoints are
    sampled to confirm ``|trace| <= 2`` on every interval.
    """
    edges = band_edges(pot, window=window, grid_points=grid_points, tol=tol)
    endpoints: list[float] = []
    for edge in edges:
        endpoints.append(edge.energy)
        if edge.touching:
            endpoints.append(edge.energy)
    if len(endpoints) != 2 * pot.q:
        raise NoRootError(
            f"found {len(endpoints)} band endpoints for q={pot.q}; expected {2 * pot.q}"
        )
    result = []
    for i in range(pot.q):
        lower, upper = endpoints[2 * i], endpoints[2 * i + 1]
        mid = 0.5 * (lower + upper)
        if _f(pot, mid) > 0.0:
            raise NoRootError(
                f"interval [{lower}, {upper}] is not a band (f > 0 at midpoint)"
            )
        result.append(Band(lower, upper, i + 1))
    return result


def dispersion(
    pot: PeriodicPotential,
    band_index: int,
    k_grid: Sequence[float],
) -> list[tuple[float, float]]:
    """Energy samples ``(k, e(k))`` of one band, solving ``tr(e) = 2 cos k``.

    The trace is monotone in energy inside each band, so each sample is a
    bisection on the band interval, polished with Newton steps to ~1e-12.
    """
    band_list = bands(pot)
    if not 1 <= band_index <= len(band_list):
        raise ValueError(f"band_index must be in 1..{len(band_list)}")
    band = band_list[band_index - 1]
    samples = []
    for k in k_grid:
        if not -math.pi - 1e-12 <= k <= math.pi + 1e-12:
            raise ValueError("wave vectors must lie in [-pi, pi]")
        target = 2.0 * math.cos(k)
        samples.append((float(k), _solve_in_band(pot, band, target)))
    return samples


def _solve_in_band(pot: PeriodicPotential, band: Band, target: float) -> float:
    a, b = band.lower, band.upper
    ga = _trace(pot, a) - target
    gb = _trace(pot, b) - target
    if abs(ga) < 1e-9:
        return a
    if abs(gb) < 1e-9:
        return b
    if (ga < 0.0) == (gb < 0.0):
        raise NoRootError(
            f"no trace crossing for target {target} inside band {band.index}"
        )
    for _ in range(200):
        if b - a <= 1e-13:
            break
        mid = 0.5 * (a + b)
        gm = _trace(pot, mid) - target
        if gm == 0.0:
            return mid
        if (ga < 0.0) == (gm < 0.0):
            a, ga = mid, gm
        else:
            b = mid
    root = 0.5 * (a + b)
    for _ in range(3):
        tr, dtr = _trace_and_deriv(pot, root)
        if dtr == 0.0:
            break
        step = (tr - target) / dtr
        if not math.isfinite(step) or abs(step) > 1e-6:
            break
        root -= step
    return min(max(root, band.lower), band.upper)


def in_band(pot: PeriodicPotential, mu: float, tol: float = 1e-10) -> BandLocation:
    """Locate ``mu`` relative to the band structure via the trace discriminant."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    half = _trace(pot, mu) / 2.0
    disc = half * half - 1.0
    if disc < -tol:
        return BandLocation.INSIDE
    if disc <= tol:
        return BandLocation.EDGE
    return BandLocation.OUTSIDE
