"""Service handlers: typed request in, typed response out.

The FastAPI app and the CLI's local mode both dispatch through these
functions, so results are identical byte-for-byte regardless of transport
(apart from the response timestamp).
"""

from __future__ import annotations

import hashlib
import math
from datetime import datetime, timezone

from pydantic import BaseModel

from .. import __version__
from ..bands import band_edges, bands, dispersion, in_band
from ..linalg2 import eig2
from ..scaling import classify_transport, mu_sweep
from ..selfcheck import run_all
from ..transfer import (
    InBandError,
    PeriodicPotential,
    classify,
    localization_length,
    unit_cell_transfer,
)
from . import schemas as sc


def _meta(command: str, request: BaseModel) -> sc.TableMeta:
    digest = hashlib.sha256(
        f"{command}:{request.model_dump_json()}".encode()
    ).hexdigest()
    return sc.TableMeta(
        command=command,
        config_hash=digest[:16],
        version=__version__,
        generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


def _resolve_mu(spec: object, pot: PeriodicPotential) -> list[float]:
    if isinstance(spec, sc.MuValue):
        return [spec.value]
    if isinstance(spec, sc.MuLinspace):
        if spec.count == 1:
            return [spec.start]
        step = (spec.stop - spec.start) / (spec.count - 1)
        return [spec.start + i * step for i in range(spec.count)]
    if isinstance(spec, sc.MuBandEdges):
        return [edge.energy for edge in band_edges(pot)]
    raise TypeError(f"unsupported mu spec {type(spec).__name__}")


def _resolve_n(spec: object, q: int) -> list[int]:
    if isinstance(spec, sc.NValues):
        return list(spec.values)
    if isinstance(spec, sc.NGeometric):
        return [q * spec.start_cells * 2**j for j in range(spec.doublings + 1)]
    raise TypeError(f"unsupported n spec {type(spec).__name__}")


def handle_bands(request: sc.BandsRequest) -> sc.BandsResponse:
    pot = request.potential.to_potential()
    opts = request.options
    edges = band_edges(
        pot,
        window=opts.window,
        grid_points=opts.grid_points,
        tol=request.tolerances.root,
    )
    band_list = bands(pot, window=opts.window, grid_points=opts.grid_points,
                      tol=request.tolerances.root)
    points = []
    k_grid = [
        -math.pi + i * (2.0 * math.pi) / (opts.k_samples - 1)
        for i in range(opts.k_samples)
    ]
    for band in band_list:
        for k, energy in dispersion(pot, band.index, k_grid):
            points.append(sc.DispersionPoint(band=band.index, k=k, energy=energy))
    return sc.BandsResponse(
        meta=_meta("bands", request),
        edges=[
            sc.EdgeOut(energy=e.energy, k_label=e.k_label, multiplicity=e.multiplicity)
            for e in edges
        ],
        bands=[sc.BandOut(index=b.index, lower=b.lower, upper=b.upper) for b in band_list],
        dispersion=points,
    )


def handle_eigs(request: sc.EigsRequest) -> sc.EigsResponse:
    pot = request.potential.to_potential()
    rows = []
    for mu in _resolve_mu(request.mu, pot):
        pair = eig2(unit_cell_transfer(pot, mu), tol=request.tolerances.classify)
        verdict = classify(pot, mu, tol=request.tolerances.classify)
        rows.append(
            sc.EigsRow(
                mu=mu,
                lambda_plus_re=pair.lambda_plus.real,
                lambda_plus_im=pair.lambda_plus.imag,
                lambda_minus_re=pair.lambda_minus.real,
                lambda_minus_im=pair.lambda_minus.imag,
                spectral_class=verdict.tag.value,
                discriminant=verdict.discriminant,
            )
        )
    return sc.EigsResponse(meta=_meta("eigs", request), rows=rows)


def handle_scaling(request: sc.ScalingRequest) -> sc.ScalingResponse:
    pot = request.potential.to_potential()
    left = request.bath_left.to_bath()
    right = request.bath_right.to_bath()
    ns = _resolve_n(request.n, pot.q)
    rows = []
    for mu in _resolve_mu(request.mu, pot):
        report = classify_transport(
            pot, mu, left, right, ns, workers=request.workers
        )
        try:
            xi_formula = localization_length(pot, mu)
        except InBandError:
            xi_formula = None
        rows.append(
            sc.ScalingRow(
                mu=mu,
                band_location=report.band_location.value,
                regime=report.regime.value,
                delta=report.delta,
                xi_fit=report.xi_fit,
                xi_formula=xi_formula,
                r_squared=report.r_squared,
                agrees_with_spectrum=report.agrees_with_spectrum,
                points=[
                    sc.ScalingPoint(n=n, log_g=lg)
                    for n, lg in zip(report.n_values, report.log_g)
                ],
            )
        )
    return sc.ScalingResponse(meta=_meta("scaling", request), rows=rows)


def handle_sweep_mu(request: sc.SweepMuRequest) -> sc.SweepMuResponse:
    pot = request.potential.to_potential()
    ns = _resolve_n(request.n, pot.q)
    rows = mu_sweep(
        pot,
        _resolve_mu(request.mu, pot),
        ns,
        request.bath_left.to_bath(),
        request.bath_right.to_bath(),
        workers=request.workers,
    )
    cells = [
        sc.SweepCell(mu=row.mu, n=n, log_g=lg, band_location=row.band_location.value)
        for row in rows
        for n, lg in zip(ns, row.log_g)
    ]
    return sc.SweepMuResponse(meta=_meta("sweep-mu", request), rows=cells)


def handle_verify(request: sc.VerifyRequest) -> sc.VerifyResponse:
    pot = request.potential.to_potential() if request.potential else None
    results = run_all(
        pot=pot,
        bath_left=request.bath_left.to_bath(),
        bath_right=request.bath_right.to_bath(),
        tol=request.tolerance,
        sigma_im_bias=request.sigma_im_bias,
    )
    suites = [
        sc.SuiteOut(
            name=r.name,
            checks=r.checks,
            failures=r.failures,
            max_error=r.max_error,
            tolerance=r.tolerance,
            passed=r.passed,
        )
        for r in results
    ]
    return sc.VerifyResponse(
        meta=_meta("verify", request),
        suites=suites,
        all_passed=all(r.passed for r in results),
    )
