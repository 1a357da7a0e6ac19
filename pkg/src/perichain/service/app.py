"""FastAPI application exposing the compute endpoints.

Domain errors (closed bath, clipped window, size caps, degenerate fits)
surface as HTTP 400 with a structured body naming the exception; malformed
requests get FastAPI's standard 422.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bands import NoRootError, WindowTooSmallError
from ..linalg2 import Mat2OverflowError
from ..negf import ClosedBathError, SizeCapError
from ..scaling import DegenerateFitError, NonDecayingError
from ..transfer import InBandError
from . import handlers
from . import schemas as sc

#: Errors that mean "the numbers cannot be computed as asked", as opposed to
#: malformed configuration.
NUMERICAL_ERRORS = (
    ClosedBathError,
    InBandError,
    WindowTooSmallError,
    NoRootError,
    SizeCapError,
    DegenerateFitError,
    NonDecayingError,
    Mat2OverflowError,
)

app = FastAPI(
    title="perichain",
    version=__version__,
    description=(
        "Band structure, spectral classification and two-terminal conductance "
        "of one-dimensional periodic tight-binding chains"
    ),
)


def _guard(func, request):
    try:
        return func(request)
    except NUMERICAL_ERRORS as exc:
        raise HTTPException(
            status_code=400,
            detail={"error": type(exc).__name__, "message": str(exc)},
        ) from exc
    except ValueError as exc:
        raise HTTPException(
            status_code=400,
            detail={"error": "ValueError", "message": str(exc)},
        ) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/v1/bands", response_model=sc.BandsResponse)
def bands_endpoint(request: sc.BandsRequest) -> sc.BandsResponse:
    return _guard(handlers.handle_bands, request)


@app.post("/v1/eigs", response_model=sc.EigsResponse)
def eigs_endpoint(request: sc.EigsRequest) -> sc.EigsResponse:
    return _guard(handlers.handle_eigs, request)


@app.post("/v1/scaling", response_model=sc.ScalingResponse)
def scaling_endpoint(request: sc.ScalingRequest) -> sc.ScalingResponse:
    return _guard(handlers.handle_scaling, request)


@app.post("/v1/sweep-mu", response_model=sc.SweepMuResponse)
def sweep_mu_endpoint(request: sc.SweepMuRequest) -> sc.SweepMuResponse:
    return _guard(handlers.handle_sweep_mu, request)


@app.post("/v1/verify", response_model=sc.VerifyResponse)
def verify_endpoint(request: sc.VerifyRequest) -> sc.VerifyResponse:
    return _guard(handlers.handle_verify, request)
