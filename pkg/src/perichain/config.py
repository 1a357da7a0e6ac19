"""Run configuration: a single JSON file mapped onto the request models.

The file groups the same sections every command draws from (potential, baths,
mu / n specifications, tolerances, output).  Unknown keys are rejected.
Command-line flags override file values; the precedence is
flag > environment > file > built-in default.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from pydantic import Field, ValidationError

from .service import schemas as sc

__all__ = ["ConfigError", "RunConfig", "load_config", "request_for"]


class ConfigError(ValueError):
    """The configuration file is missing, malformed, or incomplete."""


class OutputOptions(sc.StrictModel):
    path: Optional[str] = None
    format: Optional[str] = Field(default=None, pattern="^(csv|json)$")


class VerifyOptions(sc.StrictModel):
    sigma_im_bias: float = 0.0
    tolerance: Optional[float] = Field(default=None, gt=0)


class RunConfig(sc.StrictModel):
    potential: Optional[sc.PotentialSpec] = None
    bath_left: sc.BathSpec = Field(default_factory=sc.WideBandSpec)
    bath_right: sc.BathSpec = Field(default_factory=sc.WideBandSpec)
    mu: Optional[sc.MuSpec] = None
    n: Optional[sc.NSpec] = None
    bands: sc.BandsOptions = Field(default_factory=sc.BandsOptions)
    tolerances: sc.Tolerances = Field(default_factory=sc.Tolerances)
    workers: Optional[int] = Field(default=None, ge=1)
    output: OutputOptions = Field(default_factory=OutputOptions)
    verify: VerifyOptions = Field(default_factory=VerifyOptions)


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a JSON config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"invalid config {path}:\n{exc}") from exc


def _require(value, section: str, command: str):
    if value is None:
        raise ConfigError(f"command {command!r} needs a [{section}] config section")
    return value


def request_for(
    command: str,
    cfg: RunConfig,
    workers: Optional[int] = None,
    tol: Optional[float] = None,
):
    """Build the typed request for ``command`` from a config plus overrides.

    ``tol`` maps onto the tolerance knob each command actually uses: the
    root-finding tolerance for ``bands``, the classification tolerance for
    ``eigs`` / ``scaling`` / ``sweep-mu``, and the suite tolerance for
    ``verify``.
    """
    tolerances = cfg.tolerances
    if tol is not None:
        if command == "bands":
            tolerances = tolerances.model_copy(update={"root": tol})
        else:
            tolerances = tolerances.model_copy(update={"classify": tol})
    effective_workers = workers if workers is not None else (cfg.workers or 1)

    try:
        if command == "bands":
            return sc.BandsRequest(
                potential=_require(cfg.potential, "potential", command),
                options=cfg.bands,
                tolerances=tolerances,
            )
        if command == "eigs":
            mu = _require(cfg.mu, "mu", command)
            if isinstance(mu, sc.MuValue):
                raise ConfigError(
                    "command 'eigs' needs a mu grid (linspace or band-edges), "
                    "not a single value"
                )
            return sc.EigsRequest(
                potential=_require(cfg.potential, "potential", command),
                mu=mu,
                tolerances=tolerances,
            )
        if command == "scaling":
            return sc.ScalingRequest(
                potential=_require(cfg.potential, "potential", command),
                bath_left=cfg.bath_left,
                bath_right=cfg.bath_right,
                mu=_require(cfg.mu, "mu", command),
                n=cfg.n if cfg.n is not None else sc.NGeometric(),
                workers=effective_workers,
                tolerances=tolerances,
            )
        if command == "sweep-mu":
            return sc.SweepMuRequest(
                potential=_require(cfg.potential, "potential", command),
                bath_left=cfg.bath_left,
                bath_right=cfg.bath_right,
                mu=_require(cfg.mu, "mu", command),
                n=_require(cfg.n, "n", command),
                workers=effective_workers,
                tolerances=tolerances,
            )
        if command == "verify":
            return sc.VerifyRequest(
                potential=cfg.potential,
                bath_left=cfg.bath_left,
                bath_right=cfg.bath_right,
                tolerance=tol if tol is not None else cfg.verify.tolerance,
                sigma_im_bias=cfg.verify.sigma_im_bias,
            )
    except ValidationError as exc:
        raise ConfigError(f"invalid request for {command!r}:\n{exc}") from exc
    raise ConfigError(f"unknown command {command!r}")
