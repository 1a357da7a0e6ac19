"""Flat output tables with provenance headers, rendered as CSV or JSON.

CSV carries the metadata as ``#``-prefixed header lines and prints floats
with 17 significant digits so values round-trip bit-faithfully.  JSON wraps
the same content as ``{"meta": ..., "columns": ...}``.  Row order is fixed by
the builder, so identical inputs give identical bytes apart from the
``generated_at`` timestamp.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

__all__ = ["OutputTable", "build_table"]

_UNITS_NOTE = "energies in units of the hopping; conductance in units of 1/(2*pi)"


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


@dataclass
class OutputTable:
    """Named columns of equal length plus a metadata mapping."""

    meta: dict[str, str]
    columns: dict[str, list[Any]]

    def __post_init__(self) -> None:
        lengths = {len(col) for col in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"column lengths differ: {lengths}")

    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def to_csv(self) -> str:
        lines = [f"# {key} = {value}" for key, value in self.meta.items()]
        names = list(self.columns)
        lines.append(",".join(names))
        for i in range(self.n_rows()):
            lines.append(",".join(_format_cell(self.columns[name][i]) for name in names))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"meta": self.meta, "columns": self.columns}, indent=2) + "\n"


def _meta_dict(payload: dict) -> dict[str, str]:
    meta = dict(payload["meta"])
    meta["units"] = _UNITS_NOTE
    return meta


def _columns_from_rows(rows: list[dict], names: list[str]) -> dict[str, list[Any]]:
    return {name: [row[name] for row in rows] for name in names}


def _bands_table(payload: dict) -> OutputTable:
    columns: dict[str, list[Any]] = {
        name: []
        for name in ("kind", "band_index", "energy", "k", "k_label",
                     "multiplicity", "lower", "upper")
    }

    def add(kind, band_index=None, energy=None, k=None, k_label=None,
            multiplicity=None, lower=None, upper=None):
        for name, value in (
            ("kind", kind), ("band_index", band_index), ("energy", energy),
            ("k", k), ("k_label", k_label), ("multiplicity", multiplicity),
            ("lower", lower), ("upper", upper),
        ):
            columns[name].append(value)

    for edge in payload["edges"]:
        add("edge", energy=edge["energy"], k_label=edge["k_label"],
            multiplicity=edge["multiplicity"])
    for band in payload["bands"]:
        add("band", band_index=band["index"], lower=band["lower"], upper=band["upper"])
    for point in payload["dispersion"]:
        add("dispersion", band_index=point["band"], energy=point["energy"], k=point["k"])
    return OutputTable(_meta_dict(payload), columns)


def _eigs_table(payload: dict) -> OutputTable:
    names = ["mu", "lambda_plus_re", "lambda_plus_im", "lambda_minus_re",
             "lambda_minus_im", "spectral_class", "discriminant"]
    return OutputTable(_meta_dict(payload), _columns_from_rows(payload["rows"], names))


def _scaling_table(payload: dict) -> OutputTable:
    names = ["mu", "n", "log_g", "regime", "delta", "xi_fit", "xi_formula",
             "r_squared", "band_location", "agrees_with_spectrum"]
    columns: dict[str, list[Any]] = {name: [] for name in names}
    for row in payload["rows"]:
        for point in row["points"]:
            columns["mu"].append(row["mu"])
            columns["n"].append(point["n"])
            columns["log_g"].append(point["log_g"])
            columns["regime"].append(row["regime"])
            columns["delta"].append(row["delta"])
            columns["xi_fit"].append(row["xi_fit"])
            columns["xi_formula"].append(row["xi_formula"])
            columns["r_squared"].append(row["r_squared"])
            columns["band_location"].append(row["band_location"])
            columns["agrees_with_spectrum"].append(row["agrees_with_spectrum"])
    return OutputTable(_meta_dict(payload), columns)


def _sweep_table(payload: dict) -> OutputTable:
    names = ["mu", "n", "log_g", "band_location"]
    return OutputTable(_meta_dict(payload), _columns_from_rows(payload["rows"], names))


def _verify_table(payload: dict) -> OutputTable:
    names = ["name", "checks", "failures", "max_error", "tolerance", "passed"]
    return OutputTable(_meta_dict(payload), _columns_from_rows(payload["suites"], names))


_BUILDERS = {
    "bands": _bands_table,
    "eigs": _eigs_table,
    "scaling": _scaling_table,
    "sweep-mu": _sweep_table,
    "verify": _verify_table,
}


def build_table(command: str, payload: dict) -> OutputTable:
    """Flatten a response payload into the long-format table for ``command``."""
    try:
        builder = _BUILDERS[command]
    except KeyError:
        raise ValueError(f"no table layout for command {command!r}") from None
    return builder(payload)
