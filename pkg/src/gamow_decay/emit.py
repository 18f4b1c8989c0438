"""Deterministic text rendering of the CLI artifacts.

Every artifact starts with ``#`` comment lines carrying the package version
and the effective configuration. Numbers are written in exponent form with
the configured number of significant digits (17 by default, enough to
round-trip binary64). JSON artifacts carry the configuration under a
``config`` key instead, so they stay valid JSON.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import __version__
from .config import RunConfig
from .poles import Pole
from .propagation import ProbabilitySeries, SlopeEstimate
from . import workflow


def fmt(x, precision: int = 17) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{precision - 1}e}"


def header(cfg: RunConfig, subcommand: str) -> list[str]:
    return [f"# gamow_decay {__version__} {subcommand}", f"# config {cfg.to_json()}"]


def csv_text(cfg: RunConfig, subcommand: str, columns: list[str], rows) -> str:
    p = cfg.output.precision
    lines = header(cfg, subcommand)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v, p) for v in row))
    return "\n".join(lines) + "\n"


def _json_number(x, precision):
    # rendered via fmt so that the digits are fixed, then parsed back for json
    if isinstance(x, (int, np.integer)):
        return int(x)
    s = fmt(x, precision)
    return s if s in ("nan", "inf", "-inf") else float(s)


def json_text(cfg: RunConfig, subcommand: str, payload: dict) -> str:
    doc = {"version": __version__, "subcommand": subcommand, "config": cfg.echo_dict()}
    doc.update(payload)
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_table(cfg: RunConfig, subcommand: str, columns: list[str], rows) -> str:
    if cfg.output.format == "json":
        return as_json_table(cfg, subcommand, columns, rows)
    return csv_text(cfg, subcommand, columns, rows)


def poles_table(poles: list[Pole]):
    rows = [(p.index_n, p.k.real, p.k.imag, p.residual, p.iterations) for p in poles]
    return ["n", "re_k", "im_k", "residual", "iterations"], rows


def sumrules_table(diags):
    rows = [(rep.N, abs(rep.sum_rule_value), fsup, abs(rep.delta_value), rep.delta_over_mass)
            for rep, fsup in diags]
    return ["N", "abs_sum_rule", "f_sup", "abs_delta", "delta_over_mass"], rows


def probabilities_table(s: ProbabilitySeries):
    cols = workflow.probability_rows(s)
    return ["t", "S", "P", "remainder", "local_slope_S", "local_slope_P"], list(zip(*cols))


def oracle_table(cmp: workflow.OracleComparison):
    rows = zip(cmp.t, cmp.P_cn, cmp.P_expansion, cmp.rel_diff, cmp.S_cn, cmp.S_expansion)
    return ["t", "P_cn", "P_expansion", "rel_diff", "S_cn", "S_expansion"], list(rows)


def slope_payload(est: SlopeEstimate, precision: int) -> dict:
    return {
        "window": [_json_number(est.window[0], precision), _json_number(est.window[1], precision)],
        "slope": _json_number(est.slope, precision),
        "stderr": _json_number(est.slope_stderr, precision),
        "samples": est.samples,
    }


def tailfit_text(cfg: RunConfig, fits: dict[str, SlopeEstimate], series=None) -> str:
    names = list(fits) if series is None else [series]
    p = cfg.output.precision
    return json_text(cfg, "tailfit", {"fits": {n: slope_payload(fits[n], p) for n in names}})


def as_json_table(cfg: RunConfig, subcommand: str, columns: list[str], rows) -> str:
    p = cfg.output.precision
    return json_text(cfg, subcommand, {
        "columns": columns,
        "rows": [[_json_number(v, p) for v in row] for row in rows],
    })
