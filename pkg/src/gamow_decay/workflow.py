"""Build the resonant machinery once and derive every output table from it."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import cn_oracle
from .basis import (
    CoefficientSet,
    DiagnosticReport,
    OverlapMatrix,
    ResonantFamily,
    build_family,
    coefficients,
    delta_partial,
    diagnostic_grid,
    f_partial,
    overlap_matrix,
)
from .config import RunConfig
from .poles import Pole, find_poles
from .propagation import (
    ProbabilitySeries,
    SlopeEstimate,
    TimeGrid,
    compute_series,
    local_slopes,
    log_grid,
    nonescape_P,
    survival_S,
    tail_slope,
)
from .shell_model import InitialState, ShellModel, initial_state_box_mode


@dataclass(frozen=True)
class Setup:
    """Model, initial state and the largest family needed by a run."""
    config: RunConfig
    model: ShellModel
    psi0: InitialState
    family: ResonantFamily
    coeffs: CoefficientSet
    overlaps: OverlapMatrix

    def truncated(self, N: int):
        fam = self.family.truncate(N)
        co = self.coeffs.truncate(N)
        return fam, co, overlap_matrix(fam)

    @property
    def lifetime(self) -> float:
        k1 = self.family.k[0]
        return 1.0 / (-4.0 * k1.real * k1.imag)

    def grid(self) -> TimeGrid:
        g = self.config.time_grid
        return log_grid(g.t_min, g.t_max, g.points_per_decade)


def build_setup(cfg: RunConfig) -> Setup:
    model = cfg.shell_model()
    psi0 = initial_state_box_mode(model, cfg.initial_state.mode)
    N = max(cfg.truncation_N, max(cfg.diagnostic_N))
    family = build_family(model, N)
    return Setup(cfg, model, psi0, family, coefficients(family, psi0), overlap_matrix(family))


def pole_table(cfg: RunConfig) -> list[Pole]:
    return find_poles(cfg.shell_model(), cfg.truncation_N)


def diagnostics(setup: Setup, Ns=None) -> list[tuple[DiagnosticReport, float]]:
    """(report, f sup-norm on [0, R)) for every diagnostic N."""
    Ns = setup.config.diagnostic_N if Ns is None else Ns
    r, rp = setup.config.probes[0]
    grid = diagnostic_grid(setup.model.R)
    out = []
    for N in Ns:
        fam, co, ov = setup.truncated(N)
        rep = delta_partial(co, ov, fam, r, rp)
        out.append((rep, f_partial(co, fam, grid)[0]))
    return out


def series(setup: Setup, N: int | None = None, probe=None,
           tail_closure: bool | None = None) -> ProbabilitySeries:
    N = setup.config.truncation_N if N is None else N
    probe = setup.config.probes[0] if probe is None else probe
    closure = setup.config.tail_closure if tail_closure is None else tail_closure
    fam, co, ov = setup.truncated(N)
    return compute_series(setup.psi0, co, fam, ov, setup.grid(), probe, closure)


def slope_fits(s: ProbabilitySeries) -> dict[str, SlopeEstimate]:
    t = s.grid.samples
    ok = np.isfinite(s.green_remainder)
    return {
        "S": tail_slope(t, s.S, exp_term=s.exp_S),
        "P": tail_slope(t, s.P, exp_term=s.exp_P),
        "green": tail_slope(t[ok], np.abs(s.green_remainder[ok]), exp_term=s.exp_green[ok]),
    }


def probability_rows(s: ProbabilitySeries):
    t = s.grid.samples
    return t, s.S, s.P, s.green_remainder, local_slopes(t, s.S), local_slopes(t, s.P)


def oracle_grid(cfg: RunConfig) -> cn_oracle.Grid1D:
    o = cfg.oracle
    return cn_oracle.Grid1D(L=o.L, h=o.h, dt=o.dt, cap_width=o.cap_width,
                            cap_strength=o.cap_strength)


def oracle_times(setup: Setup) -> np.ndarray:
    o = setup.config.oracle
    return np.linspace(0.0, o.lifetimes * setup.lifetime, o.samples)


@dataclass(frozen=True)
class OracleComparison:
    t: np.ndarray
    P_cn: np.ndarray
    P_expansion: np.ndarray
    S_cn: np.ndarray
    S_expansion: np.ndarray
    fields: list

    @property
    def rel_diff(self) -> np.ndarray:
        return np.abs(self.P_expansion - self.P_cn) / np.abs(self.P_cn)


def oracle_compare(setup: Setup, times=None) -> OracleComparison:
    times = oracle_times(setup) if times is None else np.asarray(times, dtype=float)
    fields = cn_oracle.propagate_cn(setup.model, setup.psi0, oracle_grid(setup.config), times)
    S_cn, P_cn = cn_oracle.oracle_probabilities(fields, setup.model.R, setup.psi0)
    fam, co, ov = setup.truncated(setup.config.truncation_N)
    closure = setup.config.tail_closure
    P_ex = np.array([nonescape_P(co, fam, ov, t, closure) for t in times])
    S_ex = np.array([survival_S(setup.psi0, co, fam, t, closure) for t in times])
    return OracleComparison(times, P_cn, P_ex, S_cn, S_ex, fields)
