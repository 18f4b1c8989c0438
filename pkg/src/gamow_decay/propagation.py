"""psi(r, t), the interior Green function, S(t), P(t) and tail exponents.

All quantities are resonant sums over the symmetric family,

    psi(r, t) = sum_n C_n u_n(r) M(k_n, t),
    g(r, r'; t) = sum_n u_n(r) u_n(r') M(k_n, t),

summed pairwise over (n, -n).

Tail closure
------------
A family truncated at N leaves out the poles |n| > N. Once every omitted
pole satisfies |k|^2 t >= 4, each of them contributes A / (k sqrt t) plus
terms of order |k|^-3. Their leading contribution is therefore A / sqrt(t)
times the tail of sum_n C_n u_n(r) / k_n, and that full sum vanishes
(f == 0, the 1/k sum rule). So the omitted tail equals
-(A / sqrt t) f_N(r), and it is added back by using

    mu_n(t) = M(k_n, t) - A / (k_n sqrt t)

in place of M. The O(|k|^-3) part of the omitted tail is neglected. With
``tail_closure=False`` the raw truncated sums are used. Their late-time
behaviour is dominated by A^2 Delta_N / t, a pure truncation artefact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import CoefficientSet, OverlapMatrix, ResonantFamily, pair_sum
from .errors import (
    NonPositiveSample,
    OutOfRange,
    PathDisagreement,
    RegimeViolation,
    SizeMismatch,
    WindowTooSmall,
)
from .moshinsky import A_CONST, B_CONST, moshinsky_split
from .quadrature import adaptive_gauss_legendre
from .shell_model import InitialState

PATH_RTOL = 1e-8
REGIME = 4.0


@dataclass(frozen=True)
class TimeGrid:
    samples: np.ndarray = field(repr=False)
    t_min: float = 0.0
    t_max: float = 0.0
    points_per_decade: int = 0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or s.size == 0 or np.any(np.diff(s) <= 0):
            raise ValueError("time samples must be a strictly increasing 1-D sequence")
        if s[0] < 0:
            raise ValueError("time samples must be nonnegative")


def log_grid(t_min: float = 1e-2, t_max: float = 1e4, points_per_decade: int = 16) -> TimeGrid:
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    n = int(round(np.log10(t_max / t_min) * points_per_decade))
    samples = t_min * 10.0 ** (np.arange(n + 1) / points_per_decade)
    samples[-1] = t_max
    return TimeGrid(samples, t_min, t_max, points_per_decade)


def closure_active(family: ResonantFamily, t: float) -> bool:
    """True when every omitted pole is in the asymptotic regime at time t."""
    return t > 0 and abs(family.k_next) ** 2 * t >= REGIME


def time_factors(family: ResonantFamily, t: float, tail_closure: bool = True):
    """(exponential part, full factor mu_n) for every state of the family."""
    closed = tail_closure and closure_active(family, t)
    exp_part, power = moshinsky_split(family.k, t, subtract_leading=closed)
    return exp_part, exp_part + power


def _check_r(family, r):
    r = np.asarray(r, dtype=float)
    R = family.model.R
    if np.any(r < 0) or np.any(r > R):
        raise OutOfRange(f"r must lie in [0, {R}]")
    return r


def psi_t(coeffs: CoefficientSet, family: ResonantFamily, r, t: float,
          tail_closure: bool = True):
    """psi(r, t) = sum_n C_n u_n(r) mu_n(t)."""
    if coeffs.half_size_N != family.N:
        raise SizeMismatch(f"{coeffs.half_size_N} coefficients for {family.N} states")
    r = _check_r(family, r)
    _, mu = time_factors(family, t, tail_closure)
    out = pair_sum(family.u(r) * (coeffs.C * mu))
    return complex(out) if np.ndim(out) == 0 else out


def green_partial(family: ResonantFamily, r: float, rp: float, t: float,
                  tail_closure: bool = True) -> complex:
    """g(r, rp; t) for 0 <= r, rp < R."""
    R = family.model.R
    if not (0 <= r < R and 0 <= rp < R):
        raise OutOfRange(f"(r, rp) = ({r}, {rp}) must lie in [0, {R})")
    _, mu = time_factors(family, t, tail_closure)
    return complex(pair_sum(family.u(r) * family.u(rp) * mu))


@dataclass(frozen=True)
class GreenRemainder:
    value: float
    predicted: float


def green_remainder(family: ResonantFamily, r: float, rp: float, t: float,
                    tail_closure: bool = True) -> GreenRemainder:
    """|g - sum_{n>=1} u_n u_n' exp(-i k_n^2 t)| and the B-term prediction."""
    kmin = np.min(np.abs(family.k))
    if t <= 0 or kmin ** 2 * t < REGIME:
        raise RegimeViolation(f"|k_1|^2 t = {kmin ** 2 * t:.3g} < {REGIME}")
    R = family.model.R
    if not (0 <= r < R and 0 <= rp < R):
        raise OutOfRange(f"(r, rp) = ({r}, {rp}) must lie in [0, {R})")
    closed = tail_closure and closure_active(family, t)
    _, power = moshinsky_split(family.k, t, subtract_leading=closed)
    uu = family.u(r) * family.u(rp)
    value = abs(pair_sum(uu * power))
    predicted = abs(B_CONST * pair_sum(uu / family.k ** 3)) * t ** -1.5
    return GreenRemainder(float(value), float(predicted))


def _quad(func, R, rel_tol=1e-12):
    return adaptive_gauss_legendre(func, 0.0, R, abs_tol=1e-300, rel_tol=rel_tol,
                                   min_depth=2)


def survival_paths(psi0: InitialState, coeffs: CoefficientSet, family: ResonantFamily,
                   t: float, tail_closure: bool = True):
    """S(t) by quadrature of psi0 * psi(t) and by the coefficient series."""
    R = family.model.R
    _, mu = time_factors(family, t, tail_closure)
    v = coeffs.C * mu
    amp_q = _quad(lambda r: psi0(r) * pair_sum(family.u(r) * v), R)
    amp_s = pair_sum(coeffs.C * v)
    return float(abs(amp_q) ** 2), float(abs(amp_s) ** 2)


def survival_S(psi0: InitialState, coeffs: CoefficientSet, family: ResonantFamily,
               t: float, tail_closure: bool = True, rtol: float = PATH_RTOL) -> float:
    """|<psi0|psi(t)>|^2; raises PathDisagreement if the two paths differ."""
    quad, series = survival_paths(psi0, coeffs, family, t, tail_closure)
    if max(quad, series) > 1e-12 and abs(quad - series) > rtol * max(quad, series):
        raise PathDisagreement(f"S({t}): quadrature {quad!r} vs series {series!r}")
    return quad


def nonescape_paths(coeffs: CoefficientSet, family: ResonantFamily, overlaps: OverlapMatrix,
                    t: float, tail_closure: bool = True):
    """P(t) by quadrature of |psi|^2 and by the bilinear form in I_rs."""
    if overlaps.half_size_N != family.N or coeffs.half_size_N != family.N:
        raise SizeMismatch("coefficients, overlaps and family must share N")
    R = family.model.R
    _, mu = time_factors(family, t, tail_closure)
    v = coeffs.C * mu
    quad = _quad(lambda r: np.abs(pair_sum(family.u(r) * v)) ** 2, R)
    return float(quad), _bilinear(v, overlaps)


def _bilinear(v, overlaps: OverlapMatrix) -> float:
    inner = pair_sum(np.conj(v)[:, None] * overlaps.entries * v[None, :])
    N = overlaps.half_size_N
    return float(np.sum(inner[:N] + inner[N:]).real)


def nonescape_bilinear(coeffs: CoefficientSet, family: ResonantFamily, overlaps: OverlapMatrix,
                       t: float, tail_closure: bool = True) -> float:
    """P(t) from the I_rs bilinear form alone (no quadrature cross-check)."""
    if overlaps.half_size_N != family.N or coeffs.half_size_N != family.N:
        raise SizeMismatch("coefficients, overlaps and family must share N")
    _, mu = time_factors(family, t, tail_closure)
    return _bilinear(coeffs.C * mu, overlaps)


def nonescape_P(coeffs: CoefficientSet, family: ResonantFamily, overlaps: OverlapMatrix,
                t: float, tail_closure: bool = True, rtol: float = PATH_RTOL) -> float:
    """int_0^R |psi(r, t)|^2 dr; raises PathDisagreement if the paths differ."""
    quad, bilinear = nonescape_paths(coeffs, family, overlaps, t, tail_closure)
    if quad > 1e-12 and abs(quad - bilinear) > rtol * quad:
        raise PathDisagreement(f"P({t}): quadrature {quad!r} vs bilinear {bilinear!r}")
    return quad


@dataclass(frozen=True)
class SlopeEstimate:
    window: tuple
    slope: float
    slope_stderr: float
    samples: int = 0


def _fit(t, y):
    x = np.log(t)
    z = np.log(y)
    n = x.size
    xm = x.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = np.sum((x - xm) * (z - z.mean())) / sxx
    intercept = z.mean() - slope * xm
    resid = z - (intercept + slope * x)
    stderr = np.sqrt(np.sum(resid ** 2) / (n - 2) / sxx) if n > 2 else np.inf
    return float(slope), float(stderr)


def auto_window(t, y, exp_term, ratio: float = 1e-6, decades: float = 1.0):
    """Latest window of ``decades`` decades where the n = 1 exponential term
    stays below ``ratio`` times the series; None if there is none."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    clean = np.asarray(exp_term, dtype=float) < ratio * y
    span = 10.0 ** decades
    for i in range(t.size - 1, -1, -1):
        lo = t[i] / span
        if lo < t[0] * (1 - 1e-12):
            break
        sel = (t >= lo * (1 - 1e-12)) & (t <= t[i])
        if np.all(clean[sel]):
            return float(t[sel][0]), float(t[i])
    return None


def tail_slope(t, y, window=None, exp_term=None, ratio: float = 1e-6,
               min_samples: int = 8) -> SlopeEstimate:
    """Least-squares slope of ln y against ln t.

    ``window`` = (t_lo, t_hi) restricts the fit. Without one, ``exp_term``
    (the n = 1 exponential contribution on the same grid) selects the latest
    decade free of it; with neither the whole series is used.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is None and exp_term is not None:
        window = auto_window(t, y, exp_term, ratio)
        if window is None:
            raise WindowTooSmall("no decade where the exponential term is negligible")
    if window is None:
        window = (float(t[0]), float(t[-1]))
    lo, hi = window
    sel = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    if np.count_nonzero(sel) < min_samples:
        raise WindowTooSmall(f"{np.count_nonzero(sel)} samples in window {window}, need {min_samples}")
    if np.any(y[sel] <= 0):
        raise NonPositiveSample("tail fit needs strictly positive samples")
    slope, stderr = _fit(t[sel], y[sel])
    return SlopeEstimate((float(lo), float(hi)), slope, stderr, int(np.count_nonzero(sel)))


def local_slopes(t, y) -> np.ndarray:
    """d ln y / d ln t by centred differences (one-sided at the ends)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.gradient(np.log(np.asarray(y, float)), np.log(np.asarray(t, float)))


@dataclass(frozen=True)
class ProbabilitySeries:
    grid: TimeGrid
    S: np.ndarray = field(repr=False)
    P: np.ndarray = field(repr=False)
    green_remainder: np.ndarray = field(repr=False)
    green_predicted: np.ndarray = field(repr=False)
    exp_S: np.ndarray = field(repr=False)
    exp_P: np.ndarray = field(repr=False)
    exp_green: np.ndarray = field(repr=False)
    truncation_N: int = 0
    epsilon_N: float = 0.0
    probe: tuple = (0.0, 0.0)


def truncation_epsilon(coeffs: CoefficientSet, family: ResonantFamily,
                       overlaps: OverlapMatrix) -> float:
    """|P_N(0) - 1|, the truncation error of the expansion at t = 0."""
    v = 0.5 * coeffs.C
    inner = pair_sum(np.conj(v)[:, None] * overlaps.entries * v[None, :])
    N = family.N
    return float(abs(np.sum(inner[:N] + inner[N:]).real - 1.0))


def compute_series(psi0: InitialState, coeffs: CoefficientSet, family: ResonantFamily,
                   overlaps: OverlapMatrix, grid: TimeGrid, probe=None,
                   tail_closure: bool = True) -> ProbabilitySeries:
    """S, P and the Green remainder on every grid time."""
    R = family.model.R
    probe = (0.3 * R, 0.7 * R) if probe is None else tuple(probe)
    ts = np.asarray(grid.samples, dtype=float)
    S = np.empty(ts.size)
    P = np.empty(ts.size)
    rem = np.full(ts.size, np.nan)
    pred = np.full(ts.size, np.nan)
    k1 = family.k[0]
    C1 = coeffs.C[0]
    u1p = family.u(probe[0])[0] * family.u(probe[1])[0]
    decay = np.abs(np.exp(-1j * k1 * k1 * ts))
    exp_S = np.abs(C1 * C1) ** 2 * decay ** 2
    exp_P = np.abs(C1) ** 2 * overlaps.entries[0, 0].real * decay ** 2
    exp_g = np.abs(u1p) * decay
    for i, t in enumerate(ts):
        S[i] = survival_S(psi0, coeffs, family, t, tail_closure)
        P[i] = nonescape_P(coeffs, family, overlaps, t, tail_closure)
        if t > 0 and abs(k1) ** 2 * t >= REGIME:
            gr = green_remainder(family, probe[0], probe[1], t, tail_closure)
            rem[i], pred[i] = gr.value, gr.predicted
    return ProbabilitySeries(grid, S, P, rem, pred, exp_S, exp_P, exp_g, family.N,
                             truncation_epsilon(coeffs, family, overlaps), probe)
