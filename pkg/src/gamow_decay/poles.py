"""Resonance poles of the delta shell.

Outgoing-wave matching at r = R gives the pole function

    F(k) = 2ik - lambda * (1 - exp(2ikR)),

whose nonzero roots are the resonance momenta. The n >= 1 family lives in
the fourth quadrant; its mirror k_{-n} = -conj(k_n) is obtained by symmetry,
never by re-solving.
"""

from __future__ import annotations

from dataclasses import dataclass

import cmath

import numpy as np

from .errors import (
    BoundaryTooCloseToZero,
    ConvergedToTrivialRoot,
    DerivativeVanished,
    DuplicatePole,
    MissedPole,
    NoConvergence,
    NonIntegerWinding,
)
from .shell_model import ShellModel

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50


@dataclass(frozen=True)
class Pole:
    index_n: int
    k: complex
    residual: float
    iterations: int = 0


@dataclass(frozen=True)
class PoleWindow:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate pole window {self}")

    def contains(self, k) -> bool:
        return (self.re_min <= k.real <= self.re_max) and (self.im_min <= k.imag <= self.im_max)


def pole_equation_residual(model: ShellModel, k):
    """F(k); accepts scalars or arrays."""
    k = np.asarray(k, dtype=complex)
    val = 2j * k - model.lambda_ * (1.0 - np.exp(2j * k * model.R))
    return complex(val) if val.ndim == 0 else val


def pole_equation_derivative(model: ShellModel, k):
    k = np.asarray(k, dtype=complex)
    val = 2j + 2j * model.lambda_ * model.R * np.exp(2j * k * model.R)
    return complex(val) if val.ndim == 0 else val


def scaled_residual(model: ShellModel, k: complex) -> float:
    """|F(k)| / max(1, |2k|), the quantity stored as ``Pole.residual``.

    Absolute |F| cannot drop below about |F'(k)| * ulp(k) in binary64, which
    exceeds 1e-12 once |k| is a few tens; the scaled form stays meaningful.
    """
    return abs(_F(model, k)) / max(1.0, abs(2 * k))


def _F(model, k):
    return 2j * k - model.lambda_ * (1.0 - cmath.exp(2j * k * model.R))


def _dF(model, k):
    return 2j + 2j * model.lambda_ * model.R * cmath.exp(2j * k * model.R)


def initial_guess(model: ShellModel, n: int) -> complex:
    if n < 1:
        raise ValueError(f"pole index must be >= 1, got {n}")
    lam, R = model.lambda_, model.R
    return complex(n * np.pi / R, -np.log1p(2 * n * np.pi / (lam * R)) / (2 * R))


def newton_polish(model: ShellModel, k0: complex, tol: float = NEWTON_TOL,
                  max_iter: int = NEWTON_MAX_ITER, index_n: int = 1) -> Pole:
    """Newton iteration on F with the analytic derivative.

    Converged when ``|F(k)| <= tol * max(1, |2k|)``. Roundoff in F grows
    with |k|, hence the relative form of the test.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = complex(k0)
    fk = _F(model, k)
    it = 0
    while abs(fk) > tol * max(1.0, abs(2 * k)):
        if it >= max_iter:
            raise NoConvergence(
                f"Newton did not converge from {k0} in {max_iter} iterations (|F|={abs(fk):.3e})")
        dfk = _dF(model, k)
        if abs(dfk) < 1e-300:
            raise DerivativeVanished(f"F'(k) vanished at k={k}")
        try:
            k = k - fk / dfk
            fk = _F(model, k)
        except OverflowError:
            raise NoConvergence(f"Newton diverged from {k0}") from None
        if not cmath.isfinite(k) or not cmath.isfinite(fk):
            raise NoConvergence(f"Newton diverged from {k0}")
        it += 1
    # one extra step can only help at this point; keep whichever is better
    dfk = _dF(model, k)
    if abs(dfk) >= 1e-300:
        k2 = k - fk / dfk
        f2 = _F(model, k2)
        if abs(f2) < abs(fk):
            k, fk = k2, f2
    if abs(k) < 1e-8:
        raise ConvergedToTrivialRoot(f"Newton from {k0} converged to k = 0")
    return Pole(index_n=index_n, k=k, residual=abs(fk) / max(1.0, abs(2 * k)), iterations=it)


def _log_derivative(model, z):
    e = np.exp(2j * z * model.R)
    f = 2j * z - model.lambda_ * (1.0 - e)
    return (2j + 2j * model.lambda_ * model.R * e) / f, np.abs(f)


def _edge_integral(model, z0, z1, tol, max_points, spacing=0.02):
    """Adaptive trapezoid for the integral of F'/F along a segment.

    Starts at a spacing that resolves the narrowest resonance near the real
    axis at default parameters, then halves the step (reusing old nodes)
    until two successive estimates agree within ``tol``.
    """
    dz = z1 - z0
    n = max(64, 1 << int(np.ceil(np.log2(abs(dz) / spacing))))
    g, fabs = _log_derivative(model, z0 + dz * np.linspace(0.0, 1.0, n + 1))
    min_abs = float(np.min(fabs))
    val = (np.sum(g) - 0.5 * (g[0] + g[-1])) * dz / n
    while n < max_points:
        mids = z0 + dz * (np.arange(n) + 0.5) / n
        gm, fabs = _log_derivative(model, mids)
        min_abs = min(min_abs, float(np.min(fabs)))
        new = 0.5 * val + np.sum(gm) * dz / (2 * n)
        n *= 2
        if abs(new - val) < tol:
            return new, min_abs
        val = new
    return val, min_abs


def winding_number_raw(model: ShellModel, window: PoleWindow, tol: float = 1e-7,
                       max_points: int = 1 << 20):
    """Unrounded (1 / 2 pi i) * contour integral of F'/F, and min |F| seen on the boundary."""
    corners = [complex(window.re_min, window.im_min), complex(window.re_max, window.im_min),
               complex(window.re_max, window.im_max), complex(window.re_min, window.im_max)]
    total = 0j
    min_abs = np.inf
    for z0, z1 in zip(corners, corners[1:] + corners[:1]):
        val, m = _edge_integral(model, z0, z1, tol, max_points)
        total += val
        min_abs = min(min_abs, m)
    return total / (2j * np.pi), min_abs


def count_poles_argument_principle(model: ShellModel, window: PoleWindow) -> int:
    raw, min_abs = winding_number_raw(model, window)
    if min_abs <= 1e-8:
        raise BoundaryTooCloseToZero(f"min |F| on boundary of {window} is {min_abs:.3e}")
    count = int(np.rint(raw.real))
    if abs(raw - count) >= 0.05:
        raise NonIntegerWinding(f"winding number {raw} is not close to an integer")
    return count


def pole_tiles(model: ShellModel, poles: list[Pole]) -> list[PoleWindow]:
    """One window per pole; vertical edges at midpoints between neighbours.

    The top edge sits at Im k = +1/R. For lambda > 0 the upper half plane
    holds no zeros, and keeping the edge off the real axis means nearly real
    poles (large lambda) never come close to the contour.
    """
    re = np.array([p.k.real for p in poles])
    im = np.array([p.k.imag for p in poles])
    if re.size == 1:
        gaps = np.array([np.pi / model.R])
    else:
        gaps = np.diff(re)
    left = np.empty_like(re)
    right = np.empty_like(re)
    left[1:] = 0.5 * (re[1:] + re[:-1])
    right[:-1] = left[1:]
    left[0] = max(re[0] - 0.5 * gaps[0], 0.5 * re[0])
    right[-1] = re[-1] + 0.5 * gaps[-1]
    depth = 1.0 / model.R
    return [PoleWindow(float(lo), float(hi), float(y - depth), depth)
            for lo, hi, y in zip(left, right, im)]


def covering_window(model: ShellModel, poles: list[Pole]) -> PoleWindow:
    tiles = pole_tiles(model, poles)
    return PoleWindow(tiles[0].re_min, tiles[-1].re_max,
                      min(t.im_min for t in tiles), tiles[0].im_max)


def find_poles(model: ShellModel, N: int, check_tiles: bool = True) -> list[Pole]:
    """Poles n = 1..N sorted by Re k, certified by the argument principle.

    The covering window must contain exactly N zeros of F. With
    ``check_tiles`` every per-pole tile is also required to hold exactly one.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    found = [newton_polish(model, initial_guess(model, n), index_n=n) for n in range(1, N + 1)]
    found.sort(key=lambda p: (p.k.real, p.k.imag))
    ks = np.array([p.k for p in found])
    if N > 1:
        sep = np.abs(ks[:, None] - ks[None, :])
        np.fill_diagonal(sep, np.inf)
        if np.min(sep) <= 1e-6:
            i, j = np.unravel_index(np.argmin(sep), sep.shape)
            raise DuplicatePole(f"poles {found[i].k} and {found[j].k} coincide")
    poles = [Pole(n, p.k, p.residual, p.iterations) for n, p in enumerate(found, start=1)]
    for p in poles:
        if not (p.k.real > 0 and p.k.imag < 0):
            raise MissedPole(f"pole {p.k} left the fourth quadrant")
    total = count_poles_argument_principle(model, covering_window(model, poles))
    if total != N:
        raise MissedPole(f"argument principle counts {total} zeros, found {N}")
    if check_tiles:
        for p, tile in zip(poles, pole_tiles(model, poles)):
            c = count_poles_argument_principle(model, tile)
            if c != 1 or not tile.contains(p.k):
                raise MissedPole(f"tile {tile} around pole {p.index_n} holds {c} zeros")
    return poles


def extend_symmetric(poles: list[Pole]) -> list[Pole]:
    """Append the mirror family k_{-n} = -conj(k_n), ordered -N..-1, 1..N."""
    positive = sorted((p for p in poles if p.index_n >= 1), key=lambda p: p.index_n)
    mirrored = [Pole(-p.index_n, complex(-p.k.real, p.k.imag), p.residual, p.iterations)
                for p in reversed(positive)]
    return mirrored + positive
