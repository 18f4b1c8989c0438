"""Gamow-normalized resonant states, overlaps, expansion coefficients and
the three vanishing diagnostics (sum rule, f, Delta).

Every sum over the symmetric family runs over pairs (n, -n) first and then
over |n| ascending, which keeps the real/imaginary cancellations exact and
the reduction order reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetricFamily,
    DegenerateNormalizer,
    ModelMismatch,
    SizeMismatch,
)
from .poles import Pole, extend_symmetric, find_poles, initial_guess, newton_polish
from .quadrature import adaptive_gauss_legendre
from .shell_model import InitialState, ShellModel, eval_u_inner

QUAD_TOL = 1e-12
_SERIES_SWITCH = 1e-4


@dataclass(frozen=True)
class ResonantState:
    pole: Pole
    amplitude: complex
    model: ShellModel

    @property
    def k(self) -> complex:
        return self.pole.k

    def __call__(self, r):
        return eval_u_inner(self, r)


def amplitude_squared(model: ShellModel, k: complex) -> complex:
    """Closed form of A_n**2 that satisfies the Gamow normalization."""
    lam, R = model.lambda_, model.R
    k = complex(k)
    den = R * (lam - 2j * k) + 1.0
    if abs(den) < 1e-12:
        raise DegenerateNormalizer(f"R(lambda - 2ik) + 1 vanishes at k={k}")
    return 2.0 * (lam - 2j * k) / den


def _principal_root(z: complex) -> complex:
    a = complex(np.sqrt(complex(z)))
    if a.real < 0 or (a.real == 0 and a.imag < 0):
        a = -a
    return a


def normalize(model: ShellModel, pole: Pole) -> ResonantState:
    """Attach the Gamow amplitude to a pole.

    n >= 1 takes the root with Re A > 0. For mirror poles the amplitude is
    -conj(A_|n|), so that u_{-n}(r) = conj(u_n(r)) holds pointwise.
    """
    A = _principal_root(amplitude_squared(model, pole.k))
    if pole.index_n < 0:
        A = -A
    return ResonantState(pole=pole, amplitude=A, model=model)


def gamow_norm_quadrature(state: ResonantState, abs_tol: float = QUAD_TOL) -> complex:
    """int_0^R u^2 dr + i u(R)^2 / (2k) by adaptive Gauss-Legendre (oracle path)."""
    R = state.model.R
    k, A = state.k, state.amplitude
    integral = adaptive_gauss_legendre(lambda r: (A * np.sin(k * r)) ** 2, 0.0, R,
                                       abs_tol=abs_tol, min_depth=2)
    uR = A * np.sin(k * R)
    return complex(integral + 1j * uR ** 2 / (2 * k))


@dataclass(frozen=True)
class ResonantFamily:
    """States n = 1..N followed by their mirrors n = -1..-N.

    ``k`` and ``amplitude`` are arrays of length 2N in that order;
    ``k_next`` is the first omitted pole k_{N+1}, used for tail bookkeeping.
    """

    model: ShellModel
    k: np.ndarray = field(repr=False)
    amplitude: np.ndarray = field(repr=False)
    residual: np.ndarray = field(repr=False)
    k_next: complex = 0j

    @property
    def N(self) -> int:
        return self.k.size // 2

    @property
    def index(self) -> np.ndarray:
        n = np.arange(1, self.N + 1)
        return np.concatenate([n, -n])

    def u(self, r) -> np.ndarray:
        """u_n(r) for every state; shape ``r.shape + (2N,)``."""
        r = np.asarray(r, dtype=float)
        return self.amplitude * np.sin(np.multiply.outer(r, self.k))

    def truncate(self, N: int) -> "ResonantFamily":
        if not 1 <= N <= self.N:
            raise SizeMismatch(f"cannot truncate a family of size {self.N} to {N}")
        sel = np.r_[0:N, self.N:self.N + N]
        k_next = self.k[N] if N < self.N else self.k_next
        return ResonantFamily(self.model, self.k[sel], self.amplitude[sel],
                              self.residual[sel], complex(k_next))

    def states(self) -> list[ResonantState]:
        return [ResonantState(Pole(int(n), complex(k), float(res)), complex(A), self.model)
                for n, k, A, res in zip(self.index, self.k, self.amplitude, self.residual)]

    def state(self, n: int) -> ResonantState:
        pos = n - 1 if n > 0 else self.N - n - 1
        return ResonantState(Pole(n, complex(self.k[pos]), float(self.residual[pos])),
                             complex(self.amplitude[pos]), self.model)


def pair_sum(terms: np.ndarray) -> np.ndarray:
    """Sum the last axis (length 2N, family order) pairwise over (n, -n)."""
    N = terms.shape[-1] // 2
    return np.sum(terms[..., :N] + terms[..., N:], axis=-1)


def family_from_states(states: list[ResonantState]) -> ResonantFamily:
    """Validate a symmetric list of states and pack it into family order."""
    if not states:
        raise AsymmetricFamily("empty family")
    model = states[0].model
    by_n = {}
    for s in states:
        if s.model != model:
            raise ModelMismatch("states come from different models")
        by_n[s.pole.index_n] = s
    pos = sorted(n for n in by_n if n > 0)
    N = len(pos)
    if pos != list(range(1, N + 1)) or len(by_n) != 2 * N:
        raise AsymmetricFamily(f"indices {sorted(by_n)} are not -N..-1, 1..N")
    for n in pos:
        a, b = by_n[n], by_n[-n]
        if b.k != -a.k.conjugate():
            raise AsymmetricFamily(f"k_{-n} = {b.k} is not -conj(k_{n}) = {-a.k.conjugate()}")
    order = pos + [-n for n in pos]
    k = np.array([by_n[n].k for n in order])
    amp = np.array([by_n[n].amplitude for n in order])
    res = np.array([by_n[n].pole.residual for n in order])
    k_next = newton_polish(model, initial_guess(model, N + 1), index_n=N + 1).k
    return ResonantFamily(model, k, amp, res, k_next)


def build_family(model: ShellModel, N: int, check_tiles: bool = True) -> ResonantFamily:
    """Solve, mirror and normalize the first N resonances."""
    poles = find_poles(model, N + 1, check_tiles=check_tiles)
    extended = extend_symmetric(poles[:N])
    states = [normalize(model, p) for p in extended]
    fam = family_from_states(states)
    return ResonantFamily(model, fam.k, fam.amplitude, fam.residual, poles[N].k)


def _sin_over(x, R):
    """sin(x R) / x with the removable point at x = 0 handled by series."""
    x = np.asarray(x, dtype=complex)
    small = np.abs(x) < _SERIES_SWITCH
    safe = np.where(small, 1.0, x)
    x2 = x * x
    series = R - x2 * R ** 3 / 6.0 + x2 * x2 * R ** 5 / 120.0
    return np.where(small, series, np.sin(safe * R) / safe)


def _sine_product_integral(a, b, R):
    """int_0^R sin(a r) sin(b r) dr for complex a, b (broadcasting)."""
    return 0.5 * (_sin_over(a - b, R) - _sin_over(a + b, R))


def overlap_I(a: ResonantState, b: ResonantState) -> complex:
    """int_0^R conj(u_a) u_b dr in closed form."""
    if a.model != b.model:
        raise ModelMismatch("overlap between states of different models")
    J = _sine_product_integral(np.conj(a.k), b.k, a.model.R)
    return complex(np.conj(a.amplitude) * b.amplitude * J)


def overlap_quadrature(a: ResonantState, b: ResonantState, abs_tol: float = QUAD_TOL) -> complex:
    f = lambda r: np.conj(a.amplitude * np.sin(a.k * r)) * b.amplitude * np.sin(b.k * r)
    return complex(adaptive_gauss_legendre(f, 0.0, a.model.R, abs_tol=abs_tol, min_depth=2))


@dataclass(frozen=True)
class OverlapMatrix:
    half_size_N: int
    entries: np.ndarray = field(repr=False)

    def __getitem__(self, rs):
        r, s = rs
        return complex(self.entries[_position(r, self.half_size_N), _position(s, self.half_size_N)])


@dataclass(frozen=True)
class CoefficientSet:
    half_size_N: int
    C: np.ndarray = field(repr=False)

    def __getitem__(self, n):
        return complex(self.C[_position(n, self.half_size_N)])

    def truncate(self, N: int) -> "CoefficientSet":
        if not 1 <= N <= self.half_size_N:
            raise SizeMismatch(f"cannot truncate {self.half_size_N} coefficients to {N}")
        M = self.half_size_N
        return CoefficientSet(N, self.C[np.r_[0:N, M:M + N]])


def _position(n, N):
    if n == 0 or abs(n) > N:
        raise IndexError(f"index {n} outside +-1..+-{N}")
    return n - 1 if n > 0 else N - n - 1


def overlap_matrix(family: ResonantFamily) -> OverlapMatrix:
    J = _sine_product_integral(np.conj(family.k)[:, None], family.k[None, :], family.model.R)
    I = np.conj(family.amplitude)[:, None] * family.amplitude[None, :] * J
    return OverlapMatrix(family.N, I)


def coefficient_C(state: ResonantState, psi0: InitialState, abs_tol: float = QUAD_TOL) -> complex:
    """C_n = int_0^R psi0(r) u_n(r) dr (no conjugation), by quadrature."""
    R = state.model.R
    f = lambda r: psi0(r) * state.amplitude * np.sin(state.k * r)
    return complex(adaptive_gauss_legendre(f, 0.0, R, abs_tol=abs_tol, min_depth=2))


def coefficients(family: ResonantFamily, psi0: InitialState,
                 abs_tol: float = QUAD_TOL) -> CoefficientSet:
    """All C_n of a family in one vectorized adaptive quadrature."""
    R = family.model.R
    C = adaptive_gauss_legendre(lambda r: psi0(r)[:, None] * family.u(r), 0.0, R,
                                abs_tol=abs_tol, min_depth=2)
    return CoefficientSet(family.N, np.asarray(C))


def coefficient_box_closed_form(state: ResonantState, m: int) -> complex:
    """Closed-form C_n for the box mode m (test oracle).

    Uses int_0^R sin(a r) sin(k r) dr = a sin((k - a) R) / ((k - a)(k + a)),
    a = m pi / R, with sin(dR)/d expanded in series near the removable point.
    """
    R = state.model.R
    a = m * np.pi / R
    k = state.k
    sign = 1.0
    if abs(k + a) < abs(k - a):
        # the mirror branch k ~ -a: use oddness of sin(k r) in k
        k, sign = -k, -1.0
    d = k - a
    J = a * complex(_sin_over(d, R)) / (k + a)
    return complex(sign * state.amplitude * np.sqrt(2.0 / R) * J)


def sum_rule_partial(family: ResonantFamily, r: float, rp: float) -> complex:
    """sum_{0<|n|<=N} u_n(r) u_n(rp) / k_n, pairwise."""
    terms = family.u(r) * family.u(rp) / family.k
    return complex(pair_sum(terms))


def f_profile(coeffs: CoefficientSet, family: ResonantFamily, grid) -> np.ndarray:
    if coeffs.half_size_N != family.N:
        raise SizeMismatch(f"{coeffs.half_size_N} coefficients for {family.N} states")
    return pair_sum(family.u(grid) * (coeffs.C / family.k))


def f_partial(coeffs: CoefficientSet, family: ResonantFamily, grid):
    """f_N on ``grid``: returns ``(sup |f_N|, profile)``."""
    profile = f_profile(coeffs, family, np.asarray(grid, dtype=float))
    return float(np.max(np.abs(profile))), profile


def diagnostic_grid(R: float, points: int = 101) -> np.ndarray:
    """Uniform grid on [0, R); the expansions are not pointwise at r = R."""
    return np.linspace(0.0, R, points, endpoint=False)


@dataclass(frozen=True)
class DiagnosticReport:
    N: int
    sum_rule_value: complex
    f_sup_norm: float
    delta_value: complex
    term_mass: float

    @property
    def delta_over_mass(self) -> float:
        return abs(self.delta_value) / self.term_mass


def delta_partial(coeffs: CoefficientSet, overlaps: OverlapMatrix, family: ResonantFamily,
                  r: float | None = None, rp: float | None = None) -> DiagnosticReport:
    """Truncated Delta with its term mass, plus the sum rule and f sup-norm.

    The probe (r, rp) for the sum rule defaults to (0.3 R, 0.7 R).
    """
    N = coeffs.half_size_N
    if overlaps.half_size_N != N or family.N != N:
        raise SizeMismatch(f"coefficients N={N}, overlaps N={overlaps.half_size_N}, family N={family.N}")
    R = family.model.R
    r = 0.3 * R if r is None else r
    rp = 0.7 * R if rp is None else rp
    w = coeffs.C / family.k
    terms = np.conj(w)[:, None] * w[None, :] * overlaps.entries
    inner = pair_sum(terms)
    delta = complex(np.sum(inner[:N] + inner[N:]))
    mass = float(np.sum(np.abs(terms)))
    f_sup, _ = f_partial(coeffs, family, diagnostic_grid(R))
    return DiagnosticReport(N=N, sum_rule_value=sum_rule_partial(family, r, rp),
                            f_sup_norm=f_sup, delta_value=delta, term_mass=mass)


def f_squared_integral(coeffs: CoefficientSet, family: ResonantFamily,
                       rel_tol: float = 1e-13) -> float:
    """int_0^R |f_N|^2 dr by adaptive quadrature (second path for Delta_N)."""
    R = family.model.R
    val = adaptive_gauss_legendre(lambda r: np.abs(f_profile(coeffs, family, r)) ** 2,
                                  0.0, R, abs_tol=0.0, rel_tol=rel_tol, min_depth=2)
    return float(val)
