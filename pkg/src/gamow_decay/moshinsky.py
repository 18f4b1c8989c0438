"""Time factor M(k, t) of the resonant expansion and its large-t split.

    M(k, t) = 1/2 exp(y^2) erfc(y),   y = -exp(-i pi/4) k sqrt(t)
            = 1/2 w(z),               z = i y = -exp(i pi/4) k sqrt(t)

with w the Faddeeva function. M(k, 0) = 1/2 for every k, and for a
fourth-quadrant k the reflected branch exposes the decaying factor
exp(-i k^2 t) explicitly, so nothing overflows at large t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import wofz

from .errors import FaddeevaOverflow, NegativeTime, RegimeViolation

SQRT_PI = np.sqrt(np.pi)
A_CONST = -np.exp(1j * np.pi / 4) / (2 * SQRT_PI)
B_CONST = -np.exp(-1j * np.pi / 4) / (4 * SQRT_PI)
_ROT = np.exp(1j * np.pi / 4)
_ASYMPTOTIC_SWITCH = 8.0
_EXP_LIMIT = 700.0


@dataclass(frozen=True)
class AsymptoticConstants:
    A: complex = complex(A_CONST)
    B: complex = complex(B_CONST)


def _exp_minus_square(z):
    """exp(-z**2) with the modulus and phase split; raises instead of overflowing."""
    z2 = z * z
    re = -z2.real
    if np.any(re > _EXP_LIMIT):
        raise FaddeevaOverflow(f"exp(-z^2) overflows (Re(-z^2) = {np.max(re):.1f})")
    return np.exp(re) * (np.cos(z2.imag) - 1j * np.sin(z2.imag))


_SPLITTER = 134217729.0  # 2**27 + 1


def _two_prod(a, b):
    """p + e == a * b exactly (Dekker), elementwise."""
    p = a * b
    ca = _SPLITTER * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLITTER * b
    bh = cb - (cb - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _exp_minus_ik2t(k, t):
    """exp(-i k^2 t), which equals exp(-z^2) for z = -exp(i pi/4) k sqrt(t).

    The phase Re(k^2) t reaches 1e6 and beyond, where one rounding already
    shifts it by 1e-10, so it is carried in double-double.
    """
    k = np.asarray(k, dtype=complex)
    kr, ki = k.real, k.imag
    growth = 2.0 * kr * ki * t
    if np.any(growth > _EXP_LIMIT):
        raise FaddeevaOverflow(f"exp(-z^2) overflows (Re(-z^2) = {np.max(growth):.1f})")
    p1, e1 = _two_prod(kr, kr)
    p2, e2 = _two_prod(ki, ki)
    s, e3 = _two_sum(p1, -p2)
    q, e4 = _two_prod(s, t)
    lo = e4 + (e1 - e2 + e3) * t
    return np.exp(growth) * np.exp(-1j * q) * np.exp(-1j * lo)


def faddeeva_w(z):
    """w(z) = exp(-z^2) erfc(-iz).

    The upper half plane is evaluated directly; the lower half plane goes
    through w(z) = 2 exp(-z^2) - w(-z).
    """
    z = np.asarray(z, dtype=complex)
    lower = z.imag < 0
    out = np.empty_like(z)
    out[~lower] = wofz(z[~lower])
    if np.any(lower):
        zl = z[lower]
        out[lower] = 2.0 * _exp_minus_square(zl) - wofz(-zl)
    return complex(out) if out.ndim == 0 else out


def faddeeva_continued_fraction(z, depth: int = 400):
    """Laplace continued fraction for w(z), Im z > 0, evaluated bottom-up.

    w(z) = (i / sqrt(pi)) / (z - (1/2) / (z - 1 / (z - (3/2) / (z - ...))))

    Accurate for |z| of a few units and beyond; kept as an independent
    evaluation path for checks.
    """
    z = np.asarray(z, dtype=complex)
    tail = np.zeros_like(z)
    for n in range(depth, 0, -1):
        tail = (0.5 * n) / (z - tail)
    out = 1j / (SQRT_PI * (z - tail))
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MoshinskyEval:
    k: complex
    t: float
    value: complex
    branch_used: str  # "direct" or "reflected"


def _argument(k, t):
    return -_ROT * np.asarray(k, dtype=complex) * np.sqrt(t)


def moshinsky_M(k: complex, t: float) -> MoshinskyEval:
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    if t == 0:
        return MoshinskyEval(complex(k), 0.0, 0.5 + 0j, "direct")
    z = complex(_argument(k, t))
    if z.imag >= 0:
        return MoshinskyEval(complex(k), float(t), 0.5 * complex(wofz(z)), "direct")
    value = complex(_exp_minus_ik2t(k, t)) - 0.5 * complex(wofz(-z))
    return MoshinskyEval(complex(k), float(t), value, "reflected")


def _asymptotic_tail(zeta):
    """(i / (sqrt(pi) zeta)) * sum_{m>=1} (2m-1)!! / (2 zeta^2)^m for large |zeta|."""
    inv = 1.0 / (2.0 * zeta * zeta)
    term = np.ones_like(zeta)
    acc = np.zeros_like(zeta)
    for m in range(1, 40):
        term = term * (2 * m - 1) * inv
        acc = acc + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(acc)):
            break
    return 1j / (SQRT_PI * zeta) * acc


def moshinsky_split(k, t: float, subtract_leading: bool = False):
    """Vectorized M(k, t) = exponential part + power part.

    The exponential part is exp(-i k^2 t) for Re k > 0 and zero otherwise.
    With ``subtract_leading`` the power part has A / (k sqrt t) removed,
    computed from the asymptotic series when |z| is large so the
    cancellation never happens in floating point.
    """
    k = np.asarray(k, dtype=complex)
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    if t == 0:
        if subtract_leading:
            raise RegimeViolation("the leading power term is singular at t = 0")
        return np.zeros_like(k), np.full_like(k, 0.5)
    z = _argument(k, t)
    reflected = z.imag < 0
    zeta = np.where(reflected, -z, z)
    sign = np.where(reflected, -1.0, 1.0)
    forward = k.real > 0
    exp_part = np.zeros_like(k)
    if np.any(forward):
        exp_part[forward] = _exp_minus_ik2t(k[forward], t)
    half_w = 0.5 * wofz(zeta)
    # M itself: reflected branch carries exp(-z^2) explicitly
    M_refl_extra = np.zeros_like(k)
    odd = reflected & ~forward
    if np.any(odd):
        M_refl_extra[odd] = _exp_minus_ik2t(k[odd], t)
    power = sign * half_w + M_refl_extra
    lost = forward & ~reflected
    if np.any(lost):
        # a forward pole on the direct branch: M has no explicit exponential
        power[lost] = power[lost] - exp_part[lost]
    if not subtract_leading:
        return exp_part, power
    leading = A_CONST / (k * np.sqrt(t))
    big = (np.abs(zeta) >= _ASYMPTOTIC_SWITCH) & ~(odd | lost)
    sub = power - leading
    if np.any(big):
        sub[big] = sign[big] * 0.5 * _asymptotic_tail(zeta[big])
    return exp_part, sub


def moshinsky_values(k, t: float):
    """Vectorized M(k, t)."""
    e, p = moshinsky_split(k, t)
    return e + p


@dataclass(frozen=True)
class AsymptoticSplit:
    exponential_part: complex
    power_part: complex


def asymptotic_M(k: complex, t: float, order: int = 2) -> AsymptoticSplit:
    """Large-t form: exp(-i k^2 t) [Re k > 0 only] + A/(k t^1/2) + B/(k^3 t^3/2)."""
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    if t <= 0 or abs(k) ** 2 * t < 4:
        raise RegimeViolation(f"|k|^2 t = {abs(k) ** 2 * t:.3g} < 4 is outside the asymptotic regime")
    k = complex(k)
    exp_part = complex(np.exp(-1j * k * k * t)) if k.real > 0 else 0j
    power = 0j
    if order >= 1:
        power += A_CONST / (k * np.sqrt(t))
    if order >= 2:
        power += B_CONST / (k ** 3 * t ** 1.5)
    return AsymptoticSplit(exp_part, complex(power))
