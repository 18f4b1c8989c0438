"""The s-wave delta-shell system and initial states confined to [0, R].

Units are hbar = 2m = 1, so a plane wave of momentum k has energy k**2.
The potential is ``lambda_ * delta(r - R)`` on the half line with a
Dirichlet node at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidMode, NonPositiveRadius, NonPositiveStrength, OutOfRange

DEFAULT_LAMBDA = 6.0
DEFAULT_RADIUS = 1.0


@dataclass(frozen=True)
class ShellModel:
    lambda_: float = DEFAULT_LAMBDA
    radius_R: float = DEFAULT_RADIUS

    def __post_init__(self):
        if not np.isfinite(self.lambda_) or self.lambda_ <= 0:
            raise NonPositiveStrength(f"lambda must be > 0, got {self.lambda_!r}")
        if not np.isfinite(self.radius_R) or self.radius_R <= 0:
            raise NonPositiveRadius(f"radius_R must be > 0, got {self.radius_R!r}")

    @property
    def R(self) -> float:
        return self.radius_R


def make_model(lambda_: float = DEFAULT_LAMBDA, radius_R: float = DEFAULT_RADIUS) -> ShellModel:
    """Validated constructor; attractive and free shells are rejected."""
    return ShellModel(float(lambda_), float(radius_R))


@dataclass(frozen=True)
class InitialState:
    """A real wave function at t = 0, supported on [0, R]."""

    mode_index: int
    radius_R: float
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    norm: float = 1.0

    def __call__(self, r):
        return self.eval(r)


def initial_state_box_mode(model: ShellModel, m: int = 1) -> InitialState:
    """Normalized box eigenmode ``sqrt(2/R) sin(m pi r / R)``, zero outside [0, R]."""
    if int(m) != m or m < 1:
        raise InvalidMode(f"mode index must be a positive integer, got {m!r}")
    m = int(m)
    R = model.R
    amp = np.sqrt(2.0 / R)
    kb = m * np.pi / R

    def psi0(r):
        r = np.asarray(r, dtype=float)
        inside = (r >= 0.0) & (r <= R)
        out = np.where(inside, amp * np.sin(kb * r), 0.0)
        # sin(m*pi) is ~1e-16 in floating point; pin the boundary node exactly.
        return np.where(r == R, 0.0, out)

    return InitialState(mode_index=m, radius_R=R, eval=psi0, norm=1.0)


def eval_u_inner(state, r):
    """Interior resonant wave function ``A_n sin(k_n r)`` for 0 <= r <= R.

    ``state`` is a :class:`~gamow_decay.basis.ResonantState`. ``r`` may be
    a scalar or an array; the result has the same shape.
    """
    r_arr = np.asarray(r, dtype=float)
    R = state.model.R
    if np.any(r_arr < 0.0) or np.any(r_arr > R):
        raise OutOfRange(f"r must lie in [0, {R}]")
    value = state.amplitude * np.sin(state.pole.k * r_arr)
    return complex(value) if value.ndim == 0 else value
