"""Crank-Nicolson reference propagator on a truncated half line.

Second-order finite differences on nodes r_j = j h, Dirichlet at both ends,
the shell as lambda / h on the node r = R, and a quartic complex absorbing
potential (CAP) -i W(r) over the last ``cap_width`` of the box. Each step
solves the Cayley form

    (1 + i dt H / 2) psi_new = (1 - i dt H / 2) psi_old

with a sparse LU factorization of the tridiagonal left-hand side. Without
the CAP, H is Hermitian and the update is unitary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import splu

from .errors import InvalidGrid, ReflectionDetected, StabilityBudgetExceeded
from .shell_model import InitialState, ShellModel


@dataclass(frozen=True)
class Grid1D:
    L: float = 30.0
    h: float = 2e-3
    dt: float = 1e-3
    cap_width: float = 20.0
    cap_strength: float = 60.0

    def nodes(self) -> np.ndarray:
        return np.arange(self.n_nodes) * self.h

    @property
    def n_nodes(self) -> int:
        return int(round(self.L / self.h)) + 1

    def validate(self, model: ShellModel):
        R = model.R
        ratio = R / self.h
        if self.h <= 0 or self.dt <= 0:
            raise InvalidGrid("h and dt must be positive")
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise InvalidGrid(f"R / h = {ratio} must be an integer so the shell sits on a node")
        if self.L < 10 * R:
            raise InvalidGrid(f"L = {self.L} must be at least 10 R")
        if self.cap_width < 2 * R or self.cap_width >= self.L - R:
            raise InvalidGrid(f"cap width {self.cap_width} must be >= 2R and leave [0, R] free")
        if self.dt > self.h:
            raise StabilityBudgetExceeded(f"dt = {self.dt} exceeds h = {self.h}")

    def cap(self, r) -> np.ndarray:
        start = self.L - self.cap_width
        x = np.clip((np.asarray(r) - start) / self.cap_width, 0.0, None)
        return self.cap_strength * x ** 4


@dataclass(frozen=True)
class WaveField:
    grid: Grid1D
    values: np.ndarray = field(repr=False)
    time: float = 0.0


def hamiltonian(model: ShellModel, grid: Grid1D, with_cap: bool = True):
    """Tridiagonal H on the interior nodes 1..n-2 as (sub, diag, super)."""
    grid.validate(model)
    n = grid.n_nodes - 2
    h = grid.h
    r = grid.nodes()[1:-1]
    diag = np.full(n, 2.0 / h ** 2, dtype=complex)
    j_shell = int(round(model.R / h)) - 1
    diag[j_shell] += model.lambda_ / h
    if with_cap:
        diag -= 1j * grid.cap(r)
    off = np.full(n - 1, -1.0 / h ** 2, dtype=complex)
    return off, diag, off


def _cayley(model, grid, with_cap, dt):
    sub, diag, sup = hamiltonian(model, grid, with_cap)
    half = 0.5j * dt
    lhs = sparse.diags([half * sub, 1.0 + half * diag, half * sup], [-1, 0, 1], format="csc")
    rhs = sparse.diags([-half * sub, 1.0 - half * diag, -half * sup], [-1, 0, 1], format="csr")
    return splu(lhs), rhs


def propagate_cn(model: ShellModel, psi0: InitialState, grid: Grid1D, sample_times,
                 with_cap: bool = True, reflection_threshold: float = 1e-6,
                 initial=None) -> list[WaveField]:
    """Fields at exactly the requested times.

    Each interval between samples is split into the fewest equal steps no
    longer than ``grid.dt``; a new factorization is made whenever the
    effective step changes.

    The trailing 5% of the box is watched: if the probability there ever
    exceeds ``reflection_threshold`` the CAP has failed and
    ReflectionDetected is raised.
    """
    grid.validate(model)
    times = np.asarray(sample_times, dtype=float)
    if np.any(np.diff(times) < 0) or (times.size and times[0] < 0):
        raise InvalidGrid("sample times must be nonnegative and increasing")
    r = grid.nodes()
    psi = np.asarray(psi0(r), dtype=complex) if initial is None else np.array(initial, dtype=complex)
    psi[0] = psi[-1] = 0.0
    tail = slice(int(0.95 * grid.n_nodes), grid.n_nodes - 1)
    inner = psi[1:-1].copy()
    out = []
    now = 0.0
    factored = {}
    for t in times:
        span = t - now
        if span > 0:
            nsteps = int(np.ceil(span / grid.dt - 1e-9))
            step = span / nsteps
            key = round(step / grid.dt, 12)
            if key not in factored:
                factored.clear()
                factored[key] = _cayley(model, grid, with_cap, step)
            lu, rhs = factored[key]
            for _ in range(nsteps):
                inner = lu.solve(rhs @ inner)
            now = float(t)
        full = np.zeros(grid.n_nodes, dtype=complex)
        full[1:-1] = inner
        if with_cap and grid.h * np.sum(np.abs(full[tail]) ** 2) > reflection_threshold:
            raise ReflectionDetected(f"probability {grid.h * np.sum(np.abs(full[tail]) ** 2):.3e} "
                                     f"reached the far edge by t = {now}")
        out.append(WaveField(grid, full, now))
    return out


def _trapezoid(values, h):
    return h * (np.sum(values) - 0.5 * (values[0] + values[-1]))


def oracle_probabilities(fields: list[WaveField], R: float, psi0: InitialState):
    """(S, P) arrays from trapezoid sums over the nodes in [0, R]."""
    S = np.empty(len(fields))
    P = np.empty(len(fields))
    for i, f in enumerate(fields):
        h = f.grid.h
        jR = int(round(R / h))
        r = f.grid.nodes()[: jR + 1]
        seg = f.values[: jR + 1]
        P[i] = _trapezoid(np.abs(seg) ** 2, h)
        S[i] = abs(_trapezoid(psi0(r) * seg, h)) ** 2
    return S, P


def total_norm(field: WaveField) -> float:
    return float(_trapezoid(np.abs(field.values) ** 2, field.grid.h))
