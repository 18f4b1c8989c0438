import cmath

import mpmath
import numpy as np
import pytest

from gamow_decay import poles as pl
from gamow_decay.errors import (
    BoundaryTooCloseToZero,
    ConvergedToTrivialRoot,
    DuplicatePole,
    MissedPole,
    NoConvergence,
    NonIntegerWinding,
)
from gamow_decay.poles import (
    PoleWindow,
    count_poles_argument_principle,
    covering_window,
    extend_symmetric,
    find_poles,
    initial_guess,
    newton_polish,
    pole_equation_derivative,
    pole_equation_residual,
    pole_tiles,
    winding_number_raw,
)
from gamow_decay.shell_model import make_model


@pytest.fixture(scope="module")
def poles50(model):
    return find_poles(model, 50)


def mp_pole(lam, R, k0):
    mpmath.mp.dps = 40
    F = lambda k: 2j * k - lam * (1 - mpmath.exp(2j * k * R))
    k = mpmath.findroot(F, mpmath.mpc(k0))
    return complex(k)


def test_trivial_root(model):
    assert pole_equation_residual(model, 0.0) == 0


def test_conjugate_symmetry_of_F(model, rng):
    k = rng.normal(size=20) * 5 + 1j * rng.normal(size=20)
    lhs = pole_equation_residual(model, -np.conj(k))
    # F(-conj k) = conj F(k), so zeros come in mirror pairs
    assert np.allclose(lhs, np.conj(pole_equation_residual(model, k)), rtol=1e-13, atol=1e-13)


def test_derivative_matches_finite_difference(model):
    k = 2.1 - 0.4j
    h = 1e-6
    fd = (pole_equation_residual(model, k + h) - pole_equation_residual(model, k - h)) / (2 * h)
    assert abs(fd - pole_equation_derivative(model, k)) < 1e-8


def test_strong_shell_limit_of_equation():
    # near k = n pi / R the equation stays bounded while lambda grows; poles approach the box
    for lam in (1e3, 1e4):
        m = make_model(lam, 1.0)
        k = find_poles(m, 2)
        for n, p in enumerate(k, start=1):
            approx = n * np.pi * (1 - 1 / lam)
            assert abs(p.k.real - approx) < 10 * n * np.pi / lam ** 2 + 1e-12


def test_very_strong_shell_hits_roundoff_floor():
    # |F| cannot drop below ~lambda * eps, above the residual bound for lambda = 1e5
    with pytest.raises(NoConvergence):
        find_poles(make_model(1e5, 1.0), 2)


def test_initial_guess_formula(model):
    g = initial_guess(model, 1)
    assert g == pytest.approx(complex(np.pi, -0.5 * np.log(1 + np.pi / 3)), rel=1e-15)


def test_initial_guess_strong_shell():
    g = initial_guess(make_model(1e4, 1.0), 1)
    assert g.real == pytest.approx(np.pi)
    assert g.imag == pytest.approx(-0.5 * np.log1p(2 * np.pi / 1e4), rel=1e-14)
    assert -4e-4 < g.imag < -3e-4


def test_initial_guess_rejects_nonpositive(model):
    with pytest.raises(ValueError):
        initial_guess(model, 0)


def test_newton_far_index_iterations(model):
    p = newton_polish(model, initial_guess(model, 50), index_n=50)
    assert p.iterations <= 8
    assert p.residual < 1e-12


def test_newton_first_pole_bracket(model):
    p = newton_polish(model, initial_guess(model, 1))
    assert 2.7 < p.k.real < np.pi and -0.5 < p.k.imag < 0
    assert p.residual < 1e-12
    window = PoleWindow(2.7, np.pi, -0.5, -1e-6)
    assert count_poles_argument_principle(model, window) == 1


def test_newton_fixed_point(model):
    p = newton_polish(model, initial_guess(model, 3))
    again = newton_polish(model, p.k)
    assert again.iterations <= 1
    assert abs(again.k - p.k) < 1e-14


def test_newton_far_start_is_flagged(model):
    # ends at the trivial root, which is refused
    with pytest.raises((NoConvergence, ConvergedToTrivialRoot)):
        newton_polish(model, 100 + 100j)


def test_newton_budget(model):
    with pytest.raises(NoConvergence):
        newton_polish(model, 40 - 3j, max_iter=1)


def test_poles_against_mpmath(model, poles50):
    for n in (1, 2, 10, 50):
        ref = mp_pole(6, 1, poles50[n - 1].k)
        assert abs(poles50[n - 1].k - ref) <= 4e-15 * abs(ref)


def test_poles_ordered_and_fourth_quadrant(poles50):
    re = np.array([p.k.real for p in poles50])
    im = np.array([p.k.imag for p in poles50])
    assert np.all(np.diff(re) > 0)
    assert np.all(im < 0) and np.all(np.diff(im) < 0)
    # |Im k_n| grows like (1/2R) ln(1 + 2 n pi / lambda R) once n is large
    guess = 0.5 * np.log1p(2 * np.arange(1, 51) * np.pi / 6)
    assert np.allclose(-im[9:], guess[9:], rtol=0.1)


def test_residuals_reproducible(model, poles50):
    for p in poles50:
        assert p.residual < 1e-12
        again = abs(pl._F(model, p.k)) / max(1.0, abs(2 * p.k))
        assert again == p.residual


def test_first_ten_poles_in_reference_tiles(model):
    ps = find_poles(model, 10)
    for n, p in enumerate(ps, start=1):
        tile = PoleWindow(n * np.pi - np.pi / 2, n * np.pi + np.pi / 2, -2.0, -1e-9)
        assert tile.contains(p.k)
        assert count_poles_argument_principle(model, tile) == 1


def test_strong_shell_poles_near_box():
    ps = find_poles(make_model(1e4, 1.0), 3)
    for n, p in enumerate(ps, start=1):
        assert abs(p.k.real - n * np.pi) < 1e-3


def test_find_poles_rejects_zero(model):
    with pytest.raises(ValueError):
        find_poles(model, 0)


@pytest.mark.parametrize("N", [5, 10, 25, 50])
def test_count_consistency(model, N):
    ps = find_poles(model, N, check_tiles=False)
    assert count_poles_argument_principle(model, covering_window(model, ps)) == N


def test_tiles_hold_one_pole_each(model, poles50):
    tiles = pole_tiles(model, poles50)
    assert all(t.contains(p.k) for t, p in zip(tiles, poles50))


def test_argument_principle_examples(model):
    assert count_poles_argument_principle(model, PoleWindow(0.5, 2.0, -1.0, -0.1)) == 0
    assert count_poles_argument_principle(model, PoleWindow(2.5, 3.3, -1.0, -1e-6)) == 1
    five = find_poles(model, 5)
    assert count_poles_argument_principle(model, covering_window(model, five)) == 5


def test_argument_principle_boundary_on_zero(model):
    p = find_poles(model, 1)[0]
    window = PoleWindow(p.k.real, 3.5, p.k.imag, 0.5)
    with pytest.raises(BoundaryTooCloseToZero):
        count_poles_argument_principle(model, window)


def test_non_integer_winding_is_reported(model, monkeypatch):
    monkeypatch.setattr(pl, "winding_number_raw", lambda m, w: (1.3 + 0j, 1.0))
    with pytest.raises(NonIntegerWinding):
        count_poles_argument_principle(model, PoleWindow(0, 1, -1, 1))


def test_winding_raw_close_to_integer(model):
    raw, mn = winding_number_raw(model, PoleWindow(2.5, 3.3, -1.0, -1e-6))
    assert abs(raw - 1) < 1e-6 and mn > 1e-8


def test_duplicate_detection(model, monkeypatch):
    monkeypatch.setattr(pl, "initial_guess", lambda m, n: complex(np.pi, -0.3))
    with pytest.raises(DuplicatePole):
        find_poles(model, 3)


def test_missed_pole_detection(model, monkeypatch):
    real = pl.initial_guess
    # skip the second pole: guesses aim at n = 1, 3, 4
    monkeypatch.setattr(pl, "initial_guess", lambda m, n: real(m, n + (n >= 2)))
    with pytest.raises(MissedPole):
        find_poles(model, 3)


def test_extend_symmetric(poles50):
    ext = extend_symmetric(poles50)
    assert [p.index_n for p in ext] == list(range(-50, 0)) + list(range(1, 51))
    for p in poles50:
        mirror = ext[50 - p.index_n]
        assert mirror.index_n == -p.index_n
        assert mirror.k + np.conj(p.k) == 0
        assert mirror.k == complex(-p.k.real, p.k.imag)


def test_mirror_residual(model, poles50):
    for p in extend_symmetric(poles50)[:50]:
        res = abs(pl._F(model, p.k)) / max(1.0, abs(2 * p.k))
        assert res <= poles50[-p.index_n - 1].residual + 1e-15


def test_extend_idempotent_on_positive_half(poles50):
    once = extend_symmetric(poles50)
    twice = extend_symmetric(once)
    assert twice == once
    assert [p for p in once if p.index_n > 0] == poles50


def test_pole_integrity_runtime(model):
    import time
    t0 = time.perf_counter()
    find_poles(model, 50)
    assert time.perf_counter() - t0 < 1.0
