import numpy as np
import pytest

from frontlab import models, spectral, waves
from frontlab.errors import ConvergenceError, MathDomainError

HR_SPEED = np.sqrt(2.0) + 1.0 / np.sqrt(2.0)


def hr_exact(xi):
    return 1.0 / (1.0 + np.exp(np.clip(np.sqrt(2.0) * xi, -500, 500)))


def test_hr_exact_ansatz_is_a_solution():
    # closed-form front: W' = -sqrt(2) W (1-W) solves the equation identically
    f = models.hadeler_rothe(4.0)
    xi = np.linspace(-20, 20, 401)
    W = hr_exact(xi)
    Wp = -np.sqrt(2) * W * (1 - W)
    Wpp = 2.0 * W * (1 - W) * (1 - 2 * W)
    res = Wpp + HR_SPEED * Wp + f.f(W)
    assert np.max(np.abs(res)) < 1e-12


def test_solve_wave_kpp_minimal():
    spec = models.preset("kpp")
    p = waves.solve_wave(spec, 2.0)
    assert p.residual < 1e-10
    assert np.max(np.diff(p.W)) <= waves.MONO_TOL
    assert waves.discrete_residual(spec, 2.0, p.grid, p.values) < 1e-10
    # phase gauge: crossing of 1/2 at xi = 0
    i0 = np.argmin(np.abs(p.grid.xi))
    assert abs(p.W[i0] - 0.5) < 1e-6


def test_solve_wave_hr_matches_exact_profile():
    spec = models.preset("hr-nu4")
    grid = waves.Grid(-24.0, 44.0, 13601)  # h = 0.005
    p = waves.solve_wave(spec, HR_SPEED, grid=grid)
    mask = np.abs(grid.xi) <= 20.0
    err = np.max(np.abs(p.W[mask] - hr_exact(grid.xi[mask])))
    assert err < 1e-6


def test_no_wave_below_linear_speed_kpp():
    spec = models.preset("kpp")
    with pytest.raises(ConvergenceError):
        waves.solve_wave(spec, 1.5, grid=waves.Grid(-40, 40, 1601))


def test_no_wave_between_linear_and_pushed_speed():
    spec = models.preset("hr-nu4")
    with pytest.raises(ConvergenceError):
        waves.solve_wave(spec, 2.05)


def test_min_speed_kpp():
    ms = waves.min_speed(models.preset("kpp"))
    assert ms.c_star == pytest.approx(2.0, abs=0.01)
    assert ms.selection == "linear"


def test_min_speed_hr_pushed():
    ms = waves.min_speed(models.preset("hr-nu4"))
    assert ms.c_star == pytest.approx(HR_SPEED, abs=0.01)
    assert ms.selection == "nonlinear"


def test_min_speed_nonlocal_matches_dispersion_minimum():
    spec = models.preset("nonlocal-kpp-uniform")
    c0, _ = spectral.linear_speed_nonlocal(spec.kernel, 1.0)
    ms = waves.min_speed(spec)
    assert ms.c_star == pytest.approx(c0, abs=0.01)
    assert ms.selection == "linear"


def test_lv_boundary_targets_by_regime():
    strong = waves.solve_wave(models.preset("lv-strongweak"), 1.8)
    assert tuple(strong.left_target) == (1.0, 0.0)
    weak = waves.solve_wave(models.preset("lv-weak"), 1.8)
    assert weak.left_target[0] == pytest.approx(2.0 / 3.0)
    assert weak.left_target[1] == pytest.approx(2.0 / 3.0)
    for p in (strong, weak):
        assert np.max(np.diff(p.U)) <= waves.MONO_TOL
        assert np.min(np.diff(p.V)) >= -waves.MONO_TOL
        assert p.residual < 1e-10


def test_translation_gauge():
    # re-solving from a shifted guess gives the same normalized profile
    spec = models.preset("kpp")
    grid = waves.default_grid(spec, 2.2)
    p1 = waves.solve_wave(spec, 2.2, grid=grid, tol=1e-6)
    guess = waves._two_sided_guess(spec, grid, 0.6, 0.4, shift=3.7)
    p2 = waves.solve_wave(spec, 2.2, grid=grid, tol=1e-6, guess=guess)
    assert np.max(np.abs(p1.W - p2.W)) < 1e-5


def test_grid_refinement_order():
    # halving the spacing: phase-normalized profiles converge at order >= 1.8
    spec = models.preset("kpp")
    c = 2.0
    profiles = []
    for h in (0.2, 0.1, 0.05):
        nl = int(round(60 / h))
        nr = int(round(40 / h))
        grid = waves.Grid(-nl * h, nr * h, nl + nr + 1)
        profiles.append(waves.solve_wave(spec, c, grid=grid))
    x = np.linspace(-20, 20, 801)
    f0 = profiles[0].eval(x)
    f1 = profiles[1].eval(x)
    f2 = profiles[2].eval(x)
    d1 = np.max(np.abs(f1 - f0))
    d2 = np.max(np.abs(f2 - f1))
    order = np.log2(d1 / d2)
    assert order >= 1.8


def test_continuation_family():
    spec = models.preset("kpp")
    fam = waves.continuation_family(spec, [2.0, 2.2, 2.5])
    assert len(fam) == 3
    for p in fam:
        assert np.max(np.diff(p.W)) <= waves.MONO_TOL
        assert p.residual < 1e-10
    assert waves.continuation_family(spec, []) == []
    with pytest.raises(MathDomainError):
        waves.continuation_family(spec, [2.5, 2.0])


def test_semiwave_basic():
    spec = models.preset("nonlocal-kpp-uniform")
    c0, _ = spectral.linear_speed_nonlocal(spec.kernel, 1.0)
    sw = waves.solve_semiwave(spec.kernel, spec.nonlinearity, 0.5 * c0)
    assert sw.residual < 1e-10
    assert sw.phi[0] > 0.99
    assert abs(sw.phi[-1]) < 1e-12
    assert np.max(np.diff(sw.phi)) <= waves.MONO_TOL
    assert np.isfinite(sw.mu) and sw.mu > 0


def test_semiwave_low_speed_limit():
    # the profile approaches a stationary limit as c -> 0+ (up to the
    # boundary layer the advection term leaves at the free end)
    spec = models.preset("nonlocal-kpp-uniform")
    k, f = spec.kernel, spec.nonlinearity
    grid = waves.Grid(-60.0, 0.0, 1201)
    sw1 = waves.solve_semiwave(k, f, 1e-3, grid=grid)
    sw2 = waves.solve_semiwave(k, f, 2e-3, grid=grid)
    sw3 = waves.solve_semiwave(k, f, 0.05, grid=grid)
    d12 = np.max(np.abs(sw1.phi - sw2.phi))
    d13 = np.max(np.abs(sw1.phi - sw3.phi))
    assert d12 < 2e-2
    assert d12 < 0.2 * d13


def test_semiwave_fails_above_minimal_speed():
    spec = models.preset("nonlocal-kpp-uniform")
    c0, _ = spectral.linear_speed_nonlocal(spec.kernel, 1.0)
    with pytest.raises(ConvergenceError):
        waves.solve_semiwave(spec.kernel, spec.nonlinearity, 1.1 * c0)
