import numpy as np
import pytest

from frontlab import models
from frontlab.errors import ConfigError


def test_kpp_derivatives():
    f = models.kpp_nonlinearity()
    assert f.f(0.0) == 0.0
    assert f.f(1.0) == 0.0
    assert f.fp0 == 1.0
    assert f.fp1 == -1.0
    w = np.linspace(-0.05, 1.05, 23)
    assert np.allclose(f.fp(w), 1 - 2 * w)
    assert np.allclose(f.fpp(w), -2.0)


def test_hadeler_rothe_positive_on_grid():
    f = models.hadeler_rothe(4.0)
    assert f.fp0 == 1.0
    w = np.linspace(0.0, 1.0, 1002)[1:-1]
    assert np.all(f.f(w) > 0.0)
    # derivative consistency by central differences
    eps = 1e-6
    wc = np.linspace(0.05, 0.95, 7)
    fd = (f.f(wc + eps) - f.f(wc - eps)) / (2 * eps)
    assert np.allclose(fd, f.fp(wc), atol=1e-8)


def test_tabulated_matches_kpp():
    w = np.linspace(0.0, 1.0, 41)
    f = models.tabulated_nonlinearity(w, w * (1 - w))
    wc = np.linspace(0.0, 1.0, 101)
    assert np.max(np.abs(f.f(wc) - wc * (1 - wc))) < 1e-10
    assert abs(f.fp0 - 1.0) < 1e-6


@pytest.mark.parametrize("name", models.PRESET_NAMES)
def test_presets_validate(name):
    spec = models.preset(name)
    report = models.validate(spec)
    assert report.passed, report.failures()


def test_kernel_mass_and_symmetry():
    for k in (models.uniform_kernel(1.0), models.cosine_kernel(1.0),
              models.triangular_kernel(2.0)):
        assert abs(k.mass() - 1.0) < 1e-10
        x = np.linspace(0, k.half_width, 513)
        assert np.max(np.abs(k.density(x) - k.density(-x))) < 1e-12


def test_kernel_grid_weights_unit_sum():
    k = models.uniform_kernel(1.0)
    for h in (0.1, 0.05, 0.04):
        wt = k.grid_weights(h)
        assert abs(wt.sum() - 1.0) < 1e-14
        assert np.all(wt >= 0.0)


def test_lv_equilibrium_residual_weak():
    lv = models.LVParams(d=1.0, r=1.0, a=0.5, b=0.5)
    us, vs = lv.u_star, lv.v_star
    assert abs(us * (1 - us - lv.a * vs)) < 1e-12
    assert abs(lv.r * vs * (1 - vs - lv.b * us)) < 1e-12
    assert lv.u_star == pytest.approx(2.0 / 3.0)


def test_lv_equilibrium_strong():
    lv = models.LVParams(d=1.0, r=1.0, a=0.5, b=2.0)
    assert (lv.u_star, lv.v_star) == (1.0, 0.0)


def test_validate_reports_bad_a():
    spec = models.ModelSpec(family="lv", lv=models.LVParams(d=1, r=1, a=1.2, b=1))
    report = models.validate(spec)
    assert not report.passed
    names = [c.name for c in report.failures()]
    assert "0<a<1" in names
    detail = [c.detail for c in report.failures() if c.name == "0<a<1"][0]
    assert "out of (0,1)" in detail


def test_validate_rejects_wrong_fields():
    spec = models.ModelSpec(family="local", nonlinearity=models.kpp_nonlinearity(),
                            lv=models.LVParams(d=1, r=1, a=0.5, b=1))
    report = models.validate(spec)
    assert not report.passed


def test_unknown_preset():
    with pytest.raises(ConfigError):
        models.preset("nope")


def test_lv_critical_preset_equilibrium():
    spec = models.preset("lv-critical")
    assert spec.lv.b == 1.0
    assert (spec.lv.u_star, spec.lv.v_star) == (1.0, 0.0)
