import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from frontlab import models, spectral
from frontlab.errors import ComplexRoots, NoRealRoots


def test_local_roots_double():
    pair = spectral.local_roots(1.0, 2.0)
    assert pair.is_double
    assert pair.lam_minus == pytest.approx(1.0, abs=1e-12)


def test_local_roots_simple():
    pair = spectral.local_roots(1.0, 2.5)
    assert (pair.lam_minus, pair.lam_plus) == (pytest.approx(0.5), pytest.approx(2.0))
    assert pair.multiplicity == 1


def test_local_roots_complex():
    with pytest.raises(ComplexRoots):
        spectral.local_roots(1.0, 1.0)


@settings(max_examples=60, deadline=None)
@given(fp0=st.floats(0.1, 5.0), extra=st.floats(1e-6, 3.0))
def test_local_roots_residual_property(fp0, extra):
    c = 2 * np.sqrt(fp0) + extra
    pair = spectral.local_roots(fp0, c)
    for lam in (pair.lam_minus, pair.lam_plus):
        assert abs(lam * lam - c * lam + fp0) < 1e-10
    assert 0 < pair.lam_minus < pair.lam_plus


def test_kernel_laplace_uniform_closed_form():
    k = models.uniform_kernel(1.0)
    assert spectral.kernel_laplace(k, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert spectral.kernel_laplace(k, 1.0) == pytest.approx(np.sinh(1.0), abs=1e-12)
    assert spectral.kernel_laplace(k, -1.0) == pytest.approx(
        spectral.kernel_laplace(k, 1.0), abs=1e-13)


def test_linear_speed_uniform_oracle():
    # independent oracle: lam0 solves tanh(lam) = lam/2, c0 = sinh(lam0)/lam0^2
    k = models.uniform_kernel(1.0)
    lam_oracle = brentq(lambda l: np.tanh(l) - 0.5 * l, 1.0, 3.0, xtol=1e-15)
    c_oracle = np.sinh(lam_oracle) / lam_oracle**2
    c0, lam0 = spectral.linear_speed_nonlocal(k, 1.0)
    assert c0 == pytest.approx(c_oracle, abs=1e-10)
    assert lam0 == pytest.approx(lam_oracle, abs=1e-10)
    # golden-section cross-check of the minimization itself
    lams = np.linspace(0.5, 4.0, 20001)
    assert c0 <= np.min(np.sinh(lams) / lams**2) + 1e-9


def test_linear_speed_below_any_evaluation():
    k = models.cosine_kernel(1.0)
    c0, _ = spectral.linear_speed_nonlocal(k, 1.0)
    h1 = spectral.kernel_laplace(k, 1.0) + 1.0 - 1.0
    assert c0 < h1 / 1.0 + 1e-12


def test_linear_speed_dilation_monotone():
    c0_1, _ = spectral.linear_speed_nonlocal(models.uniform_kernel(1.0), 1.0)
    c0_2, _ = spectral.linear_speed_nonlocal(models.uniform_kernel(2.0), 1.0)
    assert c0_2 > c0_1
    assert c0_2 == pytest.approx(2 * c0_1, rel=1e-10)


def test_nonlocal_roots_double_and_split():
    k = models.uniform_kernel(1.0)
    c0, lam0 = spectral.linear_speed_nonlocal(k, 1.0)
    pair = spectral.nonlocal_roots(k, 1.0, c0)
    assert pair.is_double
    assert pair.lam_minus == pytest.approx(lam0, abs=1e-10)
    pair = spectral.nonlocal_roots(k, 1.0, 1.2)
    assert pair.lam_minus < lam0 < pair.lam_plus
    assert pair.residual < 1e-10
    with pytest.raises(NoRealRoots):
        spectral.nonlocal_roots(k, 1.0, 0.5)


def test_nonlocal_left_root_oracle():
    # closed form for the uniform kernel: sinh(mu)/mu + mu - 2 = 0 at c = 1
    k = models.uniform_kernel(1.0)
    mu_oracle = brentq(lambda m: np.sinh(m) / m + m - 2.0, 0.1, 2.0, xtol=1e-15)
    mu = spectral.nonlocal_left_root(k, -1.0, 1.0)
    assert mu == pytest.approx(mu_oracle, abs=1e-10)
    assert mu == pytest.approx(0.87, abs=0.01)


def test_nonlocal_left_root_monotone_in_speed():
    k = models.uniform_kernel(1.0)
    mus = [spectral.nonlocal_left_root(k, -1.0, c) for c in (0.5, 1.0, 2.0, 3.0)]
    assert all(a > b for a, b in zip(mus, mus[1:]))


def test_nonlocal_left_root_zero_speed_limit():
    k = models.uniform_kernel(1.0)
    mu_limit = brentq(lambda m: np.sinh(m) / m - 2.0, 0.5, 4.0, xtol=1e-15)
    mu = spectral.nonlocal_left_root(k, -1.0, 1e-12)
    assert mu == pytest.approx(mu_limit, abs=1e-8)


def test_lv_roots_examples():
    lv = models.LVParams(d=1.0, r=1.0, a=0.75, b=2.0)
    rs = spectral.lv_roots(lv, 1.0)
    assert rs.multiplicity == 2
    assert rs.lambda_minus == pytest.approx(0.5, abs=1e-12)
    rs = spectral.lv_roots(lv, 1.25)
    assert rs.lambda_minus == pytest.approx(0.25, abs=1e-12)
    assert rs.lambda_plus == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ComplexRoots):
        spectral.lv_roots(lv, 0.9)


def test_lv_v_roots_at_zero_speed():
    lv = models.LVParams(d=1.0, r=1.0, a=0.5, b=2.0)
    rs = spectral.lv_roots(lv, lv.linear_speed)
    dv = np.sqrt(lv.linear_speed**2 + 4.0)
    assert rs.lambda_v_plus == pytest.approx((lv.linear_speed + dv) / 2)
    # at c = 0 the pair is symmetric; use the formula directly
    assert (0.0 + np.sqrt(0.0 + 4 * lv.r * lv.d)) / (2 * lv.d) == pytest.approx(1.0)


def test_lv_left_roots_mu_u_at_tiny_speed():
    lv = models.LVParams(d=1.0, r=1.0, a=0.5, b=2.0)
    left = spectral.lv_left_roots(lv, 1e-12)
    assert left.mu_u_plus == pytest.approx(1.0, abs=1e-9)
    assert left.mu_u_minus == pytest.approx(-1.0, abs=1e-9)


def test_lv_left_roots_weak_quartic_oracle():
    # symmetric weak-competition case at vanishing speed: the quartic factors
    # and its smallest positive zero is 1/sqrt(3)
    lv = models.LVParams(d=1.0, r=1.0, a=0.5, b=0.5)
    left = spectral.lv_left_roots(lv, 1e-10)
    assert left.nu == pytest.approx(1.0 / np.sqrt(3.0), abs=1e-6)
    assert left.residual < 1e-10


def test_lv_left_roots_weak_nu_smallest():
    lv = models.LVParams(d=1.2, r=0.8, a=0.4, b=0.6)
    c = 1.7
    left = spectral.lv_left_roots(lv, c)
    lam = np.linspace(1e-4, 10.0, 100001)
    vals = spectral._rho_quartic(lv, c, lam)
    sign_changes = lam[:-1][np.diff(np.sign(vals)) != 0]
    assert left.nu == pytest.approx(sign_changes.min(), abs=1e-3)
    assert abs(spectral._rho_quartic(lv, c, left.nu)) < 1e-10


def test_lv_left_roots_critical_marker():
    lv = models.LVParams(d=1.0, r=1.0, a=0.5, b=1.0)
    left = spectral.lv_left_roots(lv, 1.7)
    assert left.poly_order == -1
    assert left.nu is None


def test_root_residuals_random_draws_fast():
    # acceptance-style residual sweep kept small here; the full 200-draw run
    # lives in the acceptance suite
    rng = np.random.default_rng(42)
    k = models.uniform_kernel(1.0)
    for _ in range(25):
        fp0 = rng.uniform(0.2, 3.0)
        c0, _ = spectral.linear_speed_nonlocal(k, fp0)
        c = c0 * rng.uniform(1.01, 2.0)
        pair = spectral.nonlocal_roots(k, fp0, c)
        for lam in (pair.lam_minus, pair.lam_plus):
            assert abs(k.laplace(lam) + fp0 - 1.0 - c * lam) < 1e-10


def test_lambda_monotonicity_in_speed():
    lv = models.LVParams(d=1.0, r=1.0, a=0.5, b=2.0)
    cs = np.linspace(1.5, 3.0, 7)
    lam_p = [spectral.lv_roots(lv, c).lambda_plus for c in cs]
    mu_p = [spectral.lv_left_roots(lv, c).mu_u_plus for c in cs]
    mu_v = [spectral.lv_left_roots(lv, c).mu_v_plus for c in cs]
    assert all(a < b for a, b in zip(lam_p, lam_p[1:]))
    assert all(a > b for a, b in zip(mu_p, mu_p[1:]))
    assert all(a > b for a, b in zip(mu_v, mu_v[1:]))


def test_double_root_flag_matches_speed_window():
    pair = spectral.local_roots(1.0, 2.0 * (1 + 1e-9))
    assert pair.is_double
    pair = spectral.local_roots(1.0, 2.0 * (1 + 1e-7))
    assert not pair.is_double
    assert pair.lam_plus - pair.lam_minus > 1e-6


def test_root_set_serialization_fields():
    spec = models.preset("lv-strongweak")
    rs = spectral.root_set(spec, 2.2)
    rec = rs.to_record()
    for key in ("lambda_minus", "lambda_plus", "lambda0", "c0_star",
                "lambda_v_plus", "lambda_v_minus", "mu_q_plus", "mu_u_plus",
                "mu_u_minus", "mu_v_plus", "mu_v_minus", "nu"):
        assert key in rec
    assert rec["mu_q_plus"] is None
    assert rec["nu"] is None
    assert rec["mu_v_plus"] is not None


def test_root_set_auto_speed_reports_double():
    spec = models.preset("nonlocal-kpp-uniform")
    rs = spectral.root_set(spec, None)
    assert rs.multiplicity == 2
    assert rs.c == pytest.approx(rs.c0_star)
