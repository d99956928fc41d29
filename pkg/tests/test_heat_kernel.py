import math

import numpy as np
import pytest

from fracheat import heat_kernel as hk
from fracheat import subordinator as sub


def rng(seed=0):
    return np.random.default_rng(seed)


def test_surface_area():
    assert hk.sphere_surface_area(1) == pytest.approx(2.0)
    assert hk.sphere_surface_area(2) == pytest.approx(2.0 * math.pi)
    assert hk.sphere_surface_area(3) == pytest.approx(4.0 * math.pi)


def test_kernel_at_zero_closed_forms():
    assert hk.kernel_at_zero(1, 2.0) == pytest.approx((4 * math.pi) ** -0.5, rel=1e-12)
    assert hk.kernel_at_zero(1, 1.0) == pytest.approx(1.0 / math.pi, rel=1e-12)
    # d = 2 Cauchy: Gamma((d+1)/2) / pi^{(d+1)/2} at x = 0, t = 1
    want = math.gamma(1.5) / math.pi**1.5
    assert hk.kernel_at_zero(2, 1.0) == pytest.approx(want, rel=1e-12)
    assert hk.kernel_at_zero(2, 1.0) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)
    with pytest.raises(ValueError):
        hk.kernel_at_zero(0, 1.0)
    with pytest.raises(ValueError):
        hk.kernel_at_zero(1, 2.5)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
def test_moment_identity(d, alpha):
    lhs = (4.0 * math.pi) ** (d / 2.0) * hk.kernel_at_zero(d, alpha)
    rhs = sub.stable_moment(alpha, -d / 2.0)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_kernel_value_cauchy():
    assert hk.kernel_value(1, 1.0, 1.0, 0.0) == pytest.approx(1.0 / math.pi, rel=1e-9)
    assert hk.kernel_value(1, 1.0, 2.0, 1.0) == pytest.approx(2.0 / (5.0 * math.pi), rel=1e-8)


def test_kernel_value_gaussian():
    want = (4.0 * math.pi) ** -0.5 * math.exp(-0.25)
    assert hk.kernel_value(1, 2.0, 1.0, 1.0) == pytest.approx(want, rel=1e-12)


def test_kernel_value_d2_cauchy():
    # 2D Cauchy closed form: t Gamma(3/2) / (pi^{3/2} (t^2 + |x|^2)^{3/2})
    for t, x in ((0.5, 0.0), (0.5, 1.0), (0.8, (0.3, 0.4))):
        r2 = float(np.sum(np.square(x)))
        want = t * math.gamma(1.5) / (math.pi**1.5 * (t**2 + r2) ** 1.5)
        assert hk.kernel_value(2, 1.0, t, x) == pytest.approx(want, rel=1e-7)


@pytest.mark.parametrize("d,alpha", [(1, 1.3), (2, 1.3), (1, 0.7)])
def test_kernel_scaling(d, alpha):
    for t in (0.3, 0.8):
        for r in (0.5, 1.5):
            x = np.zeros(d)
            x[0] = r
            lhs = hk.kernel_value(d, alpha, t, x)
            rhs = t ** (-d / alpha) * hk.kernel_value(d, alpha, 1.0, t ** (-1 / alpha) * x)
            assert lhs == pytest.approx(rhs, rel=1e-6)


def test_kernel_subordination_consistency():
    for t, x in ((0.5, 0.0), (0.5, 0.7), (0.9, 2.0)):
        direct = hk.kernel_value(1, 1.0, t, x)
        viasub = hk.kernel_value_subordination(1, t, x)
        assert direct == pytest.approx(viasub, rel=1e-6)


def test_kernel_is_subordinated_gaussian_general_alpha():
    # p_t^{(alpha)}(x) = E[(4 pi S_t)^{-d/2} exp(-|x|^2/(4 S_t))] checked by
    # Monte Carlo over exact subordinator samples at a non-special alpha
    alpha, t, x = 1.4, 0.5, 0.8
    n = 10**6
    s = sub.sample_stable(alpha, t, rng(7), size=n)
    w = (4.0 * math.pi * s) ** -0.5 * np.exp(-(x**2) / (4.0 * s))
    direct = hk.kernel_value(1, alpha, t, x)
    assert abs(w.mean() - direct) <= 4.0 * w.std(ddof=1) / math.sqrt(n)


def test_kernel_radial_monotone_and_dominated():
    xs = np.linspace(0.0, 4.0, 9)
    vals = [hk.kernel_value(1, 1.4, 0.6, x) for x in xs]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    top = 0.6 ** (-1 / 1.4) * hk.kernel_at_zero(1, 1.4)
    assert all(v <= top * (1 + 1e-12) for v in vals)


def test_kernel_value_rejects():
    with pytest.raises(ValueError):
        hk.kernel_value(1, 1.0, -1.0, 0.0)


# ---------------------------------------------------------------------------
# relativistic at-zero


def test_relativistic_kernel_small_mass():
    est = hk.relativistic_kernel_at_zero(1, 1.0, 1e-8, 0.5, 10**6, rng(1))
    want = hk.kernel_at_zero(1, 1.0) * 0.5**-1.0
    assert est.within(want, 3.0)


def test_relativistic_kernel_limit_law():
    # t^{d/alpha} p_t^{(alpha,m)}(0) e^{-mt} -> p_1(0) as t -> 0
    d, alpha, m = 1, 1.0, 1.0
    p1 = hk.kernel_at_zero(d, alpha)
    gaps, last_se = [], 0.0
    for t in (1e-1, 1e-2, 1e-3):
        est = hk.relativistic_kernel_at_zero(d, alpha, m, t, 10**6, rng(2))
        val = t ** (d / alpha) * est.value * math.exp(-m * t)
        gaps.append(abs(val - p1))
        last_se = t ** (d / alpha) * est.stderr
    assert gaps[0] > gaps[-1]
    assert gaps[-1] <= 4.0 * last_se + 5e-3 * p1


def test_relativistic_kernel_lower_bound():
    # t^{d/alpha} p_t(0) >= (4 pi)^{-d/2} e^{-m} E[S_{1,m}^{-d/2}] for 0 < t < 1
    d, alpha, m = 1, 1.0, 1.0
    r = rng(3)
    s1m = sub.sample_relativistic(alpha, m, 1.0, r, size=10**6)
    w = s1m ** (-d / 2.0)
    bound = (4.0 * math.pi) ** (-d / 2.0) * math.exp(-m) * w.mean()
    bound_se = (4.0 * math.pi) ** (-d / 2.0) * math.exp(-m) * w.std(ddof=1) / 1000.0
    for t in (0.1, 0.5, 0.9):
        est = hk.relativistic_kernel_at_zero(d, alpha, m, t, 10**6, r)
        lhs = t ** (d / alpha) * est.value
        assert lhs >= bound - 4.0 * math.hypot(t ** (d / alpha) * est.stderr, bound_se)


def test_relativistic_kernel_rejects():
    with pytest.raises(ValueError):
        hk.relativistic_kernel_at_zero(1, 1.0, 1.0, 0.5, 50, rng())


# ---------------------------------------------------------------------------
# mixed at-zero


def test_mixed_kernel_small_a():
    est = hk.mixed_kernel_at_zero(1, 1.0, 1.5, 1e-10, 0.5, 10**6, rng(4))
    want = hk.kernel_at_zero(1, 1.0) * 0.5**-1.0
    assert est.within(want, 3.0)


def test_mixed_kernel_lower_bound_ratio():
    # p_t^{(a)}(0) t^{d/beta} stays bounded below; it tends to p_1^{(beta)}(0)
    d, alpha, beta, a = 2, 0.8, 1.6, 1.0
    floor = 0.25 * hk.kernel_at_zero(d, beta)
    for t in (1e-1, 1e-2, 1e-3, 1e-4):
        est = hk.mixed_kernel_at_zero(d, alpha, beta, a, t, 5 * 10**5, rng(5))
        assert est.value * t ** (d / beta) >= floor


def test_mixed_kernel_comparability_band():
    # ratio to f_t^a(0) = min(t^{-d/alpha}, (a t)^{-d/beta}) stays in a fixed band
    d, alpha, beta, a = 2, 0.8, 1.6, 1.0
    ratios = []
    for t in (1e-1, 1e-2, 1e-3, 1e-4):
        est = hk.mixed_kernel_at_zero(d, alpha, beta, a, t, 5 * 10**5, rng(6))
        f = min(t ** (-d / alpha), (a * t) ** (-d / beta))
        ratios.append(est.value / f)
    assert max(ratios) / min(ratios) < 3.0
    assert min(ratios) > 0.0
