import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from poismix import bounds, discretize, samplers
from poismix.errors import MissingMomentError
from poismix.levy import RADEMACHER, BilateralSpec, LevySpec, cumulant

from oracles import IG

CTS = LevySpec.cts(0.5, 1.0, 0.5)


def brute_kolmogorov_ig(a):
    """Sup distance between the lattice law and the inverse Gaussian, from scipy's cdf."""
    hi = IG.ppf(1 - 1e-13)
    K = int(math.ceil(hi / a)) + 1
    p = samplers.pmf_recursive(discretize.tabulate(CTS, a, K), K).p
    P = np.cumsum(p)
    k = np.arange(P.size)
    return max(np.max(np.abs(P - IG.cdf(k * a))), np.max(np.abs(P - IG.cdf((k + 1) * a))))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 40.0), st.floats(0.05, 0.95))
def test_one_minus_cos_integral_matches_quadrature(beta, alpha):
    # (1 - cos x) / x^2 against the algebraic weight x^{1 - alpha}
    f = lambda x: 0.5 * (math.sin(0.5 * x) / (0.5 * x)) ** 2 if x > 0 else 0.5
    ref = integrate.quad(f, 0, beta, weight="alg", wvar=(1 - alpha, 0), limit=2000, epsabs=0, epsrel=1e-13)[0]
    assert bounds.one_minus_cos_integral(beta, alpha) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("bspec", [
    BilateralSpec.one_sided(CTS),
    BilateralSpec.cts(0.3, 1.0, 2.0, 0.5, 0.7),
    BilateralSpec.pt(0.5, 1.0, 1.0, 1.0, 1.0),
    BilateralSpec.one_sided(LevySpec.pt(0.75, 2.0, 0.5)),
])
def test_decay_constant_bounds_the_characteristic_function(bspec):
    A, beta = bounds.decay_constant(bspec, 0.5)
    assert A > 0 and beta > 0
    s = np.logspace(0, 5, 200)
    decay = -np.real(cumulant(bspec, s))
    assert np.all(decay >= A * s**bspec.ts_alpha * (1 - 1e-10))


def test_tempering_radius():
    assert bounds.tempering_radius(CTS, 0.5) == pytest.approx(0.5 * math.log(2.0))
    pt = LevySpec.pt(0.5, 1.0, 1.0)
    b = bounds.tempering_radius(pt, 0.3)
    assert float(pt.tempering(b)) == pytest.approx(0.7, abs=1e-10)
    with pytest.raises(ValueError):
        bounds.decay_constant(BilateralSpec.one_sided(CTS), 1.0)


@pytest.mark.parametrize("a", [0.1, 0.02])
def test_exact_distance_matches_inverse_gaussian_oracle(a):
    d = bounds.exact_kolmogorov(CTS, a)
    assert d.value == pytest.approx(brute_kolmogorov_ig(a), abs=1e-9)
    assert d.resolution < 1e-9


def test_exact_distance_bilateral_fft_matches_one_sided_recursion():
    # a bilateral spec with a negligible minus side runs through the FFT route
    tiny = BilateralSpec(CTS, LevySpec.cts(0.5, 1e-12, 0.5))
    d1 = bounds.exact_kolmogorov(CTS, 0.05).value
    d2 = bounds.exact_kolmogorov(tiny, 0.05).value
    assert d2 == pytest.approx(d1, abs=1e-8)


def test_bounds_dominate_exact_distance():
    for bspec in (BilateralSpec.one_sided(CTS), BilateralSpec.cts(0.5, 1.0, 0.5, 1.0, 0.5)):
        x = bounds.inputs_for(bspec, 0.1)
        for a in (0.1, 0.01):
            xa = x.with_a(a)
            d = bounds.exact_kolmogorov(bspec, a).value
            assert d <= bounds.thm1_linf(xa)
            assert d <= bounds.thm2_rate(xa)["bound"]


def test_exact_lp_matches_quadrature_oracle():
    a = 0.1
    hi = IG.ppf(1 - 1e-13)
    K = int(math.ceil(hi / a)) + 1
    P = np.cumsum(samplers.pmf_recursive(discretize.tabulate(CTS, a, K), K).p)
    ref = 0.0
    for k in range(P.size):
        ref += integrate.quad(lambda t: abs(P[k] - IG.cdf(t)), k * a, (k + 1) * a)[0]
    ref += integrate.quad(IG.sf, P.size * a, np.inf)[0]
    assert bounds.exact_lp(CTS, a, 1.0) == pytest.approx(ref, rel=1e-4)


def test_thm1_linf_by_hand():
    x = bounds.BoundInputs(a=0.04, m1=2.0, r0=3.0)
    lead = math.exp(1.0) * 1.0 / math.pi + 12 / math.pi**2
    assert bounds.thm1_linf(x) == pytest.approx(0.2 * lead * 3.0)
    assert bounds.thm1_lp(x, 2.0) == pytest.approx(0.2 * math.exp(1) * 0.5 * math.sqrt(3) + 4 * 0.04**0.25)


def test_thm2_terms_and_rate():
    x = bounds.inputs_for(BilateralSpec.one_sided(CTS), 1e-2)
    r = x.with_a(1e-4)
    out, out2 = bounds.thm2_rate(x), bounds.thm2_rate(r)
    assert len(out["terms"]) == 3 and out["bound"] == pytest.approx(sum(out["terms"]))
    # the balanced cutoff term scales as a^{1/(2-alpha)}
    assert out2["terms"][2] / out["terms"][2] == pytest.approx(1e-2 ** (1 / 1.5), rel=1e-12)


@pytest.mark.parametrize("p", [2.0, 3.0, 6.0])
def test_prop_no_r0_matches_closed_form_minimum(p):
    x = bounds.BoundInputs(a=1e-3, m1=1.5)
    q = p / (p - 1)
    c = 0.5e-3 * 2 ** (1 / q - 1) * 1.5 / (q + 1) ** (1 / q)
    b = 4 * (p - 1)
    # d/dT [c T^{1+1/q} + b T^{-1/p}] = 0, and 1 + 1/q + 1/p = 2
    T = (b / (p * c * (1 + 1 / q))) ** (1 / 2.0)
    ref = c * T ** (1 + 1 / q) + b * T ** (-1 / p)
    out = bounds.prop_no_r0(x, p)
    assert out["bound"] == pytest.approx(ref, rel=1e-8)
    assert out["T"] == pytest.approx(T, rel=1e-4)


def test_prop_no_r0_l1_minimum():
    x = bounds.inputs_for(BilateralSpec.one_sided(CTS), 1e-3, with_r0=False)
    out = bounds.prop_no_r0(x, 1.0)
    # perturbing the cutoff never lowers the bound
    m1, m2, T = x.m1, x.m2, out["T"]
    def l1(t):
        s3 = math.sqrt(3.0)
        return (1e-3 * t**1.5 * 2**-0.5 * m1 / s3
                + 1e-3 * math.sqrt(2) * (t**1.5 * m2 / (2 * s3) + t**0.5 * m1 + m1 * m1 * t**1.5 / (2 * s3))
                + 1e-3 * t**0.5 * 2**-0.5 * m1 + 4 * math.pi / t)
    assert out["bound"] == pytest.approx(l1(T), rel=1e-12)
    assert all(l1(T * f) >= out["bound"] * (1 - 1e-12) for f in (0.9, 0.99, 1.01, 1.1))
    # T ~ a^{-2/5} at small a, so the bound scales as a^{2/5}
    small = bounds.prop_no_r0(x.with_a(1e-7), 1.0)["bound"]
    smaller = bounds.prop_no_r0(x.with_a(1e-9), 1.0)["bound"]
    assert smaller / small == pytest.approx(1e-2 ** 0.4, rel=0.02)


def test_thm3_dominates_nvm_distance():
    x = bounds.BoundInputs(a=0.1, m1=CTS.moments().m1, zeta3=1.0, gamma=1.0, r0=bounds.r0_nvm(CTS))
    for a in (0.1, 0.01):
        b = bounds.thm3_bounds(x.with_a(a), RADEMACHER.gamma_star)
        d = bounds.exact_kolmogorov_nvm(CTS, a).value
        assert d <= b["linf"]
        assert b["lp"] > 0


def test_missing_moments_raise():
    # the second moment diverges once l <= 1 - alpha
    pt = BilateralSpec.one_sided(LevySpec.pt(0.25, 1.0, 0.5))
    x = bounds.inputs_for(pt, 0.1)
    assert math.isinf(x.m2)
    with pytest.raises(MissingMomentError):
        bounds.thm1_l1(x)
    with pytest.raises(MissingMomentError):
        bounds.prop_no_r0(x, 1.0)
    assert bounds.prop_no_r0(x, 2.0)["bound"] > 0
    with pytest.raises(MissingMomentError):
        bounds.thm1_linf(bounds.BoundInputs(a=0.1, m1=1.0))
    with pytest.raises(ValueError):
        bounds.thm1_lp(x, 1.5)


def test_bound_report_json():
    rep = bounds.bound_report(BilateralSpec.one_sided(CTS), [0.1, 0.01], [math.inf, 2.0], exact=True)
    data = json.loads(rep.to_json())
    assert data["spec"]["plus"]["family"] == "cts"
    assert len(data["rows"]) == 4
    inf_rows = [r for r in data["rows"] if r["p"] == "inf"]
    assert all(r["exact"] <= r["thm1"] for r in inf_rows)
