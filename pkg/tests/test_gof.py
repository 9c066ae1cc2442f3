import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from poismix import gof
from poismix.errors import DegenerateCdfError
from poismix.levy import BilateralSpec, LevySpec

from oracles import IG
from reference_values import ACCEPTANCE

CTS = LevySpec.cts(0.5, 1.0, 0.5)


def ks_series(x):
    k = np.arange(1, 200)
    return float(2 * np.sum((-1.0) ** (k - 1) * np.exp(-2 * k * k * x * x)))


def cvm_limit_cdf_oracle(w):
    """Gil-Pelaez inversion of E e^{itW} = prod_k (1 - 2it / (k pi)^2)^{-1/2}."""
    k = np.arange(1, 20001, dtype=float)

    def phi(t):
        z = 2j * t / (k * math.pi) ** 2
        tail = -2j * t / math.pi**2 / 20000.5  # sum_{k > K} log(1 - z_k), first order
        return np.exp(-0.5 * (np.sum(np.log1p(-z)) + tail))

    f = lambda t: (np.exp(-1j * t * w) * phi(t)).imag / t
    val = integrate.quad(f, 0, 4000, limit=4000, epsabs=1e-12)[0]
    return 0.5 - val / math.pi


@pytest.mark.parametrize("x", [0.5, 0.83, 1.36, 2.0])
def test_ks_pvalue_is_kolmogorov_series(x):
    n = 400
    sample = (np.arange(n) + 0.5) / n
    sample[-1] = 1.0 - x / math.sqrt(n) + 0.5 / n if x / math.sqrt(n) > 0.5 / n else sample[-1]
    r = gof.ks_test(sample, lambda t: np.clip(t, 0, 1))
    assert r.p_value == pytest.approx(ks_series(math.sqrt(n) * r.statistic), abs=1e-12)


def test_ks_critical_value():
    # sqrt(n) D = 1.36 gives p close to 0.05
    assert ks_series(1.36) == pytest.approx(0.049, abs=5e-4)


@pytest.mark.parametrize("w", [0.1, 0.347, 0.461, 0.743, 1.168])
def test_cvm_limit_matches_characteristic_function_inversion(w):
    assert gof.cvm_limit_cdf(w) == pytest.approx(cvm_limit_cdf_oracle(w), abs=1e-6)


def test_cvm_critical_values():
    # classical upper quantiles of the limit law
    for w, q in ((0.347, 0.90), (0.461, 0.95), (0.743, 0.99), (1.168, 0.999)):
        assert gof.cvm_limit_cdf(w) == pytest.approx(q, abs=1e-3)
    grid = np.linspace(0.01, 3.0, 300)
    vals = [gof.cvm_limit_cdf(w) for w in grid]
    assert np.all(np.diff(vals) >= 0)
    assert gof.cvm_limit_cdf(-1.0) == 0.0 and gof.cvm_limit_cdf(50.0) == 1.0


@settings(max_examples=20, deadline=None)
@given(st.integers(5, 3000))
def test_quantile_sample_statistics(n):
    x = IG.ppf((np.arange(1, n + 1) - 0.5) / n)
    assert gof.ks_test(x, IG.cdf).statistic == pytest.approx(0.5 / n, rel=1e-6)
    assert gof.cvm_test(x, IG.cdf).statistic == pytest.approx(1 / (12 * n), rel=1e-5)


def test_statistics_match_scipy():
    x = np.random.default_rng(3).normal(size=700)
    ks = gof.ks_test(x, stats.norm.cdf)
    assert ks.statistic == pytest.approx(stats.kstest(x, "norm").statistic, rel=1e-12)
    cvm = gof.cvm_test(x, stats.norm.cdf)
    ref = stats.cramervonmises(x, "norm")
    assert cvm.statistic == pytest.approx(ref.statistic, rel=1e-12)
    assert cvm.p_value == pytest.approx(ref.pvalue, abs=0.01)


def test_null_pvalues_are_uniform():
    gen = np.random.default_rng(11)
    ks = [gof.ks_test(gen.uniform(size=500), lambda t: t).p_value for _ in range(300)]
    cvm = [gof.cvm_test(gen.uniform(size=500), lambda t: t).p_value for _ in range(300)]
    assert stats.kstest(ks, "uniform").pvalue > 1e-3
    assert stats.kstest(cvm, "uniform").pvalue > 1e-3


def test_bad_inputs():
    with pytest.raises(ValueError):
        gof.ks_test(np.array([]), lambda t: t)
    with pytest.raises(DegenerateCdfError):
        gof.ks_test(np.array([0.1, 0.2]), lambda t: 2 * t + 1)
    with pytest.raises(DegenerateCdfError):
        gof.cvm_test(np.array([0.1, 0.2, 0.3]), lambda t: np.array([0.5, 0.2, 0.9]))
    with pytest.raises(DegenerateCdfError):
        gof.ks_test(np.array([0.1, 0.2]), lambda t: np.full(2, np.nan))


def test_reference_distribution_one_sided_matches_inverse_gaussian():
    ref = gof.reference_distribution(BilateralSpec.one_sided(CTS))
    x = np.linspace(0.01, 8.0, 500)
    assert np.max(np.abs(ref.cdf(x) - IG.cdf(x))) < 1e-8


def test_reference_distribution_symmetric_difference():
    # X1 - X2 with X1, X2 iid inverse Gaussian: F(t) = int F_IG(t + y) f_IG(y) dy
    ref = gof.reference_distribution(BilateralSpec.cts(0.5, 1.0, 0.5, 1.0, 0.5))
    for t in (-1.0, 0.0, 0.4, 2.0):
        val = integrate.quad(lambda y: IG.cdf(t + y) * IG.pdf(y), 0, np.inf, limit=400)[0]
        assert float(ref.cdf(t)) == pytest.approx(val, abs=1e-7)


def test_nvm_reference_variance():
    ref = gof.nvm_reference(CTS)
    x = ref.x
    var = np.trapezoid(x * x * ref.pdf_values, x)
    assert var == pytest.approx(CTS.moments().m1, rel=1e-4)
    assert float(ref.cdf(0.0)) == pytest.approx(0.5, abs=1e-9)


def test_diagnostics(tmp_path):
    ref = gof.reference_distribution(BilateralSpec.one_sided(CTS))
    x = IG.rvs(size=20000, random_state=5)
    out = gof.emit_diagnostics(x, ref, tmp_path / "run")
    assert out["max_kde_error"] < 0.15
    assert np.max(np.abs(out["theoretical"] - IG.ppf(out["q"]))) < 1e-3
    kde = (tmp_path / "run_kde.csv").read_text().splitlines()
    qq = (tmp_path / "run_qq.csv").read_text().splitlines()
    assert kde[0] == "x,kde,pdf" and len(kde) == 513
    assert qq[0] == "theoretical,empirical" and len(qq) == 200
    with pytest.raises(ValueError):
        gof.emit_diagnostics(np.ones(10), ref)


def test_run_table1_matches_reference():
    rows = gof.run_table1()
    assert len(rows) == 12
    for r in rows:
        a4, a5 = ACCEPTANCE[(r["alpha"], r["a"])]
        assert r["alg4"] == pytest.approx(a4, abs=5e-4)
        assert r["alg5"] == pytest.approx(a5, abs=5e-4)
    mc = gof.run_table1(alphas=(0.5,), a_values=(0.1,), n_proposals=20000)
    assert mc[0]["alg4_mc"] == pytest.approx(mc[0]["alg4"], abs=0.015)


def test_run_table2_small_and_deterministic():
    cfg = gof.StudyConfig(spec=BilateralSpec.cts(0.5, 1.0, 0.5, 1.0, 0.5), a_values=(1e-2,),
                          n_per_sample=500, replications=3, seed=4)
    seen = []
    rows = gof.run_table2(cfg, progress=seen.append)
    assert rows == seen and len(rows) == 1
    assert 0 <= rows[0]["ks"] <= 1 and 0 <= rows[0]["cvm"] <= 1
    assert gof.run_table2(cfg) == rows
    assert gof.StudyConfig.full().replications == 100
    with pytest.raises(ValueError):
        gof.StudyConfig(replications=0)


def test_log_log_slope_and_rate_study():
    a = np.array([1e-1, 1e-2, 1e-3])
    assert gof.log_log_slope(a, 3 * a**0.7) == pytest.approx(0.7)
    out = gof.run_rate_study(BilateralSpec.one_sided(CTS), [2.0**-4, 2.0**-6])
    assert out["predicted_slope"] == pytest.approx(1 / 1.5)
    assert all(r["exact"] <= r["thm1"] for r in out["rows"])
    assert 0.5 < out["slope"] <= 1.1
