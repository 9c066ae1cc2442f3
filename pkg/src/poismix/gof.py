"""Goodness-of-fit tests, diagnostics and the experiment runners.

Samples from the lattice approximations are tested against the continuous
target distribution, whose cdf comes from FFT inversion of its
characteristic function.  KS and Cramer-von Mises p-values use the
asymptotic null distributions.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special, stats

from . import bounds, inversion, samplers
from .errors import DegenerateCdfError
from .levy import BilateralSpec, LevySpec, cumulant, log_charfn_nvm_limit
from .rng import RandomSource

TABLE1_ALPHAS = (0.25, 0.5, 0.75)
TABLE1_A = (0.5, 1e-1, 1e-2, 1e-4)
TABLE2_A = (0.5, 1e-2, 1e-4)
REFERENCE_TOL = 1e-8


@dataclass(frozen=True)
class GofResult:
    statistic: float
    p_value: float
    n: int
    test: str


def _values(sample) -> np.ndarray:
    x = np.asarray(getattr(sample, "values", sample), dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("need a nonempty one-dimensional sample")
    return np.sort(x)


def _cdf_at(cdf: Callable, x: np.ndarray) -> np.ndarray:
    F = np.asarray(cdf(x), dtype=float)
    if F.shape != x.shape or not np.all(np.isfinite(F)) or F.min() < 0.0 or F.max() > 1.0:
        raise DegenerateCdfError("cdf values must be finite and lie in [0, 1]")
    if np.any(np.diff(F) < -1e-12):
        raise DegenerateCdfError("cdf is not monotone on the sample")
    return F


def ks_test(sample, cdf: Callable) -> GofResult:
    """Kolmogorov-Smirnov statistic with the asymptotic p-value ``Q(sqrt(n) D_n)``."""
    x = _values(sample)
    n = x.size
    F = _cdf_at(cdf, x)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))
    return GofResult(d, float(special.kolmogorov(math.sqrt(n) * d)), n, "KS")


def cvm_limit_cdf(w2: float) -> float:
    """Cdf of the limiting Cramer-von Mises law.

    ``(1 / (pi sqrt(x))) sum_k Gamma(k+1/2) / (Gamma(1/2) k!) sqrt(4k+1) e^{-z} K_{1/4}(z)``
    with ``z = (4k+1)^2 / (16 x)``.
    """
    if w2 <= 0.0:
        return 0.0
    if w2 >= 20.0:
        return 1.0
    k = np.arange(200)
    y = 4.0 * k + 1.0
    z = y * y / (16.0 * w2)
    coef = np.exp(special.gammaln(k + 0.5) - special.gammaln(k + 1.0)) / math.pi**1.5
    terms = coef * np.sqrt(y) * special.kve(0.25, z) * np.exp(-2.0 * z)
    return float(min(1.0, max(0.0, terms.sum() / math.sqrt(w2))))


def cvm_test(sample, cdf: Callable) -> GofResult:
    """``W^2 = 1/(12n) + sum (F(x_(i)) - (2i-1)/(2n))^2`` with its asymptotic p-value."""
    x = _values(sample)
    n = x.size
    F = _cdf_at(cdf, x)
    u = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    w2 = 1.0 / (12.0 * n) + float(np.sum((F - u) ** 2))
    return GofResult(w2, 1.0 - cvm_limit_cdf(w2), n, "CVM")


def ecdf(sample) -> Callable[[np.ndarray], np.ndarray]:
    x = _values(sample)
    return lambda t: np.searchsorted(x, np.asarray(t, dtype=float), side="right") / x.size


# ---------------------------------------------------------------------------
# reference distributions


def reference_distribution(bspec: BilateralSpec, tol: float = REFERENCE_TOL) -> inversion.GridDistribution:
    """Cdf and density of ``ID(M)`` on a grid covering all but ``tol`` of its mass."""
    alpha = bspec.ts_alpha
    if alpha is None:
        raise ValueError("reference inversion needs a tempered stable spec")
    lo, hi = bspec.window(tol)
    if lo == 0.0:
        lo = -0.02 * hi
    return inversion.cdf_grid(lambda s: cumulant(bspec, s), lo, hi, alpha, tol=tol, max_points=1 << 25)


def nvm_reference(spec: LevySpec, tol: float = REFERENCE_TOL) -> inversion.GridDistribution:
    """Cdf and density of ``sqrt(X) W``."""
    y = bounds.nvm_window(spec, tol)
    return inversion.cdf_grid(lambda s: log_charfn_nvm_limit(spec, s), -y, y, 2.0 * spec.alpha, tol=tol)


# ---------------------------------------------------------------------------
# diagnostics


def emit_diagnostics(sample, ref: inversion.GridDistribution, out: Optional[str | Path] = None,
                     grid_points: int = 512, n_quantiles: int = 199) -> dict:
    """KDE against the reference density and qq pairs.

    The KDE is Gaussian with Silverman's bandwidth.  With ``out`` given, the
    curves go to ``<out>_kde.csv`` (grid, kde, pdf) and ``<out>_qq.csv``
    (theoretical, empirical).
    """
    x = _values(sample)
    if np.ptp(x) == 0.0:
        raise ValueError("sample is constant; no density estimate")
    lo, hi = np.quantile(x, [0.005, 0.995])
    grid = np.linspace(lo, hi, grid_points)
    kde = stats.gaussian_kde(x, bw_method="silverman")(grid)
    pdf = ref.pdf(grid)
    q = (np.arange(1, n_quantiles + 1) - 0.5) / n_quantiles
    theo = ref.ppf(q)
    emp = np.quantile(x, q)
    res = {"grid": grid, "kde": kde, "pdf": pdf, "q": q, "theoretical": theo, "empirical": emp,
           "max_kde_error": float(np.max(np.abs(kde - pdf)))}
    if out is not None:
        out = Path(out)
        paths = {"kde": out.with_name(out.name + "_kde.csv"), "qq": out.with_name(out.name + "_qq.csv")}
        with open(paths["kde"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "kde", "pdf"])
            w.writerows(zip(_fmt(grid), _fmt(kde), _fmt(pdf)))
        with open(paths["qq"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theoretical", "empirical"])
            w.writerows(zip(_fmt(theo), _fmt(emp)))
        res["paths"] = paths
    return res


def _fmt(v) -> list[str]:
    return [repr(float(t)) for t in v]


# ---------------------------------------------------------------------------
# experiment runners


def table2_specs(alpha: float) -> dict[str, BilateralSpec]:
    """Symmetric specs of the p-value study: CTS with ``l = 0.5``, PT with ``l = 1``."""
    return {"CTS": BilateralSpec.cts(alpha, 1.0, 0.5, 1.0, 0.5),
            "PT": BilateralSpec.pt(alpha, 1.0, 1.0, 1.0, 1.0)}


@dataclass
class StudyConfig:
    """Monte Carlo study settings.

    ``spec=None`` runs the default symmetric CTS and PT specs for every
    ``alpha`` in ``alphas``.  ``replications=100`` matches the full-scale
    protocol; the default of 20 keeps runtime short.
    """

    spec: Optional[BilateralSpec] = None
    a_values: Sequence[float] = TABLE2_A
    n_per_sample: int = 5000
    replications: int = 20
    seed: int = 20240501
    alphas: Sequence[float] = TABLE1_ALPHAS
    threads: Optional[int] = None
    algo: str = "auto"

    def __post_init__(self):
        if self.replications < 1 or self.n_per_sample < 1:
            raise ValueError("replications and n_per_sample must be positive")

    @classmethod
    def full(cls, **kw) -> "StudyConfig":
        return cls(replications=100, **kw)


def run_table1(alphas: Sequence[float] = TABLE1_ALPHAS, a_values: Sequence[float] = TABLE1_A,
               n_proposals: int = 0, seed: int = 1, c: float = 1.0, ell: float = 0.5) -> list[dict]:
    """Acceptance probabilities of both mixing-law samplers for CTS(alpha, c, ell).

    With ``n_proposals > 0`` Monte Carlo rates from that many proposals are added.
    """
    rows = []
    src = RandomSource(seed)
    for i, al in enumerate(alphas):
        spec = LevySpec.cts(al, c, ell)
        for j, a in enumerate(a_values):
            row = {"alpha": al, "a": a, **samplers.acceptance_probabilities(spec, a)}
            if n_proposals > 0:
                for algo, key in ((4, "alg4_mc"), (5, "alg5_mc")):
                    row[key] = samplers.acceptance_rate_mc(spec, a, algo, n_proposals, src.spawn(i, j, algo))
            rows.append(row)
    return rows


def _cells(config: StudyConfig):
    if config.spec is not None:
        yield "custom", config.spec.ts_alpha, config.spec
        return
    for al in config.alphas:
        for fam, bs in table2_specs(al).items():
            yield fam, al, bs


def run_table2(config: StudyConfig = StudyConfig(), progress: Optional[Callable[[dict], None]] = None) -> list[dict]:
    """Mean KS and CVM p-values of lattice samples tested against the continuous target."""
    src = RandomSource(config.seed)
    rows = []
    for ci, (fam, al, bs) in enumerate(_cells(config)):
        ref = reference_distribution(bs)
        for ai, a in enumerate(config.a_values):
            ks, cvm = [], []
            for r in range(config.replications):
                x = samplers.sample_bilateral(bs, a, config.n_per_sample, src.spawn(ci, ai, r),
                                              algo=config.algo, threads=config.threads).values
                ks.append(ks_test(x, ref.cdf).p_value)
                cvm.append(cvm_test(x, ref.cdf).p_value)
            row = {"family": fam, "alpha": al, "a": a, "ks": float(np.mean(ks)), "cvm": float(np.mean(cvm)),
                   "replications": config.replications, "n": config.n_per_sample}
            rows.append(row)
            if progress is not None:
                progress(row)
    return rows


def log_log_slope(a_values, distances) -> float:
    return float(np.polyfit(np.log(a_values), np.log(distances), 1)[0])


def run_rate_study(bspec: BilateralSpec, a_values: Sequence[float]) -> dict:
    """Exact Kolmogorov distances against the general and tempered-stable bounds."""
    base = bounds.inputs_for(bspec, a_values[0])
    rows = []
    for a in a_values:
        x = base.with_a(a)
        d = bounds.exact_kolmogorov(bspec, a)
        rows.append({"a": a, "exact": d.value, "resolution": d.resolution,
                     "thm1": bounds.thm1_linf(x), "thm2": bounds.thm2_rate(x)["bound"]})
    slope = log_log_slope([r["a"] for r in rows], [r["exact"] for r in rows]) if len(rows) > 1 else float("nan")
    return {"rows": rows, "slope": slope, "predicted_slope": 1.0 / (2.0 - bspec.ts_alpha)}
