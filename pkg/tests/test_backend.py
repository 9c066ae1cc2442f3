import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from poismix import _kernels_numba, _kernels_numpy

PUBLIC = ("poisson_batch", "ztpoisson_batch", "m3_batch", "compound_counts", "symmetric_poisson_diff",
          "pmf_recursion", "accept_count", "split_counts")
BACKENDS = [_kernels_numba, _kernels_numpy]


def chi2_pvalue(x, pk, kmin=0):
    obs = np.bincount(x - kmin, minlength=pk.size)[: pk.size]
    exp = x.size * pk
    keep = exp > 5
    chi2 = np.sum((obs[keep] - exp[keep]) ** 2 / exp[keep])
    return stats.chi2.sf(chi2, keep.sum() - 1)


def test_backends_expose_the_same_kernels():
    for mod in BACKENDS:
        assert all(callable(getattr(mod, f)) for f in PUBLIC)
    assert {m.NAME for m in BACKENDS} == {"numba", "numpy"}


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.NAME)
@pytest.mark.parametrize("lam", [0.2, 3.0, 40.0, 500.0])
def test_poisson_kernels(mod, lam):
    x = np.asarray(mod.poisson_batch(np.random.default_rng(1), lam, 100000))
    k = np.arange(int(lam + 12 * np.sqrt(lam) + 12))
    assert chi2_pvalue(x, stats.poisson.pmf(k, lam)) > 1e-4
    z = np.asarray(mod.ztpoisson_batch(np.random.default_rng(2), np.full(100000, lam)))
    assert z.min() >= 1
    pz = stats.poisson.pmf(k[1:], lam) / -np.expm1(-lam)
    assert chi2_pvalue(z, pz, kmin=1) > 1e-4


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.NAME)
def test_symmetric_difference_is_skellam(mod):
    t = 6.0
    x = np.asarray(mod.symmetric_poisson_diff(np.random.default_rng(3), np.full(100000, t)))
    k = np.arange(-30, 31)
    assert chi2_pvalue(x, stats.skellam.pmf(k, t / 2, t / 2), kmin=-30) > 1e-4


def test_pmf_recursion_backends_agree():
    b = np.exp(-np.arange(1, 60) * 0.3)
    p1, n1, u1 = _kernels_numba.pmf_recursion(b, float(b.sum()), 400, 1e-300)
    p2, n2, u2 = _kernels_numpy.pmf_recursion(b, float(b.sum()), 400, 1e-300)
    assert (n1, u1) == (n2, u2)
    assert np.allclose(p1[:n1], p2[:n2], rtol=1e-12, atol=0)


@pytest.mark.parametrize("name", ["numpy", "numba"])
def test_environment_selects_backend(name):
    env = dict(os.environ, POISMIX_BACKEND=name)
    out = subprocess.run([sys.executable, "-c", "import poismix; print(poismix.backend_name())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == name


def test_unknown_backend_in_environment():
    env = dict(os.environ, POISMIX_BACKEND="cuda")
    out = subprocess.run([sys.executable, "-c", "import poismix; poismix.backend_name()"],
                         env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "unknown backend" in out.stderr
