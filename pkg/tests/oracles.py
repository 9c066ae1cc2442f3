"""Independent reference computations shared by the tests."""
import math

import numpy as np
from scipy import integrate, stats

# one-sided CTS(1/2, c=1, l=1/2) is inverse Gaussian with mean sqrt(pi)/2 and shape pi
IG_MEAN, IG_SHAPE = math.sqrt(math.pi) * 0.5, math.pi
IG = stats.invgauss(IG_MEAN / IG_SHAPE, scale=IG_SHAPE)


def quad_log_ell(alpha, c, ell, a, k):
    """``log int e^{-x/a} (x/a)^k M(dx)`` for CTS by quadrature around the peak."""
    eta = c * ell**alpha
    lam = 1.0 / a + 1.0 / ell
    peak = max((k - 1 - alpha) / lam, 1e-300)
    logf = lambda x: -lam * x + k * math.log(x / a) + (-1 - alpha) * math.log(x)
    ref = logf(peak) if k > 1 else 0.0
    f = lambda x: math.exp(logf(x) - ref)
    pts = [peak] if k > 1 else None
    hi = peak + 60.0 * math.sqrt(k + 1) / lam + 50 / lam
    val = integrate.quad(f, 0, hi, points=pts, limit=800, epsabs=0, epsrel=1e-12)[0]
    return math.log(eta) + ref + math.log(val)


def point_mass_pmf(rate, loc, a, kmax, nmax=400):
    """``P(Z(loc N / a) = k)`` with ``N ~ Pois(rate)``, summed over ``N``."""
    n = np.arange(nmax)
    wn = stats.poisson.pmf(n, rate)
    return np.array([np.sum(wn * stats.poisson.pmf(k, n * loc / a)) for k in range(kmax + 1)])
