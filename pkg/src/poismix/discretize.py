"""Discretised Levy measures on the lattice ``a, 2a, 3a, ...``.

For a measure ``M`` on ``(0, inf)`` and ``a > 0`` define

    l_k = int exp(-x/a) (x/a)^k M(dx),     l_plus = int (1 - exp(-x/a)) M(dx).

The lattice measure puts mass ``l_k / k!`` at ``a k``; its total mass is
``l_plus``.  Everything is kept in log space because ``(x/a)^k`` overflows
long before the table is exhausted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special, stats

from .errors import QuadratureError, TailTruncationError
from .levy import Family, LevySpec

K_CAP = 1_000_000


def _exp_mixture(spec: LevySpec) -> tuple[float, np.ndarray, np.ndarray]:
    """Write a TS measure as ``eta x^{-1-alpha} int e^{-x u} w(u) du``.

    Returns ``(log eta, u nodes, log weights)``; CTS is a single node at
    ``1/ell``, PT uses the trapezoid nodes of its mixing density.
    """
    if spec.family is Family.CTS:
        return math.log(spec.eta), np.array([1.0 / spec.ell]), np.zeros(1)
    from .levy import _pt_nodes, _pt_v_hi

    u, wt = _pt_nodes(spec.alpha, spec.ell, _pt_v_hi(spec.alpha, 1.0))
    return math.log(spec.eta), u, np.log(wt)


def _log_ell_ts(spec: LevySpec, a: float, k: np.ndarray, cut: Optional[float] = None) -> np.ndarray:
    # l_k = eta a^-alpha Gamma(k-alpha) int w(u) (1 + a u)^(alpha-k) du; with a cut
    # at x = a * cut the inner integral gains the regularised gamma P(k-alpha, cut (1 + a u))
    alpha = spec.alpha
    log_eta, u, logw = _exp_mixture(spec)
    lu = np.log1p(a * u)
    out = np.empty(k.shape)
    for i in range(0, k.size, 256):
        kk = k[i : i + 256].astype(float)
        terms = logw[None, :] + (alpha - kk)[:, None] * lu[None, :]
        if cut is not None:
            with np.errstate(divide="ignore"):
                terms = terms + np.log(special.gammainc((kk - alpha)[:, None], cut * (1.0 + a * u)[None, :]))
        out[i : i + 256] = special.logsumexp(terms, axis=1)
    return log_eta - alpha * math.log(a) + special.gammaln(k - alpha) + out


def split_rates(spec: LevySpec, a: float, cut: float, rel_tol: float = 1e-16) -> tuple[np.ndarray, float]:
    """Lattice rates of the jumps below ``x = a * cut`` and the rate of the rest.

    Splitting ``M`` at ``a * cut`` splits the compound Poisson law of the
    lattice count into two independent parts.  The lower part has rates
    ``(1/k!) int_0^{a cut} e^{-x/a} (x/a)^k M(dx)``, negligible once ``k``
    is well past ``cut``; the upper part has total rate
    ``int_{a cut}^inf (1 - e^{-x/a}) M(dx)``.
    """
    if not spec.is_ts:
        raise ValueError("split rates need a tempered stable measure")
    lp = ell_plus(spec, a)
    k_hi = int(cut + 20.0 * math.sqrt(cut) + 40)
    while True:
        k = np.arange(1, k_hi + 1)
        rates = np.exp(_log_ell_ts(spec, a, k, cut) - special.gammaln(k + 1.0))
        if rates[-1] <= rel_tol * max(rates.sum(), 1e-300):
            break
        k_hi *= 2
    rates = rates[: np.nonzero(rates > rel_tol * rates.sum())[0][-1] + 1]
    return rates, max(lp - math.fsum(rates), 0.0)


def _ell_quad(spec: LevySpec, a: float, k: int) -> float:
    # k! * Poisson pmf keeps e^{-y} y^k free of overflow
    if k > 170:
        raise QuadratureError("quadrature route supports k <= 170")
    fact = float(special.factorial(k))
    return spec._quad(lambda x: float(stats.poisson.pmf(k, x / a)) * fact)


def log_ell_k(spec: LevySpec, a: float, k) -> np.ndarray:
    """``log l_k`` for an array of ``k >= 1``; ``-inf`` for the zero measure."""
    if a <= 0:
        raise ValueError("a must be positive")
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    if np.any(k < 1):
        raise ValueError("k must be at least 1")
    if spec.is_zero:
        return np.full(k.shape, -np.inf)
    f = spec.family
    if f is Family.CTS:
        al, l = spec.alpha, spec.ell
        return (math.log(spec.eta) - k * math.log(a) + special.gammaln(k - al)
                + (al - k) * math.log(1.0 / a + 1.0 / l))
    if f is Family.POINT_MASS:
        y = spec.atom_loc / a
        return math.log(spec.lambda_mass) - y + k * math.log(y)
    if f is Family.PT:
        return _log_ell_ts(spec, a, k)
    return np.log([_ell_quad(spec, a, int(kk)) for kk in k])


def ell_k(spec: LevySpec, a: float, k: int) -> float:
    """``l_k = int exp(-x/a) (x/a)^k M(dx)``."""
    return float(np.exp(log_ell_k(spec, a, [k])[0]))


def ell_plus(spec: LevySpec, a: float) -> float:
    """``l_plus = int (1 - exp(-x/a)) M(dx)``, the total lattice mass."""
    if a <= 0:
        raise ValueError("a must be positive")
    return float(spec.laplace_exponent(1.0 / a).real)


def m2_density(spec: LevySpec, a: float, x) -> np.ndarray:
    """Density of ``M2 = (1 - exp(-x/a)) M(dx) / l_plus`` on ``(0, inf)``."""
    x = np.asarray(x, dtype=float)
    return -np.expm1(-x / a) * spec.levy_density(x) / ell_plus(spec, a)


def tempering_sup(spec: LevySpec) -> float:
    """``C_g``: supremum of the normalised tempering; 1 for CTS and PT.

    For PT the table used by the samplers is checked to be nonincreasing.
    """
    if spec.family is Family.PT:
        from .levy import pt_tempering_table

        _, _, lg = pt_tempering_table(spec.alpha, spec.ell)
        if np.any(np.diff(lg) > 1e-12) or lg[0] > 1e-9:
            raise QuadratureError("PT tempering is not numerically nonincreasing")
    if not spec.is_ts:
        raise ValueError("C_g is defined for tempered stable measures")
    return 1.0


@dataclass(frozen=True)
class DiscretizedMeasure:
    """Lattice weights of a one-sided measure at scale ``a``.

    Attributes
    ----------
    log_ell : ndarray
        ``log l_k`` for ``k = 1 .. K``.
    ell_plus : float
        Total mass ``l_plus``.
    K_a : float or None
        ``a^alpha l_plus / eta`` with the tempering normalised to ``g(0+) = 1``.
    C_g : float or None
        Supremum of the normalised tempering.
    tail_mass : float
        ``l_plus - sum_{k <= K} l_k / k!`` (nonnegative up to rounding).
    """

    spec: LevySpec
    a: float
    log_ell: np.ndarray
    ell_plus: float
    K_a: Optional[float]
    C_g: Optional[float]
    tail_mass: float

    @property
    def truncation_K(self) -> int:
        return int(self.log_ell.size)

    @property
    def ell(self) -> np.ndarray:
        return np.exp(self.log_ell)

    @property
    def log_rates(self) -> np.ndarray:
        """``log(l_k / k!)``: log masses of the lattice measure."""
        k = np.arange(1, self.truncation_K + 1)
        return self.log_ell - special.gammaln(k + 1.0)

    @property
    def rates(self) -> np.ndarray:
        return np.exp(self.log_rates)

    @property
    def weights(self) -> np.ndarray:
        """Probability vector ``M1({a k}) = l_k / (k! l_plus)``."""
        if self.ell_plus == 0.0:
            return np.zeros(self.truncation_K)
        return np.exp(self.log_rates - math.log(self.ell_plus))


def acceptance_constant(spec: LevySpec, a: float) -> float:
    """``K_a = a^alpha l_plus / eta_ts`` (``eta_ts``: scale with ``g(0+) = 1``)."""
    if not spec.is_ts:
        raise ValueError("K_a is defined for tempered stable measures")
    unit = LevySpec(spec.family, alpha=spec.alpha, c=1.0, ell=spec.ell)
    return a**spec.alpha * ell_plus(unit, a) / unit.eta_ts


def build(
    spec: LevySpec,
    a: float,
    tail_tol: float = 1e-12,
    k_min: int = 1,
    k_cap: int = K_CAP,
) -> DiscretizedMeasure:
    """Tabulate ``l_k`` up to the smallest ``K`` with residual ``< tail_tol * l_plus``.

    The residual is ``l_plus - sum_{k <= K} l_k / k!``, computed from the
    reverse cumulative sum of the table so that it does not cancel.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if not 0.0 < tail_tol < 1.0:
        raise ValueError("tail_tol must lie in (0, 1)")
    lp = ell_plus(spec, a)
    K_a = acceptance_constant(spec, a) if spec.is_ts else None
    C_g = tempering_sup(spec) if spec.is_ts else None
    if spec.is_zero:
        return DiscretizedMeasure(spec, a, np.empty(0), 0.0, K_a, C_g, 0.0)
    block = max(64, k_min)
    log_ell = np.empty(0)
    while True:
        k = np.arange(log_ell.size + 1, block + 1)
        log_ell = np.concatenate([log_ell, log_ell_k(spec, a, k)])
        kk = np.arange(1, log_ell.size + 1)
        rates = np.exp(log_ell - special.gammaln(kk + 1.0))
        head = math.fsum(rates)
        # residual after K terms: (l_plus - head) + sum of the tabulated terms beyond K
        tail_after = np.concatenate([np.cumsum(rates[::-1])[::-1][1:], [0.0]])
        resid = (lp - head) + tail_after
        ok = np.nonzero(resid < tail_tol * lp)[0]
        ok = ok[ok + 1 >= k_min]
        if ok.size:
            K = int(ok[0]) + 1
            return DiscretizedMeasure(spec, a, log_ell[:K], lp, K_a, C_g, max(float(resid[K - 1]), 0.0))
        if block >= k_cap:
            raise TailTruncationError(f"lattice table needs more than {k_cap} terms")
        block = min(2 * block, k_cap)


def tabulate(spec: LevySpec, a: float, K: int) -> DiscretizedMeasure:
    """Table of exactly ``K`` terms, with no tail rule.

    The lattice pmf at ``k <= K`` only involves ``l_1 .. l_K`` and the exact
    ``l_plus``, so this suffices for cdf values on ``[0, a K]``.
    """
    if K < 1:
        raise ValueError("K must be positive")
    lp = ell_plus(spec, a)
    log_ell = log_ell_k(spec, a, np.arange(1, K + 1))
    kk = np.arange(1, K + 1)
    resid = lp - math.fsum(np.exp(log_ell - special.gammaln(kk + 1.0)))
    K_a = acceptance_constant(spec, a) if spec.is_ts else None
    C_g = tempering_sup(spec) if spec.is_ts else None
    return DiscretizedMeasure(spec, a, log_ell, lp, K_a, C_g, max(resid, 0.0))
