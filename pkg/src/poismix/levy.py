"""Levy measures of subordinators, jump laws of the stopped process, cumulants.

Every one-sided measure ``M`` on ``(0, inf)`` is summarised by its complex
Laplace exponent

    psi(w) = int (1 - exp(-w x)) M(dx),    Re w >= 0,

from which the cumulant, the characteristic function of the Poisson mixture
and the normal-variance-mixture characteristic functions all follow:

    C(s)          = -psi_plus(-i s) - psi_minus(i s)
    log mu_a(s)   = -psi_plus(-C_nu(s a) / (a gamma)) - psi_minus(-C_nu(-s a) / (a gamma))
    log mu*_a(s)  = -psi(-C_nu(s sqrt(a / gamma*)) / a)
    log mu*(s)    = -psi(s^2 / 2)

CTS and point-mass exponents are closed form.  The power-tempered (PT)
family is a mixture over ``u`` of exponentially tempered measures with
mixing weight ``u^l (1+u)^(-alpha-l-2)``; its integrals are evaluated with a
trapezoid rule in ``v = log u``, which converges geometrically because the
integrands are analytic in a strip of half-width pi/2 around the real axis.
"""
from __future__ import annotations

import enum
import functools
import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from .errors import QuadratureError

QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-8

# trapezoid step in log(u) for PT mixtures; error ~ exp(-pi^2 / step)
_PT_STEP = 0.1
_PT_CHUNK = 4096


class Family(enum.Enum):
    CTS = "cts"
    PT = "pt"
    POINT_MASS = "pointmass"
    CUSTOM = "custom"


# ---------------------------------------------------------------------------
# complex-safe elementary helpers


def log1p_c(z):
    """``log(1 + z)`` accurate for small complex ``z``."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    re = 0.5 * np.log1p(x * (2.0 + x) + y * y)
    im = np.arctan2(y, 1.0 + x)
    return re + 1j * im


def expm1_c(z):
    """``exp(z) - 1`` accurate for small complex ``z``."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    em = np.expm1(x)
    re = em * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2
    im = np.exp(x) * np.sin(y)
    return re + 1j * im


def _pow_diff(base, w, alpha):
    """``(base + w)^alpha - base^alpha`` without cancellation, ``base > 0``."""
    return base**alpha * expm1_c(alpha * log1p_c(w / base))


# ---------------------------------------------------------------------------
# PT mixture nodes


@functools.lru_cache(maxsize=64)
def _pt_nodes(alpha: float, ell: float, v_hi: float, y_max: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``u`` and trapezoid weights for ``int f(u) u^l (1+u)^(-alpha-l-2) du``.

    ``y_max`` is the largest decay rate ``y`` in ``f(u) = exp(-y u)`` that the
    nodes must resolve; its mass sits near ``u = 1/y``.
    """
    v_lo = -40.0 / (ell + 1.0) - 1.0 - math.log(max(y_max, 1.0))
    v_lo = float(math.floor(v_lo))
    v = np.arange(v_lo, v_hi + _PT_STEP, _PT_STEP)
    u = np.exp(v)
    # weight * du = u^(l+1) (1+u)^(-alpha-l-2) dv
    logw = (ell + 1.0) * v - (alpha + ell + 2.0) * np.logaddexp(0.0, v)
    return u, np.exp(logw) * _PT_STEP


def _pt_v_hi(alpha: float, wmax: float) -> float:
    # upper tails decay like u^-alpha (tempering) or |w| u^-2 (exponent)
    hi = max(40.0 / alpha, 40.0 + math.log(max(wmax, 1.0)))
    return float(math.ceil(hi))


def _pt_tempering_raw(alpha: float, ell: float, y) -> np.ndarray:
    """Unnormalised PT tempering ``int exp(-y u) u^l (1+u)^(-alpha-l-2) du``."""
    shape = np.shape(y)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    ymax = float(2.0 ** math.ceil(math.log2(max(float(np.max(y, initial=1.0)), 1.0))))
    u, wt = _pt_nodes(alpha, ell, _pt_v_hi(alpha, 1.0), ymax)
    out = np.empty(y.shape)
    flat = y.ravel()
    res = out.ravel()
    for i in range(0, flat.size, _PT_CHUNK):
        blk = flat[i : i + _PT_CHUNK]
        res[i : i + _PT_CHUNK] = np.exp(-np.outer(blk, u)) @ wt
    return res.reshape(shape)


def _pt_laplace_unit(alpha: float, ell: float, w) -> np.ndarray:
    """``int (1 - e^{-wx}) g(x) x^{-1-alpha} dx`` for the unnormalised PT ``g``."""
    w = np.asarray(w, dtype=complex)
    flat = w.ravel()
    out = np.empty(flat.shape, dtype=complex)
    if flat.size == 0:
        return out.reshape(w.shape)
    u, wt = _pt_nodes(alpha, ell, _pt_v_hi(alpha, float(np.max(np.abs(flat)))))
    fac = special.gamma(1.0 - alpha) / alpha
    for i in range(0, flat.size, _PT_CHUNK):
        blk = flat[i : i + _PT_CHUNK]
        diff = _pow_diff(u[None, :], blk[:, None], alpha)
        out[i : i + _PT_CHUNK] = fac * (diff @ wt)
    return out.reshape(w.shape)


@functools.lru_cache(maxsize=64)
def pt_tempering_table(alpha: float, ell: float, n: int = 16384):
    """Log-log table of the normalised PT tempering on ``[1e-12, 1e12]``.

    Returns ``(log_y0, step, log_g)`` on a uniform grid in ``log y``.  Used by
    the compiled rejection samplers, which interpolate linearly in log-log
    space and extrapolate the last slope (g decays like ``y^-(l+1)``).
    """
    lo, hi = math.log(1e-12), math.log(1e12)
    ly = np.linspace(lo, hi, n)
    g0 = special.beta(ell + 1.0, alpha + 1.0)
    lg = np.log(_pt_tempering_raw(alpha, ell, np.exp(ly)) / g0)
    if not np.all(np.isfinite(lg)):
        raise QuadratureError("PT tempering table underflowed")
    lg = np.minimum(np.minimum.accumulate(lg), 0.0)
    return lo, (hi - lo) / (n - 1), lg


@functools.lru_cache(maxsize=64)
def _pt_imag_spline(alpha: float, ell: float):
    """Cubic splines of the unit PT exponent on the imaginary axis.

    Stores ``q(t) = psi(-i s) (1+s)^(1-alpha) / s`` against ``t = log s``,
    which is smooth and bounded at both ends.
    """
    from scipy.interpolate import CubicSpline

    t = np.linspace(math.log(_SPLINE_SMIN), math.log(_SPLINE_SMAX), _SPLINE_PTS)
    s = np.exp(t)
    q = _pt_laplace_unit(alpha, ell, -1j * s) * (1.0 + s) ** (1.0 - alpha) / s
    mid = 0.5 * (t[1:] + t[:-1])
    sre, sim = CubicSpline(t, q.real), CubicSpline(t, q.imag)
    sm = np.exp(mid)
    ref = _pt_laplace_unit(alpha, ell, -1j * sm) * (1.0 + sm) ** (1.0 - alpha) / sm
    err = np.max(np.abs(sre(mid) + 1j * sim(mid) - ref) / np.abs(ref))
    if err > 1e-9:
        raise QuadratureError(f"PT exponent spline misfit {err:.2e}")
    return sre, sim


_SPLINE_SMIN, _SPLINE_SMAX, _SPLINE_PTS = 1e-8, 1e8, 3201


def _pt_exponent_imag_unit(alpha: float, ell: float, s) -> np.ndarray:
    """Unit PT exponent ``psi(-i s)`` for real ``s`` via the cached spline."""
    s = np.asarray(s, dtype=float)
    a = np.abs(s)
    out = np.empty(s.shape, dtype=complex)
    mid = (a >= _SPLINE_SMIN) & (a <= _SPLINE_SMAX)
    if mid.any():
        sre, sim = _pt_imag_spline(alpha, ell)
        t = np.log(a[mid])
        q = sre(t) + 1j * sim(t)
        out[mid] = q * a[mid] * (1.0 + a[mid]) ** (alpha - 1.0)
    small = a < _SPLINE_SMIN
    if small.any():
        m1 = special.gamma(1.0 - alpha) * special.beta(ell + alpha, 2.0)
        m2 = (special.gamma(2.0 - alpha) * special.beta(ell + alpha - 1.0, 3.0)
              if ell + alpha > 1.0 else 0.0)
        out[small] = -1j * m1 * a[small] + 0.5 * m2 * a[small] ** 2
    big = a > _SPLINE_SMAX
    if big.any():
        out[big] = _pt_laplace_unit(alpha, ell, -1j * a[big])
    neg = s < 0
    out[neg] = np.conj(out[neg])
    return out


# ---------------------------------------------------------------------------
# Levy measures


@dataclass(frozen=True)
class Moments:
    m1: float
    m2: float
    r0: Optional[float] = None


@dataclass(frozen=True)
class LevySpec:
    """Levy measure of a subordinator, i.e. a measure on ``(0, inf)``.

    Use the constructors :meth:`cts`, :meth:`pt`, :meth:`point_mass`,
    :meth:`custom` rather than the raw fields.  ``c = 0`` gives the zero
    measure, which is how an empty side of a bilateral spec is expressed.
    """

    family: Family
    alpha: Optional[float] = None
    c: float = 0.0
    ell: Optional[float] = None
    lambda_mass: Optional[float] = None
    atom_loc: Optional[float] = None
    density: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        f = self.family
        if f in (Family.CTS, Family.PT):
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
            if self.c < 0:
                raise ValueError(f"c must be nonnegative, got {self.c}")
            if self.ell is None or self.ell <= 0:
                raise ValueError(f"ell must be positive, got {self.ell}")
        elif f is Family.POINT_MASS:
            if self.lambda_mass is None or self.lambda_mass < 0:
                raise ValueError("point mass needs a nonnegative rate")
            if self.atom_loc is None or self.atom_loc <= 0:
                raise ValueError("point mass needs a positive jump size")
        elif f is Family.CUSTOM:
            if self.density is None:
                raise ValueError("custom measure needs a density")

    # -- constructors -------------------------------------------------------

    @classmethod
    def cts(cls, alpha: float, c: float, ell: float) -> "LevySpec":
        """Exponentially tempered: ``c ell^alpha e^{-x/ell} x^{-1-alpha}``."""
        return cls(Family.CTS, alpha=float(alpha), c=float(c), ell=float(ell))

    @classmethod
    def pt(cls, alpha: float, c: float, ell: float) -> "LevySpec":
        """Power tempered: ``c (alpha+l)(alpha+l+1) g(x) x^{-1-alpha}``."""
        return cls(Family.PT, alpha=float(alpha), c=float(c), ell=float(ell))

    @classmethod
    def point_mass(cls, rate: float, loc: float) -> "LevySpec":
        """``rate * delta_loc``; the subordinator is ``loc * Pois(rate)``."""
        return cls(Family.POINT_MASS, lambda_mass=float(rate), atom_loc=float(loc))

    @classmethod
    def custom(cls, density: Callable, name: str = "custom") -> "LevySpec":
        """Measure with a user supplied density on ``(0, inf)`` (best effort)."""
        spec = cls(Family.CUSTOM, density=density, name=name)
        spec.check_admissible()
        return spec

    @classmethod
    def zero(cls) -> "LevySpec":
        return cls.point_mass(0.0, 1.0)

    # -- basic properties ---------------------------------------------------

    @property
    def is_ts(self) -> bool:
        return self.family in (Family.CTS, Family.PT)

    @property
    def is_zero(self) -> bool:
        if self.family is Family.POINT_MASS:
            return self.lambda_mass == 0.0
        if self.is_ts:
            return self.c == 0.0
        return False

    @property
    def eta(self) -> float:
        """Scale in front of ``g(x) x^{-1-alpha}`` as parameterised."""
        if self.family is Family.CTS:
            return self.c * self.ell**self.alpha
        if self.family is Family.PT:
            return self.c * (self.alpha + self.ell) * (self.alpha + self.ell + 1.0)
        raise ValueError("eta is defined for tempered stable measures only")

    @property
    def tempering_at_zero(self) -> float:
        """``g(0+)`` of the tempering as parameterised (1 for CTS)."""
        if self.family is Family.CTS:
            return 1.0
        if self.family is Family.PT:
            return float(special.beta(self.ell + 1.0, self.alpha + 1.0))
        raise ValueError("tempering is defined for tempered stable measures only")

    @property
    def eta_ts(self) -> float:
        """Scale after normalising the tempering so that ``g(0+) = 1``."""
        return self.eta * self.tempering_at_zero

    def tempering(self, y) -> np.ndarray:
        """Normalised tempering function ``g(y) / g(0+)`` for ``y >= 0``."""
        y = np.asarray(y, dtype=float)
        if self.family is Family.CTS:
            return np.exp(-y / self.ell)
        if self.family is Family.PT:
            return _pt_tempering_raw(self.alpha, self.ell, y) / self.tempering_at_zero
        raise ValueError("tempering is defined for tempered stable measures only")

    def levy_density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.family is Family.CTS:
            return self.eta * np.exp(-x / self.ell) * x ** (-1.0 - self.alpha)
        if self.family is Family.PT:
            return self.eta_ts * self.tempering(x) * x ** (-1.0 - self.alpha)
        if self.family is Family.CUSTOM:
            return np.asarray(self.density(x), dtype=float)
        raise ValueError("a point mass has no density")

    # -- integrals ----------------------------------------------------------

    def _quad(self, f: Callable[[float], float]) -> float:
        """``int_0^inf f(x) M(dx)`` for a custom density, split at 1."""
        dens = self.density

        def lower(t):
            x = math.exp(t)
            return f(x) * float(dens(x)) * x

        def upper(x):
            return f(x) * float(dens(x))

        # x-space near 0 (QUADPACK never evaluates the endpoint), log-space up to 1
        total = 0.0
        for fn, lo, hi in ((upper, 0.0, math.exp(-30.0)), (lower, -30.0, 0.0), (upper, 1.0, np.inf)):
            val, err, *rest = integrate.quad(
                fn, lo, hi, epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL, limit=500, full_output=1
            )
            if not np.isfinite(val) or (len(rest) >= 2 and err > 1e-6 * max(1.0, abs(val))):
                raise QuadratureError(f"integral over ({lo}, {hi}) did not converge")
            total += val
        return total

    def check_admissible(self) -> float:
        """Numerically verify ``int min(x, 1) M(dx) < inf`` (a heuristic)."""
        if self.family is not Family.CUSTOM:
            return float(self.laplace_exponent(1.0).real)
        return self._quad(lambda x: min(x, 1.0))

    def laplace_exponent(self, w) -> np.ndarray:
        """``psi(w) = int (1 - e^{-w x}) M(dx)`` for complex ``w``, ``Re w >= 0``."""
        w = np.asarray(w, dtype=complex)
        if self.is_zero:
            return np.zeros(w.shape, dtype=complex)
        f = self.family
        if f is Family.CTS:
            fac = self.c * special.gamma(1.0 - self.alpha) / self.alpha
            return fac * expm1_c(self.alpha * log1p_c(self.ell * w))
        if f is Family.PT:
            return self.eta * _pt_laplace_unit(self.alpha, self.ell, w)
        if f is Family.POINT_MASS:
            return -self.lambda_mass * expm1_c(-w * self.atom_loc)
        out = np.empty(w.shape, dtype=complex)
        for idx, wi in np.ndenumerate(w):
            re = self._quad(lambda x: -math.expm1(-wi.real * x) * math.cos(wi.imag * x)
                            + 2.0 * math.sin(0.5 * wi.imag * x) ** 2)
            im = self._quad(lambda x: math.exp(-wi.real * x) * math.sin(wi.imag * x))
            out[idx] = re + 1j * im
        return out

    def exponent_imag(self, s) -> np.ndarray:
        """``psi(-i s)`` for real ``s``; fast path of :meth:`laplace_exponent`."""
        s = np.asarray(s, dtype=float)
        if self.family is Family.PT and not self.is_zero:
            return self.eta * _pt_exponent_imag_unit(self.alpha, self.ell, s)
        return self.laplace_exponent(-1j * s)

    def moments(self) -> Moments:
        """First and second moments ``int x^i M(dx)`` of the measure."""
        if self.is_zero:
            return Moments(0.0, 0.0)
        f = self.family
        if f is Family.CTS:
            m1 = self.c * self.ell * special.gamma(1.0 - self.alpha)
            m2 = self.c * self.ell**2 * special.gamma(2.0 - self.alpha)
        elif f is Family.PT:
            a, l = self.alpha, self.ell
            m1 = self.eta * special.gamma(1.0 - a) * special.beta(l + a, 2.0)
            m2 = (self.eta * special.gamma(2.0 - a) * special.beta(l + a - 1.0, 3.0)
                  if l + a > 1.0 else math.inf)
        elif f is Family.POINT_MASS:
            m1 = self.lambda_mass * self.atom_loc
            m2 = self.lambda_mass * self.atom_loc**2
        else:
            m1 = self._quad(lambda x: x)
            m2 = self._quad(lambda x: x * x)
        return Moments(float(m1), float(m2))

    def upper_tail_point(self, tol: float) -> float:
        """A point ``t`` with ``P(X > t) <= tol`` for ``X ~ ID(M)``."""
        if self.is_zero:
            return 0.0
        if self.family is Family.CTS:
            theta = 0.5 / self.ell
        elif self.family is Family.POINT_MASS:
            theta = 1.0 / self.atom_loc
        else:
            return self._truncation_tail_point(tol)
        # Chernoff: P(X > t) <= exp(-theta t - psi(-theta))
        log_mgf = -float(self.laplace_exponent(-theta).real)
        return (log_mgf + math.log(1.0 / tol)) / theta

    def _truncation_tail_point(self, tol: float) -> float:
        # P(X > t) <= M((t, inf)) + Var(X_t) / (t - E X_t)^2, where X_t keeps the jumps <= t
        u = np.linspace(-60.0, 60.0, 24001)
        x = np.exp(u)
        dens = self.levy_density(x) * x
        du = u[1] - u[0]
        tail = np.cumsum((dens * du)[::-1])[::-1]
        mean = np.cumsum(dens * x * du)
        var = np.cumsum(dens * x * x * du)
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = np.where(x > mean, tail + var / (x - mean) ** 2, np.inf)
        ok = np.nonzero(bound <= tol)[0]
        if not ok.size:
            raise QuadratureError("tail of the measure too heavy for a probability window")
        return float(x[ok[0]])

    # -- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        if self.is_zero:
            return {"family": "zero"}
        if self.is_ts:
            return {"family": self.family.value, "alpha": self.alpha, "c": self.c, "ell": self.ell}
        if self.family is Family.POINT_MASS:
            return {"family": "pointmass", "lambda": self.lambda_mass, "loc": self.atom_loc}
        return {"family": "custom", "name": self.name}


@dataclass(frozen=True)
class BilateralSpec:
    """Pair of subordinator measures; ``M^-`` is stored reflected onto ``(0, inf)``."""

    m_minus: LevySpec
    m_plus: LevySpec

    def __post_init__(self):
        if self.m_minus.is_zero and self.m_plus.is_zero:
            raise ValueError("at least one side must have positive activity")

    @classmethod
    def one_sided(cls, spec: LevySpec) -> "BilateralSpec":
        return cls(LevySpec.zero(), spec)

    @classmethod
    def cts(cls, alpha, c_minus, l_minus, c_plus, l_plus) -> "BilateralSpec":
        return cls(LevySpec.cts(alpha, c_minus, l_minus), LevySpec.cts(alpha, c_plus, l_plus))

    @classmethod
    def pt(cls, alpha, c_minus, l_minus, c_plus, l_plus) -> "BilateralSpec":
        return cls(LevySpec.pt(alpha, c_minus, l_minus), LevySpec.pt(alpha, c_plus, l_plus))

    @property
    def sides(self) -> tuple[LevySpec, LevySpec]:
        return self.m_minus, self.m_plus

    @property
    def ts_alpha(self) -> Optional[float]:
        """Common stability index if every active side is tempered stable."""
        alphas = {s.alpha for s in self.sides if not s.is_zero and s.is_ts}
        if any(not s.is_zero and not s.is_ts for s in self.sides) or len(alphas) != 1:
            return None
        return alphas.pop()

    @property
    def has_closed_form(self) -> bool:
        return all(s.is_zero or s.family in (Family.CTS, Family.POINT_MASS) for s in self.sides)

    def moments(self) -> Moments:
        lo, hi = self.m_minus.moments(), self.m_plus.moments()
        return Moments(lo.m1 + hi.m1, lo.m2 + hi.m2)

    @property
    def mean(self) -> float:
        return self.m_plus.moments().m1 - self.m_minus.moments().m1

    def window(self, tol: float) -> tuple[float, float]:
        """Interval holding all but ``tol`` of the probability mass."""
        return (-self.m_minus.upper_tail_point(0.5 * tol), self.m_plus.upper_tail_point(0.5 * tol))

    def to_json(self) -> str:
        return json.dumps({"minus": self.m_minus.to_dict(), "plus": self.m_plus.to_dict()},
                          sort_keys=True)


# ---------------------------------------------------------------------------
# jump law of the stopped process


class NuKind(enum.Enum):
    UNIT_POISSON = "unit_poisson"
    RADEMACHER = "rademacher"
    CUSTOM_ATOMIC = "custom_atomic"


@dataclass(frozen=True)
class NuSpec:
    """Finite atomic Levy measure ``L`` of the process that is stopped."""

    kind: NuKind
    atoms: tuple[tuple[float, float], ...]

    @classmethod
    def atomic(cls, atoms) -> "NuSpec":
        return cls(NuKind.CUSTOM_ATOMIC, tuple((float(z), float(m)) for z, m in atoms))

    def _moment(self, f) -> float:
        return float(sum(m * f(z) for z, m in self.atoms))

    @property
    def zeta1(self) -> float:
        return self._moment(abs)

    @property
    def zeta2(self) -> float:
        return self._moment(lambda z: z * z)

    @property
    def zeta3(self) -> float:
        return self._moment(lambda z: abs(z) ** 3)

    @property
    def gamma(self) -> float:
        return self._moment(lambda z: z)

    @property
    def gamma_star(self) -> float:
        return self.zeta2

    @property
    def is_symmetric(self) -> bool:
        mass = {}
        for z, m in self.atoms:
            mass[z] = mass.get(z, 0.0) + m
        return all(abs(mass.get(-z, 0.0) - m) <= 1e-14 * max(1.0, m) for z, m in mass.items())

    def cumulant(self, t) -> np.ndarray:
        """``C_nu(t) = sum_j m_j (e^{i t z_j} - 1)``."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for z, m in self.atoms:
            out += m * (-2.0 * np.sin(0.5 * t * z) ** 2 + 1j * np.sin(t * z))
        return out


UNIT_POISSON = NuSpec(NuKind.UNIT_POISSON, ((1.0, 1.0),))
RADEMACHER = NuSpec(NuKind.RADEMACHER, ((1.0, 0.5), (-1.0, 0.5)))


# ---------------------------------------------------------------------------
# cumulants and characteristic functions


def moments(spec: LevySpec) -> Moments:
    return spec.moments()


def cumulant(spec: BilateralSpec, s) -> np.ndarray:
    """``C(s) = int (e^{isx} - 1) M(dx)`` with ``M^-`` reflected to ``(-inf, 0)``."""
    s = np.asarray(s, dtype=float)
    return -spec.m_plus.exponent_imag(s) - spec.m_minus.exponent_imag(-s)


def charfn(spec: BilateralSpec, s) -> np.ndarray:
    return np.exp(cumulant(spec, s))


def log_charfn_mixture(spec: BilateralSpec, nu: NuSpec, a: float, s) -> np.ndarray:
    if a <= 0:
        raise ValueError("a must be positive")
    if nu.gamma <= 0:
        raise ValueError("the jump law must have positive mean")
    s = np.asarray(s, dtype=float)
    scale = a * nu.gamma
    w_plus = -nu.cumulant(s * a) / scale
    w_minus = -nu.cumulant(-s * a) / scale
    return -spec.m_plus.laplace_exponent(w_plus) - spec.m_minus.laplace_exponent(w_minus)


def charfn_mixture(spec: BilateralSpec, nu: NuSpec, a: float, s) -> np.ndarray:
    """Characteristic function of ``a Z+(X+/(a gamma)) - a Z-(X-/(a gamma))``."""
    return np.exp(log_charfn_mixture(spec, nu, a, s))


def log_charfn_nvm(spec: LevySpec, nu: NuSpec, a: float, s) -> np.ndarray:
    """Log characteristic function of ``sqrt(a / gamma*) Z(X / a)``."""
    if not nu.is_symmetric:
        raise ValueError("normal variance approximation needs a symmetric jump law")
    s = np.asarray(s, dtype=float)
    w = -nu.cumulant(s * math.sqrt(a / nu.gamma_star)) / a
    return -spec.laplace_exponent(w)


def log_charfn_nvm_limit(spec: LevySpec, s) -> np.ndarray:
    """Log characteristic function of ``sqrt(X) W`` with ``W`` standard normal."""
    s = np.asarray(s, dtype=float)
    return -spec.laplace_exponent(0.5 * s * s)


class NvmLimit:
    """``sqrt(X) W`` viewed as a symmetric distribution for inversion helpers."""

    def __init__(self, spec: LevySpec):
        self.spec = spec

    def log_charfn(self, s):
        return log_charfn_nvm_limit(self.spec, s)
