"""Samplers for scaled Poisson mixtures ``Y_a = a Z(X / a)``.

``Y_a`` is compound Poisson on the lattice ``a, 2a, ...``: ``N ~ Pois(l_plus)``
jumps, each ``a W`` with ``W`` zero-truncated Poisson whose parameter follows
the rescaled mixing law

    M3(dw)  proportional to  g(a w) (1 - e^{-w}) w^{-1-alpha} dw,    w > 0.

Two rejection samplers target ``M3``: ``"alg4"`` proposes from the density
``alpha (1-alpha) min(w, 1) w^{-1-alpha}`` and ``"alg5"`` proposes from a
gamma law, which needs ``g(a w) <= C exp(-zeta w^p)``.  The lattice pmf is
also available exactly, from the recursion
``p_k = (1/k) sum_{j<k} b_{k-j} p_j``, which drives the inverse-transform
sampler.

Batches are cut into chunks of ``CHUNK`` draws, chunk ``i`` reading the
random stream ``rng.spawn(..., i)``; results therefore do not depend on how
many worker threads process the chunks.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from . import discretize
from ._backend import kernels
from .discretize import DiscretizedMeasure
from .errors import ConditionViolatedError, MaxIterationsError, TableExhaustedError
from .levy import RADEMACHER, UNIT_POISSON, BilateralSpec, Family, LevySpec, NuKind, NuSpec, pt_tempering_table
from .rng import as_source

CHUNK = 1024
MAX_REJECTIONS = 1_000_000
UNDERFLOW_FLOOR = 1e-300
THREADS_ENV = "POISMIX_THREADS"
SPLIT_CUT = 64.0
SPLIT_MIN_RATE = 32.0


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SampleBatch:
    """Draws with their provenance.

    ``counts`` holds the integer lattice indices when the sample lives on
    ``a Z``; ``values`` is then exactly ``a * counts``.
    """

    values: np.ndarray
    a: float
    spec_id: str
    seed: int
    counts: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class PmfTable:
    a: float
    p: np.ndarray
    underflow: bool = False

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.p)


@dataclass(frozen=True)
class RejectionSample:
    """Accepted draws of a rejection sampler and the proposals it consumed."""

    values: np.ndarray
    proposals: int

    @property
    def acceptance_rate(self) -> float:
        return self.values.size / self.proposals if self.proposals else math.nan


# ---------------------------------------------------------------------------
# exact lattice pmf and inverse transform


def pmf_recursive(dm: DiscretizedMeasure, k_max: int) -> PmfTable:
    """Lattice pmf ``p_0 .. p_{k_max}`` of ``Y_a / a``.

    Weights beyond the table of ``dm`` are treated as zero, which perturbs
    the result by at most ``dm.tail_mass``.  The table stops early, with
    ``underflow`` set, at the first entry past the mode below 1e-300.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if dm.ell_plus == 0.0 or dm.truncation_K == 0:
        p = np.zeros(k_max + 1)
        p[0] = 1.0
        return PmfTable(dm.a, p)
    m = np.arange(1, dm.truncation_K + 1)
    b = np.exp(dm.log_ell - special.gammaln(m))
    p, n_valid, under = kernels().pmf_recursion(b, float(dm.ell_plus), int(k_max), UNDERFLOW_FLOOR)
    return PmfTable(dm.a, np.asarray(p[:n_valid]), bool(under))


def sample_inverse(dm: DiscretizedMeasure, n: int, rng, spec_id: str = "") -> SampleBatch:
    """Inverse transform on the exact lattice pmf: ``a min{m : P_m > U}``."""
    src = as_source(rng)
    u = src.spawn(0).uniforms(n)
    umax = float(u.max()) if n else 0.0
    k_max = max(16, int(4 * dm.ell_plus) + 16)
    while True:
        tab = pmf_recursive(dm, k_max)
        cum = tab.cumulative
        if cum[-1] > umax:
            break
        if tab.underflow or k_max >= 1 << 24:
            raise TableExhaustedError(
                f"cumulative mass {cum[-1]:.17g} never exceeds U={umax:.17g}; use the compound sampler")
        k_max *= 2
    counts = np.searchsorted(cum, u, side="right").astype(np.int64)
    return SampleBatch(dm.a * counts, dm.a, spec_id, src.seed, counts)


def sample_ztpois(lam: float, rng, size: Optional[int] = None):
    """Zero-truncated Poisson variates with parameter ``lam > 0``."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    gen = as_source(rng).generator()
    out = kernels().ztpoisson_batch(gen, np.full(1 if size is None else size, float(lam)))
    return int(out[0]) if size is None else out


# ---------------------------------------------------------------------------
# rejection samplers for the mixing law


def _tempering_args(spec: LevySpec):
    if spec.family is Family.CTS:
        return 0, spec.ell, 0.0, 1.0, np.zeros(2)
    if spec.family is Family.PT:
        lx0, dlx, lg = pt_tempering_table(spec.alpha, spec.ell)
        return 1, 1.0, lx0, dlx, lg
    raise ValueError("rejection samplers need a tempered stable measure")


def _alg5_params(spec: LevySpec, a: float) -> tuple[float, float, float]:
    """``(p, C, zeta)`` with ``g(a x) <= C exp(-zeta x^p)``."""
    if spec.family is Family.CTS:
        return 1.0, 1.0, a / spec.ell
    raise ConditionViolatedError("no exponential domination bound is known for this tempering")


def _kernel_args(spec: LevySpec, a: float, algo: int) -> tuple:
    gkind, ell, lx0, dlx, lg = _tempering_args(spec)
    if algo == 5:
        p, C, zeta = _alg5_params(spec, a)
    else:
        p, C, zeta = 1.0, 1.0, 1.0
    return (4 if algo == 4 else 5, spec.alpha, float(a), gkind, ell, lx0, dlx, lg, p, math.log(C), zeta)


def acceptance_probabilities(spec: LevySpec, a: float) -> dict:
    """Deterministic acceptance probabilities of both mixing-law samplers.

    ``alg4 = K_a alpha (1-alpha) / C_g`` and
    ``alg5 = K_a p zeta^((1-alpha)/p) / (C Gamma((1-alpha)/p))``; ``alg5`` is
    ``None`` when no domination bound is available.
    """
    K_a = discretize.acceptance_constant(spec, a)
    C_g = discretize.tempering_sup(spec)
    out = {"alg4": K_a * spec.alpha * (1.0 - spec.alpha) / C_g, "alg5": None}
    try:
        p, C, zeta = _alg5_params(spec, a)
    except ConditionViolatedError:
        return out
    s = (1.0 - spec.alpha) / p
    out["alg5"] = K_a * p * zeta**s / (C * special.gamma(s))
    return out


def choose_algorithm(spec: LevySpec, a: float) -> int:
    acc = acceptance_probabilities(spec, a)
    return 5 if acc["alg5"] is not None and acc["alg5"] > acc["alg4"] else 4


def _raise_status(status: int) -> None:
    if status == 1:
        raise MaxIterationsError("rejection sampler exceeded its rejection budget")
    if status == 2:
        raise ConditionViolatedError("tempering exceeds its exponential domination bound")


def _sample_m3(spec, a, n, rng, algo, max_rej) -> RejectionSample:
    gen = as_source(rng).generator()
    v, tries, status = kernels().m3_batch(gen, int(n), *_kernel_args(spec, a, algo), int(max_rej))
    _raise_status(status)
    return RejectionSample(np.asarray(v), int(tries))


def sample_m2_alg4(spec: LevySpec, a: float, rng, n: int = 1, max_rej: int = MAX_REJECTIONS) -> RejectionSample:
    """Draws of ``M2(dx) = (1 - e^{-x/a}) M(dx) / l_plus`` via the power-law proposal."""
    r = _sample_m3(spec, a, n, rng, 4, max_rej)
    return RejectionSample(a * r.values, r.proposals)


def sample_m2_alg5(spec: LevySpec, a: float, rng, n: int = 1, max_rej: int = MAX_REJECTIONS) -> RejectionSample:
    """Draws of ``M2`` via the gamma proposal (needs an exponential bound on ``g``)."""
    r = _sample_m3(spec, a, n, rng, 5, max_rej)
    return RejectionSample(a * r.values, r.proposals)


def acceptance_rate_mc(spec: LevySpec, a: float, algo: int, n_proposals: int, rng) -> float:
    """Monte Carlo acceptance rate over exactly ``n_proposals`` proposals."""
    gen = as_source(rng).generator()
    acc, status = kernels().accept_count(gen, int(n_proposals), *_kernel_args(spec, a, algo))
    _raise_status(status)
    return acc / n_proposals


# ---------------------------------------------------------------------------
# compound sampler and its compositions


def _run_chunks(fn, n: int, threads: Optional[int]) -> np.ndarray:
    starts = list(range(0, n, CHUNK))
    jobs = [(i, s, min(CHUNK, n - s)) for i, s in enumerate(starts)]
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(jobs) <= 1:
        parts = [fn(*j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda j: fn(*j), jobs))
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def compound_counts(spec: LevySpec, a: float, n: int, rng, algo="auto", dm: Optional[DiscretizedMeasure] = None,
                    threads: Optional[int] = None, max_rej: int = MAX_REJECTIONS) -> np.ndarray:
    """Integer lattice indices ``Y_a / a`` from the compound Poisson representation."""
    src = as_source(rng)
    if spec.is_zero:
        return np.zeros(n, dtype=np.int64)
    ell_plus = dm.ell_plus if dm is not None else discretize.ell_plus(spec, a)
    if spec.family is Family.POINT_MASS:
        args = (3, 0.5, float(a), 0, 1.0, 0.0, 1.0, np.zeros(2), 1.0, 0.0, 1.0)
        atom = spec.atom_loc / a
    elif spec.is_ts:
        code = choose_algorithm(spec, a) if algo == "auto" else {"alg4": 4, "alg5": 5, 4: 4, 5: 5}[algo]
        args = _kernel_args(spec, a, code)
        atom = 0.0
    else:
        raise ValueError("compound sampling needs a tempered stable or point-mass measure; "
                         "use the inverse-transform sampler")
    k = kernels()

    def work(i, start, m):
        gen = src.spawn(i).generator()
        out, status = k.compound_counts(gen, m, float(ell_plus), *args, float(atom), int(max_rej))
        _raise_status(status)
        return out

    return _run_chunks(work, n, threads)


def split_counts(spec: LevySpec, a: float, n: int, rng, cut: float = SPLIT_CUT, threads: Optional[int] = None,
                 max_rej: int = MAX_REJECTIONS) -> np.ndarray:
    """Lattice indices ``Y_a / a`` with the measure split at ``x = a * cut``.

    Same law as :func:`compound_counts`.  Small jumps enter through their
    lattice rates, one Poisson count per lattice point, so only the few
    jumps above the cut go through rejection sampling.  This pays off when
    ``a`` is so small that ``l_plus`` runs into the thousands.
    """
    src = as_source(rng)
    if spec.is_zero:
        return np.zeros(n, dtype=np.int64)
    small, large = discretize.split_rates(spec, a, cut)
    gkind, ell, lx0, dlx, lg = _tempering_args(spec)
    k = kernels()

    def work(i, start, m):
        out, status = k.split_counts(src.spawn(i).generator(), m, small, float(large), spec.alpha, float(a),
                                     gkind, ell, lx0, dlx, lg, float(cut), int(max_rej))
        _raise_status(status)
        return out

    return _run_chunks(work, n, threads)


def sample_compound(spec: LevySpec, a: float, n: int, rng, algo="auto", dm: Optional[DiscretizedMeasure] = None,
                    threads: Optional[int] = None, spec_id: str = "") -> SampleBatch:
    """Draws of ``Y_a`` as ``a`` times a compound Poisson sum of zero-truncated Poissons.

    ``algo`` selects the mixing-law sampler: ``"alg4"``, ``"alg5"`` or
    ``"auto"`` (the one with the larger acceptance probability).
    """
    src = as_source(rng)
    counts = compound_counts(spec, a, n, src, algo=algo, dm=dm, threads=threads)
    return SampleBatch(a * counts, a, spec_id, src.seed, counts)


def lattice_counts(spec: LevySpec, a: float, n: int, rng, algo="auto", threads: Optional[int] = None) -> np.ndarray:
    """Lattice indices ``Y_a / a`` by the requested route.

    ``"inverse"`` inverts the exact pmf, ``"compound"`` (or ``"alg4"``,
    ``"alg5"``) runs the compound Poisson sampler, and ``"auto"`` picks the
    split sampler for tempered stable measures once ``l_plus`` exceeds
    ``SPLIT_MIN_RATE`` and the compound sampler otherwise.  All routes draw
    from the same law.
    """
    if spec.is_zero:
        return np.zeros(n, dtype=np.int64)
    if algo == "inverse":
        return sample_inverse(discretize.build(spec, a), n, rng).counts
    if algo == "auto":
        if spec.is_ts and discretize.ell_plus(spec, a) > SPLIT_MIN_RATE:
            return split_counts(spec, a, n, rng, threads=threads)
        return compound_counts(spec, a, n, rng, threads=threads)
    if algo == "compound":
        algo = "auto"
    return compound_counts(spec, a, n, rng, algo=algo, threads=threads)


def sample_bilateral(bspec: BilateralSpec, a: float, n: int, rng, nu: NuSpec = UNIT_POISSON, algo="auto",
                     threads: Optional[int] = None, spec_id: str = "") -> SampleBatch:
    """Draws of ``Y_{a,+} - Y_{a,-}`` with the two sides on independent streams."""
    if nu.kind is not NuKind.UNIT_POISSON:
        raise ValueError("bilateral sampling is defined for the unit Poisson jump law")
    src = as_source(rng)
    plus = lattice_counts(bspec.m_plus, a, n, src.spawn(0), algo=algo, threads=threads)
    minus = lattice_counts(bspec.m_minus, a, n, src.spawn(1), algo=algo, threads=threads)
    counts = plus - minus
    return SampleBatch(a * counts, a, spec_id or bspec.to_json(), src.seed, counts)


def sample_nvm(spec: LevySpec, a: float, n: int, rng, nu: NuSpec = RADEMACHER, a_inner: Optional[float] = None,
               threads: Optional[int] = None, spec_id: str = "") -> SampleBatch:
    """Draws of ``sqrt(a / gamma*) Z(X / a)``, approximating ``sqrt(X) W``.

    ``X`` itself is approximated by the lattice sampler at ``a_inner``
    (default ``a**2``); ``Z`` is the symmetric compound Poisson process with
    jumps of ``+1`` and ``-1`` at rate 1/2 each.  Tempered stable ``X`` uses
    the split representation of :func:`split_counts`, point masses the plain
    compound sampler.
    """
    if nu.kind is not NuKind.RADEMACHER:
        raise ValueError("normal variance sampling is implemented for the Rademacher jump law")
    src = as_source(rng)
    a_in = a * a if a_inner is None else float(a_inner)
    inner = split_counts if spec.is_ts else compound_counts
    x = a_in * inner(spec, a_in, n, src.spawn(0), threads=threads).astype(float)
    t = x / a
    k = kernels()

    def work(i, start, m):
        return k.symmetric_poisson_diff(src.spawn(1, i).generator(), t[start : start + m])

    z = _run_chunks(work, n, threads)
    return SampleBatch(math.sqrt(a / nu.gamma_star) * z, a, spec_id, src.seed, None)
