"""Pure-numpy kernels with the same signatures as the compiled ones.

Rejection loops run on whole batches of proposals.  Poisson variates come
from ``Generator.poisson`` and zero-truncated ones from the first-arrival
construction: given at least one event of a unit-rate process on
``[0, lam]``, the first arrival ``t`` is a truncated exponential and the
remaining count is ``Pois(lam - t)``.  Streams therefore differ from the
compiled backend for the same seed, while distributions agree.
"""
from __future__ import annotations

import math

import numpy as np

NAME = "numpy"

OK, MAX_ITER, CONDITION = 0, 1, 2

_BLOCK = 1 << 16


def poisson_batch(gen, lam, n):
    return gen.poisson(lam, n).astype(np.int64)


def ztpoisson_batch(gen, lam):
    lam = np.asarray(lam, dtype=float)
    u = gen.random(lam.size)
    t = -np.log1p(u * np.expm1(-lam))
    rest = gen.poisson(np.maximum(lam - t, 0.0))
    return (1 + rest).astype(np.int64)


def _log_tempering(y, gkind, ell, lx0, dlx, lg):
    if gkind == 0:
        return -y / ell
    n = lg.size
    with np.errstate(divide="ignore"):
        t = (np.log(y) - lx0) / dlx
    t = np.where(y > 0, t, -1.0)
    inside = np.interp(t, np.arange(n), lg, left=0.0)
    slope = lg[n - 1] - lg[n - 2]
    return np.where(t >= n - 1, lg[n - 1] + slope * (t - (n - 1)), inside)


def _propose(gen, m, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta):
    """Proposals and their acceptance ratios; a ratio above 1 flags a bad bound."""
    if algo == 4:
        v = (1.0 - gen.random(m)) ** (1.0 / (1.0 - alpha)) * (1.0 - gen.random(m)) ** (-1.0 / alpha)
        u = gen.random(m)
        ratio = np.exp(_log_tempering(a * v, gkind, ell, lx0, dlx, lg)) * -np.expm1(-v) / np.minimum(v, 1.0)
        return v, u, ratio, False
    v = (gen.standard_gamma((1.0 - alpha) / p, m) / zeta) ** (1.0 / p)
    u = gen.random(m)
    keep = v > 0
    v, u = v[keep], u[keep]
    dom = np.exp(_log_tempering(a * v, gkind, ell, lx0, dlx, lg) + zeta * v**p - log_c)
    return v, u, dom * -np.expm1(-v) / v, bool(np.any(dom > 1.0 + 1e-12))


def m3_batch(gen, n, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta, max_rej):
    """``n`` draws of the rescaled mixing law plus the number of proposals used."""
    out = np.empty(0)
    tries = 0
    dry = 0
    rate = 0.5
    while out.size < n:
        need = n - out.size
        m = int(min(_BLOCK, max(16, 1.2 * need / rate + 16)))
        v, u, ratio, bad = _propose(gen, m, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta)
        if bad:
            return out, tries + m, CONDITION
        acc = v[u <= ratio][:need]
        tries += m if acc.size < need else int(np.nonzero(u <= ratio)[0][need - 1]) + 1
        rate = max(acc.size / m, 1e-3)
        dry = dry + m if acc.size == 0 else 0
        if dry >= max_rej:
            return out, tries, MAX_ITER
        out = np.concatenate([out, acc])
    return out, tries, OK


def compound_counts(gen, n, ell_plus, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta,
                    atom_lam, max_rej):
    """Lattice counts ``N + Pois(sum_i (lam_i - t_i))``; see the compiled twin."""
    m = gen.poisson(ell_plus, n)
    total = int(m.sum())
    if algo == 3:
        lam = np.full(total, atom_lam)
    else:
        lam, _, status = m3_batch(gen, total, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta,
                                  max_rej)
        if status != OK:
            return np.zeros(n, dtype=np.int64), status
    first = -np.log1p(gen.random(total) * np.expm1(-lam))
    cs = np.concatenate([[0.0], np.cumsum(np.maximum(lam - first, 0.0))])
    idx = np.concatenate([[0], np.cumsum(m)])
    rest = np.maximum(cs[idx[1:]] - cs[idx[:-1]], 0.0)
    return (m + gen.poisson(rest)).astype(np.int64), OK


def symmetric_poisson_diff(gen, t):
    h = 0.5 * np.asarray(t, dtype=float)
    return (gen.poisson(h) - gen.poisson(h)).astype(np.int64)


def pmf_recursion(b, ell_plus, k_max, floor):
    """Lattice pmf by the rescaled recursion; see the compiled twin."""
    q = np.zeros(k_max + 1)
    p = np.zeros(k_max + 1)
    q[0] = 1.0
    log_scale = 0.0
    lp0 = -ell_plus
    peak = lp0
    p[0] = math.exp(lp0) if lp0 > -745.0 else 0.0
    nb = b.size
    log_floor = math.log(floor)
    for k in range(1, k_max + 1):
        lo = max(0, k - nb)
        # b[k-j-1] for j = lo..k-1 runs from b[k-lo-1] down to b[0]
        s = float(np.dot(b[k - lo - 1 :: -1], q[lo:k]))
        q[k] = s / k
        if q[k] > 1e250:
            q[: k + 1] *= 1e-250
            log_scale += 250.0 * math.log(10.0)
        lpk = math.log(q[k]) + log_scale - ell_plus if q[k] > 0.0 else -math.inf
        peak = max(peak, lpk)
        if lpk < log_floor and lpk < peak:
            return p, k, True
        p[k] = math.exp(lpk) if lpk > -745.0 else 0.0
    return p, k_max + 1, False


def accept_count(gen, n_prop, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta):
    """Number of accepted proposals among exactly ``n_prop`` proposals."""
    acc = 0
    for start in range(0, n_prop, _BLOCK):
        m = min(_BLOCK, n_prop - start)
        v, u, ratio, bad = _propose(gen, m, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta)
        if bad:
            return acc, CONDITION
        acc += int(np.count_nonzero(u <= ratio))
    return acc, OK


def split_counts(gen, n, small_rates, rate_large, alpha, a, gkind, ell, lx0, dlx, lg, cut, max_rej):
    """Lattice counts with the measure split at ``x = a * cut``; see the compiled twin."""
    k = np.arange(1, small_rates.size + 1)
    tot = gen.poisson(small_rates[None, :], (n, small_rates.size)) @ k
    m = gen.poisson(rate_large, n)
    total = int(m.sum())
    v = np.empty(0)
    dry = 0
    while v.size < total:
        need = total - v.size
        prop = cut * np.exp(gen.standard_exponential(min(_BLOCK, 2 * need + 16)) / alpha)
        ok = gen.random(prop.size) <= np.exp(_log_tempering(a * prop, gkind, ell, lx0, dlx, lg)) * -np.expm1(-prop)
        dry = dry + prop.size if not ok.any() else 0
        if dry >= max_rej:
            return np.zeros(n, dtype=np.int64), MAX_ITER
        v = np.concatenate([v, prop[ok][:need]])
    first = -np.log1p(gen.random(total) * np.expm1(-v))
    cs = np.concatenate([[0.0], np.cumsum(np.maximum(v - first, 0.0))])
    idx = np.concatenate([[0], np.cumsum(m)])
    rest = np.maximum(cs[idx[1:]] - cs[idx[:-1]], 0.0)
    return (tot + m + gen.poisson(rest)).astype(np.int64), OK
