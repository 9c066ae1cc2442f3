"""Compiled sampling and recursion kernels.

Every function takes a ``numpy.random.Generator`` (numba shares its state)
and reports failures through integer status codes, because exceptions are
costly to raise from compiled loops.  Status codes: 0 ok, 1 rejection loop
exceeded its budget, 2 the exponential-domination condition failed.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

NAME = "numba"

OK, MAX_ITER, CONDITION = 0, 1, 2


@njit(cache=True, nogil=True)
def _poisson(gen, lam):
    if lam <= 0.0:
        return 0
    if lam < 30.0:
        # sequential search inversion
        p = math.exp(-lam)
        cdf = p
        u = gen.random()
        k = 0
        while u > cdf:
            k += 1
            p *= lam / k
            cdf += p
            if p == 0.0 and cdf < u:
                # rounding left a gap above the computable cdf
                u = gen.random()
                p = math.exp(-lam)
                cdf = p
                k = 0
        return k
    # PTRS transformed rejection
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = gen.random() - 0.5
        v = gen.random()
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return int(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                <= -lam + k * loglam - math.lgamma(k + 1.0)):
            return int(k)


@njit(cache=True, nogil=True)
def _ztpoisson(gen, lam):
    if lam < 10.0:
        # conditional inversion started at k = 1
        p = lam / math.expm1(lam) if lam > 0.0 else 1.0
        cdf = p
        u = gen.random()
        k = 1
        while u > cdf:
            k += 1
            p *= lam / k
            cdf += p
            if p == 0.0 and cdf < u:
                u = gen.random()
                p = lam / math.expm1(lam)
                cdf = p
                k = 1
        return k
    while True:
        k = _poisson(gen, lam)
        if k > 0:
            return k


@njit(cache=True, nogil=True)
def poisson_batch(gen, lam, n):
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = _poisson(gen, lam)
    return out


@njit(cache=True, nogil=True)
def ztpoisson_batch(gen, lam):
    out = np.empty(lam.size, dtype=np.int64)
    for i in range(lam.size):
        out[i] = _ztpoisson(gen, lam[i])
    return out


@njit(cache=True, nogil=True)
def _log_tempering(y, gkind, ell, lx0, dlx, lg):
    if gkind == 0:
        return -y / ell
    if y <= 0.0:
        return 0.0
    t = (math.log(y) - lx0) / dlx
    n = lg.size
    if t <= 0.0:
        return 0.0
    if t >= n - 1:
        slope = (lg[n - 1] - lg[n - 2])
        return lg[n - 1] + slope * (t - (n - 1))
    i = int(t)
    f = t - i
    return lg[i] * (1.0 - f) + lg[i + 1] * f


@njit(cache=True, nogil=True)
def _m3_alg4(gen, alpha, a, gkind, ell, lx0, dlx, lg, max_rej):
    e1 = 1.0 / (1.0 - alpha)
    e2 = -1.0 / alpha
    for it in range(max_rej):
        lv = e1 * math.log(1.0 - gen.random()) + e2 * math.log(1.0 - gen.random())
        v = math.exp(lv)
        u = gen.random()
        if gkind == 0:
            lt = -a * v / ell
        else:
            lt = _log_tempering(a * v, gkind, ell, lx0, dlx, lg)
        # phi = g(a v) (1 - e^{-v}) / min(v, 1)
        phi = -math.expm1(-v) * math.exp(lt - (lv if lv < 0.0 else 0.0))
        if u <= phi:
            return v, it + 1
    return -1.0, max_rej


@njit(cache=True, nogil=True)
def _m3_alg5(gen, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta, max_rej):
    shape = (1.0 - alpha) / p
    for it in range(max_rej):
        x = (gen.standard_gamma(shape) / zeta) ** (1.0 / p)
        if x <= 0.0:
            continue
        u = gen.random()
        dom = math.exp(_log_tempering(a * x, gkind, ell, lx0, dlx, lg) + zeta * x**p - log_c)
        if dom > 1.0 + 1e-12:
            return -2.0, it + 1
        if u <= dom * (-math.expm1(-x)) / x:
            return x, it + 1
    return -1.0, max_rej


@njit(cache=True, nogil=True)
def _m3(gen, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta, max_rej):
    if algo == 4:
        return _m3_alg4(gen, alpha, a, gkind, ell, lx0, dlx, lg, max_rej)
    return _m3_alg5(gen, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta, max_rej)


@njit(cache=True, nogil=True)
def m3_batch(gen, n, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta, max_rej):
    """``n`` draws of the rescaled mixing law plus the number of proposals used."""
    out = np.empty(n, dtype=np.float64)
    tries = 0
    for i in range(n):
        v, t = _m3(gen, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta, max_rej)
        tries += t
        if v < 0.0:
            return out[:i], tries, (MAX_ITER if v == -1.0 else CONDITION)
        out[i] = v
    return out, tries, OK


@njit(cache=True, nogil=True)
def compound_counts(gen, n, ell_plus, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta,
                    atom_lam, max_rej):
    """Lattice counts ``sum_{i <= N} W_i`` with ``N ~ Pois(ell_plus)``.

    ``W_i`` is zero-truncated Poisson with a parameter drawn from the
    rescaled mixing law (``algo`` 4 or 5) or fixed at ``atom_lam`` (``algo`` 3).
    Each ``W_i`` is ``1 + Pois(lam_i - t_i)`` with ``t_i`` the first arrival of
    a unit-rate process on ``[0, lam_i]`` given one exists, so the sum needs
    a single Poisson draw: ``N + Pois(sum_i (lam_i - t_i))``.
    """
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        m = _poisson(gen, ell_plus)
        rest = 0.0
        for _ in range(m):
            if algo == 3:
                lam = atom_lam
            else:
                lam, t = _m3(gen, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta, max_rej)
                if lam < 0.0:
                    return out, (MAX_ITER if lam == -1.0 else CONDITION)
            first = -math.log1p(gen.random() * math.expm1(-lam))
            rest += max(lam - first, 0.0)
        out[i] = m + _poisson(gen, rest)
    return out, OK


@njit(cache=True, nogil=True)
def symmetric_poisson_diff(gen, t):
    """``Pois(t/2) - Pois(t/2)`` elementwise: a compound Poisson of fair signs."""
    out = np.empty(t.size, dtype=np.int64)
    for i in range(t.size):
        h = 0.5 * t[i]
        out[i] = _poisson(gen, h) - _poisson(gen, h)
    return out


@njit(cache=True, nogil=True)
def pmf_recursion(b, ell_plus, k_max, floor):
    """Lattice pmf from ``p_k = (1/k) sum_{j<k} b_{k-j} p_j`` with ``b_m = l_m / (m-1)!``.

    Runs on rescaled values so neither ``exp(-ell_plus)`` nor the bulk can
    under- or overflow.  Returns ``(p, n_valid, underflow)``; the table stops
    at the first trailing entry below ``floor``.
    """
    q = np.zeros(k_max + 1)
    p = np.zeros(k_max + 1)
    q[0] = 1.0
    log_scale = 0.0
    lp0 = -ell_plus
    peak = lp0
    p[0] = math.exp(lp0) if lp0 > -745.0 else 0.0
    nb = b.size
    for k in range(1, k_max + 1):
        s = 0.0
        lo = max(0, k - nb)
        for j in range(lo, k):
            s += b[k - j - 1] * q[j]
        q[k] = s / k
        if q[k] > 1e250:
            for j in range(k + 1):
                q[j] *= 1e-250
            log_scale += 250.0 * math.log(10.0)
        lpk = math.log(q[k]) + log_scale - ell_plus if q[k] > 0.0 else -np.inf
        if lpk > peak:
            peak = lpk
        if lpk < math.log(floor) and lpk < peak:
            return p, k, True
        p[k] = math.exp(lpk) if lpk > -745.0 else 0.0
    return p, k_max + 1, False


@njit(cache=True, nogil=True)
def accept_count(gen, n_prop, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta):
    """Number of accepted proposals among exactly ``n_prop`` proposals."""
    acc = 0
    for _ in range(n_prop):
        v, t = _m3(gen, algo, alpha, a, gkind, ell, lx0, dlx, lg, p, log_c, zeta, 1)
        if v == -2.0:
            return acc, CONDITION
        if v >= 0.0:
            acc += 1
    return acc, OK


@njit(cache=True, nogil=True)
def split_counts(gen, n, small_rates, rate_large, alpha, a, gkind, ell, lx0, dlx, lg, cut, max_rej):
    """Lattice counts with the measure split at ``x = a * cut``.

    Jumps below the cut contribute ``sum_k k Pois(small_rates[k-1])``; the
    ``Pois(rate_large)`` jumps above it have mixing parameters drawn from a
    Pareto proposal on ``(cut, inf)`` accepted with ``g(a v) (1 - e^{-v})``.
    """
    out = np.zeros(n, dtype=np.int64)
    inv_alpha = 1.0 / alpha
    for i in range(n):
        tot = 0
        for k in range(small_rates.size):
            tot += (k + 1) * _poisson(gen, small_rates[k])
        m = _poisson(gen, rate_large)
        rest = 0.0
        for _ in range(m):
            it = 0
            while True:
                v = cut * math.exp(-math.log(1.0 - gen.random()) * inv_alpha)
                if gkind == 0:
                    lt = -a * v / ell
                else:
                    lt = _log_tempering(a * v, gkind, ell, lx0, dlx, lg)
                if gen.random() <= math.exp(lt) * -math.expm1(-v):
                    break
                it += 1
                if it >= max_rej:
                    return out, MAX_ITER
            first = -math.log1p(gen.random() * math.expm1(-v))
            rest += max(v - first, 0.0)
        out[i] = tot + m + _poisson(gen, rest)
    return out, OK
