"""Hot dense linear-algebra kernels: LU, Hessenberg reduction, real Schur QR.

Each kernel is written once, in loop-plus-slice form that ``numba.njit`` can
compile directly.  By default the jitted variants are bound to the public
names; set ``KRLAB_PURE_NUMPY=1`` in the environment to bind the same source
uncompiled (pure numpy fallback).  ``benchmarks/bench_kernels.py`` times the
two paths against each other.

The fallback relies on the vectorized slice operations, so it stays usable at
desk scale (n of a few hundred); the jitted path is the one the acceptance
timings assume.
"""

from __future__ import annotations

import os

import numpy as np

_EPS = 2.220446049250313e-16


# ---------------------------------------------------------------------------
# LU with partial pivoting
# ---------------------------------------------------------------------------

def _py_lu_factor_inplace(a, piv):
    """Row-pivoted in-place LU; piv[k] is the row swapped into position k.

    Returns the smallest |pivot| seen, so callers can apply their own
    singularity threshold.
    """
    n = a.shape[0]
    minpiv = np.inf
    for k in range(n):
        p = k + np.argmax(np.abs(a[k:, k]))
        piv[k] = p
        if p != k:
            tmp = a[k].copy()
            a[k] = a[p]
            a[p] = tmp
        akk = a[k, k]
        apk = abs(akk)
        if apk < minpiv:
            minpiv = apk
        if akk != 0.0 and k + 1 < n:
            a[k + 1:, k] /= akk
            a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return minpiv


def _py_lu_solve_inplace(lu, piv, b):
    """Solve LU x = P b in place for a matrix of right-hand sides b (n, m)."""
    n = lu.shape[0]
    for k in range(n):
        p = piv[k]
        if p != k:
            tmp = b[k].copy()
            b[k] = b[p]
            b[p] = tmp
    for k in range(n - 1):
        b[k + 1:, :] -= np.outer(lu[k + 1:, k], b[k, :])
    for k in range(n - 1, -1, -1):
        if k + 1 < n:
            b[k, :] -= lu[k, k + 1:] @ b[k + 1:, :]
        b[k, :] /= lu[k, k]


# ---------------------------------------------------------------------------
# Hessenberg reduction
# ---------------------------------------------------------------------------

def _py_hessenberg_inplace(a, q):
    """Householder reduction to upper Hessenberg form; a = q @ h @ q.T."""
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        xnorm = np.sqrt(np.sum(x * x))
        if xnorm == 0.0:
            continue
        alpha = -xnorm if x[0] >= 0.0 else xnorm
        v = x
        v[0] -= alpha
        vnorm2 = np.sum(v * v)
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        w = v @ a[k + 1:, k:]
        a[k + 1:, k:] -= beta * np.outer(v, w)
        w2 = a[:, k + 1:] @ v
        a[:, k + 1:] -= beta * np.outer(w2, v)
        w3 = q[:, k + 1:] @ v
        q[:, k + 1:] -= beta * np.outer(w3, v)
        a[k + 1, k] = alpha
        a[k + 2:, k] = 0.0


# ---------------------------------------------------------------------------
# Real Schur form via Francis double-shift QR with deflation
# ---------------------------------------------------------------------------

def _py_split_2x2(h, q, k):
    """Split a trailing 2x2 block at (k, k+1) if its eigenvalues are real.

    Rotates rows/columns k, k+1 of h (and columns of q) so the block becomes
    upper triangular whenever the discriminant is nonnegative.
    """
    a_ = h[k, k]
    b_ = h[k, k + 1]
    c_ = h[k + 1, k]
    d_ = h[k + 1, k + 1]
    half = 0.5 * (a_ - d_)
    disc = half * half + b_ * c_
    if disc < 0.0:
        return
    m = 0.5 * (a_ + d_)
    sq = np.sqrt(disc)
    lam = m + sq if half >= 0.0 else m - sq
    w0 = lam - d_
    w1 = c_
    r = np.hypot(w0, w1)
    if r == 0.0:
        return
    cr = w0 / r
    sr = w1 / r
    rk = h[k, k:].copy()
    rk1 = h[k + 1, k:].copy()
    h[k, k:] = cr * rk + sr * rk1
    h[k + 1, k:] = -sr * rk + cr * rk1
    ck = h[:k + 2, k].copy()
    ck1 = h[:k + 2, k + 1].copy()
    h[:k + 2, k] = cr * ck + sr * ck1
    h[:k + 2, k + 1] = -sr * ck + cr * ck1
    qk = q[:, k].copy()
    qk1 = q[:, k + 1].copy()
    q[:, k] = cr * qk + sr * qk1
    q[:, k + 1] = -sr * qk + cr * qk1
    h[k + 1, k] = 0.0


def _py_real_schur_inplace(h, q, max_sweeps):
    """Francis double-shift QR on an upper Hessenberg matrix, in place.

    On return h is quasi-triangular (real Schur form, 2x2 blocks only for
    complex conjugate pairs) and q accumulates the orthogonal similarity.
    Returns the number of sweeps used, or -1 on failure to converge.
    """
    n = h.shape[0]
    hnorm = np.sum(np.abs(h))
    if hnorm == 0.0 or n < 2:
        return 0
    ihi = n - 1
    its = 0
    total = 0
    while ihi > 0:
        # scan for a negligible subdiagonal entry above the active block
        ilo = ihi
        while ilo > 0:
            s = abs(h[ilo - 1, ilo - 1]) + abs(h[ilo, ilo])
            if s == 0.0:
                s = hnorm
            if abs(h[ilo, ilo - 1]) <= _EPS * s:
                h[ilo, ilo - 1] = 0.0
                break
            ilo -= 1
        if ilo == ihi:
            ihi -= 1
            its = 0
            continue
        if ilo == ihi - 1:
            _ks_split_2x2(h, q, ilo)
            ihi -= 2
            its = 0
            continue

        total += 1
        its += 1
        if total > max_sweeps:
            return -1

        if its % 10 == 0:
            # exceptional shift to break stagnation
            sh = abs(h[ihi, ihi - 1]) + abs(h[ihi - 1, ihi - 2])
            ptr = 1.5 * sh
            qdet = -0.4375 * sh * sh
        else:
            ptr = h[ihi - 1, ihi - 1] + h[ihi, ihi]
            qdet = (h[ihi - 1, ihi - 1] * h[ihi, ihi]
                    - h[ihi, ihi - 1] * h[ihi - 1, ihi])

        # first column of (H - aI)(H - bI) e1 on the active block
        x = (h[ilo, ilo] * h[ilo, ilo] + h[ilo, ilo + 1] * h[ilo + 1, ilo]
             - ptr * h[ilo, ilo] + qdet)
        y = h[ilo + 1, ilo] * (h[ilo, ilo] + h[ilo + 1, ilo + 1] - ptr)
        z = h[ilo + 1, ilo] * h[ilo + 2, ilo + 1]

        for k in range(ilo, ihi - 1):
            # Householder reflector zeroing (y, z) below x
            sa = abs(x) + abs(y) + abs(z)
            if sa != 0.0:
                xs = x / sa
                ys = y / sa
                zs = z / sa
                vn = np.sqrt(xs * xs + ys * ys + zs * zs)
                alpha = -vn if xs >= 0.0 else vn
                v0 = xs - alpha
                v1 = ys
                v2 = zs
                vn2 = v0 * v0 + v1 * v1 + v2 * v2
                if vn2 != 0.0:
                    beta = 2.0 / vn2
                    c0 = ilo if k == ilo else k - 1
                    w = (v0 * h[k, c0:] + v1 * h[k + 1, c0:]
                         + v2 * h[k + 2, c0:])
                    h[k, c0:] -= (beta * v0) * w
                    h[k + 1, c0:] -= (beta * v1) * w
                    h[k + 2, c0:] -= (beta * v2) * w
                    r1 = min(k + 4, ihi + 1)
                    u = (v0 * h[:r1, k] + v1 * h[:r1, k + 1]
                         + v2 * h[:r1, k + 2])
                    h[:r1, k] -= (beta * v0) * u
                    h[:r1, k + 1] -= (beta * v1) * u
                    h[:r1, k + 2] -= (beta * v2) * u
                    uq = (v0 * q[:, k] + v1 * q[:, k + 1] + v2 * q[:, k + 2])
                    q[:, k] -= (beta * v0) * uq
                    q[:, k + 1] -= (beta * v1) * uq
                    q[:, k + 2] -= (beta * v2) * uq
                    if k > ilo:
                        h[k + 1, k - 1] = 0.0
                        h[k + 2, k - 1] = 0.0
            x = h[k + 1, k]
            y = h[k + 2, k]
            z = h[k + 3, k] if k < ihi - 2 else 0.0

        # final 2-row reflector zeroing h[ihi, ihi-2]
        sa = abs(x) + abs(y)
        if sa != 0.0:
            xs = x / sa
            ys = y / sa
            vn = np.sqrt(xs * xs + ys * ys)
            alpha = -vn if xs >= 0.0 else vn
            v0 = xs - alpha
            v1 = ys
            vn2 = v0 * v0 + v1 * v1
            if vn2 != 0.0:
                beta = 2.0 / vn2
                k = ihi - 1
                c0 = k - 1
                w = v0 * h[k, c0:] + v1 * h[k + 1, c0:]
                h[k, c0:] -= (beta * v0) * w
                h[k + 1, c0:] -= (beta * v1) * w
                u = v0 * h[:ihi + 1, k] + v1 * h[:ihi + 1, k + 1]
                h[:ihi + 1, k] -= (beta * v0) * u
                h[:ihi + 1, k + 1] -= (beta * v1) * u
                uq = v0 * q[:, k] + v1 * q[:, k + 1]
                q[:, k] -= (beta * v0) * uq
                q[:, k + 1] -= (beta * v1) * uq
                h[ihi, ihi - 2] = 0.0
    return total


# ---------------------------------------------------------------------------
# Dispatch: numba-compiled by default, pure numpy behind the env flag
# ---------------------------------------------------------------------------

PURE_NUMPY = os.environ.get("KRLAB_PURE_NUMPY", "0") == "1"
NUMBA_ENABLED = False

if not PURE_NUMPY:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        njit = None
    if njit is not None:
        lu_factor_inplace = njit(cache=True)(_py_lu_factor_inplace)
        lu_solve_inplace = njit(cache=True)(_py_lu_solve_inplace)
        hessenberg_inplace = njit(cache=True)(_py_hessenberg_inplace)
        _ks_split_2x2 = njit(cache=True)(_py_split_2x2)
        real_schur_inplace = njit(cache=True)(_py_real_schur_inplace)
        NUMBA_ENABLED = True

if not NUMBA_ENABLED:
    lu_factor_inplace = _py_lu_factor_inplace
    lu_solve_inplace = _py_lu_solve_inplace
    hessenberg_inplace = _py_hessenberg_inplace
    _ks_split_2x2 = _py_split_2x2
    real_schur_inplace = _py_real_schur_inplace


def warmup():
    """Trigger JIT compilation on tiny inputs (no-op on the numpy path)."""
    a = np.array([[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.5, 0.0, 1.0]])
    lu = a.copy()
    piv = np.zeros(3, dtype=np.int64)
    lu_factor_inplace(lu, piv)
    b = np.ones((3, 1))
    lu_solve_inplace(lu, piv, b)
    h = a.copy()
    q = np.eye(3)
    hessenberg_inplace(h, q)
    real_schur_inplace(h, q, 150)
