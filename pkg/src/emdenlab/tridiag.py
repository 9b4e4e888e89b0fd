"""Deterministic eigenvalue tools for symmetric tridiagonal pencils.

Implements the spectral machinery the stability assembly needs, with no
dependency on external eigensolvers: inertia counts by LDL^T pivots
(Sturm sequences), selected eigenvalues by bisection, and eigenvectors by
inverse iteration with a partial-pivoting tridiagonal solve.  All
routines are pure functions of their inputs, so repeated calls are
bit-reproducible.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericalError

_MAX_BISECT = 200


def _pivmin(e: np.ndarray) -> float:
    emax = float(np.max(e * e)) if e.size else 0.0
    return np.finfo(float).tiny * max(1.0, emax)


def count_below(d: np.ndarray, e: np.ndarray, shifts) -> np.ndarray | int:
    """Number of eigenvalues of tridiag(d, e) strictly below each shift.

    Vectorized over shifts: one sweep of the LDL^T pivot recurrence per
    matrix row, array arithmetic across all shifts at once.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    scalar = np.isscalar(shifts) or np.ndim(shifts) == 0
    x = np.atleast_1d(np.asarray(shifts, dtype=float))
    piv = _pivmin(e)
    dx = d[:, None] - x[None, :]
    e2 = e * e
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        q = dx[0]
        count = (q < 0.0).astype(np.int64)
        for i in range(1, d.size):
            # copysign floors |q| at the pivot minimum (exact zeros go positive)
            q = dx[i] - e2[i - 1] / np.copysign(np.maximum(np.abs(q), piv), q)
            count += q < 0.0
    return int(count[0]) if scalar else count


def spectrum_bounds(d: np.ndarray, e: np.ndarray) -> tuple[float, float]:
    """Gershgorin interval certainly containing all eigenvalues."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    radius = np.zeros_like(d)
    if e.size:
        radius[:-1] += np.abs(e)
        radius[1:] += np.abs(e)
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    span = max(hi - lo, 1.0)
    return lo - 1e-12 * span, hi + 1e-12 * span


def smallest_eigenvalues(d: np.ndarray, e: np.ndarray, k: int) -> np.ndarray:
    """The k smallest eigenvalues of tridiag(d, e), ascending.

    Bisection on all k indices simultaneously; each iteration costs one
    vectorized Sturm sweep.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.size
    if not 1 <= k <= n:
        raise NumericalError(f"cannot extract {k} eigenvalues from order {n}")
    glo, ghi = spectrum_bounds(d, e)
    lo = np.full(k, glo)
    hi = np.full(k, ghi)
    idx = np.arange(k)
    for _ in range(_MAX_BISECT):
        # Relative width target with a ULP floor, both tracking the current
        # bracket, so neither huge initial bounds nor tiny eigenvalues stall
        # the stop test.
        mag = np.maximum(np.abs(lo), np.abs(hi))
        width_tol = np.maximum(1e-13 * mag, 4.0 * np.spacing(mag))
        if np.all(hi - lo <= width_tol):
            break
        mid = 0.5 * (lo + hi)
        counts = count_below(d, e, mid)
        above = counts > idx
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    else:
        raise NumericalError("eigenvalue bisection did not converge")
    return 0.5 * (lo + hi)


def count_below_pencil(
    ad: np.ndarray,
    ae: np.ndarray,
    md: np.ndarray,
    me: np.ndarray,
    shift: float,
) -> int:
    """Eigenvalues of the pencil (A, M) strictly below shift, M tridiagonal SPD.

    Counts negative LDL^T pivots of A - shift*M (Sylvester inertia).
    """
    n = ad.size
    piv = _pivmin(np.abs(ae) + abs(shift) * np.abs(me) if ae.size else np.zeros(0))
    q = ad[0] - shift * md[0]
    count = 1 if q < 0.0 else 0
    for i in range(1, n):
        if abs(q) < piv:
            q = -piv if q < 0.0 else piv
        off = ae[i - 1] - shift * me[i - 1]
        q = (ad[i] - shift * md[i]) - off * off / q
        if q < 0.0:
            count += 1
    return count


def min_eigenvalue_pencil(
    ad: np.ndarray,
    ae: np.ndarray,
    md: np.ndarray,
    me: np.ndarray,
) -> float:
    """Smallest eigenvalue of the pencil (A, M), both symmetric tridiagonal.

    M must be strictly diagonally dominant positive definite (true for the
    piecewise-linear mass matrices assembled here).
    """
    ad = np.asarray(ad, dtype=float)
    ae = np.asarray(ae, dtype=float)
    md = np.asarray(md, dtype=float)
    me = np.asarray(me, dtype=float)
    radius = np.zeros_like(md)
    if me.size:
        radius[:-1] += np.abs(me)
        radius[1:] += np.abs(me)
    m_floor = float(np.min(md - radius))
    if m_floor <= 0.0:
        raise NumericalError("mass matrix is not strictly diagonally dominant")
    a_norm = np.zeros_like(ad) + np.abs(ad)
    if ae.size:
        a_norm[:-1] += np.abs(ae)
        a_norm[1:] += np.abs(ae)
    bound = float(np.max(a_norm)) / m_floor
    lo, hi = -bound - 1.0, bound + 1.0
    # Diagonal Rayleigh quotients bound the smallest eigenvalue from above
    # far more tightly than the norm bound on wide-ranging assemblies.
    rayleigh = float(np.min(ad / md))
    hint = rayleigh + max(1e-9 * abs(rayleigh), 1e-12)
    if count_below_pencil(ad, ae, md, me, hint) >= 1:
        hi = hint
    for _ in range(_MAX_BISECT):
        mag = max(abs(lo), abs(hi))
        width_tol = max(1e-13 * mag, 4.0 * math.ulp(mag))
        if hi - lo <= width_tol:
            break
        mid = 0.5 * (lo + hi)
        if count_below_pencil(ad, ae, md, me, mid) >= 1:
            hi = mid
        else:
            lo = mid
    else:
        raise NumericalError("pencil bisection did not converge")
    return 0.5 * (lo + hi)


def _solve_tridiag_pivot(sub, diag, sup, rhs):
    """Solve a tridiagonal system with partial pivoting (one fill diagonal)."""
    n = diag.size
    a = np.array(sub, dtype=float)  # a[i]: row i, column i-1 (a[0] unused)
    d = np.array(diag, dtype=float)
    u = np.array(sup, dtype=float)  # u[i]: row i, column i+1 (u[n-1] unused)
    f = np.zeros(n)  # fill: row i, column i+2
    b = np.array(rhs, dtype=float)
    tiny = np.finfo(float).tiny
    for i in range(n - 1):
        if abs(a[i + 1]) > abs(d[i]):
            d[i], a[i + 1] = a[i + 1], d[i]
            if i + 1 < n:
                u[i], d[i + 1] = d[i + 1], u[i]
            if i + 2 < n:
                f[i], u[i + 1] = u[i + 1], f[i]
            b[i], b[i + 1] = b[i + 1], b[i]
        pivot = d[i] if d[i] != 0.0 else tiny
        m = a[i + 1] / pivot
        d[i + 1] -= m * u[i]
        if i + 2 < n:
            u[i + 1] -= m * f[i]
        b[i + 1] -= m * b[i]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        s = b[i]
        if i + 1 < n:
            s -= u[i] * x[i + 1]
        if i + 2 < n:
            s -= f[i] * x[i + 2]
        pivot = d[i] if d[i] != 0.0 else tiny
        x[i] = s / pivot
    return x


def eigenvector(d: np.ndarray, e: np.ndarray, lam: float, iterations: int = 3) -> np.ndarray:
    """Unit eigenvector of tridiag(d, e) for the eigenvalue nearest lam.

    Inverse iteration from a fixed deterministic start; the sign is
    normalized so the largest-magnitude component is positive.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.size
    sub = np.concatenate(([0.0], e))
    sup = np.concatenate((e, [0.0]))
    rng = np.random.default_rng(12345)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    for _ in range(iterations):
        x = _solve_tridiag_pivot(sub, d - lam, sup, x)
        nrm = np.linalg.norm(x)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise NumericalError("inverse iteration broke down")
        x /= nrm
    peak = int(np.argmax(np.abs(x)))
    if x[peak] < 0.0:
        x = -x
    return x
