"""Faddeyeva function and the Moshinsky propagation kernels.

The Faddeyeva function ``w(z) = exp(-z**2) erfc(-iz)`` is evaluated in the
upper half-plane by one of three methods chosen by ``|z|``:

* ``|z| < 0.5``: Maclaurin series ``sum (iz)**n / Gamma(n/2 + 1)``;
* ``0.5 <= |z| < 8``: trapezoidal rule for ``(i/pi) int exp(-t**2)/(z - t) dt``
  with step ``h = 0.5`` plus the exact pole correction of the discretised
  integrand (the shifted or unshifted node set is picked so ``z`` never sits
  near a node);
* ``|z| >= 8``: Laplace continued fraction of depth 24.

The lower half-plane follows from ``w(z) = 2 exp(-z**2) - w(-z)``, where
``-z**2`` is formed with error-free products so the large exponent keeps its
low-order bits.  When ``|w|`` cannot be represented,
:class:`~shelldecay.errors.OverflowUnrepresentable` is raised.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from . import _jit
from .errors import DomainError, OverflowUnrepresentable

__all__ = [
    "faddeyeva",
    "moshinsky_internal",
    "moshinsky_external",
    "moshinsky_argument",
]

_INV_SQRT_PI = 0.56418958354775628695
_LOG_MAX = 709.782712893384
_LN2 = 0.69314718055994530942
_SERIES_RADIUS = 0.5
_CF_RADIUS = 8.0
_CF_DEPTH = 24
_STEP = 0.5
_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitter

_SERIES_COEF = np.array([1.0 / math.gamma(0.5 * n + 1.0) for n in range(28)])
_NODES_INT = _STEP * np.arange(-14, 15, dtype=np.float64)
_NODES_HALF = _STEP * (np.arange(-14, 14, dtype=np.float64) + 0.5)
_WEIGHTS_INT = (_STEP / math.pi) * np.exp(-_NODES_INT**2)
_WEIGHTS_HALF = (_STEP / math.pi) * np.exp(-_NODES_HALF**2)

# e^{-i pi/4}
EIGHTH_TURN = complex(math.sqrt(0.5), -math.sqrt(0.5))

_OK = 0
_OVERFLOW = 1


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------


@_jit.njit
def _two_prod(a, b):
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


@_jit.njit
def _w_upper(x, y):
    z = complex(x, y)
    r = math.hypot(x, y)
    if r < _SERIES_RADIUS:
        u = 1j * z
        acc = 0j
        for n in range(_SERIES_COEF.size - 1, -1, -1):
            acc = acc * u + _SERIES_COEF[n]
        return acc
    if r >= _CF_RADIUS:
        v = z
        for k in range(_CF_DEPTH, 0, -1):
            v = z - 0.5 * k / v
        return 1j * _INV_SQRT_PI / v
    frac = (x / _STEP) % 1.0
    s = 0j
    e_period = cmath.exp(2j * math.pi * z / _STEP)
    ez = cmath.exp(-z * z + 2j * math.pi * z / _STEP)
    if 0.25 <= frac <= 0.75:
        for j in range(_NODES_INT.size):
            s += _WEIGHTS_INT[j] / (z - _NODES_INT[j])
        return 1j * s - 2.0 * ez / (1.0 - e_period)
    for j in range(_NODES_HALF.size):
        s += _WEIGHTS_HALF[j] / (z - _NODES_HALF[j])
    return 1j * s + 2.0 * ez / (1.0 + e_period)


@_jit.njit
def _exp_neg_square(x, y):
    """exp(-z**2) for z = x + iy with a double-double exponent."""
    yy, yy_err = _two_prod(y, y)
    xx, xx_err = _two_prod(x, x)
    hi = yy - xx
    # two-sum of yy and -xx
    bb = hi - yy
    lo = (yy - (hi - bb)) + (-xx - bb)
    lo += yy_err - xx_err
    ph, ph_err = _two_prod(-2.0 * x, y)
    mag = math.exp(hi) * (1.0 + lo)
    c = math.cos(ph) - ph_err * math.sin(ph)
    s = math.sin(ph) + ph_err * math.cos(ph)
    return complex(mag * c, mag * s)


@_jit.njit
def faddeyeva_scalar(z):
    """Return ``(w(z), status)``; status 1 flags an unrepresentable value."""
    x = z.real
    y = z.imag
    if y >= 0.0:
        w = _w_upper(x, y)
        if y == 0.0:
            w = complex(math.exp(-x * x), w.imag)
        return w, _OK
    if y * y - x * x + _LN2 > _LOG_MAX:
        return complex(0.0, 0.0), _OVERFLOW
    w = 2.0 * _exp_neg_square(x, y) - _w_upper(-x, -y)
    return w, _OK


@_jit.njit
def _faddeyeva_loop(z, out, status):
    for i in range(z.size):
        w, st = faddeyeva_scalar(z[i])
        out[i] = w
        status[i] = st


# --------------------------------------------------------------------------
# numpy fallback (same algorithm, vectorised by region)
# --------------------------------------------------------------------------


def _two_prod_np(a, b):
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _w_upper_np(z):
    out = np.empty_like(z)
    r = np.abs(z)
    small = r < _SERIES_RADIUS
    large = r >= _CF_RADIUS
    mid = ~(small | large)
    if small.any():
        u = 1j * z[small]
        acc = np.zeros_like(u)
        for c in _SERIES_COEF[::-1]:
            acc = acc * u + c
        out[small] = acc
    if large.any():
        zl = z[large]
        v = zl.copy()
        for k in range(_CF_DEPTH, 0, -1):
            v = zl - 0.5 * k / v
        out[large] = 1j * _INV_SQRT_PI / v
    if mid.any():
        zm = z[mid]
        frac = np.mod(zm.real / _STEP, 1.0)
        centred = (frac >= 0.25) & (frac <= 0.75)
        e_period = np.exp(2j * np.pi * zm / _STEP)
        ez = np.exp(-zm * zm + 2j * np.pi * zm / _STEP)
        res = np.empty_like(zm)
        for mask, nodes, weights, sign in (
            (centred, _NODES_INT, _WEIGHTS_INT, -1.0),
            (~centred, _NODES_HALF, _WEIGHTS_HALF, 1.0),
        ):
            if not mask.any():
                continue
            zz = zm[mask]
            s = np.sum(weights / (zz[:, None] - nodes), axis=1)
            res[mask] = 1j * s + sign * 2.0 * ez[mask] / (1.0 + sign * e_period[mask])
        out[mid] = res
    return out


def _exp_neg_square_np(x, y):
    yy, yy_err = _two_prod_np(y, y)
    xx, xx_err = _two_prod_np(x, x)
    hi = yy - xx
    bb = hi - yy
    lo = (yy - (hi - bb)) + (-xx - bb) + (yy_err - xx_err)
    ph, ph_err = _two_prod_np(-2.0 * x, y)
    mag = np.exp(hi) * (1.0 + lo)
    c = np.cos(ph) - ph_err * np.sin(ph)
    s = np.sin(ph) + ph_err * np.cos(ph)
    return mag * (c + 1j * s)


def _faddeyeva_numpy(z):
    out = np.empty_like(z)
    status = np.zeros(z.shape, dtype=np.int8)
    upper = z.imag >= 0.0
    if upper.any():
        zu = z[upper]
        w = _w_upper_np(zu)
        real = zu.imag == 0.0
        w[real] = np.exp(-zu.real[real] ** 2) + 1j * w.imag[real]
        out[upper] = w
    lower = ~upper
    if lower.any():
        zl = z[lower]
        x, y = zl.real, zl.imag
        over = y * y - x * x + _LN2 > _LOG_MAX
        res = np.zeros_like(zl)
        ok = ~over
        if ok.any():
            res[ok] = 2.0 * _exp_neg_square_np(x[ok], y[ok]) - _w_upper_np(-zl[ok])
        out[lower] = res
        status[lower] = over.astype(np.int8)
    return out, status


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------


def faddeyeva_array(z):
    """Evaluate ``w`` elementwise and return ``(values, status)`` arrays.

    ``status`` is nonzero where the value overflows; such entries of
    ``values`` are meaningless.  This is the non-raising batch entry point
    used by the solvers.
    """
    z = np.ascontiguousarray(z, dtype=np.complex128)
    flat = z.reshape(-1)
    if _jit.use_numba():
        out = np.empty_like(flat)
        status = np.empty(flat.shape, dtype=np.int8)
        _faddeyeva_loop(flat, out, status)
    else:
        out, status = _faddeyeva_numpy(flat)
    return out.reshape(z.shape), status.reshape(z.shape)


def faddeyeva(z):
    """Faddeyeva function ``w(z) = exp(-z**2) erfc(-iz)``.

    Parameters
    ----------
    z : complex or array_like of complex
        Finite argument(s).

    Returns
    -------
    complex or numpy.ndarray
        ``w(z)`` with relative error below 1e-12 wherever it is representable.

    Raises
    ------
    DomainError
        If any argument is NaN or infinite.
    OverflowUnrepresentable
        If ``|w(z)|`` exceeds the double range (deep in the lower half-plane).
    """
    scalar = np.ndim(z) == 0
    arr = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise DomainError("faddeyeva requires finite arguments")
    values, status = faddeyeva_array(arr)
    if status.any():
        bad = arr.reshape(-1)[np.flatnonzero(status.reshape(-1))[0]]
        raise OverflowUnrepresentable(f"|w(z)| overflows double precision at z = {bad!r}")
    return complex(values.reshape(-1)[0]) if scalar else values


def moshinsky_argument(kappa, t, offset=0.0):
    """Argument ``z = i y`` handed to ``w`` by both Moshinsky forms.

    ``y = e^{-i pi/4} [offset / (2 sqrt t) - kappa sqrt t]``; ``offset = r - a``
    outside the shell and zero inside, so the two forms coincide bit for bit
    at ``r = a``.
    """
    st = np.sqrt(t)
    shift = 0.0 if offset == 0.0 else offset / (2.0 * st)
    return 1j * (EIGHTH_TURN * (shift - kappa * st))


def moshinsky_internal(kappa, t):
    """Moshinsky function ``M(y0) = w(i y0) / 2`` with ``y0 = -e^{-i pi/4} kappa sqrt t``.

    Parameters
    ----------
    kappa : complex
        Pole wave number.
    t : float or array_like
        Time(s), ``t >= 0``; ``t = 0`` yields exactly 0.5.
    """
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0) or not np.all(np.isfinite(t)):
        raise DomainError("moshinsky_internal requires finite t >= 0")
    out = 0.5 * faddeyeva(moshinsky_argument(complex(kappa), t))
    return complex(out) if np.ndim(out) == 0 else out


def moshinsky_external(r, a, kappa, t):
    """Exterior propagation kernel of a single pole term.

    Evaluates the defining integral ``(i/2pi) int exp(ik(r-a) - ik**2 t)/(k - kappa) dk``
    over the real line, which completes the square to
    ``exp(i (r-a)**2 / 4t) * w(i y) / 2`` with
    ``y = e^{-i pi/4} ((r - a) - 2 kappa t) / (2 sqrt t)``.

    Parameters
    ----------
    r, a : float
        Radius ``r >= a`` and shell radius ``a > 0``.
    kappa : complex
        Pole wave number.
    t : float or array_like
        Time(s), strictly positive.

    Raises
    ------
    DomainError
        If ``t <= 0`` or ``r < a``.
    """
    t = np.asarray(t, dtype=np.float64)
    if np.any(~(t > 0.0)) or not np.all(np.isfinite(t)):
        raise DomainError("moshinsky_external requires t > 0")
    if not (r >= a):
        raise DomainError(f"moshinsky_external requires r >= a (got r={r}, a={a})")
    d = float(r) - float(a)
    phase = np.exp(1j * (d * d / (4.0 * t))) if d != 0.0 else 1.0
    out = phase * (0.5 * faddeyeva(moshinsky_argument(complex(kappa), t, d)))
    return complex(out) if np.ndim(out) == 0 else out
