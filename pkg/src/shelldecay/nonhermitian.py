"""Time evolution by the resonant (non-Hermitian) expansion.

Inside the shell ``Psi(r, t) = sum_{+-n} C_n u_n(r) M(y0_n)``, outside
``sum_{+-n} C_n u_n(a) M_ext(y_n)``, where each Moshinsky kernel is half a
Faddeyeva function.  Mirror terms enter as complex conjugate partners and are
added pair by pair in ascending ``n``.

Tail completion
---------------
For ``|kappa_n| sqrt(t) >> 1`` each kernel behaves like
``-e^{i pi/4} / (2 sqrt(pi t) kappa_n)``.  The sum rule
``sum_{+-n} C_n u_n / kappa_n = 0`` then gives the omitted tail in closed form:
``+ e^{i pi/4} S_N / (2 sqrt(pi t))`` with ``S_N`` the retained partial sum.
Without it, truncation leaves a spurious ``t**(-1/2)`` term that swamps the
``t**(-3/2)`` amplitude at long times.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _jit
from .errors import DomainError, OverflowUnrepresentable
from .resonant import mode_value
from .special import EIGHTH_TURN, faddeyeva_array, faddeyeva_scalar

__all__ = [
    "WaveSample",
    "LongTimeSample",
    "psi_resonant",
    "psi_resonant_batch",
    "psi_longtime",
    "survival_density_series",
]

ETA = 1.0 / math.sqrt(4.0 * math.pi)
# e^{i pi/4} / (2 sqrt(pi))
_TAIL_FACTOR = complex(math.sqrt(0.5), math.sqrt(0.5)) / (2.0 * math.sqrt(math.pi))
# completion needs |kappa_N| sqrt(t) at least this large
TAIL_ONSET = 3.0
_TAIL_DRIFT = 0.1


@dataclass(frozen=True)
class WaveSample:
    """Wave function value at one ``(r, t)`` with provenance.

    Attributes
    ----------
    r, t : float
    psi : complex
    method : str
        ``"resonant"``, ``"hermitian"`` or ``"asymptotic"``.
    truncation : int or None
        Number of pole pairs used (resonant methods).
    tolerance : float or None
        Quadrature tolerance (Hermitian method).
    error_estimate : float
        Estimated absolute error of ``psi``.
    error : str or None
        Failure message when the sample could not be computed.
    """

    r: float
    t: float
    psi: complex
    method: str
    truncation: int | None = None
    tolerance: float | None = None
    error_estimate: float = 0.0
    error: str | None = None

    def __post_init__(self):
        if self.r < 0 or self.t < 0:
            raise DomainError("WaveSample requires r >= 0 and t >= 0")

    @property
    def density(self) -> float:
        return abs(self.psi) ** 2


@dataclass(frozen=True)
class LongTimeSample:
    """Two-term long-time form and its parts.

    ``psi = exponential + power_law``; ``exponential`` is the sum of decaying
    pole terms and ``power_law`` the ``t**(-3/2)`` contribution.
    """

    sample: WaveSample
    exponential: complex
    power_law: complex

    @property
    def psi(self) -> complex:
        return self.sample.psi

    @property
    def density(self) -> float:
        return self.sample.density


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------


@_jit.njit
def _resonant_kernel(kappa, coef, ts, offset, tail, psi, err, status):
    n_modes = kappa.size
    for j in range(ts.size):
        st = math.sqrt(ts[j])
        shift = offset / (2.0 * st) if offset != 0.0 else 0.0
        total = 0j
        s_sum = 0j
        last = 0j
        last_s = 0j
        status[j] = 0
        for n in range(n_modes):
            k = kappa[n]
            c = coef[n]
            w1, s1 = faddeyeva_scalar(1j * (EIGHTH_TURN * (shift - k * st)))
            w2, s2 = faddeyeva_scalar(1j * (EIGHTH_TURN * (shift + k.conjugate() * st)))
            if s1 != 0 or s2 != 0:
                status[j] = n + 1
                break
            last = 0.5 * (c * w1 + c.conjugate() * w2)
            total += last
            last_s = 2j * (c / k).imag
            s_sum += last_s
        if tail[j]:
            total += _TAIL_FACTOR * s_sum / st
            last += _TAIL_FACTOR * last_s / st
        psi[j] = total
        err[j] = abs(last)


def _resonant_numpy(kappa, coef, ts, offset, tail):
    st = np.sqrt(ts)[None, :]
    shift = 0.0 if offset == 0.0 else offset / (2.0 * st)
    k = kappa[:, None]
    z1 = 1j * (EIGHTH_TURN * (shift - k * st))
    z2 = 1j * (EIGHTH_TURN * (shift + np.conj(k) * st))
    w1, s1 = faddeyeva_array(z1)
    w2, s2 = faddeyeva_array(z2)
    bad = (s1 != 0) | (s2 != 0)
    c = coef[:, None]
    pairs = 0.5 * (c * w1 + np.conj(c) * w2)
    pairs[bad] = 0.0
    s_terms = np.broadcast_to((2j * (coef / kappa).imag)[:, None], pairs.shape)
    st = st[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        completion = np.where(tail, _TAIL_FACTOR / np.where(st > 0, st, 1.0), 0.0)
    psi = np.add.reduce(pairs, axis=0) + completion * np.add.reduce(s_terms, axis=0)
    err = np.abs(pairs[-1] + completion * s_terms[-1])
    status = np.where(bad.any(axis=0), np.argmax(bad, axis=0) + 1, 0)
    return psi, err, status


def _prepare(modes, r, N):
    modes = tuple(modes)
    if not modes:
        raise DomainError("at least one resonant mode is required")
    if any(m.mirrored for m in modes):
        raise DomainError("pass fourth-quadrant modes only; mirrors are generated internally")
    if N is not None:
        if N < 1 or N > len(modes):
            raise DomainError(f"N={N} outside 1..{len(modes)}")
        modes = modes[:N]
    if not (r >= 0.0) or not math.isfinite(r):
        raise DomainError("r must be finite and >= 0")
    a = modes[0].spec.a
    kappa = np.array([m.kappa for m in modes], dtype=np.complex128)
    coef = np.array([m.C * mode_value(m, min(r, a)) for m in modes], dtype=np.complex128)
    offset = max(r - a, 0.0)
    return modes, kappa, coef, offset


def _tail_mask(kappa, ts, offset):
    k_last = abs(kappa[-1])
    st = np.sqrt(ts)
    ok = k_last * st >= TAIL_ONSET
    if offset != 0.0:
        with np.errstate(divide="ignore"):
            drift = np.where(ts > 0, offset / (2.0 * np.where(ts > 0, ts, 1.0)), np.inf)
        ok &= drift <= _TAIL_DRIFT * k_last
    return ok


def psi_resonant_batch(modes, r, ts, N=None, complete_tail=True):
    """Vectorised resonant sum; returns ``(psi, err, status)`` arrays.

    ``status[j] = n > 0`` flags an overflow in the ``n``-th pair at ``ts[j]``.
    No validation of ``ts`` beyond finiteness and sign.
    """
    modes, kappa, coef, offset = _prepare(modes, r, N)
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    if np.any(ts < 0) or not np.all(np.isfinite(ts)):
        raise DomainError("times must be finite and >= 0")
    if offset > 0.0 and np.any(ts <= 0.0):
        raise DomainError("t must be > 0 outside the shell")
    tail = _tail_mask(kappa, ts, offset) if complete_tail else np.zeros(ts.shape, dtype=bool)
    if _jit.use_numba():
        psi = np.empty(ts.shape, dtype=np.complex128)
        err = np.empty(ts.shape, dtype=np.float64)
        status = np.empty(ts.shape, dtype=np.int64)
        _resonant_kernel(kappa, coef, ts, offset, tail, psi, err, status)
    else:
        psi, err, status = _resonant_numpy(kappa, coef, ts, offset, tail)
    if offset > 0.0:
        phase = np.exp(1j * (offset * offset / (4.0 * ts)))
        psi = psi * phase
    return psi, err, status


def psi_resonant(modes, r: float, t: float, N: int | None = None, complete_tail: bool = True) -> WaveSample:
    """Resonant expansion of ``Psi(r, t)``.

    Parameters
    ----------
    modes : sequence of ResonantMode
        Fourth-quadrant modes ``n = 1, 2, ...``; partners are implicit.
    r : float
        Radius; ``t > 0`` is required for ``r > a``.
    t : float
        Time, ``t >= 0``.
    N : int, optional
        Number of pole pairs (default: all modes given).
    complete_tail : bool
        Add the closed-form remainder of the sum (see module notes).

    Returns
    -------
    WaveSample
        ``error_estimate`` is the change caused by the last pair.

    Raises
    ------
    OverflowUnrepresentable
        With the offending pair index in the message.
    """
    psi, err, status = psi_resonant_batch(modes, r, np.array([float(t)]), N, complete_tail)
    if status[0]:
        raise OverflowUnrepresentable(f"Moshinsky kernel overflows for pair n={int(status[0])} at t={t}")
    n_used = len(modes) if N is None else N
    return WaveSample(float(r), float(t), complex(psi[0]), "resonant", n_used, None, float(err[0]))


def survival_density_series(modes, r: float, t_grid, N: int | None = None, complete_tail: bool = True):
    """Resonant samples on a strictly increasing grid of positive times.

    The modes are shared across the grid; a failing sample carries its
    message in ``WaveSample.error`` (with ``psi = nan``) instead of aborting
    the series.

    Raises
    ------
    DomainError
        If the grid is empty, not strictly increasing, or contains ``t <= 0``.
    """
    ts = np.asarray(t_grid, dtype=np.float64).reshape(-1)
    if ts.size == 0:
        raise DomainError("empty time grid")
    if np.any(ts <= 0.0) or not np.all(np.isfinite(ts)):
        raise DomainError("all grid times must be finite and > 0")
    if np.any(np.diff(ts) <= 0.0):
        raise DomainError("time grid must be strictly increasing")
    psi, err, status = psi_resonant_batch(modes, r, ts, N, complete_tail)
    n_used = len(modes) if N is None else N
    out = []
    for t, p, e, s in zip(ts, psi, err, status):
        if s:
            out.append(
                WaveSample(float(r), float(t), complex("nan"), "resonant", n_used, None, math.inf,
                           f"overflow in pair n={int(s)}")
            )
        else:
            out.append(WaveSample(float(r), float(t), complex(p), "resonant", n_used, None, float(e)))
    return out


def psi_longtime(modes, r: float, t: float, N: int | None = None) -> LongTimeSample:
    """Long-time form: decaying pole terms plus the ``t**(-3/2)`` term.

    For ``r <= a``::

        sum_{n>=1} C_n u_n(r) exp(-i kappa_n**2 t)
            + eta e^{-3i pi/4} Im(sum_{n>=1} C_n u_n(r)/kappa_n**3) t**(-3/2)

    with ``eta = (4 pi)**(-1/2)``.  For ``r > a`` the pole terms use the
    exterior states and the power law becomes
    ``eta e^{-3i pi/4} e^{i d**2/4t} [d Re(S2) + Im(S3)] t**(-3/2)`` with
    ``d = r - a`` and ``Sp = sum C_n u_n(a)/kappa_n**p``.

    Raises
    ------
    DomainError
        If ``t <= 0``.
    """
    if not (t > 0.0) or not math.isfinite(t):
        raise DomainError("psi_longtime requires finite t > 0")
    modes, kappa, coef, offset = _prepare(modes, r, N)
    decay = np.exp(-1j * kappa * kappa * t)
    if offset == 0.0:
        exponential = complex(np.sum(coef * decay))
        amplitude = np.sum(coef / kappa**3).imag
        power = ETA * cmath.exp(-0.75j * math.pi) * amplitude * t**-1.5
    else:
        exponential = complex(np.sum(coef * np.exp(1j * kappa * offset) * decay))
        amplitude = offset * np.sum(coef / kappa**2).real + np.sum(coef / kappa**3).imag
        power = (
            ETA * cmath.exp(-0.75j * math.pi) * cmath.exp(1j * offset * offset / (4.0 * t)) * amplitude * t**-1.5
        )
    sample = WaveSample(float(r), float(t), exponential + power, "asymptotic", len(modes), None, 0.0)
    return LongTimeSample(sample, exponential, complex(power))
