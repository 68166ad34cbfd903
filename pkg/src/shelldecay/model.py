"""Closed-form quantities of the delta-shell model ``V(r) = lam * delta(r - a)``.

Units are hbar = 2m = 1, so energies are ``k**2``.  The initial state is the
ground state of an infinite box of radius ``a``.

Two Jost-function conventions appear:

* the *entire* form ``2ik + lam (exp(2ika) - 1)``, whose nonzero zeros are
  the resonance poles and which is used for root finding;
* the *normalised* form ``1 + (lam/k) sin(ka) exp(ika)``, which tends to 1
  for a free particle and enters the continuum wave functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "PotentialSpec",
    "initial_state_value",
    "box_state_value",
    "jost_entire",
    "jost_entire_derivative",
    "jost_normalized",
    "jost_minus",
    "s_matrix",
    "continuum_wavefunction",
    "box_overlap",
    "overlap_continuum",
]

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_SINC_WINDOW = 1e-6


@dataclass(frozen=True)
class PotentialSpec:
    """Delta-shell intensity ``lam`` (> 0) and radius ``a`` (> 0).

    Only repulsive shells are accepted, which guarantees the absence of
    bound states.
    """

    lam: float
    a: float = 1.0

    def __post_init__(self):
        for name in ("lam", "a"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or isinstance(value, bool):
                raise DomainError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value) or value <= 0.0:
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, float(value))

    @property
    def box_momentum(self) -> float:
        """Momentum ``pi/a`` of the initial box state."""
        return math.pi / self.a

    @property
    def opacity(self) -> float:
        """Dimensionless strength ``lam * a``."""
        return self.lam * self.a


def _real_array(x, name):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _maybe_scalar(out):
    if np.ndim(out) == 0:
        out = out[()]
        return complex(out) if np.iscomplexobj(out) else float(out)
    return out


def box_state_value(spec: PotentialSpec, r, m: int = 1):
    """``sqrt(2/a) sin(m pi r / a)`` inside the box, zero outside."""
    r = _real_array(r, "r")
    if np.any(r < 0.0):
        raise DomainError("r must be >= 0")
    a = spec.a
    val = math.sqrt(2.0 / a) * np.sin(m * math.pi * r / a)
    return _maybe_scalar(np.where(r <= a, val, 0.0))


def initial_state_value(spec: PotentialSpec, r):
    """Initial wave function ``Psi(r, 0)``: the infinite-box ground state.

    Examples
    --------
    >>> initial_state_value(PotentialSpec(12.0), 0.5)
    1.4142135623730951
    """
    return box_state_value(spec, r, 1)


def _expm1_over(z):
    """``expm1(z)/z`` for complex ``z`` (limit 1 at the origin)."""
    z = np.asarray(z, dtype=np.complex128)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    big = np.expm1(safe) / safe
    series = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    return np.where(small, series, big)


def jost_entire(spec: PotentialSpec, k):
    """Entire Jost function ``2ik + lam (exp(2ika) - 1)``; vanishes at ``k = 0``."""
    k = np.asarray(k, dtype=np.complex128)
    return _maybe_scalar(2j * k + spec.lam * np.expm1(2j * k * spec.a))


def jost_entire_derivative(spec: PotentialSpec, k):
    """``d/dk`` of :func:`jost_entire`: ``2i + 2ia lam exp(2ika)``."""
    k = np.asarray(k, dtype=np.complex128)
    return _maybe_scalar(2j + 2j * spec.a * spec.lam * np.exp(2j * k * spec.a))


def jost_regular(spec: PotentialSpec, k):
    """Normalised Jost function continued through ``k = 0`` (value ``1 + lam a``)."""
    k = np.asarray(k, dtype=np.complex128)
    return _maybe_scalar(1.0 + spec.opacity * _expm1_over(2j * k * spec.a))


def jost_normalized(spec: PotentialSpec, k):
    """Normalised Jost function ``J+(k) = 1 + (lam/k) sin(ka) exp(ika)``.

    Equals ``jost_entire(k) / (2ik)`` and tends to 1 as ``lam -> 0``.

    Raises
    ------
    DomainError
        At ``k = 0``, where only the entire form is defined.
    """
    k = np.asarray(k, dtype=np.complex128)
    if np.any(k == 0):
        raise DomainError("jost_normalized is undefined at k = 0")
    return jost_regular(spec, k)


def jost_minus(spec: PotentialSpec, k):
    """``J-(k) = 1 + (lam/k) sin(ka) exp(-ika)``; equals ``conj(J+(k))`` for real k."""
    k = np.asarray(k, dtype=np.complex128)
    return _maybe_scalar(1.0 + spec.opacity * _expm1_over(-2j * k * spec.a))


def _positive_k(k):
    k = _real_array(k, "k")
    if np.any(k <= 0.0):
        raise DomainError("k must be > 0")
    return k


def s_matrix(spec: PotentialSpec, k):
    """S-matrix ``J-(k)/J+(k)`` for real ``k > 0``; unimodular."""
    k = _positive_k(k)
    jp = np.asarray(jost_regular(spec, k))
    return _maybe_scalar(np.conj(jp) / jp)


def continuum_wavefunction(spec: PotentialSpec, k, r):
    """Scattering state ``psi+(k, r)`` for real ``k > 0`` and ``r >= 0``.

    Inside the shell ``sqrt(2/pi) sin(kr)/J+(k)``; outside
    ``sqrt(2/pi) (i/2) [exp(-ikr) - S(k) exp(ikr)]``.  Arrays broadcast.
    """
    k = _positive_k(k)
    r = _real_array(r, "r")
    if np.any(r < 0.0):
        raise DomainError("r must be >= 0")
    k, r = np.broadcast_arrays(k, r)
    jp = np.asarray(jost_regular(spec, k))
    inner = SQRT_2_OVER_PI * np.sin(k * r) / jp
    s = np.conj(jp) / jp
    outer = SQRT_2_OVER_PI * 0.5j * (np.exp(-1j * k * r) - s * np.exp(1j * k * r))
    return _maybe_scalar(np.where(r <= spec.a, inner, outer))


def _sinc(x):
    """``sin(x)/x`` with a series inside ``|x| < 1e-6`` (complex-safe)."""
    x = np.asarray(x, dtype=np.complex128 if np.iscomplexobj(x) else np.float64)
    small = np.abs(x) < _SINC_WINDOW
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)


def box_overlap(spec: PotentialSpec, k, m: int = 1):
    """``int_0^a sin(kr) sin(q r) dr`` with ``q = m pi/a``, for real or complex ``k``.

    Written as ``q a sinc((k - q) a) / (k + q)``, which is the closed form
    ``(-1)**(m+1) q sin(ka)/(q**2 - k**2)`` with the removable singularity at
    ``k = q`` resolved analytically (limit ``a/2``).
    """
    q = m * math.pi / spec.a
    k = np.asarray(k)
    return _maybe_scalar(q * spec.a * _sinc((k - q) * spec.a) / (k + q))


def overlap_continuum(spec: PotentialSpec, k, m: int = 1):
    """Expansion coefficient ``C(k) = int psi+*(k, r) Psi(r, 0) dr``.

    ``C(k) = sqrt(2/pi) sqrt(2/a) I(k) / J-(k)`` for real ``k > 0``, with
    ``I`` from :func:`box_overlap`.  ``m`` selects the box state used as the
    initial state (``m = 1`` is the physical one).
    """
    k = _positive_k(k)
    return _maybe_scalar(
        SQRT_2_OVER_PI
        * math.sqrt(2.0 / spec.a)
        * np.asarray(box_overlap(spec, k, m))
        / np.asarray(jost_minus(spec, k))
    )
