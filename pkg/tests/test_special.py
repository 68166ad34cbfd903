from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from shelldecay import DomainError, OverflowUnrepresentable
from shelldecay.special import (
    faddeyeva,
    faddeyeva_array,
    moshinsky_argument,
    moshinsky_external,
    moshinsky_internal,
)

mpmath.mp.dps = 40


def w_oracle(z: complex) -> complex:
    z = mpmath.mpc(z)
    return complex(mpmath.exp(-z * z) * mpmath.erfc(-1j * z))


def test_origin_and_known_values(backend):
    assert faddeyeva(0j) == 1.0
    assert abs(faddeyeva(1.0).real - math.exp(-1.0)) < 1e-15
    # e * erfc(1) on the imaginary axis
    assert abs(faddeyeva(1j) - 0.42758357615580700442) < 1e-15


def test_real_axis_identity(backend):
    x = np.linspace(-30.0, 30.0, 2001)
    w = faddeyeva(x + 0j)
    assert np.max(np.abs(w.real - np.exp(-x * x))) <= 1e-12


@pytest.mark.parametrize("seed", [0, 1])
def test_matches_oracle_all_regions(backend, seed):
    rng = np.random.default_rng(seed)
    radius = 10 ** rng.uniform(-3, math.log10(30.0), 150)
    z = radius * np.exp(1j * rng.uniform(0, 2 * math.pi, 150))
    values, status = faddeyeva_array(z)
    for zi, wi, si in zip(z, values, status):
        if si:
            continue
        ref = w_oracle(zi)
        assert abs(wi - ref) <= 1e-12 * abs(ref), zi


def test_reflection(backend):
    # w(z) + w(-z) = 2 exp(-z**2); where the right side is tiny the sum of two
    # O(0.1) values cancels, so the error is measured on the summand scale
    rng = np.random.default_rng(3)
    z = rng.uniform(-5, 5, 200) + 1j * rng.uniform(0, 5, 200)
    wp, wm = faddeyeva(z), faddeyeva(-z)
    rhs = 2.0 * np.exp(-z * z)
    scale = np.maximum(np.abs(rhs), np.abs(wp) + np.abs(wm))
    assert np.max(np.abs(wp + wm - rhs) / scale) < 1e-10


def test_overflow_raises(backend):
    z = complex(0.0, -30.0)  # |w| ~ 2 exp(900)
    with pytest.raises(OverflowUnrepresentable):
        faddeyeva(z)
    values, status = faddeyeva_array(np.array([z, 1j]))
    assert status[0] and not status[1]


def test_just_below_overflow_is_finite(backend):
    z = complex(0.0, -26.6)  # |w| ~ 2 exp(707.6)
    w = faddeyeva(z)
    assert math.isfinite(abs(w))
    assert abs(w - w_oracle(z)) <= 1e-12 * abs(w)


def test_rejects_non_finite():
    with pytest.raises(DomainError):
        faddeyeva(complex("nan"))


def test_backends_agree():
    from shelldecay._jit import HAVE_NUMBA, use_backend

    if not HAVE_NUMBA:
        pytest.skip("numba not installed")
    rng = np.random.default_rng(11)
    z = (rng.normal(size=500) + 1j * rng.normal(size=500)) * 6
    with use_backend("numba"):
        a, sa = faddeyeva_array(z)
    with use_backend("numpy"):
        b, sb = faddeyeva_array(z)
    ok = (sa == 0) & (sb == 0)
    assert np.array_equal(sa, sb)
    assert np.max(np.abs(a[ok] - b[ok]) / np.abs(b[ok])) < 1e-14


# --- Moshinsky functions -----------------------------------------------------

KAPPA1 = complex(2.88, -0.05)  # generic fourth-quadrant wave number


def moshinsky_oracle(kappa, t, d=0.0):
    """``(i/2pi) int exp(ikd - ik**2 t)/(k - kappa) dk`` on a slightly rotated line.

    The line ``k = s exp(-i theta)`` with ``theta < |arg kappa|`` sweeps no
    pole, and turns the oscillatory Gaussian into a decaying one.
    """
    theta = 0.5 * abs(cmath.phase(kappa))
    rot = cmath.exp(-1j * theta)
    span = math.sqrt(50.0 / (t * math.sin(2 * theta))) + 2 * abs(kappa)

    def f(s):
        k = s * rot
        return cmath.exp(1j * k * d - 1j * k * k * t) / (k - kappa) * rot

    edges = np.linspace(-span, span, 4001)
    total = 0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        re = integrate.quad(lambda s: f(s).real, lo, hi, epsabs=1e-16, epsrel=1e-13)[0]
        im = integrate.quad(lambda s: f(s).imag, lo, hi, epsabs=1e-16, epsrel=1e-13)[0]
        total += complex(re, im)
    return 1j / (2 * math.pi) * total


def test_moshinsky_trivial_limits(backend):
    assert moshinsky_internal(KAPPA1, 0.0) == 0.5
    assert moshinsky_internal(0j, 3.0) == 0.5
    assert moshinsky_external(1.0, 1.0, 0j, 3.0) == 0.5
    assert abs(moshinsky_internal(KAPPA1, 1e-12) - 0.5) < 1e-5


def test_moshinsky_internal_matches_quadrature(backend, poles12, tau12):
    kappa = poles12[0].kappa
    ref = moshinsky_oracle(kappa, tau12)
    assert abs(moshinsky_internal(kappa, tau12) - ref) < 1e-9 * abs(ref)


def test_moshinsky_external_matches_quadrature(backend, poles12, tau12):
    kappa = poles12[0].kappa
    ref = moshinsky_oracle(kappa, tau12, d=1.0)
    assert abs(moshinsky_external(2.0, 1.0, kappa, tau12) - ref) < 1e-9 * abs(ref)


def test_branches_coincide_at_boundary(backend):
    rng = np.random.default_rng(5)
    for _ in range(50):
        kappa = complex(rng.uniform(0.5, 60), -rng.uniform(0.01, 3))
        t = 10 ** rng.uniform(-3, 1)
        assert moshinsky_argument(kappa, t) == moshinsky_argument(kappa, t, 0.0)
        assert moshinsky_external(1.0, 1.0, kappa, t) == moshinsky_internal(kappa, t)


def test_external_domain():
    with pytest.raises(DomainError):
        moshinsky_external(2.0, 1.0, KAPPA1, 0.0)
    with pytest.raises(DomainError):
        moshinsky_external(0.5, 1.0, KAPPA1, 1.0)
    with pytest.raises(DomainError):
        moshinsky_internal(KAPPA1, -1.0)
