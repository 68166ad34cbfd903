"""Time evolution by quadrature over the continuum (Hermitian picture).

``Psi(r, t) = int_0^inf C(k) psi+(k, r) exp(-i k**2 t) dk``.

For ``t > 0`` the integrand is only conditionally convergent along the real
axis (``|C psi+| ~ k**-2`` but the phase spins like ``k**2 t``), so the path
is bent into the lower half-plane once all stationary points have been
passed: ``[0, K]`` on the real axis, straight down to ``K - i delta``, then
along ``Im k = -delta`` where ``exp(-i k**2 t)`` decays like
``exp(-2 x delta t)``.  The depth satisfies ``delta < ln(2K/lam)/(2a)``,
which keeps the strip free of resonance poles (every pole with
``Re kappa >= K`` lies deeper) and bounds ``|J+|`` away from zero.

For ``t = 0`` the real-axis integral is carried to a large ``K`` and the
remainder is added from the two leading terms of the large-``k`` expansion
of the integrand, integrated in closed form with sine and cosine integrals.

Each segment is integrated with vectorised adaptive Gauss-Kronrod (7/15)
panels whose initial edges resolve the local oscillation period.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import sici

from . import _jit
from .errors import DomainError, ToleranceNotMet
from .model import PotentialSpec, box_overlap, box_state_value, jost_minus, jost_regular
from .nonhermitian import WaveSample

__all__ = [
    "QuadratureSpec",
    "psi_continuum",
    "closure_defect",
    "continuum_norm",
    "integrand",
]

_P_SCALE = 2.0 / math.pi

# Gauss-Kronrod 7/15 (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG7 = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_W_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_W_GAUSS = np.zeros(15)
_W_GAUSS[[1, 3, 5, 13, 11, 9]] = np.concatenate([_WG7[:-1], _WG7[:-1]])
_W_GAUSS[7] = _WG7[-1]

_CHUNK = 1 << 16
_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and resolution controls for :func:`psi_continuum`.

    Attributes
    ----------
    abs_tol, rel_tol : float
        Target ``|error| <= max(abs_tol, rel_tol |Psi|)``.
    tail_eps : float
        Integrand envelope at which the deformed path is cut.
    max_panels : int
        Panel budget per segment before :class:`ToleranceNotMet`.
    resolution : float
        Initial panels per local oscillation period (>= 4).
    max_width : float
        Largest initial panel width in units of the shell radius.
    """

    abs_tol: float = 1e-14
    rel_tol: float = 1e-9
    tail_eps: float = 1e-16
    max_panels: int = 400_000
    resolution: float = 4.0
    max_width: float = 0.25

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "tail_eps", "max_width"):
            value = getattr(self, name)
            if not (value > 0.0) or not math.isfinite(value):
                raise DomainError(f"{name} must be finite and > 0")
        if self.resolution < 4.0:
            raise DomainError("resolution must be at least 4 panels per period")
        if self.max_panels < 1:
            raise DomainError("max_panels must be positive")

    def halved(self) -> "QuadratureSpec":
        """Copy with both tolerances halved."""
        return QuadratureSpec(self.abs_tol / 2, self.rel_tol / 2, self.tail_eps / 2,
                              self.max_panels, self.resolution, self.max_width)


# --------------------------------------------------------------------------
# integrand
# --------------------------------------------------------------------------


@_jit.njit
def _expm1_over_nb(z):
    if abs(z) < 0.1:
        acc = 0j
        term = 1.0 + 0j
        for j in range(1, 14):
            acc += term
            term = term * z / (j + 1)
        return acc
    return (cmath.exp(z) - 1.0) / z


@_jit.njit
def _integrand_kernel(k, factor, jac, lam, a, r, out):
    pref = _P_SCALE * math.sqrt(2.0 / a)
    q = math.pi / a
    la = lam * a
    for i in range(k.size):
        kk = k[i]
        x = (kk - q) * a
        if abs(x) < 1e-6:
            sincx = 1.0 - x * x / 6.0
        else:
            sincx = cmath.sin(x) / x
        overlap = q * a * sincx / (kk + q)
        z = 2j * kk * a
        jp = 1.0 + la * _expm1_over_nb(z)
        jm = 1.0 + la * _expm1_over_nb(-z)
        if r <= a:
            val = pref * overlap * cmath.sin(kk * r) / (jp * jm)
        else:
            val = pref * overlap * 0.5j * (cmath.exp(-1j * kk * r) / jm - cmath.exp(1j * kk * r) / jp)
        out[i] = val * factor[i] * jac


def _integrand_numpy(k, factor, jac, spec, r):
    pref = _P_SCALE * math.sqrt(2.0 / spec.a)
    overlap = np.asarray(box_overlap(spec, k))
    jp = np.asarray(jost_regular(spec, k))
    jm = np.asarray(jost_minus(spec, k))
    if r <= spec.a:
        val = pref * overlap * np.sin(k * r) / (jp * jm)
    else:
        val = pref * overlap * 0.5j * (np.exp(-1j * k * r) / jm - np.exp(1j * k * r) / jp)
    return val * factor * jac


# Cody-Waite split of 2 pi: C1 and C2 carry <= 26 bits so n*C1, n*C2 are exact
_TWO_PI_HI = 6.283185307179586
_TWO_PI_LO = 2.4492935982947064e-16
_C1 = math.ldexp(math.floor(math.ldexp(_TWO_PI_HI, 23)), -23)
_C2 = _TWO_PI_HI - _C1
_C3 = _TWO_PI_LO


def _two_prod(a, b):
    p = a * b
    split = 134217729.0
    c = split * a
    ah = c - (c - a)
    al = a - ah
    c = split * b
    bh = c - (c - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _reduced_phase(x, y, t):
    """``(x**2 - y**2) t mod 2 pi`` with the products carried in double-double."""
    a1, a2 = _two_prod(x, x)
    b1, b2 = _two_prod(y, y)
    s = a1 - b1
    bb = s - a1
    e = (a1 - (s - bb)) + (-b1 - bb) + (a2 - b2)
    p1, p2 = _two_prod(s, t)
    p2 = p2 + e * t
    n = np.round(p1 / _TWO_PI_HI)
    return ((p1 - n * _C1) - n * _C2) - n * _C3 + p2


def time_factor(k, t, center=None, dk=None):
    """``exp(-i k**2 t)``, accurate even when ``|k|**2 t`` is large.

    With ``center`` (complex points whose real and imaginary parts are exact
    doubles) and the offsets ``dk`` of ``k`` from them,
    ``k**2 = center**2 + dk (2 center + dk)``.  The large real phase
    ``Re(center**2) t`` is reduced modulo ``2 pi`` in double-double and the
    local phase stays small, so neither the size of ``k**2 t`` nor the
    rounding of ``k`` itself pollutes the result.
    """
    k = np.asarray(k, dtype=np.complex128)
    if t == 0.0:
        return np.ones_like(k)
    if center is None:
        return np.exp(-1j * k * k * t)
    center = np.asarray(center, dtype=np.complex128)
    if dk is None:
        dk = k - center
    theta = _reduced_phase(center.real, center.imag, t)
    decay = 2.0 * center.real * center.imag * t
    local = dk * (2.0 * center + dk) * t
    return np.exp(-1j * theta + decay - 1j * local)


def integrand(spec: PotentialSpec, r: float, t: float, k, jac: complex = 1.0, center=None, dk=None):
    """``jac * C(k) psi+(k, r) exp(-i k**2 t)`` at (possibly complex) ``k``.

    ``C`` and ``psi+`` are continued off the real axis as analytic functions
    (``conj(J+)`` becomes ``J-``).  ``center`` and ``dk`` are forwarded to
    :func:`time_factor`.
    """
    k = np.ascontiguousarray(k, dtype=np.complex128)
    factor = np.ascontiguousarray(np.broadcast_to(time_factor(k, float(t), center, dk), k.shape))
    if _jit.use_numba():
        flat = k.reshape(-1)
        out = np.empty_like(flat)
        _integrand_kernel(flat, factor.reshape(-1), complex(jac), spec.lam, spec.a, float(r), out)
        return out.reshape(k.shape)
    return _integrand_numpy(k, factor, complex(jac), spec, float(r))


# --------------------------------------------------------------------------
# adaptive Gauss-Kronrod on a parametrised segment
# --------------------------------------------------------------------------


class _Segment:
    """Adaptive GK15 over ``k(s) = origin + direction * s`` for ``s`` in ``[s0, s1]``.

    ``func(center, dk, jac)`` returns the integrand at ``center + dk`` times
    ``jac``; panels are described by exact centres plus small offsets.
    """

    def __init__(self, func, origin, direction, edges):
        self.func = func
        self.origin = complex(origin)
        self.direction = complex(direction)
        self.lo = edges[:-1].copy()
        self.hi = edges[1:].copy()
        self.vals, self.errs, self.absv = self._evaluate(self.lo, self.hi)

    def _evaluate(self, lo, hi):
        vals = np.empty(lo.size, dtype=np.complex128)
        errs = np.empty(lo.size, dtype=np.float64)
        absv = np.empty(lo.size, dtype=np.float64)
        for start in range(0, lo.size, _CHUNK):
            sl = slice(start, start + _CHUNK)
            half = 0.5 * (hi[sl] - lo[sl])
            mid = 0.5 * (hi[sl] + lo[sl])
            center = (self.origin + self.direction * mid)[:, None]
            dk = self.direction * (half[:, None] * _NODES[None, :])
            f = self.func(center, dk, self.direction)
            kron = (f @ _W_KRONROD) * half
            gauss = (f @ _W_GAUSS) * half
            vals[sl] = kron
            errs[sl] = np.abs(kron - gauss)
            absv[sl] = (np.abs(f) @ _W_KRONROD) * half
        return vals, errs, absv

    @property
    def value(self) -> complex:
        order = np.argsort(self.lo, kind="stable")
        v = self.vals[order]
        return complex(math.fsum(v.real), math.fsum(v.imag))

    @property
    def error(self) -> float:
        return float(self.errs.sum())

    @property
    def panels(self) -> int:
        return self.lo.size

    @property
    def roundoff(self) -> float:
        """Cancellation floor ``50 eps int |f|`` below which refinement is futile."""
        return 50.0 * _EPS * float(self.absv.sum())

    def refine(self, tol: float, max_panels: int) -> None:
        while self.error > max(tol, self.roundoff):
            width = self.hi - self.lo
            share = tol * width / width.sum()
            # panels already at their rounding floor are never split
            live = self.errs > 50.0 * _EPS * self.absv
            if not live.any():
                return
            bad = live & (self.errs > share)
            if not bad.any():
                bad = live & (self.errs >= self.errs[live].max())
            if self.panels + int(bad.sum()) > max_panels:
                raise ToleranceNotMet(
                    f"panel budget {max_panels} exhausted with error {self.error:.3e} > {tol:.3e}",
                    self.value,
                    self.error,
                )
            mid = 0.5 * (self.lo[bad] + self.hi[bad])
            new_lo = np.concatenate([self.lo[bad], mid])
            new_hi = np.concatenate([mid, self.hi[bad]])
            nv, ne, na = self._evaluate(new_lo, new_hi)
            keep = ~bad
            self.absv = np.concatenate([self.absv[keep], na])
            self.lo = np.concatenate([self.lo[keep], new_lo])
            self.hi = np.concatenate([self.hi[keep], new_hi])
            self.vals = np.concatenate([self.vals[keep], nv])
            self.errs = np.concatenate([self.errs[keep], ne])


def _psi_func(spec, r, t):
    return lambda center, dk, jac: integrand(spec, r, t, center + dk, jac, center, dk)


def _resonance_breaks(spec: PotentialSpec, k_max: float, width: float):
    """Breakpoints clustered on resonances narrower than ``width``.

    Uses the cheap fixed-point pole estimates; the breakpoints only guide
    panel placement and never enter the integrand.
    """
    from .poles import asymptotic_seed

    breaks = []
    scale = np.array([-16.0, -8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0])
    n = 1
    while True:
        kappa = asymptotic_seed(spec, n)
        if kappa.real - 16.0 * abs(kappa.imag) > k_max or -kappa.imag > width:
            break
        breaks.append(kappa.real + scale * abs(kappa.imag))
        n += 1
    if not breaks:
        return np.empty(0)
    return np.concatenate(breaks)


def _merge(edges, breaks):
    inside = breaks[(breaks > edges[0]) & (breaks < edges[-1])]
    return np.union1d(edges, inside) if inside.size else edges


def _phase_edges(x0, x1, t, c, q: QuadratureSpec, a, max_panels):
    """Edges on ``[x0, x1]`` with ``res`` panels per period of ``exp(i(c x + t x**2))``."""
    phi0 = c * x0 + t * x0 * x0
    phi1 = c * x1 + t * x1 * x1
    n = max(1, math.ceil((phi1 - phi0) * q.resolution / (2.0 * math.pi)))
    if n > max_panels:
        raise ToleranceNotMet(f"{n} panels needed just to resolve the oscillation (budget {max_panels})")
    phi = phi0 + (phi1 - phi0) * np.arange(n + 1) / n
    edges = 2.0 * phi / (c + np.sqrt(c * c + 4.0 * t * phi))
    edges[0], edges[-1] = x0, x1
    width_cap = q.max_width * a
    counts = np.maximum(1, np.ceil(np.diff(edges) / width_cap).astype(np.int64))
    if counts.sum() > max_panels:
        raise ToleranceNotMet(f"{counts.sum()} initial panels exceed the budget {max_panels}")
    if np.all(counts == 1):
        return edges
    starts = np.repeat(edges[:-1], counts)
    steps = np.repeat(np.diff(edges) / counts, counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    return np.append(starts + steps * offsets, x1)


# --------------------------------------------------------------------------
# closed-form tails for t = 0
# --------------------------------------------------------------------------


def _osc_tail(c: float, K: float, p: int):
    """``(int_K^inf cos(c k)/k**p dk, int_K^inf sin(c k)/k**p dk)`` for ``p >= 1``."""
    sign = 1.0 if c >= 0 else -1.0
    c = abs(c)
    if c == 0.0:
        if p == 1:
            raise DomainError("int cos(0)/k diverges")
        return K ** (1 - p) / (p - 1), 0.0
    si, ci = sici(c * K)
    cos_p, sin_p = -ci, 0.5 * math.pi - si
    for m in range(2, p + 1):
        cos_p, sin_p = (
            math.cos(c * K) * K ** (1 - m) / (m - 1) - c / (m - 1) * sin_p,
            math.sin(c * K) * K ** (1 - m) / (m - 1) + c / (m - 1) * cos_p,
        )
    return cos_p, sign * sin_p


def _initial_tail(spec: PotentialSpec, r: float, K: float) -> float:
    """Two-term large-``k`` tail ``int_K^inf C psi+ dk`` at ``t = 0``."""
    a, lam = spec.a, spec.lam
    pq = _P_SCALE * math.sqrt(2.0 / a) * math.pi / a
    lead = -pq * 0.5 * (_osc_tail(a - r, K, 2)[0] - _osc_tail(a + r, K, 2)[0])
    s3 = lambda c: _osc_tail(c, K, 3)[1]
    if r <= a:
        second = pq * lam * 0.25 * (s3(r + a) + s3(r - a) - s3(r + 3 * a) - s3(r - 3 * a))
    else:
        second = pq * lam * (0.5 * s3(r + a) - 0.25 * s3(r + 3 * a) - 0.25 * s3(r - a))
    return lead + second


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------


def _validate(r, t):
    if not (math.isfinite(r) and math.isfinite(t)):
        raise DomainError("r and t must be finite")
    if r < 0.0 or t < 0.0:
        raise DomainError("psi_continuum requires r >= 0 and t >= 0")


def _psi_at_zero(spec: PotentialSpec, r: float, q: QuadratureSpec) -> tuple[complex, float]:
    a, lam = spec.a, spec.lam
    # remainder after the two analytic orders is O(k**-3); size K against rel_tol
    bound = _P_SCALE * math.sqrt(2.0 / a) * (math.pi / a) * (lam * lam + (math.pi / a) ** 2 + lam / a)
    K = max(200.0 / a, 20.0 * lam, (bound / max(q.abs_tol, q.rel_tol)) ** (1.0 / 3.0))
    c = r + 3.0 * a
    func = _psi_func(spec, r, 0.0)
    edges = _merge(_phase_edges(0.0, K, 0.0, c, q, a, q.max_panels), _resonance_breaks(spec, K, q.max_width * a))
    seg = _Segment(func, 0.0, 1.0, edges)
    tol = max(q.abs_tol, q.rel_tol * abs(seg.value + _initial_tail(spec, r, K)))
    seg.refine(0.5 * tol, q.max_panels)
    check = _Segment(func, 0.0, 1.0, _phase_edges(K, 2.0 * K, 0.0, c, q, a, q.max_panels))
    check.refine(0.25 * tol, q.max_panels)
    value = seg.value + _initial_tail(spec, r, K)
    alt = seg.value + check.value + _initial_tail(spec, r, 2.0 * K)
    error = seg.error + check.error + abs(alt - value)
    return alt, error


def _path(spec: PotentialSpec, r: float, t: float):
    a, lam = spec.a, spec.lam
    K = max(lam, (r + 3.0 * a) / t, 10.0 / a)
    delta = 0.5 * math.log(2.0 * K / lam) / (2.0 * a)
    delta = min(delta, 40.0 / (2.0 * K * t))
    return K, delta


def psi_continuum(spec: PotentialSpec, r: float, t: float, q: QuadratureSpec | None = None) -> WaveSample:
    """Continuum-quadrature value of ``Psi(r, t)``.

    Parameters
    ----------
    spec : PotentialSpec
    r, t : float
        Radius and time, both ``>= 0``.
    q : QuadratureSpec, optional

    Returns
    -------
    WaveSample
        ``error_estimate`` sums the Kronrod-Gauss panel differences and the
        change produced by doubling the truncation point once.

    Raises
    ------
    ToleranceNotMet
        If the panel budget is exhausted; carries the best estimate.
    """
    q = q or QuadratureSpec()
    r, t = float(r), float(t)
    _validate(r, t)
    if t == 0.0:
        value, error = _psi_at_zero(spec, r, q)
        return WaveSample(r, t, value, "hermitian", None, q.rel_tol, error)

    a = spec.a
    K, delta = _path(spec, r, t)
    c = r + a
    func = _psi_func(spec, r, t)
    edges = _merge(_phase_edges(0.0, K, t, c, q, a, q.max_panels), _resonance_breaks(spec, K, q.max_width * a))
    real = _Segment(func, 0.0, 1.0, edges)
    n_down = max(4, min(4096, math.ceil(2.0 * K * t * delta)))
    down = _Segment(func, K, -1j, np.linspace(0.0, delta, n_down + 1))

    # cut the shifted line where the envelope falls below tail_eps
    probe = np.linspace(K, K + 2.0 * math.pi / (2.0 * K * t + c), 16)
    envelope = float(np.abs(integrand(spec, r, t, probe - 1j * delta)).max())
    rate = 2.0 * delta * t
    span = max(0.0, math.log(max(envelope, 1e-300) / (rate * q.tail_eps))) / rate
    X = K + max(span, 1.0 / rate)
    line = _Segment(func, -1j * delta, 1.0, _phase_edges(K, X, t, c, q, a, q.max_panels))
    check = _Segment(func, -1j * delta, 1.0, _phase_edges(X, X + (X - K), t, c, q, a, q.max_panels))

    segments = (real, down, line, check)
    estimate = sum(s.value for s in segments)
    tol = max(q.abs_tol, q.rel_tol * abs(estimate))
    for seg in segments:
        seg.refine(tol / len(segments), q.max_panels)
    value = real.value + down.value + line.value + check.value
    error = sum(s.error for s in segments) + abs(check.value)
    return WaveSample(r, t, value, "hermitian", None, q.rel_tol, error)


def closure_defect(spec: PotentialSpec, r: float, k_max: float, probe: int = 1,
                   q: QuadratureSpec | None = None) -> float:
    """Smoothed completeness defect of the continuum truncated at ``k_max``.

    ``|int_0^{k_max} psi+(k, r) C_probe(k) dk - phi_probe(r)|``, where
    ``C_probe(k) = int psi+*(k, r') phi_probe(r') dr'`` and ``phi_probe`` is
    the ``probe``-th box state (1 is the initial state).
    """
    if not (0.0 <= r <= spec.a):
        raise DomainError("closure_defect requires 0 <= r <= a")
    if not (k_max > 0.0):
        raise DomainError("k_max must be > 0")
    q = q or QuadratureSpec(abs_tol=1e-15, rel_tol=1e-12)
    pref = _P_SCALE * math.sqrt(2.0 / spec.a)

    def func(center, dk, jac):
        k = (center + dk).real
        overlap = np.asarray(box_overlap(spec, k, probe))
        return pref * overlap * np.sin(k * r) / np.abs(np.asarray(jost_regular(spec, k))) ** 2

    c = r + (probe + 3.0) * spec.a
    edges = _merge(_phase_edges(0.0, k_max, 0.0, c, q, spec.a, q.max_panels),
                   _resonance_breaks(spec, k_max, q.max_width * spec.a))
    seg = _Segment(func, 0.0, 1.0, edges)
    seg.refine(max(q.abs_tol, q.rel_tol * abs(seg.value)), q.max_panels)
    return abs(seg.value.real - box_state_value(spec, r, probe))


def continuum_norm(spec: PotentialSpec, k_max: float | None = None, q: QuadratureSpec | None = None) -> float:
    """``int_0^inf |C(k)|**2 dk`` (equals 1 by completeness).

    Quadrature up to ``k_max`` plus the closed-form tail of the leading
    ``(2/pi)(2/a) q**2 sin(ka)**2 / k**4`` behaviour.
    """
    q = q or QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12)
    a = spec.a
    K = k_max or max(1000.0 / a, 40.0 * spec.lam)
    pref = math.sqrt(_P_SCALE * 2.0 / a)

    def func(center, dk, jac):
        k = (center + dk).real
        return np.abs(pref * np.asarray(box_overlap(spec, k)) / np.asarray(jost_minus(spec, k))) ** 2 + 0j

    edges = _merge(_phase_edges(0.0, K, 0.0, 2.0 * a, q, a, q.max_panels),
                   _resonance_breaks(spec, K, q.max_width * a))
    seg = _Segment(func, 0.0, 1.0, edges)
    seg.refine(max(q.abs_tol, q.rel_tol), q.max_panels)
    body = seg.value.real
    qq = math.pi / a
    tail = pref * pref * qq * qq * (1.0 / (6.0 * K**3) - 0.5 * _osc_tail(2.0 * a, K, 4)[0])
    return body + tail
