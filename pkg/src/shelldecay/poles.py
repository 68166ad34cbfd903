"""Resonance poles of the delta shell: zeros of the entire Jost function.

Poles are found by Newton iteration from an analytic seed, labelled by a
branch index that is an exact integer at every zero, and certified complete
by an argument-principle count over a rectangle enclosing poles ``1..N``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MissingPole, NoConvergence, QuadrantEscape, SymmetryViolation
from .model import PotentialSpec, jost_entire, jost_entire_derivative, jost_regular

__all__ = [
    "ResonancePole",
    "seed",
    "asymptotic_seed",
    "branch_index",
    "refine",
    "find_poles",
    "winding_count",
    "mirror",
    "residual_floor",
]

RESIDUAL_TOL = 1e-12
MIRROR_TOL = 1e-10
STEP_TOL = 1e-14
MAX_NEWTON = 100
_MAX_EDGE_SAMPLES = 1 << 22


@dataclass(frozen=True)
class ResonancePole:
    """A fourth-quadrant zero ``kappa = alpha - i beta`` of the Jost function.

    Attributes
    ----------
    n : int
        Branch index (1 for the lowest resonance).
    kappa : complex
        Complex wave number.
    residual : float
        ``|jost_entire(kappa)|`` at convergence.
    seed_source : str
        ``"analytic"`` or ``"asymptotic"``: which seed converged.
    residual_floor : float
        Smallest residual attainable with ``kappa`` stored in double
        precision (rounding of ``kappa`` itself plus evaluation error).
    """

    n: int
    kappa: complex
    residual: float
    seed_source: str = "analytic"
    residual_floor: float = 0.0

    @property
    def alpha(self) -> float:
        return self.kappa.real

    @property
    def beta(self) -> float:
        return -self.kappa.imag

    @property
    def energy_re(self) -> float:
        return self.alpha**2 - self.beta**2

    @property
    def gamma(self) -> float:
        """Decay width ``4 alpha beta``."""
        return 4.0 * self.alpha * self.beta

    @property
    def lifetime(self) -> float:
        return 1.0 / self.gamma


def seed(spec: PotentialSpec, n: int) -> complex:
    """Opaque-shell estimate ``(n pi/a)(1 - 1/(lam a)) - (i/a)(n pi/(lam a))**2``.

    Only sensible for ``lam a > 1``; otherwise the width estimate is
    replaced by ``0.5/a``.  The approximation degrades with ``n`` (the true
    widths grow logarithmically, not quadratically) and should be refined.
    """
    if n < 1:
        raise DomainError("pole index n must be >= 1")
    la = spec.opacity
    re = n * math.pi / spec.a * (1.0 - 1.0 / la)
    if la > 1.0:
        return complex(re, -((n * math.pi / la) ** 2) / spec.a)
    return complex(re, -0.5 / spec.a)


def asymptotic_seed(spec: PotentialSpec, n: int, iterations: int = 60) -> complex:
    """Seed from the fixed point of ``kappa = n pi/a - (i/2a) Log(1 - 2i kappa/lam)``.

    This is the pole condition solved on branch ``n``; it is accurate for
    large ``n`` and for weak shells where :func:`seed` fails.
    """
    if n < 1:
        raise DomainError("pole index n must be >= 1")
    a, lam = spec.a, spec.lam
    kappa = complex(n * math.pi / a, 0.0)
    for _ in range(iterations):
        nxt = n * math.pi / a - 0.5j / a * cmath.log(1.0 - 2j * kappa / lam)
        if abs(nxt - kappa) <= 1e-15 * abs(nxt):
            return nxt
        kappa = nxt
    return kappa


def branch_index(spec: PotentialSpec, kappa: complex) -> float:
    """Real part of ``kappa a/pi - Log(1 - 2i kappa/lam)/(2 pi i)``.

    Integer-valued (equal to ``n``) at the ``n``-th pole, since the pole
    condition reads ``exp(2i kappa a) = 1 - 2i kappa/lam``.
    """
    m = kappa * spec.a / math.pi - cmath.log(1.0 - 2j * kappa / spec.lam) / (2j * math.pi)
    return m.real


def residual_floor(spec: PotentialSpec, kappa: complex) -> float:
    """Double-precision floor of ``|jost_entire(kappa)|`` near a zero.

    Sum of the quantisation term ``|J'| ulp(|kappa|)`` and the rounding
    error of evaluating ``2ik + lam(exp(2ika) - 1)``.  For ``lam = 12`` it
    crosses 1e-12 around ``n = 20``.
    """
    eps = np.finfo(float).eps
    e = abs(cmath.exp(2j * kappa * spec.a))
    quant = abs(jost_entire_derivative(spec, kappa)) * float(np.spacing(abs(kappa)))
    evaluation = eps * (2.0 * abs(kappa) + spec.lam * (1.0 + e * (1.0 + 2.0 * abs(kappa) * spec.a)))
    return quant + evaluation


def refine(spec: PotentialSpec, start: complex, *, seed_source: str = "analytic") -> ResonancePole:
    """Newton iteration on the entire Jost function.

    Parameters
    ----------
    spec : PotentialSpec
    start : complex
        Seed in the closed fourth quadrant.

    Returns
    -------
    ResonancePole

    Notes
    -----
    Iteration stops once the step is below ``1e-14 |kappa|`` and the
    residual is below ``max(1e-12, residual_floor(kappa))``.  The floor
    exceeds 1e-12 for high poles of opaque shells, where no double-precision
    ``kappa`` achieves a smaller residual.

    Raises
    ------
    QuadrantEscape
        If an iterate enters the upper half-plane, approaches the spurious
        zero at ``k = 0`` (``|k| < 1e-8/a``), or converges outside the
        fourth quadrant.
    NoConvergence
        After 100 iterations without meeting both stopping criteria.
    """
    kappa = complex(start)
    floor = 1e-8 / spec.a
    for _ in range(MAX_NEWTON):
        if abs(kappa) < floor:
            raise QuadrantEscape(f"iterate {kappa!r} collapsed onto the origin zero")
        if kappa.imag > 0.0:
            raise QuadrantEscape(f"iterate {kappa!r} left the lower half-plane")
        with np.errstate(over="ignore", invalid="ignore"):
            step = jost_entire(spec, kappa) / jost_entire_derivative(spec, kappa)
        if not cmath.isfinite(step):
            raise NoConvergence(f"Newton diverged from seed {start!r}")
        kappa = kappa - step
        if abs(step) < STEP_TOL * abs(kappa) or step == 0:
            residual = abs(jost_entire(spec, kappa))
            floor_k = residual_floor(spec, kappa)
            if residual < max(RESIDUAL_TOL, floor_k):
                if abs(kappa) < floor:
                    raise QuadrantEscape("converged to the spurious zero at k = 0")
                if not (kappa.real > 0.0 and kappa.imag < 0.0):
                    raise QuadrantEscape(f"converged to {kappa!r}, outside the fourth quadrant")
                n = int(round(branch_index(spec, kappa)))
                return ResonancePole(n, kappa, residual, seed_source, floor_k)
    raise NoConvergence(f"Newton did not converge from seed {start!r} in {MAX_NEWTON} steps")


def _refine_indexed(spec: PotentialSpec, n: int) -> ResonancePole:
    try:
        pole = refine(spec, seed(spec, n))
        if pole.n == n:
            return pole
    except (QuadrantEscape, NoConvergence):
        pass
    try:
        pole = refine(spec, asymptotic_seed(spec, n), seed_source="asymptotic")
    except (QuadrantEscape, NoConvergence) as exc:
        raise MissingPole(f"pole n={n} could not be located: {exc}") from exc
    if pole.n != n:
        raise MissingPole(f"seed for n={n} converged to branch {pole.n}")
    return pole


def _edge_phase(f_vals):
    dphi = np.angle(f_vals[1:] / f_vals[:-1])
    return dphi.sum(), np.abs(dphi).max()


def winding_count(spec: PotentialSpec, x_max: float, depth: float, height: float) -> int:
    """Zeros of the normalised Jost function inside ``[0, x_max] x [-depth, height]``.

    The phase of ``J+`` is tracked along the boundary; the sampling is doubled
    until the integer count repeats and every phase step is below ``pi/4``.
    The normalised form is used because it has no zero at the origin, and
    neither axis carries zeros for ``lam > 0``.
    """
    corners = [complex(0.0, -depth), complex(x_max, -depth), complex(x_max, height), complex(0.0, height)]
    lengths = [abs(corners[(i + 1) % 4] - corners[i]) for i in range(4)]
    base = [max(64, int(16 * spec.a * length) + 1) for length in lengths]
    previous = None
    scale = 1
    while True:
        total = 0.0
        worst = 0.0
        for i in range(4):
            m = base[i] * scale
            if m > _MAX_EDGE_SAMPLES:
                raise NoConvergence("argument-principle sampling did not stabilise")
            s = np.linspace(0.0, 1.0, m + 1)
            z = corners[i] + s * (corners[(i + 1) % 4] - corners[i])
            phase, step = _edge_phase(np.asarray(jost_regular(spec, z)))
            total += phase
            worst = max(worst, step)
        count = int(round(total / (2.0 * math.pi)))
        if previous is not None and count == previous and worst < math.pi / 4:
            return count
        previous = count
        scale *= 2


def find_poles(spec: PotentialSpec, N: int) -> tuple[ResonancePole, ...]:
    """Locate and certify poles ``n = 1..N``.

    Each pole is refined from :func:`seed`, falling back to
    :func:`asymptotic_seed` when Newton escapes or lands on a different
    branch.  Completeness is certified by :func:`winding_count` over
    ``[0, X] x [-D, 1/a]`` with ``X`` midway between ``alpha_N`` and
    ``alpha_{N+1}`` and ``D = max(2 beta_max, 1/a)``; the floor on ``D``
    keeps the contour clear of the near-real poles of opaque shells.

    Raises
    ------
    MissingPole
        If a pole cannot be located, poles are not strictly ordered, or the
        zero count disagrees with ``N``.
    """
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    N = int(N)
    poles = [_refine_indexed(spec, n) for n in range(1, N + 2)]
    for p, q in zip(poles, poles[1:]):
        if not q.alpha > p.alpha or abs(q.kappa - p.kappa) < 1e-10:
            raise MissingPole(f"poles {p.n} and {q.n} are not strictly ordered")
    x_max = 0.5 * (poles[N - 1].alpha + poles[N].alpha)
    depth = max(2.0 * max(p.beta for p in poles[:N]), 1.0 / spec.a)
    count = winding_count(spec, x_max, depth, 1.0 / spec.a)
    if count != N:
        raise MissingPole(f"argument principle counts {count} zeros, located {N}")
    return tuple(poles[:N])


def mirror(spec: PotentialSpec, pole: ResonancePole) -> complex:
    """Third-quadrant partner ``-conj(kappa)``, verified to be a zero.

    Raises
    ------
    SymmetryViolation
        If ``|jost_entire(-conj(kappa))| > 1e-10``.
    """
    k = -pole.kappa.conjugate()
    residual = abs(jost_entire(spec, k))
    if residual > MIRROR_TOL:
        raise SymmetryViolation(f"mirror of pole {pole.n} has residual {residual:.3e}")
    return k
