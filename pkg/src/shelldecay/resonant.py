"""Gamow resonant states of the delta shell and their identity suite.

The state attached to pole ``kappa_n`` is ``A sin(kappa r)`` inside the shell
and ``B exp(i kappa r)`` outside.  Amplitudes follow from the
non-Hermitian normalisation ``int_0^a u**2 dr + i u(a)**2/(2 kappa) = 1``;
``C`` is the overlap with the initial box state.

Third-quadrant partners ``kappa_{-n} = -conj(kappa_n)`` are built by
conjugation so that ``u_{-n}(r) = conj(u_n(r))`` and ``C_{-n} = conj(C_n)``
hold exactly.  Every symmetric sum is formed pair by pair.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceDomain, DegeneratePair, DomainError, NearDegenerate
from .model import PotentialSpec, box_overlap, box_state_value
from .poles import ResonancePole

__all__ = [
    "ResonantMode",
    "build_mode",
    "build_modes",
    "mirror_mode",
    "mode_value",
    "check_normalization",
    "check_orthogonality",
    "sum_rule_partial",
    "smoothed_sum",
    "smoothed_closure_defect",
    "projected_sum",
    "gamma_from_flux",
    "VARIANTS",
]

# accepted spellings of the three symmetric sums
VARIANTS = {
    "closure": "closure",
    "inverse-kappa": "inverse-kappa",
    "inverse_kappa": "inverse-kappa",
    "kappa": "kappa",
}


@dataclass(frozen=True)
class ResonantMode:
    """Resonant state ``u_n`` with amplitudes and initial-state overlap.

    Attributes
    ----------
    spec : PotentialSpec
    pole : ResonancePole
        The fourth-quadrant pole; shared by a mode and its mirror.
    kappa : complex
        Wave number of this state (``-conj(pole.kappa)`` for a mirror).
    A, B : complex
        Interior and exterior amplitudes.
    C : complex
        ``int_0^a u(r) Psi(r, 0) dr``.
    mirrored : bool
        True for the third-quadrant partner.
    """

    spec: PotentialSpec
    pole: ResonancePole
    kappa: complex
    A: complex
    B: complex
    C: complex
    mirrored: bool = False

    @property
    def n(self) -> int:
        return -self.pole.n if self.mirrored else self.pole.n

    def overlap(self, m: int = 1) -> complex:
        """``int_0^a u(r) phi_m(r) dr`` for the ``m``-th box state ``phi_m``."""
        return self.A * math.sqrt(2.0 / self.spec.a) * complex(box_overlap(self.spec, self.kappa, m))


def build_mode(spec: PotentialSpec, pole: ResonancePole, branch: int = 1) -> ResonantMode:
    """Populate the resonant state of ``pole``.

    ``A = branch * sqrt(2 lam / (lam a + exp(-2i kappa a)))`` on the principal
    square-root branch (``branch = -1`` flips the sign; physical products
    ``C u`` do not change).  ``B`` follows from continuity at ``r = a``.

    Raises
    ------
    NearDegenerate
        If ``|(pi/a)**2 - kappa**2| < 1e-10``.
    """
    if branch not in (1, -1):
        raise DomainError("branch must be +1 or -1")
    kappa = complex(pole.kappa)
    a, lam = spec.a, spec.lam
    q = math.pi / a
    if abs(q * q - kappa * kappa) < 1e-10:
        raise NearDegenerate(f"pole {pole.n} coincides with the box momentum pi/a")
    A = branch * cmath.sqrt(2.0 * lam / (lam * a + cmath.exp(-2j * kappa * a)))
    B = A * cmath.sin(kappa * a) * cmath.exp(-1j * kappa * a)
    C = A * math.sqrt(2.0 / a) * complex(box_overlap(spec, kappa, 1))
    return ResonantMode(spec, pole, kappa, A, B, C)


def build_modes(spec: PotentialSpec, poles) -> tuple[ResonantMode, ...]:
    """Fourth-quadrant modes for a sequence of poles (mirrors stay implicit)."""
    return tuple(build_mode(spec, p) for p in poles)


def mirror_mode(mode: ResonantMode) -> ResonantMode:
    """Partner at ``-conj(kappa)`` with ``u_{-n} = conj(u_n)`` enforced.

    Taking ``A_{-n} = -conj(A_n)`` aligns the square-root branch:
    ``-conj(A) sin(-conj(kappa) r) = conj(A sin(kappa r))``.
    """
    return replace(
        mode,
        kappa=-mode.kappa.conjugate(),
        A=-mode.A.conjugate(),
        B=mode.B.conjugate(),
        C=mode.C.conjugate(),
        mirrored=not mode.mirrored,
    )


def mode_value(mode: ResonantMode, r):
    """``u(r)``: ``A sin(kappa r)`` for ``r <= a``, ``B exp(i kappa r)`` beyond."""
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0.0) or not np.all(np.isfinite(r)):
        raise DomainError("r must be finite and >= 0")
    inner = mode.A * np.sin(mode.kappa * np.minimum(r, mode.spec.a))
    outer = mode.B * np.exp(1j * mode.kappa * r)
    out = np.where(r <= mode.spec.a, inner, outer)
    return complex(out) if out.ndim == 0 else out


def _interior_sq(kappa, a):
    """``int_0^a sin(kappa r)**2 dr``."""
    return a / 2.0 - cmath.sin(2.0 * kappa * a) / (4.0 * kappa)


def check_normalization(mode: ResonantMode) -> float:
    """Residual ``|int_0^a u**2 dr + i u(a)**2/(2 kappa) - 1|``."""
    a = mode.spec.a
    ua = mode.A * cmath.sin(mode.kappa * a)
    total = mode.A**2 * _interior_sq(mode.kappa, a) + 1j * ua * ua / (2.0 * mode.kappa)
    return abs(total - 1.0)


def _sin_ratio(x, a):
    """``sin(x a)/x`` with the limit ``a`` at the origin."""
    return a if x == 0 else cmath.sin(x * a) / x


def check_orthogonality(mode_n: ResonantMode, mode_m: ResonantMode) -> float:
    """Residual ``|int_0^a u_n u_m dr + i u_n(a) u_m(a)/(kappa_n + kappa_m)|``.

    Raises
    ------
    DomainError
        If both modes share the same wave number (use the normalisation check).
    DegeneratePair
        If ``|kappa_n + kappa_m| < 1e-12``.
    """
    kn, km = mode_n.kappa, mode_m.kappa
    if kn == km:
        raise DomainError("identical modes: use check_normalization")
    ksum = kn + km
    if abs(ksum) < 1e-12:
        raise DegeneratePair("kappa_n + kappa_m vanishes")
    a = mode_n.spec.a
    integral = 0.5 * (_sin_ratio(kn - km, a) - _sin_ratio(ksum, a))
    un = mode_n.A * cmath.sin(kn * a)
    um = mode_m.A * cmath.sin(km * a)
    return abs(mode_n.A * mode_m.A * integral + 1j * un * um / ksum)


def _interior_values(modes, r):
    a = modes[0].spec.a
    kappa = np.array([m.kappa for m in modes])
    amp = np.array([m.A for m in modes])
    return amp * np.sin(kappa * min(r, a)), kappa


def _check_domain(spec, r, r2):
    a = spec.a
    if r < 0 or r2 < 0:
        raise DomainError("radii must be >= 0")
    if r > a or r2 > a or (r == a and r2 == a):
        raise ConvergenceDomain(
            f"sum rules converge only for (r, r') inside the shell, one of them below a; got ({r}, {r2})"
        )


def _pair_terms(variant, kappa, prod):
    if variant == "closure":
        return prod.real.astype(np.complex128)
    if variant == "inverse-kappa":
        return 2j * (prod / kappa).imag
    return 2j * (prod * kappa).imag


def sum_rule_partial(modes, r: float, r2: float, variant: str, N: int | None = None) -> complex:
    """Symmetric partial sum over ``n = +-1 .. +-N``.

    ``variant`` selects ``(1/2) sum u_n(r) u_n(r')`` (``"closure"``),
    ``sum u_n(r) u_n(r')/kappa_n`` (``"inverse-kappa"``, limit 0) or
    ``sum kappa_n u_n(r) u_n(r')`` (``"kappa"``, limit 0).  ``modes`` are the
    fourth-quadrant modes; each partner is folded in through
    ``u_{-n} = conj(u_n)``, ``kappa_{-n} = -conj(kappa_n)``.

    Raises
    ------
    ConvergenceDomain
        If ``r`` or ``r2`` exceeds ``a`` or both equal ``a``.
    """
    try:
        variant = VARIANTS[variant]
    except KeyError:
        raise DomainError(f"unknown sum-rule variant {variant!r}") from None
    modes = tuple(modes)[: (len(modes) if N is None else N)]
    if N is not None and len(modes) < N:
        raise DomainError(f"{N} modes requested, {len(modes)} available")
    _check_domain(modes[0].spec, r, r2)
    ur, kappa = _interior_values(modes, r)
    ur2, _ = _interior_values(modes, r2)
    terms = _pair_terms(variant, kappa, ur * ur2)
    total = 0j
    for term in terms:
        total += term
    return total


def smoothed_sum(modes, r: float, variant: str = "closure", N: int | None = None, probe: int = 1) -> complex:
    """Sum rule integrated against the box state ``phi_probe`` over ``r'``.

    ``closure`` returns ``sum_{+-n} (1/2) u_n(r) int u_n phi`` and tends to
    ``phi(r)``; the other variants tend to 0.  Integrating over ``r'`` turns
    the distributional identities into convergent series.
    """
    variant = VARIANTS[variant]
    modes = tuple(modes)[: (len(modes) if N is None else N)]
    _check_domain(modes[0].spec, r, 0.0)
    ur, kappa = _interior_values(modes, r)
    overlaps = np.array([m.overlap(probe) for m in modes])
    terms = _pair_terms(variant, kappa, ur * overlaps)
    total = 0j
    for term in terms:
        total += term
    return total


def smoothed_closure_defect(modes, r: float, N: int | None = None, probe: int = 1) -> float:
    """``|smoothed_sum(closure) - phi_probe(r)|``."""
    value = smoothed_sum(modes, r, "closure", N, probe)
    return abs(value - box_state_value(modes[0].spec, r, probe))


def projected_sum(modes, variant: str = "closure", N: int | None = None, probes=(1, 1)) -> complex:
    """Sum rule projected on box states in both radial arguments.

    ``sum_{+-n} w_n <phi_i|u_n><u_n|phi_j>`` with the weight of ``variant``
    (``1/2``, ``1/kappa`` or ``kappa``); the limits are ``delta_ij``, 0 and 0.
    The terms fall off like ``kappa**-3`` (``kappa`` variant) or faster, so
    unlike the pointwise sums these converge monotonically in practice.
    """
    variant = VARIANTS[variant]
    modes = tuple(modes)[: (len(modes) if N is None else N)]
    if N is not None and len(modes) < N:
        raise DomainError(f"{N} modes requested, {len(modes)} available")
    kappa = np.array([m.kappa for m in modes])
    prod = np.array([m.overlap(probes[0]) * m.overlap(probes[1]) for m in modes])
    total = 0j
    for term in _pair_terms(variant, kappa, prod):
        total += term
    return total


def gamma_from_flux(mode: ResonantMode) -> float:
    """Width from flux conservation, ``2 alpha |u(a)|**2 / int_0^a |u|**2 dr``."""
    a = mode.spec.a
    alpha, beta = mode.kappa.real, -mode.kappa.imag
    ua = mode.A * cmath.sin(mode.kappa * a)
    norm = math.sinh(2.0 * beta * a) / (4.0 * beta) - math.sin(2.0 * alpha * a) / (4.0 * alpha)
    return 2.0 * alpha * abs(ua) ** 2 / (abs(mode.A) ** 2 * norm)
