from __future__ import annotations

import cmath
import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate

from shelldecay import (
    ConvergenceDomain,
    DegeneratePair,
    DomainError,
    NearDegenerate,
    PotentialSpec,
    build_mode,
    check_normalization,
    check_orthogonality,
    find_poles,
    gamma_from_flux,
    mirror_mode,
    mode_value,
    smoothed_closure_defect,
    sum_rule_partial,
)
from shelldecay.poles import ResonancePole
from shelldecay.resonant import projected_sum, smoothed_sum


def cquad(f, a, b):
    re = integrate.quad(lambda r: f(r).real, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    im = integrate.quad(lambda r: f(r).imag, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    return complex(re, im)


def test_overlap_matches_quadrature(modes12):
    for m in modes12[:10]:
        ref = cquad(lambda r: mode_value(m, r) * math.sqrt(2) * math.sin(math.pi * r), 0.0, 1.0)
        assert abs(m.C - ref) < 1e-10


def test_box_limit_amplitude():
    spec = PotentialSpec(1e9)
    m = build_mode(spec, find_poles(spec, 1)[0])
    assert abs(m.A - math.sqrt(2.0)) < 1e-7
    assert gamma_from_flux(m) < 1e-15


def test_exterior_continuity(modes12):
    m = modes12[0]
    assert abs(m.B - m.A * cmath.sin(m.kappa) * cmath.exp(-1j * m.kappa)) < 1e-13
    inner = m.A * cmath.sin(m.kappa)
    outer = m.B * cmath.exp(1j * m.kappa)
    assert abs(inner - outer) < 1e-12


def test_mode_value_boundary_behaviour(modes12):
    for m in modes12[:10]:
        assert mode_value(m, 0.0) == 0
        below = m.A * cmath.sin(m.kappa * 1.0)
        assert abs(mode_value(m, 1.0) - below) < 1e-12
        # outgoing condition from the exterior branch, by a centred difference
        h = 1e-6
        d = (mode_value(m, 1.0 + 2 * h) - mode_value(m, 1.0 + h)) / h
        exact = 1j * m.kappa * m.B * cmath.exp(1j * m.kappa * (1.0 + 1.5 * h))
        assert abs(d - exact) < 1e-6 * abs(exact)
        assert abs(1j * m.kappa * m.B * cmath.exp(1j * m.kappa) / mode_value(m, 1.0) - 1j * m.kappa) < 1e-12 * abs(m.kappa)
    with pytest.raises(DomainError):
        mode_value(modes12[0], -1.0)


def test_normalization(modes12):
    assert check_normalization(modes12[0]) < 1e-10
    assert max(check_normalization(m) for m in modes12[:20]) < 1e-10
    bad = replace(modes12[0], A=modes12[0].A * 1.01)
    assert check_normalization(bad) == pytest.approx(0.0201, abs=2e-3)


def test_normalization_against_quadrature(modes12):
    m = modes12[0]
    interior = cquad(lambda r: mode_value(m, r) ** 2, 0.0, 1.0)
    ua = mode_value(m, 1.0)
    assert abs(interior + 1j * ua * ua / (2 * m.kappa) - 1.0) < 1e-10


def test_orthogonality(modes12):
    assert check_orthogonality(modes12[0], modes12[1]) < 1e-10
    assert check_orthogonality(modes12[0], modes12[2]) < 1e-10
    family = list(modes12[:20]) + [mirror_mode(m) for m in modes12[:20]]
    worst = max(check_orthogonality(p, q) for i, p in enumerate(family) for q in family[i + 1:])
    assert worst < 1e-10
    with pytest.raises(DomainError):
        check_orthogonality(modes12[0], modes12[0])


def test_degenerate_pair_detected(modes12):
    m = modes12[0]
    fake = replace(m, kappa=-m.kappa + 1e-14)
    with pytest.raises(DegeneratePair):
        check_orthogonality(m, fake)


def test_near_degenerate_pole_rejected(spec12):
    with pytest.raises(NearDegenerate):
        build_mode(spec12, ResonancePole(1, complex(math.pi, -1e-13), 0.0))


def test_flux_width(modes12):
    for m in modes12[:20]:
        assert abs(gamma_from_flux(m) - m.pole.gamma) / m.pole.gamma < 1e-8


def test_branch_invariance(spec12, poles12):
    rng = np.random.default_rng(2)
    r = rng.uniform(0, 1, 20)
    for p in poles12[:10]:
        plus, minus = build_mode(spec12, p, 1), build_mode(spec12, p, -1)
        a = plus.C * mode_value(plus, r)
        b = minus.C * mode_value(minus, r)
        assert np.max(np.abs(a - b)) < 1e-13 * max(1.0, np.max(np.abs(a)))


def test_mirror_conjugation(modes12):
    r = np.linspace(0, 1, 41)
    for m in modes12[:20]:
        mm = mirror_mode(m)
        direct = mm.A * np.sin(mm.kappa * r)
        assert np.max(np.abs(direct - np.conj(mode_value(m, r)))) < 1e-13 * max(1, np.max(np.abs(direct)))
        assert mm.C == m.C.conjugate()
        assert mm.n == -m.n
        assert mirror_mode(mm) == m


def test_sum_rule_domain(modes12):
    with pytest.raises(ConvergenceDomain):
        sum_rule_partial(modes12, 1.2, 0.5, "inverse-kappa", 10)
    with pytest.raises(ConvergenceDomain):
        sum_rule_partial(modes12, 1.0, 1.0, "inverse-kappa", 10)
    assert np.isfinite(abs(sum_rule_partial(modes12, 1.0, 0.5, "inverse-kappa", 10)))
    with pytest.raises(DomainError):
        sum_rule_partial(modes12, 0.5, 0.5, "bogus", 10)


def test_paired_sums_have_exact_structure(modes12):
    assert sum_rule_partial(modes12, 0.3, 0.6, "closure", 30).imag == 0.0
    assert sum_rule_partial(modes12, 0.3, 0.6, "inverse-kappa", 30).real == 0.0
    assert sum_rule_partial(modes12, 0.3, 0.6, "kappa", 30).real == 0.0


def test_inverse_kappa_rule_decreases_at_half_radius(modes12):
    sums = [abs(sum_rule_partial(modes12, 0.5, 0.5, "inverse-kappa", N)) for N in (25, 50, 100, 200)]
    assert all(b < a for a, b in zip(sums, sums[1:]))
    assert abs(sum_rule_partial(modes12, 0.5, 0.5, "inverse-kappa", 400)) < sums[-1]


@pytest.mark.xfail(strict=True, reason="pointwise kappa-weighted sum grows ~N**1.7 (see decisions ledger)")
def test_kappa_rule_decreases_at_half_radius(modes12):
    sums = [abs(sum_rule_partial(modes12, 0.5, 0.5, "kappa", N)) for N in (25, 50, 100, 200)]
    assert all(b < a for a, b in zip(sums, sums[1:]))


@pytest.mark.xfail(strict=True, reason="pointwise partial sums oscillate before settling at generic points")
def test_sum_rules_decrease_at_random_points(modes12):
    rng = np.random.default_rng(4)
    for _ in range(5):
        r, r2 = rng.uniform(0.05, 0.95, 2)
        for v in ("inverse-kappa", "kappa"):
            sums = [abs(sum_rule_partial(modes12, r, r2, v, N)) for N in (25, 50, 100, 200)]
            assert all(b < a for a, b in zip(sums, sums[1:]))


def test_smoothed_closure_converges(modes12):
    defects = [smoothed_closure_defect(modes12, 0.5, N) for N in (10, 20, 40, 80, 160)]
    assert all(b < a for a, b in zip(defects, defects[1:]))
    assert defects[-1] < 5e-4


def test_projected_sum_rules_converge(modes12):
    for variant, limit in (("closure", 1.0), ("inverse-kappa", 0.0), ("kappa", 0.0)):
        gaps = [abs(projected_sum(modes12, variant, N) - limit) for N in (10, 20, 40, 80, 160, 320)]
        assert all(b < a for a, b in zip(gaps, gaps[1:])), variant
    cross = [abs(projected_sum(modes12, "closure", N, (1, 2))) for N in (10, 20, 40, 80)]
    assert all(b < a for a, b in zip(cross, cross[1:]))


def test_smoothed_sum_inverse_kappa(modes12):
    vals = [abs(smoothed_sum(modes12, 0.5, "inverse-kappa", N)) for N in (40, 80, 160, 320)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
