from __future__ import annotations

import math

import numpy as np
import pytest

from shelldecay import (
    DomainError,
    PotentialSpec,
    QuadratureSpec,
    ToleranceNotMet,
    build_modes,
    closure_defect,
    continuum_norm,
    find_poles,
    initial_state_value,
    psi_continuum,
    psi_resonant,
)


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=-1.0)
    with pytest.raises(DomainError):
        QuadratureSpec(resolution=3.0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_panels=0)
    q = QuadratureSpec().halved()
    assert q.rel_tol == 5e-10 and q.abs_tol == 5e-15


def test_domain(spec12):
    with pytest.raises(DomainError):
        psi_continuum(spec12, -0.1, 1.0)
    with pytest.raises(DomainError):
        psi_continuum(spec12, 0.5, -1.0)
    with pytest.raises(DomainError):
        psi_continuum(spec12, 0.5, math.nan)


def test_reconstructs_initial_state(spec12):
    q = QuadratureSpec()
    r = np.linspace(0.05, 0.95, 10)
    for ri in r:
        s = psi_continuum(spec12, ri, 0.0, q)
        target = initial_state_value(spec12, ri)
        assert abs(s.psi - target) <= 10 * max(q.abs_tol, q.rel_tol * abs(target))
    assert abs(psi_continuum(spec12, 0.5, 0.0).psi - math.sqrt(2)) < 1e-9
    assert abs(psi_continuum(spec12, 1.5, 0.0).psi) < 1e-9


def test_agrees_with_resonant_at_five_lifetimes(spec12, modes12, tau12):
    h = psi_continuum(spec12, 1.0, 5 * tau12)
    z = psi_resonant(modes12, 1.0, 5 * tau12, 40)
    assert abs(h.density - z.density) / h.density < 1e-4
    assert h.method == "hermitian" and h.tolerance == 1e-9


@pytest.mark.parametrize("lam", [0.5, 100.0])
def test_agrees_with_resonant_other_shells(lam):
    spec = PotentialSpec(lam)
    modes = build_modes(spec, find_poles(spec, 200))
    for r in (0.5, 1.0, 3.0):
        for t in (0.1, 5.0):
            h = psi_continuum(spec, r, t).psi
            z = psi_resonant(modes, r, t, 200).psi
            assert abs(h - z) < 1e-4 * abs(h)


def test_halving_tolerance_within_estimate(spec12, tau12):
    q = QuadratureSpec()
    for r, x in ((1.0, 0.05), (0.5, 1.0), (1.0, 5.0), (3.0, 10.0), (1.0, 30.0)):
        a = psi_continuum(spec12, r, x * tau12, q)
        b = psi_continuum(spec12, r, x * tau12, q.halved())
        assert abs(a.psi - b.psi) < a.error_estimate


def test_error_estimate_honesty(spec12, tau12):
    rng = np.random.default_rng(7)
    q = QuadratureSpec()
    worst = 0.0
    for _ in range(50):
        r = rng.uniform(0, 3)
        t = tau12 * 10 ** rng.uniform(math.log10(0.05), math.log10(30))
        a = psi_continuum(spec12, r, t, q)
        b = psi_continuum(spec12, r, t, q.halved())
        worst = max(worst, abs(a.psi - b.psi) / a.error_estimate)
    assert worst <= 10.0


def test_budget_rejected_up_front(spec12):
    q = QuadratureSpec(max_panels=300)
    with pytest.raises(ToleranceNotMet, match="budget 300"):
        psi_continuum(spec12, 1.0, 3.0, q)


def test_refinement_exhaustion_carries_estimate():
    from shelldecay.hermitian import _Segment

    # integrable endpoint singularity: bisection converges only algebraically
    seg = _Segment(lambda c, dk, jac: 1.0 / np.sqrt(np.abs(c + dk)) * jac, 0.0, 1.0, np.array([0.0, 1.0]))
    with pytest.raises(ToleranceNotMet) as info:
        seg.refine(1e-14, 20)
    assert abs(info.value.value - 2.0) < 1e-2
    assert 0 < info.value.error < 1.0
    assert abs(info.value.value - 2.0) < 10 * info.value.error


def test_closure_defect(spec12):
    d = [closure_defect(spec12, 0.5, k) for k in (20.0, 40.0, 80.0)]
    assert d[0] > d[1] > d[2]
    d2 = [closure_defect(spec12, 0.5, k, probe=2) for k in (20.0, 40.0, 80.0)]
    assert d2[0] > d2[1] > d2[2]
    assert closure_defect(spec12, 0.0, 40.0) < 1e-15
    with pytest.raises(DomainError):
        closure_defect(spec12, 1.5, 40.0)


@pytest.mark.parametrize("lam", [0.5, 12.0, 100.0, 1000.0])
def test_continuum_norm(lam):
    assert abs(continuum_norm(PotentialSpec(lam)) - 1.0) < 1e-6
