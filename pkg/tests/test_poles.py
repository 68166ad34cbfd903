from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from shelldecay import (
    DomainError,
    MissingPole,
    PotentialSpec,
    QuadrantEscape,
    SymmetryViolation,
    find_poles,
    jost_entire,
    mirror,
    refine,
    seed,
    winding_count,
)
from shelldecay.poles import ResonancePole, asymptotic_seed, branch_index, residual_floor


def test_seed_formula(spec12):
    assert seed(spec12, 1) == pytest.approx(complex(math.pi * 11 / 12, -((math.pi / 12) ** 2)), rel=1e-15)
    assert seed(spec12, 2) == pytest.approx(complex(2 * math.pi * 11 / 12, -((2 * math.pi / 12) ** 2)), rel=1e-15)
    assert abs(seed(spec12, 1) - (2.8798 - 0.0685j)) < 1e-4
    big = seed(PotentialSpec(1e12), 3)
    assert abs(big - 3 * math.pi) < 1e-10
    with pytest.raises(DomainError):
        seed(spec12, 0)


def test_refine_examples(spec12):
    p = refine(spec12, seed(spec12, 1))
    assert 2.7 < p.alpha < 3.0 and 0.04 < p.beta < 0.10
    assert p.residual < 1e-12 and p.n == 1
    again = refine(spec12, p.kappa)
    assert again.kappa == pytest.approx(p.kappa, abs=1e-15)
    with pytest.raises(QuadrantEscape):
        refine(spec12, 0j)
    with pytest.raises(QuadrantEscape):
        refine(spec12, 1e-9j)


def test_branch_index_is_integer_at_poles(poles12):
    for p in poles12[:60]:
        assert abs(branch_index(PotentialSpec(12.0), p.kappa) - p.n) < 1e-9


def test_find_poles_small_and_ordered(spec12, poles12):
    (one,) = find_poles(spec12, 1)
    assert one.residual < 1e-12 and one.n == 1
    fifty = poles12[:50]
    assert [p.n for p in fifty] == list(range(1, 51))
    assert all(np.diff([p.alpha for p in fifty]) > 0)
    assert all(np.diff([p.beta for p in fifty]) > 0)


def test_residual_contract(poles12):
    # every pole meets max(1e-12, double-precision floor); below n ~ 20 the floor is inactive
    for p in poles12:
        assert p.residual < max(1e-12, p.residual_floor)
        assert p.residual_floor == pytest.approx(residual_floor(PotentialSpec(12.0), p.kappa))
    assert max(p.residual for p in poles12[:20]) < 1e-12


def test_mirror(spec12, poles12):
    k = mirror(spec12, poles12[0])
    assert k == -poles12[0].kappa.conjugate()
    assert abs(jost_entire(spec12, k)) < 1e-11
    fake = ResonancePole(1, poles12[0].kappa + 0.01, 0.0)
    with pytest.raises(SymmetryViolation):
        mirror(spec12, fake)


def test_winding_counts_match(spec12, poles12):
    depth = 2.0 * poles12[50].beta
    for N in (1, 5, 50):
        x = 0.5 * (poles12[N - 1].alpha + poles12[N].alpha)
        assert winding_count(spec12, x, depth, 1.0) == N
    # too shallow: the deeper high-n poles fall outside
    x = 0.5 * (poles12[49].alpha + poles12[50].alpha)
    assert winding_count(spec12, x, 1.0, 1.0) < 50
    # a rectangle stopping short of pole 5 sees only four zeros
    x = 0.5 * (poles12[3].alpha + poles12[4].alpha)
    assert winding_count(spec12, x, 1.0, 1.0) == 4


@pytest.mark.parametrize("lam", [0.01, 0.5, 3.0, 12.0, 100.0, 1e4])
def test_find_poles_across_opacity(lam):
    spec = PotentialSpec(lam)
    poles = find_poles(spec, 30)
    assert len(poles) == 30
    for p in poles:
        assert p.alpha > 0 and p.beta > 0
        assert p.residual < max(1e-12, p.residual_floor)


def test_opaque_limit():
    # alpha_n = n pi (1 - 1/(lam a)) + ..., so the 1e-3 window holds while n pi/lam < 1e-3
    spec = PotentialSpec(1e4)
    for p in find_poles(spec, 3):
        assert abs(p.kappa - p.n * math.pi) < 1e-3


def test_asymptotic_seed_solves_branch_equation(spec12):
    for n in (1, 5, 40):
        k = asymptotic_seed(spec12, n)
        rhs = n * math.pi - 0.5j * cmath.log(1 - 2j * k / 12.0)
        assert abs(k - rhs) < 1e-12 * abs(k)


def test_missing_pole_rejected(monkeypatch, spec12):
    import shelldecay.poles as poles_mod

    monkeypatch.setattr(poles_mod, "winding_count", lambda *a, **k: 3)
    with pytest.raises(MissingPole):
        poles_mod.find_poles(spec12, 4)


@pytest.mark.xfail(strict=True, reason="the opaque-shell seed drifts beyond 10% for n > 5 at lam = 12 (see decisions ledger)")
def test_seed_quality_within_ten_percent(poles12, spec12):
    for p in poles12[:50]:
        assert abs(p.kappa - seed(spec12, p.n)) / abs(p.kappa) < 0.1
