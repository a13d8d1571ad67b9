from fractions import Fraction

import math

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from heisenrep.core import GradedIndex, ShiftOperator, TruncationWindow, commutator, interior_residual
from heisenrep.oscillators import (
    b_relation_residual,
    decycled_residuals,
    fock_ladders,
    h4_residuals,
    laurent_ladders,
    nonfock_b_family,
    nonfock_h4,
    number_spectrum,
    phi_phibar,
    weight_coefficient_residual,
)

general_lambda = st.fractions(min_value=-3, max_value=3, max_denominator=20).filter(
    lambda x: (2 * x).denominator != 1
)

Z = sp.Symbol("z")


# --------------------------------------------------------------------------
# Fock


@pytest.mark.parametrize("modes", [1, 2])
def test_fock_ccr_on_interior(modes):
    f = fock_ladders(modes, 6)
    one = ShiftOperator.identity(f.box)
    for k in range(modes):
        assert interior_residual(commutator(f.lowering[k], f.raising[k]), one, margin=1) == 0


def test_fock_ground_state_and_raising():
    f = fock_ladders(1, 4)
    assert f.lowering[0].apply({(0,): 1}) == {}
    assert f.raising[0].apply({(2,): 1}) == {(3,): 1}


@pytest.mark.parametrize("m_max", [2, 3, 7])
def test_fock_number_spectrum(m_max):
    assert number_spectrum(fock_ladders(1, m_max), 1) == list(range(m_max + 1))


def test_fock_cartan_weyl_coefficients():
    low, up = fock_ladders(1, 10).cartan_weyl()
    for m in range(10):
        assert up[0][((m + 1,), (m,))] == pytest.approx(math.sqrt(m + 1), rel=1e-15)
        assert low[0][((m,), (m + 1,))] == pytest.approx(math.sqrt(m + 1), rel=1e-15)


@pytest.mark.parametrize("modes, m_max", [(3, 4), (1, 1)])
def test_fock_rejects_bad_sizes(modes, m_max):
    with pytest.raises(ValueError):
        fock_ladders(modes, m_max)


# --------------------------------------------------------------------------
# b family, checked against symbolic differential operators


def _b_sym(p, alpha, f):
    if alpha == 1:
        return sp.Rational(1, 2) * Z * f
    return sp.Rational(1, 2) * (-sp.diff(f, Z) + 2 * p * f / Z)


@pytest.mark.parametrize("p", [-3, -1, 0, 2, 5])
@pytest.mark.parametrize("degree", [-4, -2, 0, 2, 6])
def test_b_action_matches_symbolic(p, degree):
    e = degree + (p % 2)
    fam = nonfock_b_family(Fraction(-1, 4), range(-6, 7), 12)
    for alpha in (1, 2):
        got = sum(c * Z ** d for d, c in fam.apply_monomial(p, alpha, e).items())
        want = sp.expand(_b_sym(p, alpha, Z ** e))
        assert sp.simplify(sp.nsimplify(got) - want) == 0


@pytest.mark.parametrize("p", [-2, 0, 3])
def test_b_conjugation_identity(p):
    # b_alpha = 1/2 eps_{alpha beta} z**(2p) a^beta z**(-2p) with a = (d/dz, z)
    f = Z ** (2 * p + 4)
    conj_a1 = sp.expand(Z ** (2 * p) * sp.diff(Z ** (-2 * p) * f, Z))
    conj_a2 = sp.expand(Z ** (2 * p) * Z * Z ** (-2 * p) * f)
    assert sp.simplify(_b_sym(p, 1, f) - conj_a2 / 2) == 0
    assert sp.simplify(_b_sym(p, 2, f) + conj_a1 / 2) == 0


def test_b_p0_is_half_ladders():
    box_fam = nonfock_b_family(Fraction(-3, 10), range(-1, 2), 8)
    a1, a2 = laurent_ladders(box_fam.box)
    b1, b2 = box_fam.ops[0]
    inner = box_fam.box.interior(1)
    assert interior_residual(b1, a2.scale(Fraction(1, 2)), support=inner) == 0
    assert interior_residual(b2, a1.scale(Fraction(-1, 2)), support=inner) == 0


def test_b2_example_coefficient():
    fam = nonfock_b_family(Fraction(-1, 4), range(0, 4), 10)
    # (p)b_2 z**(2m) = (p - m) z**(2m - 1)
    for p, m in [(0, 2), (2, 1), (2, 3)]:
        assert fam.apply_monomial(p, 2, 2 * m) == ({2 * m - 1: p - m} if p != m else {})


def test_b_wrong_parity():
    fam = nonfock_b_family(Fraction(-1, 4), range(0, 2), 6)
    with pytest.raises(ValueError):
        fam.apply_monomial(0, 1, 3)


def test_b_shifted_relation_symbolic_constant():
    # (p+1)b_1 (p)b_2 - (p+1)b_2 (p)b_1 on z**e, worked out symbolically
    p = sp.Symbol("p", integer=True)
    e = sp.Symbol("e", integer=True)
    f = Z ** e
    lhs = _b_sym(p + 1, 1, _b_sym(p, 2, f)) - _b_sym(p + 1, 2, _b_sym(p, 1, f))
    assert sp.simplify(lhs / f) == sp.Rational(-1, 4)


@pytest.mark.parametrize("lam", [Fraction(-1, 4), Fraction(-3, 10)])
def test_b_shifted_relation_exact(lam):
    fam = nonfock_b_family(lam, range(-6, 7), 24)
    assert b_relation_residual(fam) == 0
    assert b_relation_residual(fam, constant=Fraction(1, 4)) == Fraction(1, 2)


# --------------------------------------------------------------------------
# decycled pair and non-Fock h4


@settings(max_examples=15, deadline=None)
@given(general_lambda)
def test_decycled_relations_exact_for_any_rational(lam):
    res = decycled_residuals(phi_phibar(lam, TruncationWindow(-3, 3, 8)))
    assert all(v == 0 for v in res.values())


@settings(max_examples=15, deadline=None)
@given(general_lambda)
def test_h4_relations_exact_for_any_rational(lam):
    res = h4_residuals(nonfock_h4(lam, TruncationWindow(-3, 3, 8)))
    assert all(v == 0 for v in res.values())


def test_phibar2_example():
    lam = Fraction(-3, 10)
    pair = phi_phibar(lam, TruncationWindow(-2, 2, 5))
    for p, n in [(-1, 0), (0, 3), (1, 2)]:
        out = pair.phibar[1].apply({GradedIndex(p, n): 1})
        assert out == {GradedIndex(p + 1, n): 2 * lam + p + 1 - n}


def test_phi_directions():
    pair = phi_phibar(Fraction(-1, 4), TruncationWindow(-2, 2, 4))
    assert all(op.shift == -1 for op in pair.phi)
    assert all(op.shift == 1 for op in pair.phibar)
    assert pair.phi[1].apply({GradedIndex(0, 3): 1}) == {GradedIndex(-1, 3): 1}


def test_phibar_block_restriction():
    pair = phi_phibar(Fraction(-1, 4), TruncationWindow(-2, 2, 4))
    blk = pair.phibar_block(0, 2)
    assert {c.p for c in blk.columns} == {0}


def test_h4_a11_kills_m0():
    rep = nonfock_h4(Fraction(-1, 4), TruncationWindow(-2, 2, 4))
    assert rep.a1[0].apply({GradedIndex(0, 0): 1}) == {}


@pytest.mark.parametrize("lam", [Fraction(-1, 4), Fraction(-3, 10), -0.45])
def test_weight_basis_principal_roots(lam):
    rep = nonfock_h4(lam, TruncationWindow(-6, 6, 16))
    assert weight_coefficient_residual(rep) < 1e-12


def test_weight_factor_modulus_matches_cartan_weyl():
    rep = nonfock_h4(Fraction(-3, 10), TruncationWindow(-4, 4, 6))
    for c in rep.window.basis:
        assert abs(rep.phase_to_cartan_weyl(c)) == pytest.approx(1.0, abs=1e-13)


def test_nonfock_spectrum_example():
    rep = nonfock_h4(Fraction(-1, 4), TruncationWindow(-2, 2, 2))
    spec = number_spectrum(rep, 2)
    # oracle: 2 lam + p - m evaluated directly over the window
    want = sorted(Fraction(-1, 2) + p - m for p in range(-2, 3) for m in range(3))
    assert spec == want
    assert Fraction(-9, 2) in spec


def test_no_ground_state_under_window_growth():
    mins = [
        min(number_spectrum(nonfock_h4(Fraction(-3, 10), TruncationWindow(-2 - g, 2, 4)), 2))
        for g in range(5)
    ]
    assert all(b < a for a, b in zip(mins, mins[1:]))
