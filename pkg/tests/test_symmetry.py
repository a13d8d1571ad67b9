from fractions import Fraction

import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from scipy import linalg, special

from heisenrep.core import PoleError, ShiftOperator, SingularElement, TruncationWindow, interior_residual
from heisenrep.oscillators import fock_ladders, nonfock_h4
from heisenrep.symmetry import (
    GroupElement,
    borel_plus_action,
    closure_residual,
    coherent_state,
    exp_lminus,
    exp_lminus_closed_form,
    exponential_action,
    exponential_coeffs,
    factorwise_action,
    fock_su2,
    gauss_factorize,
    generator_interior,
    graded_su2,
    h2_semispinor_split,
    l0_spectrum,
    laguerre_coefficients,
    laguerre_eval,
    lminus_matrix,
    principal_power,
    sp2r_generators,
    su2_relation_residuals,
    su2_semispinor,
    taylor_expm,
    upper,
)

LAMBDAS = [Fraction(-1, 4), Fraction(-3, 10)]
small = st.floats(-0.3, 0.3)


# --------------------------------------------------------------------------
# su(2)


@pytest.mark.parametrize("lam", LAMBDAS)
@pytest.mark.parametrize("p", [-2, 0, 3])
def test_semispinor_block_relations(lam, p):
    blk = su2_semispinor(lam, p, 10)
    sup = blk.window.interior(blk.margin)
    res = su2_relation_residuals(blk.L3, blk.Lp, blk.Lm, sup, blk.casimir_value())
    assert set(res.values()) == {0}


def test_semispinor_block_matches_dense_oracle():
    # L3, L+, L- built from the differential operators on zeta**n, independently of the package
    lam, n = -0.3, 8
    L3 = np.diag([k - lam for k in range(n + 1)])
    Lp = np.diag(np.ones(n), -1)
    Lm = np.diag([k * (2 * lam - k + 1) for k in range(1, n + 1)], 1)
    assert np.allclose((L3 @ Lp - Lp @ L3)[:n, :n], Lp[:n, :n])
    assert np.allclose((Lp @ Lm - Lm @ Lp)[:n, :n], 2 * L3[:n, :n])
    blk = su2_semispinor(lam, 0, n)
    assert np.allclose(blk.Lm.to_dense(), Lm)
    cas = L3 @ L3 + (Lp @ Lm + Lm @ Lp) / 2
    assert np.allclose(np.diag(cas)[:n], lam * (lam + 1))


def test_semispinor_casimir_value_uses_shifted_spin():
    blk = su2_semispinor(Fraction(-1, 4), 2, 4)
    assert blk.Lam == Fraction(3, 4)
    assert blk.casimir_value() == Fraction(21, 16)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_graded_su2_blocks_casimir(lam):
    rep = nonfock_h4(lam, TruncationWindow(-3, 3, 8))
    L3, Lp, Lm = graded_su2(rep)
    sup = rep.window.interior((1, 2))
    res = su2_relation_residuals(L3, Lp, Lm, sup)
    assert set(res.values()) == {0}


def test_h2_parity_split():
    s = h2_semispinor_split(12)
    assert s.lowest_weights() == (Fraction(1, 4), Fraction(3, 4))
    for part in (s.even, s.odd):
        res = su2_relation_residuals(s.L3, s.Lp, s.Lm, part)
        assert set(res.values()) == {0}
    # both parity sectors share the Casimir -3/16
    d = s.casimir().diagonal()
    assert {d[e] for e in s.even | s.odd} == {Fraction(-3, 16)}
    # L+ preserves parity
    assert all((e[0] + 2) % 2 == e[0] % 2 for e in s.even)


def test_h2_split_needs_room():
    with pytest.raises(ValueError):
        h2_semispinor_split(3)


@pytest.mark.parametrize("degree", [0, 1, 2, 3, 4])
def test_fock_su2_homogeneous_casimir(degree):
    f = fock_su2(8)
    d = f.casimir().diagonal()
    j = Fraction(degree, 2)
    assert {d[e] for e in f.homogeneous(degree)} == {j * (j + 1)}


# --------------------------------------------------------------------------
# sp(2,R)


@pytest.fixture(scope="module", params=["fock", "nonfock"])
def sp2r_source(request):
    if request.param == "fock":
        return fock_ladders(2, 8)
    return nonfock_h4(Fraction(-3, 10), TruncationWindow(-3, 3, 10))


def test_sp2r_casimirs(sp2r_source):
    g = sp2r_generators(sp2r_source)
    sup = generator_interior(sp2r_source)
    one = ShiftOperator.identity(g.L0.space)
    assert interior_residual(g.casimir_C(), one.scale(Fraction(-3, 4)), support=sup) == 0
    assert interior_residual(g.casimir_Cprime(), one.scale(0), support=sup) == 0
    assert interior_residual(g.gamma_square(), one.scale(Fraction(1, 2)), support=sup) == 0


def test_sp2r_closes(sp2r_source):
    g = sp2r_generators(sp2r_source)
    sup = generator_interior(sp2r_source)
    assert closure_residual(g, sup, sup) < 1e-10


def test_l0_spectrum_nonfock():
    rep = nonfock_h4(Fraction(-1, 4), TruncationWindow(-2, 2, 4))
    assert l0_spectrum(rep) == {Fraction(-1, 4) + Fraction(p, 2) for p in range(-2, 3)}


def test_l0_spectrum_fock():
    assert l0_spectrum(fock_ladders(2, 3)) == {Fraction(k, 2) for k in range(7)}


# --------------------------------------------------------------------------
# group


@settings(max_examples=40)
@given(small, small, small, small, small, small)
def test_gauss_factorization_reproduces(ar, ai, br, bi, cr, ci):
    a = complex(1 + ar, ai)
    b, c = complex(br, bi), complex(cr, ci)
    v = GroupElement(a, b, c, (1 + b * c) / a)
    assert np.allclose(gauss_factorize(v).product(), v.matrix(), atol=1e-12)


def test_gauss_singular():
    with pytest.raises(SingularElement):
        gauss_factorize(GroupElement(0, 1, -1, 0))


def test_group_element_determinant():
    with pytest.raises(ValueError):
        GroupElement(1, 1, 1, 1)


def test_taylor_expm_matches_scipy():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 6)) * 2
    assert np.allclose(taylor_expm(a), linalg.expm(a), rtol=1e-11, atol=1e-11)


def test_principal_power_branch():
    assert principal_power(-1 + 0j, 0.5) == pytest.approx(1j)
    with pytest.raises(PoleError):
        principal_power(0, 0.5)


def test_borel_action_symbolic():
    # T(b) f = delta**(2 lam) exp(s zeta) f(zeta / delta**2) on a polynomial
    z = sp.Symbol("zeta")
    lam, d, s = -0.3, 1.1, 0.4
    f = 1 + 2 * z - z ** 3
    expr = sp.series(d ** (2 * lam) * sp.exp(s * z) * f.subs(z, z / d ** 2), z, 0, 8).removeO()
    want = [complex(expr.coeff(z, k)) for k in range(8)]
    got = borel_plus_action(lam, upper(d, s), [1, 2, 0, -1, 0, 0, 0, 0])
    assert np.allclose(got, want, atol=1e-12)


def test_borel_rejects_lower():
    with pytest.raises(ValueError):
        borel_plus_action(-0.3, GroupElement(1, 0, 1, 1), [1.0])


@pytest.mark.parametrize("lam", [-0.25, -0.3])
def test_borel_homomorphism(lam):
    rng = np.random.default_rng(11)
    f = rng.normal(size=30) / np.array([math.factorial(k) for k in range(30)])
    b1, b2 = upper(0.9 + 0.1j, 0.3), upper(1.1, -0.5j)
    lhs = borel_plus_action(lam, b1 @ b2, f)
    rhs = borel_plus_action(lam, b1, borel_plus_action(lam, b2, f))
    assert np.abs(lhs - rhs).max() < 1e-12


def test_lminus_matrix_entries():
    m = lminus_matrix(-0.25, 3)
    assert m[0, 1] == pytest.approx(1 * (-0.5))
    assert m[2, 3] == pytest.approx(3 * (-0.5 - 2))
    assert np.count_nonzero(m) == 3


@pytest.mark.parametrize("n", [0, 1, 4, 9])
@pytest.mark.parametrize("a", [-0.5, -0.4, 1.3])
def test_laguerre_against_scipy(n, a):
    x = 0.77
    assert laguerre_eval(n, a, x) == pytest.approx(special.eval_genlaguerre(n, a, x), rel=1e-12)
    poly = np.polynomial.Polynomial(laguerre_coefficients(n, a))
    assert poly(x) == pytest.approx(special.eval_genlaguerre(n, a, x), rel=1e-12)


def test_laguerre_negative_degree():
    with pytest.raises(ValueError):
        laguerre_eval(-1, 0.0, 1.0)


@pytest.mark.parametrize("lam", [-0.25, -0.3])
@pytest.mark.parametrize("n", [0, 1, 3, 6])
def test_exp_lminus_closed_form(lam, n):
    e = np.zeros(n + 5, dtype=complex)
    e[n] = 1
    for t in (0.5, -0.7, 0.3 + 0.2j):
        series = exp_lminus(lam, t, e)[: n + 1]
        assert np.allclose(series, exp_lminus_closed_form(lam, n, t), atol=1e-10)


def test_exp_lminus_halved_variant_disagrees():
    # (-tau/2)**n differs from the series by 2**n
    lam, n, t = -0.25, 3, 1.0
    e = np.zeros(8, dtype=complex)
    e[n] = 1
    series = exp_lminus(lam, t, e)[: n + 1]
    half = exp_lminus_closed_form(lam, n, t, 0.5)
    assert np.allclose(half * 2 ** n, series)
    assert np.abs(half - series).max() > 1


@pytest.mark.parametrize("tau", [0.7 - 0.2j, -0.4, 1.5j])
def test_coherent_state_eigenvector(tau):
    c = coherent_state(-0.3, tau, 50)
    lm = lminus_matrix(-0.3, 49)
    assert np.abs((lm @ c - tau * c)[:45]).max() < 1e-12
    # 0F1(; b; x) oracle
    x = 0.6
    val = np.polynomial.Polynomial(c)(x)
    assert val == pytest.approx(complex(sp.N(sp.hyper([], [0.6], -tau * x))), rel=1e-12)


def test_exponential_action_matches_factorwise():
    v = GroupElement(1.1, 0.2j, -0.1, (1 + 0.2j * -0.1) / 1.1)
    tau = 0.3 - 0.1j
    pref, slope = exponential_action(-0.3, v, tau)
    got = factorwise_action(-0.3, v, tau, 60)[:20]
    assert np.allclose(got, pref * exponential_coeffs(slope, 20), atol=1e-10)


def test_exponential_action_pole():
    with pytest.raises(PoleError):
        exponential_action(-0.3, GroupElement(1, -1, 2, -1), 0.5)
