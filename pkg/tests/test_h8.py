from fractions import Fraction

import itertools

import numpy as np
import pytest
import sympy as sp

from heisenrep.core import ExactComplex
from heisenrep.h8 import (
    F0Index,
    as_array,
    bilinear_algebra,
    bracket_residuals,
    casimir_weight,
    contract_residual,
    dirac_set,
    f0_structure_checks,
    h8_phi_rep,
    heisenberg_residuals,
    hermiticity_residuals,
    i_bracket_constant,
    independence_rank,
    ladder_polys,
    laurent_demo,
    momentum_ops,
    momentum_polys,
    u11_brackets,
    u11_restriction,
)

I_ = ExactComplex(0, 1)


@pytest.fixture(scope="module")
def dirac():
    return dirac_set()


@pytest.fixture(scope="module")
def rep():
    return h8_phi_rep(3)


@pytest.fixture(scope="module")
def alg(rep, dirac):
    return bilinear_algebra(rep, dirac)


# --------------------------------------------------------------------------
# Dirac matrices


def test_clifford_numpy(dirac):
    g = [as_array(x) for x in dirac.gamma]
    for mu, nu in itertools.product(range(4), repeat=2):
        assert np.allclose(g[mu] @ g[nu] + g[nu] @ g[mu], 2 * np.eye(4) * (mu == nu))
    g5 = as_array(dirac.gamma5)
    assert np.allclose(g5, -g[0] @ g[1] @ g[2] @ g[3])
    assert np.allclose(g5, np.diag([-1, -1, 1, 1]))
    assert dirac.clifford_residual() == 0


def test_sigma_matrices(dirac):
    g = [as_array(x) for x in dirac.gamma]
    for (mu, nu), s in dirac.sigma.items():
        want = -0.25j * (g[mu - 1] @ g[nu - 1] - g[nu - 1] @ g[mu - 1])
        assert np.allclose(as_array(s), want)
    assert len(dirac.sigma) == 6


def test_projectors(dirac):
    pp, pm = as_array(dirac.p_plus), as_array(dirac.p_minus)
    assert np.allclose(pp + pm, np.eye(4))
    assert np.allclose(pp, np.diag([0, 0, 1, 1]))


# --------------------------------------------------------------------------
# Heisenberg and bilinears


def test_heisenberg(rep):
    assert set(heisenberg_residuals(rep).values()) == {0}


def test_phi_rep_validation():
    with pytest.raises(ValueError):
        h8_phi_rep(1)
    with pytest.raises(ValueError):
        h8_phi_rep((3, 3, 3))


def test_i_bracket_constant(alg):
    assert i_bracket_constant(alg) == ExactComplex(0, -1)


def test_so4_brackets(alg):
    res = bracket_residuals(alg)
    assert len(res) == 36 + 6 + 6 + 1
    assert set(res.values()) == {0}


def test_wrong_kappa_is_detected(alg):
    res = bracket_residuals(alg, kappa=I_)
    assert max(res.values()) > 0


def test_momenta_and_rank(rep, dirac, alg):
    mom = momentum_ops(rep, dirac)
    assert mom.consistency == 0
    assert independence_rank(alg, mom) == 16


def test_p4_by_hand(rep, dirac):
    # i gamma_4 P+ = i [[0, 1], [0, 0]] in 2x2 blocks, so p_4 = i (zb1 z1 + zb2 z2)
    mom = momentum_ops(rep, dirac)
    assert mom.p[3].apply({(1, 0, 0, 1): 1}) == {(2, 0, 1, 1): I_, (1, 1, 0, 2): I_}


# --------------------------------------------------------------------------
# Hermiticity under the dual pairing


def test_hermiticity_contracts():
    res = hermiticity_residuals(cap=2)
    assert set(res) == {"a1_1", "a1_2", "a2_1", "a2_2"} | {f"p_{m}" for m in range(1, 5)} | {
        f"pdot_{m}" for m in range(1, 5)
    }
    assert set(res.values()) == {0}


@pytest.mark.parametrize("name", ["a1_1", "a2_2"])
def test_flipped_ladder_sign_fails(name):
    op, star, sign = ladder_polys()[name]
    assert contract_residual(op, star, -sign, cap=2) > 0


@pytest.mark.parametrize("name", ["p_1", "p_4", "pdot_4"])
def test_flipped_momentum_sign_fails(name):
    op, star, sign = momentum_polys()[name]
    assert contract_residual(op, star, -sign, cap=2) > 0


# --------------------------------------------------------------------------
# u(1,1)

Z, W = sp.symbols("z zb")


@pytest.mark.parametrize("j, l", [(0, 0), (2, 1), (3, 3), (-1, 0), (-1, 3)])
def test_u11_operators_are_differential_operators(j, l):
    u = u11_restriction(2, 3, laurent=2)
    f = Z ** j * W ** l

    def expr(d):
        return sum(c * Z ** a * W ** b for (a, b), c in d.items())

    assert sp.expand(expr(u.Lp.apply({(j, l): 1})) - Z * W * f) == 0
    assert sp.expand(expr(u.Lm.apply({(j, l): 1})) + sp.diff(f, Z, W)) == 0


def test_u11_bracket_constants():
    b = u11_brackets(u11_restriction(3, 4))
    assert b["[L+,L-]/L3"] == (-2, 0)
    assert b["[L3,L+]/L+"] == (-1, 0)
    assert b["[L3,L-]/L-"] == (1, 0)
    for g in ("L+", "L-", "L3", "L0"):
        assert b[f"[L0,{g}]"][1] == 0


def test_u11_validation():
    with pytest.raises(ValueError):
        u11_restriction(2, 1)


@pytest.mark.parametrize("k, value", [(0, Fraction(-1, 4)), (1, 0), (2, Fraction(3, 4)), (3, 2), (4, Fraction(15, 4))])
def test_casimir_weights(k, value):
    assert casimir_weight(k) == value


def test_f0_structure():
    r = f0_structure_checks()
    assert r.ok
    assert r.off_sector_entries == 0
    assert r.casimirs == {0: Fraction(-1, 4), 1: 0, 2: Fraction(3, 4), 3: 2, 4: Fraction(15, 4)}
    assert r.f_spectrum == list(range(5))


def test_f0_index_monomial():
    assert F0Index(2, 3).monomial == (5, 3)


def test_laurent_one_way_invariance():
    d = laurent_demo(3, 4)
    assert d.tail_invariant and d.union_invariant
    assert not d.singular_invariant
    assert d.witness == {(0, 1): 1}
    assert d.witness_outside
