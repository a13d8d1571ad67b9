from fractions import Fraction

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from heisenrep.core import (
    BasisConvention,
    EmptyInterior,
    ExactComplex,
    GammaPole,
    GradedIndex,
    GradedVector,
    MonomialBox,
    NotGeneralPosition,
    ShiftOperator,
    SpinParameter,
    TruncationWindow,
    WindowMismatch,
    cartan_weyl_factor,
    commutator,
    convert_basis,
    enumerate_basis,
    interior_residual,
    parse_rational,
    rescale_operator,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)
gaussian = st.builds(ExactComplex, rationals, rationals)


# --------------------------------------------------------------------------
# scalars


@given(gaussian, gaussian)
def test_exact_complex_matches_python_complex(a, b):
    assert complex(a * b) == pytest.approx(complex(a) * complex(b), abs=1e-12)
    assert complex(a + b) == pytest.approx(complex(a) + complex(b), abs=1e-12)
    if b:
        assert complex(a / b) == pytest.approx(complex(a) / complex(b), abs=1e-9)


@given(gaussian)
def test_exact_complex_conjugate_product_is_real_fraction(a):
    n = a * a.conjugate()
    assert isinstance(n, Fraction)
    assert n >= 0


def test_exact_complex_collapses_to_fraction():
    i = ExactComplex(0, 1)
    assert i * i == -1
    assert isinstance(i * i, Fraction)


def test_exact_complex_mixes_with_float():
    assert ExactComplex(1, 2) * 0.5 == pytest.approx(0.5 + 1j)


# --------------------------------------------------------------------------
# spin parameter


@pytest.mark.parametrize("text, value", [("-1/4", Fraction(-1, 4)), ("-3/10", Fraction(-3, 10)), ("2", Fraction(2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["-0.25", "1e-3", ""])
def test_parse_rational_refuses_decimals_and_empty(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_parse_rational_allows_decimal_when_asked():
    assert parse_rational("-0.25", allow_decimal=True) == Fraction(-1, 4)


@pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(-3, 2), Fraction(0), 1.0, -0.5])
def test_half_integers_rejected(lam):
    with pytest.raises(NotGeneralPosition):
        SpinParameter(lam)


def test_half_integer_allowed_outside_general_position():
    assert SpinParameter(Fraction(1, 2), general_position=False).value == Fraction(1, 2)


@given(rationals.filter(lambda x: (2 * x).denominator != 1))
def test_general_position_accepts_non_half_integers(lam):
    s = SpinParameter(lam)
    assert s.exact and s.value == lam


# --------------------------------------------------------------------------
# spaces


def test_enumerate_basis_small_window():
    w = TruncationWindow(-1, 1, 1)
    assert enumerate_basis(w) == [GradedIndex(p, m) for p in (-1, 0, 1) for m in (0, 1)]


@pytest.mark.parametrize("args", [(1, 0, 3), (0, 1, -1)])
def test_window_rejects_bad_bounds(args):
    with pytest.raises(ValueError):
        TruncationWindow(*args)


def test_window_interior_and_empty_interior():
    w = TruncationWindow(-2, 2, 5)
    inner = w.interior()
    assert min(c.p for c in inner) == -1 and max(c.p for c in inner) == 1
    assert max(c.m for c in inner) == 3
    with pytest.raises(EmptyInterior):
        TruncationWindow(0, 1, 5).interior()


def test_monomial_box_laurent_interior():
    box = MonomialBox((-3,), (3,))
    assert sorted(box.interior(1)) == [(e,) for e in range(-2, 3)]
    assert len(MonomialBox.caps(2, 3)) == 12


# --------------------------------------------------------------------------
# operators


def _shift_up(w):
    return ShiftOperator.from_action(w, lambda c: [(GradedIndex(c.p + 1, c.m), 1)], shift=1)


def test_shift_declaration_enforced():
    w = TruncationWindow(-1, 1, 2)
    with pytest.raises(ValueError):
        ShiftOperator.from_action(w, lambda c: [(GradedIndex(c.p + 1, c.m), 1)], shift=0)


def test_window_mismatch():
    a = ShiftOperator.identity(TruncationWindow(-1, 1, 2))
    b = ShiftOperator.identity(TruncationWindow(-1, 1, 3))
    with pytest.raises(WindowMismatch):
        a + b


def test_products_match_dense_algebra():
    w = TruncationWindow(-2, 2, 3)
    up = _shift_up(w)
    num = ShiftOperator.from_action(w, lambda c: [(c, 3 * c.m + c.p)], shift=0)
    dense = commutator(up, num).to_dense()
    ref = up.to_dense() @ num.to_dense() - num.to_dense() @ up.to_dense()
    assert np.abs(dense - ref).max() == 0


def test_interior_residual_exact_zero_is_int():
    box = MonomialBox.caps(6)
    d = ShiftOperator.from_action(box, lambda e: [((e[0] - 1,), e[0])], shift=None)
    z = ShiftOperator.from_action(box, lambda e: [((e[0] + 1,), 1)], shift=None)
    r = interior_residual(commutator(d, z), ShiftOperator.identity(box), margin=1)
    assert r == 0 and isinstance(r, int)
    # the top edge is clipped, so the full box is not an identity
    full = commutator(d, z).diagonal()
    assert full[(6,)] == -6


@given(st.integers(-3, 3), st.integers(0, 5))
def test_apply_is_linear(p, m):
    w = TruncationWindow(-4, 4, 6)
    up = _shift_up(w)
    v = {GradedIndex(p, m): Fraction(2, 3)}
    out = up.apply(v)
    assert out == {GradedIndex(p + 1, m): Fraction(2, 3)}


# --------------------------------------------------------------------------
# Cartan-Weyl factor


@pytest.mark.parametrize("lam, p, m", [(-0.3, 0, 0), (-0.3, 1, 2), (-0.45, -1, 5), (Fraction(-1, 4), 2, 3)])
def test_cartan_weyl_factor_against_scipy(lam, p, m):
    g = special.gamma(m - 2 * float(lam) - p) * math.factorial(m)
    want = 1j ** m / cmath.sqrt(complex(g))
    assert cartan_weyl_factor(lam, p, m) == pytest.approx(want, rel=1e-14)


def test_cartan_weyl_factor_pole():
    # poles need 2 lam integral, so only a spin outside general position reaches one
    spin = SpinParameter(Fraction(1, 2), general_position=False)
    with pytest.raises(GammaPole):
        cartan_weyl_factor(spin, 1, 0)


def test_convert_basis_round_trip():
    w = TruncationWindow(-1, 1, 3)
    v = GradedVector(w, {(0, 2): 1.5, (1, 0): -2j})
    there = convert_basis(v, BasisConvention.MONOMIAL, BasisConvention.CARTAN_WEYL, -0.3)
    back = convert_basis(there, BasisConvention.CARTAN_WEYL, BasisConvention.MONOMIAL, -0.3)
    for k in v.coeffs:
        assert back.coeffs[k] == pytest.approx(v.coeffs[k])


def test_rescale_operator_gives_sqrt_coefficients():
    box = MonomialBox.caps(8)
    z = ShiftOperator.from_action(box, lambda e: [((e[0] + 1,), 1)], shift=None)
    zr = rescale_operator(z, lambda e: 1 / math.sqrt(math.factorial(e[0])))
    for m in range(8):
        assert zr[((m + 1,), (m,))] == pytest.approx(math.sqrt(m + 1))


@pytest.mark.parametrize("z, text", [
    (ExactComplex(0, Fraction(1, 2)), "1/2i"),
    (ExactComplex(0, Fraction(-1, 2)), "-1/2i"),
    (ExactComplex(Fraction(3, 4), -1), "3/4-1i"),
    (ExactComplex(1, 2), "1+2i"),
])
def test_exact_complex_str(z, text):
    assert str(z) == text
