"""The involutive Heisenberg algebra on ``(z1, z2, zb1, zb2)`` and its u(1,1) corner.

The spinor pair is ``phi = (d/dzb_1, d/dzb_2, z_1, z_2)`` and
``phibar = (zb_1, zb_2, -d/dz_1, -d/dz_2)``, so ``[phi_a, phibar_b] = delta_ab``.
Dirac bilinears ``phibar M phi`` then realise ``so(4) + u(1) + u(1)``, and the
momenta ``p_mu``, ``pdot_mu`` are the off-chiral pieces.

Monomials are 4-tuples of exponents ``(a1, a2, b1, b2)`` for
``z1**a1 z2**a2 zb1**b1 zb2**b2``.  Hermiticity contracts are checked on
plain polynomial dictionaries so that no truncation enters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .core import (
    ExactComplex,
    HeisenrepError,
    MonomialBox,
    ShiftOperator,
    casimir_su2,
    commutator,
    interior_residual,
    magnitude,
)
from .forms import h8_form
from .oscillators import differentiation, multiplication
from .symmetry import PAULI

HALF = Fraction(1, 2)
I_ = ExactComplex(0, 1)
NAMES = ("z1", "z2", "zb1", "zb2")


class DiracArrangementError(HeisenrepError):
    """The gamma matrices do not reproduce the momentum operators."""


# --------------------------------------------------------------------------
# exact 4x4 matrices


def _eye(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _zeros(n):
    return tuple(tuple(0 for _ in range(n)) for _ in range(n))


def mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(n)), 0) for j in range(n))
        for i in range(n)
    )


def mat_add(a, b, s=1):
    return tuple(tuple(x + s * y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a, s):
    return tuple(tuple(s * x for x in row) for row in a)


def _blocks(tl, tr, bl, br):
    top = tuple(tuple(tl[i]) + tuple(tr[i]) for i in range(2))
    bot = tuple(tuple(bl[i]) + tuple(br[i]) for i in range(2))
    return top + bot


def as_array(a) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in a])


def sigma_pm(sign: int):
    """``sigma^{+-}_mu = (sigma_1, sigma_2, sigma_3, +-i)`` as 2x2 matrices."""
    return tuple(PAULI) + (mat_scale(_eye(2), I_ * sign),)


@dataclass(frozen=True)
class DiracSet:
    """Euclidean Dirac matrices, ``{gamma_mu, gamma_nu} = 2 delta_{mu nu}``.

    ``sigma[(mu, nu)]`` is ``Sigma_{mu nu} = [gamma_mu, gamma_nu] / 4i`` with
    1-based indices.
    """

    gamma: tuple
    gamma5: tuple
    p_plus: tuple
    p_minus: tuple
    sigma: dict = field(repr=False)

    def anticommutator(self, mu: int, nu: int):
        g, h = self.gamma[mu - 1], self.gamma[nu - 1]
        return mat_add(mat_mul(g, h), mat_mul(h, g))

    def clifford_residual(self) -> float:
        """Max entry of ``{gamma_mu, gamma_nu} - 2 delta`` and of the gamma5 relations."""
        worst = 0
        one = _eye(4)
        for mu, nu in itertools.product(range(1, 5), repeat=2):
            target = mat_scale(one, 2 if mu == nu else 0)
            worst = max(worst, _max_entry(mat_add(self.anticommutator(mu, nu), target, -1)))
        g5 = self.gamma5
        worst = max(worst, _max_entry(mat_add(mat_mul(g5, g5), one, -1)))
        for g in self.gamma:
            worst = max(worst, _max_entry(mat_add(mat_mul(g5, g), mat_mul(g, g5))))
        for p in (self.p_plus, self.p_minus):
            worst = max(worst, _max_entry(mat_add(mat_mul(p, p), p, -1)))
        worst = max(worst, _max_entry(mat_mul(self.p_plus, self.p_minus)))
        return worst


def _max_entry(a):
    return max((magnitude(x) for row in a for x in row if x != 0), default=0)


def dirac_set() -> DiracSet:
    """Chiral basis with ``gamma_4 = [[0, 1], [1, 0]]`` and ``gamma_5 = diag(-1, 1)``.

    ``gamma_k = [[0, -i sigma_k], [i sigma_k, 0]]``; this arrangement is the
    one for which ``i phibar gamma_mu P+ phi`` is ``zb sigma+_mu z``.
    """
    z2 = _zeros(2)
    gam = tuple(
        _blocks(z2, mat_scale(s, -I_), mat_scale(s, I_), z2) for s in PAULI
    ) + (_blocks(z2, _eye(2), _eye(2), z2),)
    g5 = mat_scale(mat_mul(mat_mul(gam[0], gam[1]), mat_mul(gam[2], gam[3])), -1)
    one = _eye(4)
    pp = mat_scale(mat_add(one, g5), HALF)
    pm = mat_scale(mat_add(one, g5, -1), HALF)
    quarter_over_i = ExactComplex(0, Fraction(-1, 4))
    sig = {}
    for mu, nu in itertools.combinations(range(1, 5), 2):
        g, h = gam[mu - 1], gam[nu - 1]
        sig[(mu, nu)] = mat_scale(mat_add(mat_mul(g, h), mat_mul(h, g), -1), quarter_over_i)
    return DiracSet(gam, g5, pp, pm, sig)


# --------------------------------------------------------------------------
# phi, phibar on the four-variable box


class TwoModeStarIndex(NamedTuple):
    m1: int
    m2: int
    n1: int
    n2: int


@dataclass(frozen=True)
class H8Rep:
    """``phi`` and ``phibar`` as 4-component tuples of operators on ``box``."""

    box: MonomialBox
    phi: tuple
    phibar: tuple

    def z(self, a):
        return self.phi[a + 1]

    def zb(self, a):
        return self.phibar[a - 1]


def h8_phi_rep(caps=3) -> H8Rep:
    """Build ``phi`` and ``phibar`` on monomials with every exponent ``<= caps``."""
    if isinstance(caps, int):
        caps = (caps,) * 4
    if len(caps) != 4 or min(caps) < 2:
        raise ValueError(f"caps={caps}: need four caps, each at least 2")
    box = MonomialBox.caps(*caps, names=NAMES)
    d = [differentiation(box, k) for k in range(4)]
    x = [multiplication(box, k) for k in range(4)]
    phi = (d[2], d[3], x[0], x[1])
    phibar = (x[2], x[3], -d[0], -d[1])
    return H8Rep(box, phi, phibar)


def heisenberg_residuals(rep: H8Rep) -> dict:
    """Residuals of ``[phi_a, phibar_b] = delta``, ``[phi, phi] = [phibar, phibar] = 0``."""
    one = ShiftOperator.identity(rep.box)
    zero = ShiftOperator.zero(rep.box, shift=None)
    out = {}
    for a, b in itertools.product(range(4), repeat=2):
        target = one if a == b else zero
        out[("phi", "phibar", a + 1, b + 1)] = interior_residual(
            commutator(rep.phi[a], rep.phibar[b]), target, margin=1
        )
        out[("phi", "phi", a + 1, b + 1)] = interior_residual(
            commutator(rep.phi[a], rep.phi[b]), zero, margin=1
        )
        out[("phibar", "phibar", a + 1, b + 1)] = interior_residual(
            commutator(rep.phibar[a], rep.phibar[b]), zero, margin=1
        )
    return out


def dirac_bilinear(rep: H8Rep, m, scale=1) -> ShiftOperator:
    """``scale * sum_ab phibar_a m[a][b] phi_b`` in that operator order."""
    out = ShiftOperator.zero(rep.box, shift=None)
    for a, b in itertools.product(range(4), repeat=2):
        c = m[a][b] * scale
        if c != 0:
            out = out + (rep.phibar[a] @ rep.phi[b]).scale(c)
    return out


@dataclass(frozen=True)
class BilinearAlgebra:
    rep: H8Rep
    I: dict
    A: ShiftOperator
    B: ShiftOperator

    def i_op(self, mu: int, nu: int) -> ShiftOperator:
        """``I_{mu nu}`` for any ordered pair, using antisymmetry."""
        if mu == nu:
            return ShiftOperator.zero(self.rep.box, shift=None)
        if mu < nu:
            return self.I[(mu, nu)]
        return -self.I[(nu, mu)]

    def operators(self) -> list:
        return [self.I[k] for k in sorted(self.I)] + [self.A, self.B]


def bilinear_algebra(rep: H8Rep, dirac: DiracSet) -> BilinearAlgebra:
    I_ops = {k: dirac_bilinear(rep, s) for k, s in dirac.sigma.items()}
    A = dirac_bilinear(rep, _eye(4))
    B = dirac_bilinear(rep, dirac.gamma5)
    return BilinearAlgebra(rep, I_ops, A, B)


def _fit_constant(bracket: ShiftOperator, target: ShiftOperator, support):
    """Ratio ``bracket / target`` read off the first nonzero entry of ``target``."""
    for c in sorted(support):
        for r, v in sorted(target.columns.get(c, {}).items()):
            if r in support:
                return bracket[(r, c)] / v
    raise ValueError("target vanishes on the support")


def _so4_target(alg: BilinearAlgebra, mu, nu, rho, sig):
    out = ShiftOperator.zero(alg.rep.box, shift=None)
    for d, (x, y), s in (
        (nu == rho, (mu, sig), 1),
        (mu == sig, (nu, rho), 1),
        (mu == rho, (nu, sig), -1),
        (nu == sig, (mu, rho), -1),
    ):
        if d:
            out = out + alg.i_op(x, y).scale(s)
    return out


def i_bracket_constant(alg: BilinearAlgebra, margin: int = 2):
    """Brute-force ``kappa`` in ``[I_12, I_23] = kappa I_13``."""
    inner = alg.rep.box.interior(margin)
    return _fit_constant(commutator(alg.I[(1, 2)], alg.I[(2, 3)]), alg.I[(1, 3)], inner)


def bracket_residuals(alg: BilinearAlgebra, kappa=None, margin: int = 2) -> dict:
    """Residuals of the ``so(4)`` bracket and of ``[I, A] = [I, B] = [A, B] = 0``.

    The ``so(4)`` form is ``[I_mn, I_rs] = kappa (d_nr I_ms + d_ms I_nr
    - d_mr I_ns - d_ns I_mr)`` with ``kappa`` brute-forced unless given.
    """
    if kappa is None:
        kappa = i_bracket_constant(alg, margin)
    zero = ShiftOperator.zero(alg.rep.box, shift=None)
    out = {}
    keys = sorted(alg.I)
    for k1, k2 in itertools.product(keys, repeat=2):
        target = _so4_target(alg, *k1, *k2).scale(kappa)
        out[("I", k1, k2)] = interior_residual(
            commutator(alg.I[k1], alg.I[k2]), target, margin=margin
        )
    for k in keys:
        out[("IA", k)] = interior_residual(commutator(alg.I[k], alg.A), zero, margin=margin)
        out[("IB", k)] = interior_residual(commutator(alg.I[k], alg.B), zero, margin=margin)
    out[("AB",)] = interior_residual(commutator(alg.A, alg.B), zero, margin=margin)
    return out


# --------------------------------------------------------------------------
# momenta


@dataclass(frozen=True)
class Momenta:
    p: tuple
    pdot: tuple
    consistency: float


def _direct_momenta(rep: H8Rep):
    zb = rep.phibar[:2]
    z = rep.phi[2:]
    d = tuple(-x for x in rep.phibar[2:])
    db = rep.phi[:2]
    p, pdot = [], []
    for sp, sm in zip(sigma_pm(1), sigma_pm(-1)):
        acc_p = ShiftOperator.zero(rep.box, shift=None)
        acc_d = ShiftOperator.zero(rep.box, shift=None)
        for a, b in itertools.product(range(2), repeat=2):
            if sp[a][b] != 0:
                acc_p = acc_p + (zb[a] @ z[b]).scale(sp[a][b])
            if sm[a][b] != 0:
                acc_d = acc_d + (d[a] @ db[b]).scale(-sm[a][b])
        p.append(acc_p)
        pdot.append(acc_d)
    return tuple(p), tuple(pdot)


def momentum_ops(rep: H8Rep, dirac: DiracSet) -> Momenta:
    """``p_mu = i phibar gamma_mu P+ phi`` and ``pdot_mu = -i phibar gamma_mu P- phi``.

    Both are compared against the direct forms ``zb sigma+_mu z`` and
    ``-d sigma-_mu dbar``.

    Raises
    ------
    DiracArrangementError
        If the two constructions disagree anywhere on the interior.
    """
    p = tuple(dirac_bilinear(rep, mat_mul(g, dirac.p_plus), I_) for g in dirac.gamma)
    pdot = tuple(dirac_bilinear(rep, mat_mul(g, dirac.p_minus), -I_) for g in dirac.gamma)
    p_ref, pdot_ref = _direct_momenta(rep)
    worst = 0
    for a, b in zip(p + pdot, p_ref + pdot_ref):
        worst = max(worst, interior_residual(a, b, margin=1))
    if worst != 0:
        raise DiracArrangementError(f"gamma arrangement off by {worst}")
    return Momenta(p, pdot, worst)


def independence_rank(alg: BilinearAlgebra, mom: Momenta) -> int:
    """Rank of the 16 generators flattened into vectors."""
    ops = alg.operators() + list(mom.p) + list(mom.pdot)
    mat = np.array([op.to_dense().ravel() for op in ops])
    return int(np.linalg.matrix_rank(mat))


# --------------------------------------------------------------------------
# Hermiticity on polynomial dictionaries

PolyOp = Callable[[dict], dict]


def _acc(out, key, val):
    new = out.get(key, 0) + val
    if new == 0:
        out.pop(key, None)
    else:
        out[key] = new


def poly_mul(k: int) -> PolyOp:
    def op(f):
        out = {}
        for e, c in f.items():
            e2 = list(e)
            e2[k] += 1
            _acc(out, tuple(e2), c)
        return out
    return op


def poly_diff(k: int) -> PolyOp:
    def op(f):
        out = {}
        for e, c in f.items():
            if e[k] != 0:
                e2 = list(e)
                e2[k] -= 1
                _acc(out, tuple(e2), c * e[k])
        return out
    return op


def poly_word(*terms) -> PolyOp:
    """Sum of ``coeff * X1(X2(...(f)))`` over ``terms = [(coeff, (X1, X2, ...)), ...]``."""
    def op(f):
        out = {}
        for coeff, word in terms:
            g = f
            for x in reversed(word):
                g = x(g)
            for e, c in g.items():
                _acc(out, e, c * coeff)
        return out
    return op


def ladder_polys():
    """``a^1_a = z_a``, ``a^2_a = -d/dz_a`` and their involution images.

    Returns ``{name: (op, star, sign)}`` with the contract
    ``<f, op g> = sign <star f, g>``.
    """
    out = {}
    for a in range(2):
        z, zb = poly_mul(a), poly_mul(a + 2)
        d, db = poly_diff(a), poly_diff(a + 2)
        out[f"a1_{a + 1}"] = (z, poly_word((-1, (zb,))), -1)
        out[f"a2_{a + 1}"] = (poly_word((-1, (d,))), db, 1)
    return out


def momentum_polys():
    """``{name: (op, op, sign)}`` for ``p_mu``, ``pdot_mu``; ``mu = 4`` is anti-Hermitian."""
    out = {}
    for mu, (sp, sm) in enumerate(zip(sigma_pm(1), sigma_pm(-1)), start=1):
        pt, dt = [], []
        for a, b in itertools.product(range(2), repeat=2):
            if sp[a][b] != 0:
                pt.append((sp[a][b], (poly_mul(a + 2), poly_mul(b))))
            if sm[a][b] != 0:
                dt.append((-sm[a][b], (poly_diff(a), poly_diff(b + 2))))
        sign = -1 if mu == 4 else 1
        p, pd = poly_word(*pt), poly_word(*dt)
        out[f"p_{mu}"] = (p, p, sign)
        out[f"pdot_{mu}"] = (pd, pd, sign)
    return out


def _dual_monomial(e):
    """The monomial whose pairing with ``e`` is 1."""
    neg = tuple(-1 - x for x in e)
    return neg[2:] + neg[:2]


def contract_residual(op: PolyOp, star: PolyOp, sign, cap: int) -> float:
    """Max of ``|<f, op g> - sign <star f, g>|`` over monomials ``g`` with exponents ``<= cap``.

    ``f`` ranges over every dual monomial on which either side can be nonzero.
    """
    base = (-10,) * 4
    shifts = {tuple(a - b for a, b in zip(e, base)) for e in star({base: 1})}
    worst = 0
    for g in itertools.product(range(cap + 1), repeat=4):
        gd = {g: 1}
        image = op(gd)
        cands = {_dual_monomial(e) for e in image}
        dg = _dual_monomial(g)
        cands |= {tuple(a - s for a, s in zip(dg, v)) for v in shifts}
        for f in cands:
            fd = {f: 1}
            lhs = h8_form(fd, image, kind="dual").value
            rhs = h8_form(star(fd), gd, kind="dual").value
            worst = max(worst, magnitude(lhs - sign * rhs))
    return worst


def hermiticity_residuals(cap: int = 3) -> dict:
    ops = dict(ladder_polys())
    ops.update(momentum_polys())
    return {name: contract_residual(op, star, s, cap) for name, (op, star, s) in ops.items()}


# --------------------------------------------------------------------------
# u(1,1) on functions of (z, zb)


class F0Index(NamedTuple):
    """``z**k (zb z)**n``: fermionic charge ``k``, radial degree ``n``."""

    k: int
    n: int

    @property
    def monomial(self):
        return (self.k + self.n, self.n)


@dataclass(frozen=True)
class U11:
    box: MonomialBox
    Lp: ShiftOperator
    Lm: ShiftOperator
    L3: ShiftOperator
    L0: ShiftOperator
    F: ShiftOperator
    k_max: int
    n_max: int

    def generators(self) -> dict:
        return {"L+": self.Lp, "L-": self.Lm, "L3": self.L3, "L0": self.L0}

    def f0_basis(self) -> list:
        return [F0Index(k, n) for k in range(self.k_max + 1) for n in range(self.n_max + 1)]


def u11_restriction(k_max: int, n_max: int, laurent: int = 0) -> U11:
    """``L+ = zb z``, ``L- = -d/dz d/dzb``, ``L3``, ``L0`` and ``F = -2 L0 - 1``.

    The box holds ``z**j zb**l`` with ``-laurent <= j`` and ``j, l <= k_max + n_max + 1``
    so that every ``F0Index`` with ``n <= n_max`` is one step away from the edge.
    """
    if k_max < 0 or n_max < 2:
        raise ValueError(f"k_max={k_max}, n_max={n_max}: need k_max >= 0 and n_max >= 2")
    top = k_max + n_max + 1
    box = MonomialBox((-laurent, 0), (top, top), ("z", "zb"))
    Lp = ShiftOperator.from_action(box, lambda e: [((e[0] + 1, e[1] + 1), 1)], None, name="L+")
    Lm = ShiftOperator.from_action(
        box, lambda e: [((e[0] - 1, e[1] - 1), -e[0] * e[1])], None, name="L-"
    )
    L3 = ShiftOperator.from_action(box, lambda e: [(e, -HALF * (e[0] + e[1] + 1))], None, name="L3")
    L0 = ShiftOperator.from_action(box, lambda e: [(e, -HALF * (e[0] - e[1] + 1))], None, name="L0")
    F = (L0.scale(-2)).plus_scalar(-1)
    return U11(box, Lp, Lm, L3, L0, F, k_max, n_max)


def u11_brackets(u: U11) -> dict:
    """Brute-forced bracket constants and their residuals.

    Returns ``{name: (constant, residual)}`` for ``[L+, L-] = c L3``,
    ``[L3, L+] = c L+``, ``[L3, L-] = c L-`` and ``[L0, X] = 0``.
    """
    inner = u.box.interior(1)
    out = {}
    for name, (x, y, t) in {
        "[L+,L-]/L3": (u.Lp, u.Lm, u.L3),
        "[L3,L+]/L+": (u.L3, u.Lp, u.Lp),
        "[L3,L-]/L-": (u.L3, u.Lm, u.Lm),
    }.items():
        br = commutator(x, y)
        c = _fit_constant(br, t, inner)
        out[name] = (c, interior_residual(br, t.scale(c), support=inner))
    zero = ShiftOperator.zero(u.box, shift=None)
    for name, g in u.generators().items():
        out[f"[L0,{name}]"] = (0, interior_residual(commutator(u.L0, g), zero, support=inner))
    return out


@dataclass(frozen=True)
class LaurentDemo:
    tail_invariant: bool
    union_invariant: bool
    singular_invariant: bool
    witness: dict
    witness_outside: bool


@dataclass(frozen=True)
class F0Report:
    off_sector_entries: int
    casimirs: dict
    expected_casimirs: dict
    f_spectrum: list
    laurent: LaurentDemo

    @property
    def ok(self) -> bool:
        return (
            self.off_sector_entries == 0
            and self.casimirs == self.expected_casimirs
            and min(self.f_spectrum) >= 0
            and self.laurent.tail_invariant
            and self.laurent.union_invariant
            and not self.laurent.singular_invariant
            and self.laurent.witness_outside
        )


def casimir_weight(k: int) -> Fraction:
    w = Fraction(-(k + 1), 2)
    return w * (w + 1)


def _sector_casimir(C: ShiftOperator, cols):
    """Scalar value of ``C`` on ``span(cols)``, or ``None`` if ``C`` is not scalar there."""
    colset = set(cols)
    value = None
    for c in cols:
        col = C.columns.get(c, {})
        for r, v in col.items():
            if r != c or r not in colset:
                return None
        d = col.get(c, 0)
        if value is None:
            value = d
        elif d != value:
            return None
    return value


def _maps_into(ops, cols, target) -> bool:
    target = set(target)
    return all(
        r in target for op in ops for c in cols for r in op.columns.get(c, {})
    )


def laurent_demo(k_max: int, n_max: int) -> LaurentDemo:
    """One-way invariance between the singular span and the tail.

    Singular span for charge ``-k``: ``z**(n-k) zb**n`` with ``n <= k - 1``.
    Tail: ``z**n zb**(k+n)``.  The tail is invariant, the union is invariant,
    the singular span is not.
    """
    u = u11_restriction(k_max, n_max, laurent=k_max)
    ops = list(u.generators().values())
    tail_ok = union_ok = True
    sing_inv = True
    for k in range(1, k_max + 1):
        sing = [(n - k, n) for n in range(k)]
        tail_full = [(n, k + n) for n in range(n_max + 1)]
        tail = tail_full[:-1]
        tail_ok &= _maps_into(ops, tail, tail_full)
        union_ok &= _maps_into(ops, sing + tail, sing + tail_full)
        sing_inv &= _maps_into(ops, sing, sing)
    witness = u.Lp.apply({(-1, 0): 1})
    outside = any(r not in {(-1, 0)} for r in witness)
    return LaurentDemo(tail_ok, union_ok, sing_inv, witness, outside)


def f0_structure_checks(k_max: int = 4, n_max: int = 6) -> F0Report:
    u = u11_restriction(k_max, n_max)
    fval = u.F.diagonal()
    off = sum(
        1
        for op in u.generators().values()
        for r, c, _ in op.entries()
        if fval[r] != fval[c]
    )
    C = casimir_su2(u.L3, u.Lp, u.Lm)
    cas, exp = {}, {}
    for k in range(k_max + 1):
        cols = [F0Index(k, n).monomial for n in range(n_max + 1)]
        cas[k] = _sector_casimir(C, cols)
        exp[k] = casimir_weight(k)
    spectrum = sorted({fval[i.monomial] for i in u.f0_basis()})
    return F0Report(off, cas, exp, spectrum, laurent_demo(k_max, n_max))
