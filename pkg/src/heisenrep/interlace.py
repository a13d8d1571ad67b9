"""The interlacing kernel, the two units and the extended Fock space.

The kernel ``K = sum_p zb2**(2 lam + p) exp(zeta zb1 / zb2)`` is never
integrated.  It is stored as a formal sum of terms

    coeff * [zeta**m in block p] * zb1**a * zb2**(2 lam + e)

keyed by ``(p, m, a, e)`` with integer ``e``.  Operators on the ``zeta`` side
act on ``(p, m)``; operators on the Fock side reach the kernel through the
Gaussian transpose ``z_alpha -> d/dzb_alpha``, ``d/dz_alpha -> zb_alpha``.
All identities are then coefficient identities, exact in rational ``lam``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .core import (
    EmptyInterior,
    GradedIndex,
    MonomialBox,
    ShiftOperator,
    TruncationWindow,
    as_spin,
    commutator,
    components_from_ladders,
    interior_residual,
    magnitude,
)
from .oscillators import differentiation, multiplication, nonfock_h4
from .symmetry import PAULI, graded_su2

HALF = Fraction(1, 2)

Datum = dict  # (p, m, a, e) -> coefficient


def _add(out: dict, key, val):
    if val == 0:
        return
    new = out.get(key, 0) + val
    if new == 0:
        out.pop(key, None)
    else:
        out[key] = new


def _map(datum: Mapping, rule) -> Datum:
    out = {}
    for key, c in datum.items():
        for k2, v in rule(*key):
            _add(out, k2, c * v)
    return out


def _lin(*pairs) -> Datum:
    out = {}
    for s, d in pairs:
        for k, v in d.items():
            _add(out, k, s * v)
    return out


# --------------------------------------------------------------------------
# kernel blocks


@dataclass(frozen=True)
class KernelBlock:
    """Block ``p`` of the kernel: ``zb2**exponent * sum_j coeffs[j] (zeta zb1 / zb2)**j``."""

    p: int
    exponent: object
    coeffs: tuple

    def terms(self) -> Datum:
        return {(self.p, j, j, self.p - j): c for j, c in enumerate(self.coeffs)}


def kernel_blocks(lam, p_window: Sequence[int], j_max: int) -> list:
    spin = as_spin(lam)
    coeffs = tuple(Fraction(1, math.factorial(j)) for j in range(j_max + 1))
    return [KernelBlock(p, 2 * spin.value + p, coeffs) for p in p_window]


def kernel_datum(blocks: Sequence[KernelBlock]) -> Datum:
    out = {}
    for b in blocks:
        out.update(b.terms())
    return out


def _residual(x: Mapping, y: Mapping, keep) -> object:
    worst = 0
    for k in set(x) | set(y):
        if keep(k):
            d = x.get(k, 0) - y.get(k, 0)
            if d != 0:
                worst = max(worst, magnitude(d))
    return worst


def _collapse(datum: Mapping) -> Datum:
    """Forget the block label: the kernel as a single function of ``zeta, zb``.

    The block of a term is recovered as ``m + e`` on the kernel itself.
    """
    out = {}
    for (p, m, a, e), c in datum.items():
        _add(out, (m, a, e), c)
    return out


def multiply_zb2_poly(datum: Mapping, poly: Sequence) -> Datum:
    """``f(zb2) * datum`` for ``f = sum_k poly[k] zb2**k``."""
    out = {}
    for (p, m, a, e), c in datum.items():
        for k, fk in enumerate(poly):
            _add(out, (p, m, a, e + k), c * fk)
    return out


def kernel_shift_check(blocks: Sequence[KernelBlock], poly: Sequence = (0, 1)) -> object:
    """Residual of ``f(zb2) K = f(1) K`` on the interior of the block family.

    ``poly`` lists the coefficients of ``f``.  Multiplying by ``zb2`` moves
    every block onto the formal datum of its upper neighbour, so the check
    compares the collapsed kernels on blocks at least ``deg f`` above the
    bottom of the window and below its top.

    Raises
    ------
    EmptyInterior
        If fewer than three contiguous blocks are given.
    """
    ps = sorted(b.p for b in blocks)
    if len(ps) < 3 or ps != list(range(ps[0], ps[-1] + 1)):
        raise EmptyInterior("need at least three contiguous blocks")
    deg = max(len(poly) - 1, 1)
    j_max = len(blocks[0].coeffs) - 1
    K = kernel_datum(blocks)
    lhs = _collapse(multiply_zb2_poly(K, poly))
    f1 = sum(poly)
    rhs = {k: f1 * v for k, v in _collapse(K).items()}
    lo, hi = ps[0] + deg, ps[-1] - 1

    def keep(k):
        m, a, e = k
        return lo <= m + e <= hi and m <= j_max

    if lo > hi:
        raise EmptyInterior(f"polynomial degree {deg} leaves no interior blocks")
    return _residual(lhs, rhs, keep)


def in_kernel(poly: Sequence) -> bool:
    """Membership of ``f(zb2)`` in the kernel of ``K``: ``f(1) == 0``."""
    return sum(poly) == 0


# --------------------------------------------------------------------------
# zeta-side operators on formal data


def zeta_side(lam, name: str) -> Callable[[Mapping], Datum]:
    """Graded-space operator ``name`` acting on the ``(p, m)`` part of a datum.

    ``name`` is one of ``phi1, phi2, phibar1, phibar2, L3, L+, L-``.
    """
    lv = as_spin(lam).value

    def Lam(p):
        return lv + Fraction(p, 2) if isinstance(lv, Fraction) else lv + p / 2

    rules = {
        "phi1": lambda p, m, a, e: [((p - 1, m - 1, a, e), m)] if m > 0 else [],
        "phi2": lambda p, m, a, e: [((p - 1, m, a, e), 1)],
        "phibar1": lambda p, m, a, e: [((p + 1, m + 1, a, e), 1)],
        "phibar2": lambda p, m, a, e: [((p + 1, m, a, e), 2 * lv + p + 1 - m)],
        "L3": lambda p, m, a, e: [((p, m, a, e), m - Lam(p))],
        "L+": lambda p, m, a, e: [((p, m + 1, a, e), 1)],
        "L-": lambda p, m, a, e: [((p, m - 1, a, e), m * (2 * Lam(p) - m + 1))] if m > 0 else [],
    }
    rule = rules[name]
    return lambda d: _map(d, rule)


def _zb_mult(k: int):
    def rule(p, m, a, e):
        return [((p, m, a + 1, e), 1)] if k == 1 else [((p, m, a, e + 1), 1)]

    return lambda d: _map(d, rule)


def _zb_diff(lam, k: int):
    lv = as_spin(lam).value

    def rule(p, m, a, e):
        if k == 1:
            return [((p, m, a - 1, e), a)] if a > 0 else []
        return [((p, m, a, e - 1), 2 * lv + e)]

    return lambda d: _map(d, rule)


WEYL = ("z1", "z2", "d1", "d2")


def gauss_transpose(lam, word) -> Callable[[Mapping], Datum]:
    """Kernel-side action of a Fock-side word in ``z1, z2, d1, d2``.

    Integrating by parts against the Gaussian weight sends ``z_alpha`` to
    ``d/dzb_alpha`` and ``d/dz_alpha`` to ``zb_alpha``; a product is
    transposed in reverse order.  ``word`` is a generator name or a sequence
    of them, read left to right as an operator product.
    """
    if isinstance(word, str):
        word = (word,)
    for w in word:
        if w not in WEYL:
            raise ValueError(f"unknown generator {w!r}; expected one of {WEYL}")
    maps = []
    for w in word:
        k = int(w[1])
        maps.append(_zb_diff(lam, k) if w[0] == "z" else _zb_mult(k))

    def apply(d):
        # T(A B) = T(B) T(A), so T(A) reaches the kernel first
        for f in maps:
            d = f(d)
        return d

    return apply


FOCK_WORDS = {
    "phi1": [(1, ("d1",))],
    "phi2": [(1, ("d2",))],
    "phibar1": [(1, ("z1",))],
    "phibar2": [(1, ("z2",))],
    "L3": [(HALF, ("z1", "d1")), (-HALF, ("z2", "d2"))],
    "L+": [(1, ("z1", "d2"))],
    "L-": [(1, ("z2", "d1"))],
}
GENERATORS = tuple(FOCK_WORDS)


def fock_side(lam, name: str) -> Callable[[Mapping], Datum]:
    """Kernel-side image of the Fock-side partner of ``name``."""
    parts = [(c, gauss_transpose(lam, w)) for c, w in FOCK_WORDS[name]]
    return lambda d: _lin(*[(c, f(d)) for c, f in parts])


def interlace_residual(lam, generator: str, p_window: Sequence[int] = range(-5, 6),
                       j_max: int = 20) -> object:
    """Residual of ``a(zeta) K = T(a(z)) K`` on interior blocks and ``m <= j_max - 2``.

    Raises
    ------
    ValueError
        If ``j_max < 4`` (no interior series indices).
    """
    if j_max < 4:
        raise ValueError(f"j_max={j_max} too small; need at least 4")
    ps = sorted(p_window)
    if len(ps) < 3:
        raise EmptyInterior("need at least three blocks")
    K = kernel_datum(kernel_blocks(lam, ps, j_max))
    lhs = zeta_side(lam, generator)(K)
    rhs = fock_side(lam, generator)(K)
    lo, hi = ps[0] + 1, ps[-1] - 1

    def keep(k):
        return lo <= k[0] <= hi and k[1] <= j_max - 2

    return _residual(lhs, rhs, keep)


# --------------------------------------------------------------------------
# two units


@dataclass(frozen=True)
class UnitPair:
    """The block identity and the block shift ``a^1_2`` on one window."""

    block_identity: ShiftOperator
    shift_unit: ShiftOperator


@dataclass(frozen=True)
class TwoUnitsReport:
    structurally_equal: bool
    entry_values: frozenset
    identity_commutators: dict
    mixing: dict
    mixing_residuals: dict
    expected_mixing: dict


def unit_pair(lam, window: TruncationWindow) -> UnitPair:
    rep = nonfock_h4(lam, window)
    return UnitPair(ShiftOperator.identity(window), rep.a1[1])


def _structural_equality(pair: UnitPair) -> tuple:
    one, shift = pair.block_identity, pair.shift_unit
    values = {v for _, _, v in one.entries()} | {v for _, _, v in shift.entries()}
    w = one.space
    ok = True
    for c in w.basis:
        moved = {GradedIndex(r.p + 1, r.m): v for r, v in shift.columns.get(c, {}).items()}
        if c.p == w.p_min:
            ok &= not moved
            continue
        ok &= moved == dict(one.columns.get(c, {}))
    return ok, frozenset(values)


def _su2_components(rep):
    L3, Lp, Lm = graded_su2(rep)
    L1, L2 = components_from_ladders(Lp, Lm)
    return {"1": L1, "2": L2, "3": L3}


def _extract_mixing(comm: ShiftOperator, basis_ops: Sequence[ShiftOperator], support) -> list:
    """Coefficients ``c_g`` with ``comm = sum_g c_g basis_ops[g]``, read off one entry each.

    The two ``a^1`` components have disjoint supports, so a single interior
    entry of each pins its coefficient.
    """
    out = []
    for op in basis_ops:
        coef = 0
        for c in sorted(support):
            if c.m < 1:
                continue
            col = op.columns.get(c, {})
            for r, v in col.items():
                if r in support:
                    val = comm[r, c]
                    coef = val / v if val != 0 else 0
                    break
            else:
                continue
            break
        out.append(coef)
    return out


def two_units_check(window: TruncationWindow, lam) -> TwoUnitsReport:
    """Compare the block identity with ``a^1_2`` structurally and under ``su(2)``.

    Returns the brute-forced mixing ``[L_i, a^1_alpha] = sum_g c[i][alpha][g] a^1_g``
    next to the expected ``-1/2 (sigma_i)_{alpha g}``.
    """
    if window.p_max - window.p_min < 2:
        raise EmptyInterior("need at least three blocks")
    rep = nonfock_h4(lam, window)
    pair = UnitPair(ShiftOperator.identity(window), rep.a1[1])
    eq, values = _structural_equality(pair)
    comps = _su2_components(rep)
    support = window.interior((1, 2))
    zero = ShiftOperator.zero(window)
    id_comm = {
        i: interior_residual(commutator(L, pair.block_identity), zero, support=support)
        for i, L in comps.items()
    }
    mixing, residuals, expected = {}, {}, {}
    for i, L in comps.items():
        sigma = PAULI[int(i) - 1]
        rows = []
        for alpha in range(2):
            comm = commutator(L, rep.a1[alpha])
            coefs = _extract_mixing(comm, rep.a1, support)
            target = rep.a1[0].scale(coefs[0]) + rep.a1[1].scale(coefs[1])
            residuals[(i, alpha + 1)] = interior_residual(comm, target, support=support)
            rows.append(tuple(coefs))
        mixing[i] = tuple(rows)
        expected[i] = tuple(
            tuple(-HALF * sigma[alpha][g] for g in range(2)) for alpha in range(2)
        )
    return TwoUnitsReport(eq, values, id_comm, mixing, residuals, expected)


# --------------------------------------------------------------------------
# extended Fock space


@dataclass(frozen=True)
class ExtendedFockSpace:
    """Monomials ``z1**m1 z2**m2 z**k``; ``z`` is the additional variable.

    ``a1``/``a2`` act on the Fock factor only; ``z_mult`` and ``z_diff`` are
    the formal partner pair on the additional variable, with no further
    properties asserted.
    """

    box: MonomialBox
    a1: tuple
    a2: tuple
    z_mult: ShiftOperator
    z_diff: ShiftOperator
    L3: ShiftOperator
    Lp: ShiftOperator
    Lm: ShiftOperator

    def fock_support(self) -> frozenset:
        """Labels on which ``su(2)`` and the Fock ladders are free of truncation."""
        top = min(self.box.hi[:2]) - 1
        return frozenset(e for e in self.box.basis if e[0] + e[1] <= top)

    def pure_z(self) -> list:
        return [e for e in self.box.basis if e[0] == 0 and e[1] == 0]


def extended_fock_space(m1_max: int, m2_max: int, k_max: int) -> ExtendedFockSpace:
    if min(m1_max, m2_max, k_max) < 2:
        raise ValueError("all sizes must be at least 2")
    box = MonomialBox.caps(m1_max, m2_max, k_max, names=("z1", "z2", "z"))
    a1 = (differentiation(box, 0), differentiation(box, 1))
    a2 = (multiplication(box, 0), multiplication(box, 1))
    L3 = (a2[0] @ a1[0] - a2[1] @ a1[1]).scale(HALF)
    Lp = a2[0] @ a1[1]
    Lm = a2[1] @ a1[0]
    return ExtendedFockSpace(
        box, a1, a2, multiplication(box, 2), differentiation(box, 2), L3, Lp, Lm
    )


@dataclass(frozen=True)
class PhaseSplitReport:
    l0_l_on_z: object
    l0_i_on_z: object
    gamma0_on_z: object
    casimir_on_scalars: object
    L0_l: ShiftOperator
    L0_i: ShiftOperator
    Gamma0: ShiftOperator


def phase_split_check(space: ExtendedFockSpace) -> PhaseSplitReport:
    """Split ``L0`` into the part blind to ``z`` and the part treating ``z`` like ``z2``.

    Residuals reported: ``L0^(l) z**k = 0``, ``L0^(i) z = z/2``,
    ``Gamma0 z = z`` with ``Gamma0 = L0^(i) + 1/2``, and
    ``L^2 = L0^(l) (L0^(l) + 1)`` on the truncation-free labels.
    """
    box = space.box
    n_fock = space.a2[0] @ space.a1[0] + space.a2[1] @ space.a1[1]
    n_z = space.z_mult @ space.z_diff
    L0_l = n_fock.scale(HALF)
    L0_i = (n_fock + n_z).scale(HALF)
    G0 = L0_i.plus_scalar(HALF)
    zeros = space.pure_z()

    def worst_on(vecs, op, target_of):
        w = 0
        for e in vecs:
            out = op.apply({e: 1})
            tgt = target_of(e)
            for k in set(out) | set(tgt):
                d = out.get(k, 0) - tgt.get(k, 0)
                if d != 0:
                    w = max(w, magnitude(d))
        return w

    z1 = (0, 0, 1)
    r_l = worst_on(zeros, L0_l, lambda e: {})
    r_i = worst_on([z1], L0_i, lambda e: {e: HALF})
    r_g = worst_on([z1], G0, lambda e: {e: 1})
    L3, Lp, Lm = space.L3, space.Lp, space.Lm
    Lsq = L3 @ L3 + (Lp @ Lm + Lm @ Lp).scale(HALF)
    r_c = interior_residual(Lsq, L0_l @ L0_l.plus_scalar(1), support=space.fock_support())
    return PhaseSplitReport(r_l, r_i, r_g, r_c, L0_l, L0_i, G0)
