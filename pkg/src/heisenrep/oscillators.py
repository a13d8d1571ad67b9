"""Ladder operators for the Fock and the decycled (non-Fock) oscillators.

Three families live here:

* :func:`fock_ladders` builds ``a^1_k = d/dz_k`` and ``a^2_k = z_k`` on a box
  of monomials (one or two modes).
* :func:`nonfock_b_family` builds the spin-raising operators ``(p)b_alpha`` on
  Laurent monomials in one variable ``z``.
* :func:`phi_phibar` and :func:`nonfock_h4` build the decycled pair
  ``phi, phibar`` on the graded space ``sum_p F_{lam + p/2}`` of holomorphic
  functions of ``zeta`` and assemble them into a non-Fock ``h_4``.

Operators are exact whenever the spin parameter is a :class:`~fractions.Fraction`.
"""

from __future__ import annotations

import cmath
import math

from scipy import special
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    GradedIndex,
    MonomialBox,
    ShiftOperator,
    SpinParameter,
    TruncationWindow,
    as_spin,
    cartan_weyl_factor,
    commutator,
    interior_residual,
    rescale_operator,
)

HALF = Fraction(1, 2)


def _unit(k, n):
    return tuple(1 if j == k else 0 for j in range(n))


def _shifted(idx, k, d):
    out = list(idx)
    out[k] += d
    return tuple(out)


def differentiation(box: MonomialBox, k: int, name="") -> ShiftOperator:
    """``d/dx_k`` on the monomials of ``box`` (Laurent exponents allowed)."""
    return ShiftOperator.from_action(
        box, lambda e: [(_shifted(e, k, -1), e[k])], shift=None, name=name
    )


def multiplication(box: MonomialBox, k: int, power: int = 1, name="") -> ShiftOperator:
    """Multiplication by ``x_k**power``."""
    return ShiftOperator.from_action(
        box, lambda e: [(_shifted(e, k, power), 1)], shift=None, name=name
    )


# --------------------------------------------------------------------------
# Fock


@dataclass(frozen=True)
class FockLadderSet:
    """Fock ladders on monomials ``prod z_k**m_k`` with ``m_k <= m_max``.

    ``lowering[k]`` is ``a^1_k = d/dz_k`` and ``raising[k]`` is
    ``a^2_k = z_k``.
    """

    n_modes: int
    m_max: int
    box: MonomialBox
    lowering: tuple
    raising: tuple

    def number_operator(self, k: int) -> ShiftOperator:
        return self.raising[k] @ self.lowering[k]

    def cartan_weyl(self):
        """Ladders in the orthonormal basis ``z**m / sqrt(m!)``.

        Returns
        -------
        (lowering, raising) : tuple of tuples of ShiftOperator
            Float operators with the familiar ``sqrt(m)`` and ``sqrt(m+1)``
            matrix elements.
        """
        def factor(e):
            return 1.0 / math.sqrt(math.prod(math.factorial(x) for x in e))

        low = tuple(rescale_operator(op, factor) for op in self.lowering)
        up = tuple(rescale_operator(op, factor) for op in self.raising)
        return low, up


def fock_ladders(n_modes: int, m_max: int) -> FockLadderSet:
    if n_modes not in (1, 2):
        raise ValueError(f"n_modes={n_modes}: only one or two modes are supported")
    if m_max < 2:
        raise ValueError(f"m_max={m_max} must be at least 2")
    names = ("z1", "z2")[:n_modes] if n_modes == 2 else ("z",)
    box = MonomialBox.caps(*([m_max] * n_modes), names=names)
    low = tuple(differentiation(box, k, name=f"a1_{k + 1}") for k in range(n_modes))
    up = tuple(multiplication(box, k, name=f"a2_{k + 1}") for k in range(n_modes))
    return FockLadderSet(n_modes, m_max, box, low, up)


# --------------------------------------------------------------------------
# b family on Laurent monomials


@dataclass(frozen=True)
class BFamily:
    """Operators ``(p)b_alpha = 1/2 (z, -d/dz + 2p/z)`` for ``p`` in ``p_range``.

    ``ops[p]`` is the pair ``(b_1, b_2)``.  Block ``p`` acts on monomials of
    parity ``(-1)**p`` and produces the opposite parity.
    """

    lam: SpinParameter
    box: MonomialBox
    p_range: range
    ops: dict

    @staticmethod
    def domain_parity(p: int) -> int:
        return p % 2

    def apply_monomial(self, p: int, alpha: int, degree: int) -> dict:
        """Image of ``z**degree`` under ``(p)b_alpha`` as ``{degree: coeff}``.

        Raises
        ------
        ValueError
            If ``degree`` does not have the parity of block ``p``.
        """
        if degree % 2 != self.domain_parity(p):
            raise ValueError(
                f"degree {degree} has the wrong parity for block p={p}"
            )
        b = self.ops[p][alpha - 1]
        return {r[0]: v for r, v in b.apply({(degree,): 1}).items()}


def nonfock_b_family(lam, p_range: range, degree: int) -> BFamily:
    """Build ``(p)b_alpha`` on Laurent monomials ``z**e`` with ``|e| <= degree``.

    The spin parameter only fixes the representation being modelled; the
    operators themselves do not depend on it.
    """
    spin = as_spin(lam)
    box = MonomialBox((-degree,), (degree,), ("z",))
    ops = {}
    for p in p_range:
        b1 = ShiftOperator.from_action(box, lambda e: [((e[0] + 1,), HALF)], shift=None)
        b2 = ShiftOperator.from_action(
            box,
            lambda e, p=p: [((e[0] - 1,), HALF * (2 * p - e[0]))],
            shift=None,
        )
        ops[p] = (b1, b2)
    return BFamily(spin, box, p_range, ops)


def b_relation_residual(fam: BFamily, constant=Fraction(-1, 4)) -> object:
    """Max deviation of ``(p+1)b_1 (p)b_2 - (p+1)b_2 (p)b_1`` from ``constant``.

    Evaluated on every monomial of the right parity whose images stay two
    steps inside the Laurent box.
    """
    lim = fam.box.hi[0] - 2
    worst = 0
    for p in fam.p_range:
        if p + 1 not in fam.ops:
            continue
        for e in range(-lim, lim + 1):
            if e % 2 != fam.domain_parity(p):
                continue
            out = {}
            for a, b, s in ((1, 2, 1), (2, 1, -1)):
                for d1, c1 in fam.apply_monomial(p, b, e).items():
                    for d2, c2 in fam.apply_monomial(p + 1, a, d1).items():
                        out[d2] = out.get(d2, 0) + s * c1 * c2
            out[e] = out.get(e, 0) - constant
            worst = max([worst] + [abs(v) for v in out.values()])
    return worst


def laurent_ladders(box: MonomialBox):
    """``(a^1, a^2) = (d/dz, z)`` on a one-variable Laurent box."""
    return differentiation(box, 0, "a1"), multiplication(box, 0, 1, "a2")


# --------------------------------------------------------------------------
# decycled pair on the graded space


def _lam_value(spin: SpinParameter):
    return spin.value


@dataclass(frozen=True)
class DecycledPair:
    """``phi = (d/dzeta, 1)`` lowering ``p`` and ``phibar`` raising it.

    ``phi[a]`` and ``phibar[a]`` are global operators on the window; the
    restriction of ``phibar[a]`` to block ``p`` is ``(p)phibar_a``.
    """

    lam: SpinParameter
    window: TruncationWindow
    phi: tuple
    phibar: tuple

    def phibar_block(self, p: int, alpha: int) -> ShiftOperator:
        """``(p)phibar_alpha`` acting on block ``p`` only."""
        op = self.phibar[alpha - 1]
        cols = {c: col for c, col in op.columns.items() if c.p == p}
        return ShiftOperator(self.window, cols, 1, op.exact, f"({p})phibar_{alpha}")


def phi_phibar(lam, window: TruncationWindow) -> DecycledPair:
    spin = as_spin(lam)
    lv = _lam_value(spin)
    exact = spin.exact

    def gi(p, m):
        return GradedIndex(p, m)

    phi1 = ShiftOperator.from_action(
        window, lambda c: [(gi(c.p - 1, c.m - 1), c.m)], shift=-1, exact=exact, name="phi^1"
    )
    phi2 = ShiftOperator.from_action(
        window, lambda c: [(gi(c.p - 1, c.m), 1)], shift=-1, exact=exact, name="phi^2"
    )
    bar1 = ShiftOperator.from_action(
        window, lambda c: [(gi(c.p + 1, c.m + 1), 1)], shift=1, exact=exact, name="phibar_1"
    )
    bar2 = ShiftOperator.from_action(
        window,
        lambda c: [(gi(c.p + 1, c.m), 2 * lv + c.p + 1 - c.m)],
        shift=1,
        exact=exact,
        name="phibar_2",
    )
    return DecycledPair(spin, window, (phi1, phi2), (bar1, bar2))


def decycled_residuals(pair: DecycledPair, margin=(1, 2)) -> dict:
    """Residuals of the decycled relations on the window interior.

    Keys ``("phi", a, b)`` for ``[phi^a, phi^b] = 0``, ``("phibar", a, b)``
    for the shifted products of the ``phibar`` family and ``("mixed", a, b)``
    for ``[phi^a, phibar_b] = delta``.
    """
    w = pair.window
    one = ShiftOperator.identity(w, pair.lam.exact)
    out = {}
    for a in (1, 2):
        for b in (1, 2):
            f, g = pair.phi[a - 1], pair.phi[b - 1]
            out[("phi", a, b)] = interior_residual(commutator(f, g), ShiftOperator.zero(w, -2), margin)
            f, g = pair.phibar[a - 1], pair.phibar[b - 1]
            out[("phibar", a, b)] = interior_residual(commutator(f, g), ShiftOperator.zero(w, 2), margin)
            target = one if a == b else ShiftOperator.zero(w)
            out[("mixed", a, b)] = interior_residual(
                commutator(pair.phi[a - 1], pair.phibar[b - 1]), target, margin
            )
    return out


# --------------------------------------------------------------------------
# non-Fock h_4


@dataclass(frozen=True)
class NonFockH4:
    """``a^1_alpha = phi^alpha`` and ``a^2_alpha = (p)phibar_alpha`` blockwise.

    Mode 1 is a standard oscillator in ``m``; mode 2 is the non-standard one,
    with weight ``mu = 2 lam + p - m`` unbounded below as ``p`` decreases.
    """

    lam: SpinParameter
    window: TruncationWindow
    a1: tuple
    a2: tuple

    def mu(self, idx) -> object:
        p, m = idx
        return 2 * self.lam.value + p - m

    def weight_factor(self, idx) -> complex:
        """Monomial content of the weight vector ``f^mu_m`` at ``idx``.

        The modulus is that of the Cartan-Weyl function of block ``p``,
        ``1/sqrt(m! |Gamma(-mu)|)``.  The phase ``i**min(k, 0)`` with
        ``k = floor(mu) + 1`` is fixed by requiring all four ladder
        coefficients to be the principal roots ``sqrt(m), sqrt(m+1),
        sqrt(mu), sqrt(mu+1)``.
        """
        p, m = idx
        mu = float(self.mu(idx))
        k = math.floor(mu) + 1
        phase = (1, 1j, -1, -1j)[min(k, 0) % 4]
        g = abs(special.gamma(-mu)) * math.factorial(m)
        return phase / math.sqrt(g)

    def phase_to_cartan_weyl(self, idx) -> complex:
        """Unit-modulus ratio between the weight vector and the Cartan-Weyl function."""
        p, m = idx
        return self.weight_factor(idx) / cartan_weyl_factor(self.lam.value, p, m)

    def weight_action(self):
        """``(a1, a2)`` as float operators in the weight basis."""
        a1 = tuple(rescale_operator(op, self.weight_factor) for op in self.a1)
        a2 = tuple(rescale_operator(op, self.weight_factor) for op in self.a2)
        return a1, a2

    def expected_weight_coefficient(self, which: str, idx) -> complex:
        """Closed-form ladder coefficient for ``which`` in ``a1_1, a2_1, a1_2, a2_2``."""
        p, m = idx
        mu = float(self.mu(idx))
        table = {
            "a1_1": m,
            "a2_1": m + 1,
            "a1_2": mu,
            "a2_2": mu + 1,
        }
        return cmath.sqrt(complex(table[which]))


WEIGHT_TARGETS = {
    "a1_1": (0, 0, -1, -1),
    "a2_1": (1, 0, 1, 1),
    "a1_2": (0, 1, -1, 0),
    "a2_2": (1, 1, 1, 0),
}


def weight_coefficient_residual(rep: NonFockH4, support=None) -> float:
    """Max deviation of the weight-basis ladder entries from the principal roots.

    ``WEIGHT_TARGETS[name] = (a, alpha, dp, dm)`` names the operator
    ``a^(a+1)_(alpha+1)`` and the target label ``(p + dp, m + dm)``.
    """
    a1, a2 = rep.weight_action()
    ops = (a1, a2)
    inner = rep.window.interior() if support is None else support
    worst = 0.0
    for name, (a, al, dp, dm) in WEIGHT_TARGETS.items():
        op = ops[a][al]
        for c in inner:
            r = GradedIndex(c.p + dp, c.m + dm)
            if r not in rep.window:
                continue
            want = rep.expected_weight_coefficient(name, c)
            worst = max(worst, abs(complex(op[(r, c)]) - want))
    return worst


def nonfock_h4(lam, window: TruncationWindow) -> NonFockH4:
    pair = phi_phibar(lam, window)
    return NonFockH4(pair.lam, window, pair.phi, pair.phibar)


def h4_residuals(rep: NonFockH4, margin=(1, 2)) -> dict:
    """``[a^a_alpha, a^b_beta] - delta_{alpha beta} eps^{ab}`` on the interior, keyed ``(a, alpha, b, beta)``."""
    w = rep.window
    ops = {1: rep.a1, 2: rep.a2}
    one = ShiftOperator.identity(w, rep.lam.exact)
    out = {}
    for a in (1, 2):
        for b in (1, 2):
            eps = {(1, 2): 1, (2, 1): -1}.get((a, b), 0)
            for al in (1, 2):
                for be in (1, 2):
                    target = one.scale(eps) if (al == be and eps) else ShiftOperator.zero(w, None)
                    out[(a, al, b, be)] = interior_residual(
                        commutator(ops[a][al - 1], ops[b][be - 1]), target, margin
                    )
    return out


def number_spectrum(rep, which: int = 2) -> list:
    """Sorted eigenvalues of ``a^2_k a^1_k`` over the truncation.

    For the graded representation the product is diagonal; the lowest block
    is evaluated against one extra block below the window so that its
    eigenvalues are not clipped by the truncation.
    """
    k = which - 1
    if isinstance(rep, FockLadderSet):
        n = rep.number_operator(k)
        return sorted(n.diagonal().values())
    if isinstance(rep, NonFockH4):
        w = rep.window
        ext = nonfock_h4(rep.lam, TruncationWindow(w.p_min - 1, w.p_max, w.m_max))
        n = ext.a2[k] @ ext.a1[k]
        diag = n.diagonal()
        return sorted(diag[c] for c in w.basis)
    raise TypeError(f"unsupported representation {type(rep).__name__}")
