"""su(2), sl(2,C) and sp(2,R) generators, Gauss decomposition and Borel actions.

The Lie algebra side is exact: generators are :class:`ShiftOperator` bilinears
in the ladders of :mod:`heisenrep.oscillators`.  The group side works with
float coefficient vectors of power series in ``zeta``; every truncated action
used here is lower triangular in the degree (or nilpotent), so truncation
only ever loses the coefficients above the cutoff.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (
    ConvergenceError,
    ExactComplex,
    GradedIndex,
    MonomialBox,
    PoleError,
    ShiftOperator,
    SingularElement,
    SpinParameter,
    TruncationWindow,
    as_spin,
    casimir_su2,
    commutator,
    interior_residual,
)
from .oscillators import FockLadderSet, NonFockH4, differentiation, multiplication, nonfock_h4

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)

PAULI = (
    ((0, 1), (1, 0)),
    ((0, ExactComplex(0, -1)), (ExactComplex(0, 1), 0)),
    ((1, 0), (0, -1)),
)
EPS = ((0, 1), (-1, 0))


def _matmul2(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def bilinear(x: Sequence[ShiftOperator], m, y: Sequence[ShiftOperator], scale=1) -> ShiftOperator:
    """``scale * sum_ij m[i][j] x_i y_j`` for 2x2 exact coefficient matrices ``m``."""
    out = None
    for i in range(2):
        for j in range(2):
            c = m[i][j] * scale
            if c == 0:
                continue
            term = (x[i] @ y[j]).scale(c)
            out = term if out is None else out + term
    if out is None:
        return ShiftOperator.zero(x[0].space)
    return out


def square_sum(ops) -> ShiftOperator:
    out = ops[0] @ ops[0]
    for op in ops[1:]:
        out = out + op @ op
    return out


def dot(a, b) -> ShiftOperator:
    out = a[0] @ b[0]
    for x, y in zip(a[1:], b[1:]):
        out = out + x @ y
    return out


# --------------------------------------------------------------------------
# su(2) blocks


def su2_relation_residuals(L3, Lp, Lm, support, casimir_value=None) -> dict:
    """Residuals of ``[L3, L+-] = +-L+-``, ``[L+, L-] = 2 L3`` and optionally the Casimir.

    ``support`` is the set of labels on which rows and columns are compared.
    """
    out = {
        "[L3,L+]": interior_residual(commutator(L3, Lp), Lp, support=support),
        "[L3,L-]": interior_residual(commutator(L3, Lm), -Lm, support=support),
        "[L+,L-]": interior_residual(commutator(Lp, Lm), L3.scale(2), support=support),
    }
    if casimir_value is not None:
        C = casimir_su2(L3, Lp, Lm)
        target = ShiftOperator.identity(L3.space, C.exact).scale(casimir_value)
        out["casimir"] = interior_residual(C, target, support=support)
    return out


@dataclass(frozen=True)
class Su2Block:
    """Semispinor ``D+(Lam)`` on the monomials ``zeta**n`` of a single block.

    ``L3 = zeta d/dzeta - Lam``, ``L+ = zeta`` and
    ``L- = -zeta d^2/dzeta^2 + 2 Lam d/dzeta``.
    """

    lam: SpinParameter
    p: int
    Lam: object
    window: TruncationWindow
    L3: ShiftOperator
    Lp: ShiftOperator
    Lm: ShiftOperator

    margin = (0, 2)

    def casimir(self) -> ShiftOperator:
        return casimir_su2(self.L3, self.Lp, self.Lm)

    def casimir_value(self):
        return self.Lam * (self.Lam + 1)


def su2_semispinor(lam, p: int, m_max: int) -> Su2Block:
    spin = as_spin(lam)
    Lam = spin.value + Fraction(p, 2) if spin.exact else spin.value + p / 2
    w = TruncationWindow(p, p, m_max)
    ex = spin.exact
    L3 = ShiftOperator.from_action(w, lambda c: [(c, c.m - Lam)], exact=ex, name="L3")
    Lp = ShiftOperator.from_action(
        w, lambda c: [(GradedIndex(c.p, c.m + 1), 1)], exact=ex, name="L+"
    )
    Lm = ShiftOperator.from_action(
        w, lambda c: [(GradedIndex(c.p, c.m - 1), c.m * (2 * Lam - c.m + 1))], exact=ex, name="L-"
    )
    return Su2Block(spin, p, Lam, w, L3, Lp, Lm)


def graded_su2(rep: NonFockH4):
    """``L = 1/2 a^2 sigma a^1`` on the whole graded window as ``(L3, L+, L-)``."""
    a1, a2 = rep.a1, rep.a2
    L3 = (a2[0] @ a1[0] - a2[1] @ a1[1]).scale(HALF)
    Lp = a2[0] @ a1[1]
    Lm = a2[1] @ a1[0]
    return L3, Lp, Lm


@dataclass(frozen=True)
class ParitySplit:
    """Single-mode Fock ``su(2)`` with its even and odd invariant subspaces."""

    box: MonomialBox
    L3: ShiftOperator
    Lp: ShiftOperator
    Lm: ShiftOperator
    even: frozenset
    odd: frozenset

    def casimir(self) -> ShiftOperator:
        return casimir_su2(self.L3, self.Lp, self.Lm)

    def lowest_weights(self):
        """``L3`` eigenvalues on ``1`` and ``z``."""
        d = self.L3.diagonal()
        return d[(0,)], d[(1,)]


def h2_semispinor_split(m_max: int) -> ParitySplit:
    """``L3 = z/2 d/dz + 1/4``, ``L+ = z**2/2``, ``L- = -1/2 d^2/dz^2``."""
    if m_max < 4:
        raise ValueError(f"m_max={m_max} must be at least 4")
    box = MonomialBox.caps(m_max, names=("z",))
    L3 = ShiftOperator.from_action(box, lambda e: [(e, HALF * e[0] + QUARTER)], shift=None)
    Lp = ShiftOperator.from_action(box, lambda e: [((e[0] + 2,), HALF)], shift=None)
    Lm = ShiftOperator.from_action(
        box, lambda e: [((e[0] - 2,), -HALF * e[0] * (e[0] - 1))], shift=None
    )
    inner = box.interior(2)
    even = frozenset(e for e in inner if e[0] % 2 == 0)
    odd = frozenset(e for e in inner if e[0] % 2 == 1)
    return ParitySplit(box, L3, Lp, Lm, even, odd)


@dataclass(frozen=True)
class FockSu2:
    box: MonomialBox
    L3: ShiftOperator
    Lp: ShiftOperator
    Lm: ShiftOperator

    def casimir(self) -> ShiftOperator:
        return casimir_su2(self.L3, self.Lp, self.Lm)

    def homogeneous(self, degree: int) -> list:
        return [e for e in self.box.basis if sum(e) == degree]


def fock_su2(m_max: int) -> FockSu2:
    """``L3 = (z1 d1 - z2 d2)/2``, ``L+ = z1 d2``, ``L- = z2 d1`` on two modes."""
    if m_max < 3:
        raise ValueError(f"m_max={m_max} must be at least 3")
    box = MonomialBox.caps(m_max, m_max, names=("z1", "z2"))
    d1, d2 = differentiation(box, 0), differentiation(box, 1)
    z1, z2 = multiplication(box, 0), multiplication(box, 1)
    L3 = (z1 @ d1 - z2 @ d2).scale(HALF)
    return FockSu2(box, L3, z1 @ d2, z2 @ d1)


# --------------------------------------------------------------------------
# sp(2,R)


@dataclass(frozen=True)
class Sp2RGenerators:
    """``L, N, Gamma`` (three components each), ``L0`` and ``Gamma0 = L0 + 1/2``."""

    L: tuple
    N: tuple
    G: tuple
    L0: ShiftOperator
    G0: ShiftOperator

    @property
    def all(self) -> tuple:
        return self.L + self.N + self.G + (self.G0,)

    def casimir_C(self) -> ShiftOperator:
        return square_sum(self.L) - square_sum(self.N)

    def casimir_Cprime(self) -> ShiftOperator:
        return dot(self.L, self.N)

    def gamma_square(self) -> ShiftOperator:
        return square_sum(self.G) - self.G0 @ self.G0

    def l_square_minus_l0(self) -> ShiftOperator:
        return square_sum(self.L) - self.L0 @ self.L0.plus_scalar(1)


def _ladders(source):
    if isinstance(source, FockLadderSet):
        if source.n_modes != 2:
            raise ValueError("sp(2,R) generators need a two-mode source")
        return source.lowering, source.raising
    if isinstance(source, NonFockH4):
        return source.a1, source.a2
    raise TypeError(f"unsupported source {type(source).__name__}")


def sp2r_generators(source) -> Sp2RGenerators:
    a1, a2 = _ladders(source)
    eps_s = [_matmul2(EPS, s) for s in PAULI]
    s_eps = [_matmul2(s, EPS) for s in PAULI]
    L = tuple(bilinear(a2, s, a1, HALF) for s in PAULI)
    i4 = ExactComplex(0, QUARTER)
    N = tuple(
        bilinear(a1, es, a1, i4) + bilinear(a2, se, a2, i4) for es, se in zip(eps_s, s_eps)
    )
    G = tuple(
        bilinear(a1, es, a1, QUARTER) - bilinear(a2, se, a2, QUARTER)
        for es, se in zip(eps_s, s_eps)
    )
    L0 = (a2[0] @ a1[0] + a2[1] @ a1[1]).scale(HALF)
    return Sp2RGenerators(L, N, G, L0, L0.plus_scalar(HALF))


def generator_interior(source):
    """Interior rows/columns safe for quartic expressions in the generators."""
    if isinstance(source, FockLadderSet):
        return source.box.total_degree_interior(4)
    return source.window.interior((2, 4))


def closure_residual(gens: Sp2RGenerators, rows, cols) -> float:
    """Largest least-squares residual of ``[X, Y]`` against the span of the generators.

    All operators are restricted to ``rows x cols``, so choose ``cols`` deep
    enough inside the truncation that quadratic products are not clipped.
    """
    space = gens.L0.space
    pos = {b: i for i, b in enumerate(space.basis)}
    ri = [pos[r] for r in sorted(rows)]
    ci = [pos[c] for c in sorted(cols)]

    def flat(op):
        return op.to_dense()[np.ix_(ri, ci)].ravel()

    basis = np.stack([flat(g) for g in gens.all], axis=1)
    worst = 0.0
    ops = gens.all
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            target = flat(commutator(ops[i], ops[j]))
            coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
            worst = max(worst, float(np.abs(basis @ coef - target).max()))
    return worst


def l0_spectrum(source) -> set:
    """Eigenvalues of ``L0 = a^2 a^1 / 2`` on the truncation, clipping-free."""
    if isinstance(source, FockLadderSet):
        L0 = sp2r_generators(source).L0
        return set(L0.diagonal().values())
    w = source.window
    ext = nonfock_h4(source.lam, TruncationWindow(w.p_min - 1, w.p_max, w.m_max))
    d = sp2r_generators(ext).L0.diagonal()
    return {d[c] for c in w.basis}


# --------------------------------------------------------------------------
# group elements and Gauss decomposition


@dataclass(frozen=True)
class GroupElement:
    """``[[alpha, beta], [gamma, delta]]`` in SL(2,C)."""

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        det = self.alpha * self.delta - self.beta * self.gamma
        if abs(det - 1) > 1e-12:
            raise ValueError(f"determinant {det} differs from 1")

    @classmethod
    def from_matrix(cls, m) -> "GroupElement":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def matrix(self) -> np.ndarray:
        return np.array([[self.alpha, self.beta], [self.gamma, self.delta]], dtype=complex)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement.from_matrix(self.matrix() @ other.matrix())

    @property
    def regular(self) -> bool:
        return self.delta != 0


def upper(delta, beta_over_delta=0) -> GroupElement:
    """Borel element ``n+(s) h(delta)`` with ``s = beta/delta``."""
    return GroupElement(1 / delta, beta_over_delta * delta, 0, delta)


@dataclass(frozen=True)
class GaussFactors:
    """``v = n+ h n-`` with ``n+ = [[1, s], [0, 1]]``, ``h = diag(1/delta, delta)``,
    ``n- = [[1, 0], [c, 1]]``."""

    s: complex
    delta: complex
    c: complex

    @property
    def n_plus(self) -> np.ndarray:
        return np.array([[1, self.s], [0, 1]], dtype=complex)

    @property
    def h(self) -> np.ndarray:
        return np.array([[1 / self.delta, 0], [0, self.delta]], dtype=complex)

    @property
    def n_minus(self) -> np.ndarray:
        return np.array([[1, 0], [self.c, 1]], dtype=complex)

    def product(self) -> np.ndarray:
        return self.n_plus @ self.h @ self.n_minus


def gauss_factorize(v: GroupElement) -> GaussFactors:
    """Gauss decomposition of a regular element.

    Raises
    ------
    SingularElement
        If ``delta == 0``; such elements have no decomposition of this form.
    """
    if v.delta == 0:
        raise SingularElement(f"delta = 0 for {v.matrix().tolist()}")
    return GaussFactors(v.beta / v.delta, v.delta, v.gamma / v.delta)


# --------------------------------------------------------------------------
# series actions


def taylor_expm(a: np.ndarray, tol: float = 1e-14, max_terms: int = 400) -> np.ndarray:
    """Scaled Taylor exponential, stopping once the next term is below ``tol``.

    Raises
    ------
    ConvergenceError
        If ``max_terms`` terms do not reach the target.
    """
    a = np.asarray(a, dtype=complex)
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    b = a / (2 ** squarings)
    out = np.eye(a.shape[0], dtype=complex)
    term = out.copy()
    for k in range(1, max_terms):
        term = term @ b / k
        out = out + term
        if np.abs(term).max() < tol * max(1.0, np.abs(out).max()):
            break
    else:
        raise ConvergenceError(f"Taylor series did not converge in {max_terms} terms")
    for _ in range(squarings):
        out = out @ out
    return out


def principal_power(x: complex, a: float) -> complex:
    """``x**a`` on the principal branch of ``log``."""
    if x == 0:
        raise PoleError("zero base for a fractional power")
    return cmath.exp(a * cmath.log(x))


def lminus_matrix(lam, n_max: int) -> np.ndarray:
    """Dense ``L-`` of block ``p = 0`` on ``zeta**0 .. zeta**n_max`` (columns = input degree)."""
    lv = float(as_spin(lam).value)
    out = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for n in range(1, n_max + 1):
        out[n - 1, n] = n * (2 * lv - n + 1)
    return out


def borel_plus_action(lam, b: GroupElement, coeffs) -> np.ndarray:
    """``T(b) f(zeta) = delta**(2 lam) exp(s zeta) f(zeta / delta**2)`` with ``s = beta/delta``.

    ``b`` must be upper triangular.  Output has the same length as
    ``coeffs`` and is exact degree by degree.
    """
    if b.gamma != 0:
        raise ValueError("borel_plus_action needs an upper-triangular element")
    lv = float(as_spin(lam).value)
    c = np.asarray(coeffs, dtype=complex)
    n = len(c)
    d, s = b.delta, b.beta / b.delta
    scaled = c * np.array([d ** (-2 * k) for k in range(n)])
    expo = np.array([s ** k / math.factorial(k) for k in range(n)], dtype=complex)
    out = np.convolve(expo, scaled)[:n]
    return principal_power(d, 2 * lv) * out


def torus_action(lam, delta, coeffs) -> np.ndarray:
    return borel_plus_action(lam, upper(delta), coeffs)


def exp_lminus(lam, tau: complex, coeffs) -> np.ndarray:
    """``exp(tau L-)`` applied to a truncated series by a Taylor matrix exponential."""
    c = np.asarray(coeffs, dtype=complex)
    m = lminus_matrix(lam, len(c) - 1)
    return taylor_expm(tau * m) @ c


def laguerre_eval(n: int, a: float, x: float) -> float:
    """Generalized Laguerre polynomial ``L_n^(a)(x)`` by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    prev, cur = 1.0, 1.0 + a - x
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
    return cur


def laguerre_coefficients(n: int, a: float) -> np.ndarray:
    """Power-series coefficients of ``L_n^(a)(x)``: ``(-1)**k binom(n+a, n-k) / k!``."""
    out = np.zeros(n + 1)
    for k in range(n + 1):
        binom = math.prod(n + a - j for j in range(n - k)) / math.factorial(n - k)
        out[k] = (-1) ** k * binom / math.factorial(k)
    return out


def exp_lminus_closed_form(lam, n: int, tau: complex, scale: float = 1.0) -> np.ndarray:
    """Coefficients in ``zeta`` of ``n! (-scale tau)**n L_n^(-2 lam - 1)(zeta / tau)``.

    ``scale = 1`` is the form that agrees with the series; ``scale = 1/2``
    is the variant with ``(-tau/2)**n`` in front.
    """
    a = -2 * float(as_spin(lam).value) - 1
    lc = laguerre_coefficients(n, a)
    pref = math.factorial(n) * (-scale * tau) ** n
    return np.array([pref * lc[k] / tau ** k for k in range(n + 1)], dtype=complex)


def exponential_action(lam, v: GroupElement, tau: complex, pole_tol: float = 1e-10):
    """Prefactor and new slope of ``T(v) exp(tau zeta)``.

    Returns ``((gamma tau + delta)**(2 lam), (alpha tau + beta)/(gamma tau + delta))``.

    Raises
    ------
    PoleError
        If ``|gamma tau + delta|`` is below ``pole_tol`` times the scale of the
        element.
    """
    lv = float(as_spin(lam).value)
    den = v.gamma * tau + v.delta
    scale = max(abs(v.gamma * tau), abs(v.delta), 1.0)
    if abs(den) <= pole_tol * scale:
        raise PoleError(f"gamma*tau + delta = {den} at tau = {tau}")
    return principal_power(den, 2 * lv), (v.alpha * tau + v.beta) / den


def exponential_coeffs(tau: complex, n_terms: int) -> np.ndarray:
    return np.array([tau ** k / math.factorial(k) for k in range(n_terms)], dtype=complex)


def factorwise_action(lam, v: GroupElement, tau: complex, n_terms: int) -> np.ndarray:
    """``T(n+) T(h) T(n-)`` applied to ``exp(tau zeta)`` factor by factor."""
    g = gauss_factorize(v)
    f = exponential_coeffs(tau, n_terms)
    f = exp_lminus(lam, g.c, f)
    f = borel_plus_action(lam, upper(g.delta), f)
    return borel_plus_action(lam, upper(1.0, g.s), f)


def coherent_state(lam, tau: complex, n_terms: int) -> np.ndarray:
    """Coefficients of ``0F1(; -2 lam; -tau zeta)``."""
    b = -2 * float(as_spin(lam).value)
    out = np.zeros(n_terms, dtype=complex)
    c = 1.0 + 0j
    for n in range(n_terms):
        out[n] = c
        c = c * (-tau) / ((b + n) * (n + 1))
    return out
