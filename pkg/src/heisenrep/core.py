"""Graded index spaces, sparse shift operators and the exact/float scalar tower.

Every operator in the package is a :class:`ShiftOperator`: a sparse matrix over
the ordered basis of a finite *space* (a :class:`TruncationWindow` of graded
labels ``(p, m)`` or a :class:`MonomialBox` of multi-degrees).  Entries are
either exact (``int``, :class:`fractions.Fraction`, :class:`ExactComplex`) or
plain Python floats/complex numbers.  Products and commutators are computed on
the truncation; identities are only ever asserted on an interior sub-space
where no intermediate index escapes the truncation.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Union

import numpy as np
from scipy import special


class HeisenrepError(Exception):
    """Base class for all errors raised by the package."""


class NotGeneralPosition(HeisenrepError, ValueError):
    """A spin parameter is a half-integer where general position is required."""


class WindowMismatch(HeisenrepError, ValueError):
    pass


class EmptyInterior(HeisenrepError, ValueError):
    pass


class GammaPole(HeisenrepError, ValueError):
    """A Gamma function argument sits at a pole."""


class SingularElement(HeisenrepError, ValueError):
    """Group element outside the big Gauss cell (``delta == 0``)."""


class PoleError(HeisenrepError, ZeroDivisionError):
    """A fractional-linear action hits its pole."""


class ConvergenceError(HeisenrepError, RuntimeError):
    """A truncated series or quadrature failed its own error target."""


class DivergentMoment(HeisenrepError, ValueError):
    """A radial moment integral diverges at the origin."""


# --------------------------------------------------------------------------
# scalars


class ExactComplex:
    """Gaussian rational ``re + i*im`` with :class:`Fraction` parts.

    Arithmetic results with a vanishing imaginary part collapse back to a
    plain :class:`Fraction`, so real computations never see this type.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def make(re, im=0):
        if im == 0:
            return Fraction(re)
        return ExactComplex(re, im)

    @staticmethod
    def _parts(x):
        if isinstance(x, ExactComplex):
            return x.re, x.im
        if isinstance(x, Rational):
            return Fraction(x), Fraction(0)
        return NotImplemented

    def __add__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            return complex(self) + other
        return ExactComplex.make(self.re + o[0], self.im + o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            return complex(self) - other
        return ExactComplex.make(self.re - o[0], self.im - o[1])

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __mul__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            return complex(self) * other
        a, b = self.re, self.im
        c, d = o
        return ExactComplex.make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            return complex(self) / other
        c, d = o
        den = c * c + d * d
        return self * ExactComplex.make(c / den, -d / den)

    def __rtruediv__(self, other):
        if self._parts(other) is NotImplemented:
            return other / complex(self)
        return _as_exact(other) / self

    def conjugate(self):
        return ExactComplex(self.re, -self.im)

    def __eq__(self, other):
        o = self._parts(other)
        if o is NotImplemented:
            try:
                return complex(self) == complex(other)
            except TypeError:
                return NotImplemented
        return self.re == o[0] and self.im == o[1]

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"ExactComplex({self.re}, {self.im})"

    def __str__(self):
        im = f"{self.im}i"
        if self.re == 0:
            return im
        return f"{self.re}{'' if self.im < 0 else '+'}{im}"


I = ExactComplex(0, 1)


def _as_exact(x):
    if isinstance(x, ExactComplex):
        return x
    return ExactComplex(x, 0)


def is_exact_scalar(x) -> bool:
    return isinstance(x, (Rational, ExactComplex))


def conj(x):
    """Complex conjugate that keeps exact scalars exact."""
    if isinstance(x, Rational):
        return x
    return x.conjugate()


def magnitude(x) -> float:
    return float(abs(complex(x)))


# --------------------------------------------------------------------------
# spin parameter


def parse_rational(text: str, allow_decimal: bool = False) -> Fraction:
    """Parse ``"-1/4"`` style text into a :class:`Fraction`.

    Decimal literals are refused unless ``allow_decimal`` is set, so exact
    checks never see a value laundered through binary floating point.
    """
    s = str(text).strip()
    if not s:
        raise ValueError("empty rational literal")
    if ("." in s or "e" in s.lower()) and not allow_decimal:
        raise ValueError(f"decimal literal {s!r} refused; write it as p/q")
    return Fraction(s)


@dataclass(frozen=True)
class SpinParameter:
    """Real spin parameter, exact (``Fraction``) or float.

    With ``general_position`` set the constructor rejects half-integers.
    """

    value: Union[Fraction, float]
    general_position: bool = True

    def __post_init__(self):
        v = self.value
        if isinstance(v, str):
            v = parse_rational(v)
        if isinstance(v, int):
            v = Fraction(v)
        if not isinstance(v, (Fraction, float)):
            v = float(v)
        object.__setattr__(self, "value", v)
        if self.general_position and is_half_integer(v):
            raise NotGeneralPosition(
                f"spin {v} is a half-integer; a point in general position is required"
            )

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def __float__(self):
        return float(self.value)


def is_half_integer(v) -> bool:
    if isinstance(v, Fraction):
        return (2 * v).denominator == 1
    t = 2.0 * float(v)
    return abs(t - round(t)) < 1e-12


def as_spin(lam) -> SpinParameter:
    if isinstance(lam, SpinParameter):
        return lam
    return SpinParameter(lam)


# --------------------------------------------------------------------------
# spaces


class GradedIndex(NamedTuple):
    """Basis label: block ``p`` and degree ``m`` of the monomial ``zeta**m``."""

    p: int
    m: int


@dataclass(frozen=True)
class TruncationWindow:
    p_min: int
    p_max: int
    m_max: int

    def __post_init__(self):
        if self.p_min > self.p_max:
            raise ValueError(f"p_min={self.p_min} exceeds p_max={self.p_max}")
        if self.m_max < 0:
            raise ValueError(f"m_max={self.m_max} must be non-negative")

    @property
    def basis(self) -> tuple:
        return _window_basis(self.p_min, self.p_max, self.m_max)

    @property
    def blocks(self) -> range:
        return range(self.p_min, self.p_max + 1)

    def __contains__(self, idx) -> bool:
        p, m = idx
        return self.p_min <= p <= self.p_max and 0 <= m <= self.m_max

    def __len__(self):
        return (self.p_max - self.p_min + 1) * (self.m_max + 1)

    def interior(self, margin=(1, 2)) -> frozenset:
        dp, dm = margin
        out = frozenset(
            GradedIndex(p, m)
            for p in range(self.p_min + dp, self.p_max - dp + 1)
            for m in range(0, self.m_max - dm + 1)
        )
        if not out:
            raise EmptyInterior(f"margin {margin} leaves no interior in {self}")
        return out


def _window_basis(p_min, p_max, m_max):
    return tuple(
        GradedIndex(p, m) for p in range(p_min, p_max + 1) for m in range(m_max + 1)
    )


def enumerate_basis(window: TruncationWindow) -> list:
    """Basis labels of ``window``, p-major then m-minor."""
    return list(window.basis)


@dataclass(frozen=True)
class MonomialBox:
    """Monomials ``prod x_k**e_k`` with ``lo[k] <= e_k <= hi[k]``.

    Negative lower bounds give Laurent monomials.  Lower edges at zero are
    natural (derivatives annihilate constants), so only Laurent lower edges
    take an interior margin.
    """

    lo: tuple
    hi: tuple
    names: tuple = ()

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have equal length")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"empty box {self.lo}..{self.hi}")

    @classmethod
    def caps(cls, *caps, names=()):
        return cls(tuple(0 for _ in caps), tuple(caps), tuple(names))

    @property
    def basis(self) -> tuple:
        return tuple(
            itertools.product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi)))
        )

    def __contains__(self, idx) -> bool:
        return len(idx) == len(self.lo) and all(
            a <= e <= b for a, e, b in zip(self.lo, idx, self.hi)
        )

    def __len__(self):
        return math.prod(b - a + 1 for a, b in zip(self.lo, self.hi))

    def interior(self, margin=1) -> frozenset:
        if isinstance(margin, int):
            margin = (margin,) * len(self.lo)
        lo = tuple(a + d if a < 0 else a for a, d in zip(self.lo, margin))
        hi = tuple(b - d for b, d in zip(self.hi, margin))
        if any(a > b for a, b in zip(lo, hi)):
            raise EmptyInterior(f"margin {margin} leaves no interior in {self}")
        return frozenset(
            itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
        )

    def total_degree_interior(self, margin: int) -> frozenset:
        """Monomials whose total degree is at most ``min(hi) - margin``."""
        top = min(self.hi) - margin
        return frozenset(i for i in self.basis if sum(i) <= top and all(e >= 0 for e in i))


Space = Union[TruncationWindow, MonomialBox]


# --------------------------------------------------------------------------
# sparse operators

Action = Callable[[tuple], Iterable[tuple]]


def _add_into(col: dict, row, val):
    new = col.get(row, 0) + val
    if new == 0:
        col.pop(row, None)
    else:
        col[row] = new


@dataclass(frozen=True, eq=False)
class ShiftOperator:
    """Sparse operator on a truncated space.

    ``columns[c][r]`` is the coefficient of basis vector ``r`` in the image of
    basis vector ``c``.  ``shift`` is the block degree on graded windows
    (every entry has ``r.p == c.p + shift``); ``None`` marks an operator that
    mixes degrees or lives on a space without grading.
    """

    space: Space
    columns: Mapping
    shift: Union[int, None] = 0
    exact: bool = True
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.shift is not None and isinstance(self.space, TruncationWindow):
            for c, col in self.columns.items():
                for r in col:
                    if r[0] != c[0] + self.shift:
                        raise ValueError(
                            f"entry {c}->{r} violates declared shift {self.shift}"
                        )

    # construction -------------------------------------------------------
    @classmethod
    def from_action(cls, space, action: Action, shift=0, exact=True, name=""):
        cols = {}
        for c in space.basis:
            col = {}
            for r, v in action(c):
                if v != 0 and r in space:
                    _add_into(col, tuple(r) if not isinstance(r, GradedIndex) else r, v)
            if col:
                cols[c] = col
        if isinstance(space, TruncationWindow):
            cols = {c: {GradedIndex(*r): v for r, v in col.items()} for c, col in cols.items()}
        return cls(space, cols, shift, exact, name)

    @classmethod
    def identity(cls, space, exact=True):
        one = 1 if exact else 1.0
        return cls(space, {c: {c: one} for c in space.basis}, 0, exact, "1")

    @classmethod
    def zero(cls, space, shift=0, exact=True):
        return cls(space, {}, shift, exact, "0")

    # algebra ------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, ShiftOperator):
            raise TypeError(f"expected ShiftOperator, got {type(other).__name__}")
        if other.space != self.space:
            raise WindowMismatch(f"{self.space} vs {other.space}")

    def _combine_shift(self, other):
        return self.shift if self.shift == other.shift else None

    def __add__(self, other):
        self._check(other)
        cols = {c: dict(col) for c, col in self.columns.items()}
        for c, col in other.columns.items():
            tgt = cols.setdefault(c, {})
            for r, v in col.items():
                _add_into(tgt, r, v)
        cols = {c: col for c, col in cols.items() if col}
        return ShiftOperator(
            self.space, cols, self._combine_shift(other), self.exact and other.exact
        )

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        exact = self.exact and is_exact_scalar(s)
        cols = {}
        for c, col in self.columns.items():
            new = {r: v * s for r, v in col.items() if v * s != 0}
            if new:
                cols[c] = new
        return ShiftOperator(self.space, cols, self.shift, exact)

    def __mul__(self, s):
        if isinstance(s, ShiftOperator):
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        cols = {}
        for c, bcol in other.columns.items():
            acc = {}
            for k, bv in bcol.items():
                acol = self.columns.get(k)
                if not acol:
                    continue
                for r, av in acol.items():
                    _add_into(acc, r, av * bv)
            if acc:
                cols[c] = acc
        shift = None if self.shift is None or other.shift is None else self.shift + other.shift
        return ShiftOperator(self.space, cols, shift, self.exact and other.exact)

    def plus_scalar(self, s):
        return self + ShiftOperator.identity(self.space, self.exact).scale(s)

    # inspection ---------------------------------------------------------
    def entries(self) -> Iterator[tuple]:
        """Yield ``(row, col, value)`` in basis order of the columns."""
        for c in self.space.basis:
            col = self.columns.get(c)
            if not col:
                continue
            for r in sorted(col):
                yield r, c, col[r]

    def __getitem__(self, rc):
        r, c = rc
        return self.columns.get(c, {}).get(r, 0)

    def apply(self, vec: Mapping) -> dict:
        """Image of a finitely supported vector ``{index: coefficient}``."""
        out = {}
        for c, v in vec.items():
            for r, a in self.columns.get(c, {}).items():
                _add_into(out, r, a * v)
        return out

    def to_dense(self) -> np.ndarray:
        basis = self.space.basis
        pos = {b: i for i, b in enumerate(basis)}
        out = np.zeros((len(basis), len(basis)), dtype=complex)
        for r, c, v in self.entries():
            out[pos[r], pos[c]] = complex(v)
        return out

    def to_float(self) -> "ShiftOperator":
        cols = {c: {r: complex(v) for r, v in col.items()} for c, col in self.columns.items()}
        return ShiftOperator(self.space, cols, self.shift, False, self.name)

    def restricted(self, rows, cols) -> dict:
        rows = set(rows)
        return {
            (r, c): v
            for c in cols
            for r, v in self.columns.get(c, {}).items()
            if r in rows
        }

    def diagonal(self) -> dict:
        return {c: self.columns.get(c, {}).get(c, 0) for c in self.space.basis}


def commutator(a: ShiftOperator, b: ShiftOperator) -> ShiftOperator:
    """``a @ b - b @ a``; shift degrees add."""
    a._check(b)
    return a @ b - b @ a


def interior_residual(a: ShiftOperator, target: ShiftOperator, margin=None, support=None):
    """Max absolute entry of ``a - target`` on interior rows and columns.

    ``support`` overrides the interior with an explicit set of basis labels;
    otherwise ``space.interior(margin)`` is used.  Returns the integer ``0``
    when the difference vanishes exactly, a float otherwise.

    Raises
    ------
    EmptyInterior
        If the interior (or ``support``) is empty.
    """
    a._check(target)
    space = a.space
    if support is not None:
        inner = frozenset(support)
        if not inner:
            raise EmptyInterior("empty support")
    else:
        inner = space.interior() if margin is None else space.interior(margin)
    diff = a - target
    worst = 0
    for c in inner:
        for r, v in diff.columns.get(c, {}).items():
            if r in inner and v != 0:
                worst = max(worst, magnitude(v))
    return worst


def casimir_su2(l3: ShiftOperator, lplus: ShiftOperator, lminus: ShiftOperator) -> ShiftOperator:
    """``L3**2 + (L+ L- + L- L+)/2``."""
    l3._check(lplus)
    l3._check(lminus)
    half = Fraction(1, 2) if (lplus.exact and lminus.exact) else 0.5
    return l3 @ l3 + (lplus @ lminus + lminus @ lplus).scale(half)


def components_from_ladders(lplus, lminus):
    """Hermitian-type components ``L1, L2`` from ``L+ = L1 + i L2``."""
    half = Fraction(1, 2)
    l1 = (lplus + lminus).scale(half)
    l2 = (lplus - lminus).scale(ExactComplex(0, -half))
    return l1, l2


# --------------------------------------------------------------------------
# bases


class BasisConvention(Enum):
    MONOMIAL = "monomial"
    CARTAN_WEYL = "cartan_weyl"


@dataclass
class GradedVector:
    window: TruncationWindow
    coeffs: dict

    def __post_init__(self):
        for k in self.coeffs:
            if k not in self.window:
                raise ValueError(f"support index {k} outside {self.window}")
        self.coeffs = {GradedIndex(*k): v for k, v in self.coeffs.items()}


def gamma_argument(lam, p: int, m: int) -> float:
    return m - 2.0 * float(lam) - p


def cartan_weyl_factor(lam, p: int, m: int) -> complex:
    """Monomial content ``i**m / sqrt(m! Gamma(m - 2 lam - p))`` of the weight vector.

    Negative Gamma values take the principal square root; Gamma poles raise
    :class:`GammaPole`.
    """
    x = gamma_argument(as_spin(lam).value, p, m)
    if x <= 0 and abs(x - round(x)) < 1e-12:
        raise GammaPole(f"Gamma argument {x} at a pole (p={p}, m={m})")
    g = special.gamma(x) * math.factorial(m)
    return (1j ** m) / cmath.sqrt(g)


def convert_basis(v: GradedVector, src: BasisConvention, dst: BasisConvention, lam) -> GradedVector:
    """Re-express coefficients of ``v`` in another basis convention.

    A Cartan-Weyl coefficient ``d`` stands for ``d * factor * zeta**m`` where
    ``factor`` is :func:`cartan_weyl_factor`.
    """
    if src == dst:
        return GradedVector(v.window, dict(v.coeffs))
    out = {}
    for (p, m), c in v.coeffs.items():
        f = cartan_weyl_factor(lam, p, m)
        out[GradedIndex(p, m)] = complex(c) / f if dst is BasisConvention.CARTAN_WEYL else complex(c) * f
    return GradedVector(v.window, out)


def rescale_operator(op: ShiftOperator, factor: Callable[[tuple], complex]) -> ShiftOperator:
    """Matrix of ``op`` in the basis ``e_c = factor(c) * monomial_c``."""
    cols = {}
    for c, col in op.columns.items():
        fc = factor(c)
        cols[c] = {r: complex(v) * fc / factor(r) for r, v in col.items()}
    return ShiftOperator(op.space, cols, op.shift, False, op.name)
