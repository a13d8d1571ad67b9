"""Inner products and invariant sesquilinear forms.

* The Gaussian (Bargmann) inner product on polynomials, in closed form.
* The Macdonald-function measure on each semispinor block and its graded sum.
  Angular integrals are done analytically; the radial integral
  ``4 int_0^inf r**(2m - 2 Lam) K_{2 Lam + 1}(2 r) dr`` is split at ``r = 1``:
  the inner piece is integrated term by term from the small-argument series
  of ``K``, the outer piece by composite Gauss-Legendre quadrature.
* The pairings on the four-variable space ``(z1, z2, zb1, zb2)`` used by the
  ``h_8`` checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import integrate, special

from .core import (
    ConvergenceError,
    DivergentMoment,
    as_spin,
    cartan_weyl_factor,
    conj,
)


@dataclass(frozen=True)
class FormValue:
    """A form value with a non-negative error estimate (0 for exact values)."""

    value: complex
    error: float = 0.0

    def __post_init__(self):
        if not self.error >= 0:
            raise ValueError(f"error estimate {self.error} must be non-negative")


# --------------------------------------------------------------------------
# Gaussian measure


def _factorial_weight(exps) -> int:
    return math.prod(math.factorial(e) for e in exps)


def gauss_monomial_form(f: Mapping, g: Mapping) -> FormValue:
    """``(f, g) = int conj(f) g dmu`` for polynomials ``{exponents: coeff}``.

    Uses ``(z**m, z**n) = m! delta_mn`` per mode; exact for exact coefficients.
    """
    total = 0
    for e, c in f.items():
        d = g.get(e)
        if d:
            total = total + conj(c) * d * _factorial_weight(e)
    return FormValue(total, 0.0)


# --------------------------------------------------------------------------
# Macdonald function


def bessel_k(nu: float, x: float) -> float:
    """``K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`` by adaptive quadrature.

    The integral is cut where the integrand drops below ``1e-300`` relative to
    its peak.

    Raises
    ------
    ValueError
        If ``x <= 0``.
    """
    if not x > 0:
        raise ValueError(f"x={x} must be positive")
    a = abs(nu)

    def log_f(t):
        return -x * math.cosh(t) + a * t

    # integrand peaks where x sinh t = a
    t_peak = math.asinh(a / x)
    peak = log_f(t_peak)
    t_end = t_peak + 1.0
    while log_f(t_end) > peak - 700:
        t_end *= 1.5
    shift = peak

    def f(t):
        # cosh(a t) exp(-x cosh t), scaled by exp(-shift) against overflow
        return 0.5 * (math.exp(log_f(t) - shift) + math.exp(-x * math.cosh(t) - a * t - shift))

    val, _ = integrate.quad(f, 0.0, t_end, points=[t_peak] if 0 < t_peak < t_end else None,
                            epsabs=0.0, epsrel=2e-14, limit=500)
    return val * math.exp(shift)


# --------------------------------------------------------------------------
# radial moments


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule for the outer radial piece ``[1, R]``.

    ``nodes`` Gauss-Legendre points on each unit-width panel.  The default
    ``R = 40`` keeps the neglected tail far below ``1e-12`` even for degree 6
    moments, where ``R = 12`` would not.
    """

    nodes: int = 64
    R: float = 40.0
    series_terms: int = 80

    def __post_init__(self):
        if self.nodes < 64:
            raise ValueError(f"nodes={self.nodes} must be at least 64")
        if self.R < 12:
            raise ValueError(f"R={self.R} must be at least 12")

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.nodes, self.R, self.series_terms)


def _gl_outer(fun, spec: QuadratureSpec, nodes: int) -> float:
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(1.0, spec.R, int(math.ceil(spec.R - 1.0)) + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        h = 0.5 * (b - a)
        t = h * x + 0.5 * (a + b)
        total += h * float(np.dot(w, fun(t)))
    return total


def _inner_series(a: float, nu: float, terms: int, continuation: bool) -> tuple:
    """``4 int_0^1 r**a K_nu(2 r) dr`` from ``K_nu = pi/2 (I_-nu - I_nu) / sin(nu pi)``.

    Returns the value and the size of the last retained term.
    """
    pref = 2.0 * math.pi / math.sin(nu * math.pi)
    total = 0.0
    last = 0.0
    for k in range(terms):
        term = 0.0
        for sign in (-1, 1):
            q1 = a + 2 * k + sign * nu + 1.0
            if q1 <= 0 and not continuation:
                raise DivergentMoment(
                    f"r**{q1 - 1:.4g} is not integrable at the origin"
                )
            c = special.rgamma(k + sign * nu + 1.0) / math.factorial(k)
            term += -sign * c / q1
        total += pref * term
        last = abs(pref * term)
    return total, last


def radial_moment(lam, m: int, p: int, spec: QuadratureSpec = QuadratureSpec(),
                  continuation: bool = False) -> FormValue:
    """``4 int_0^inf r**(2m - 2 Lam) K_{2 Lam + 1}(2 r) dr`` with ``Lam = lam + p/2``.

    The closed form is ``m! Gamma(m - 2 lam - p)``.  When that Gamma argument
    is negative the integral diverges at the origin; with ``continuation``
    the non-integrable power terms are replaced by their analytic
    continuation ``r**q -> 1/(q + 1)`` on ``[0, 1]``.

    Raises
    ------
    DivergentMoment
        If the integral diverges and ``continuation`` is off.
    ConvergenceError
        If node refinement disagrees by more than ``1e-8`` relative.
    """
    lv = float(as_spin(lam).value)
    Lam = lv + p / 2.0
    a = 2.0 * m - 2.0 * Lam
    nu = 2.0 * Lam + 1.0
    inner, last = _inner_series(a, nu, spec.series_terms, continuation)

    def fun(r):
        return 4.0 * r ** a * special.kv(nu, 2.0 * r)

    coarse = _gl_outer(fun, spec, spec.nodes // 2)
    fine = _gl_outer(fun, spec, spec.nodes)
    value = inner + fine
    err = abs(fine - coarse) + last + 4 * np.finfo(float).eps * abs(value)
    if err > 1e-8 * max(1.0, abs(value)):
        raise ConvergenceError(f"radial moment m={m}, p={p} error estimate {err:.3g}")
    return FormValue(value, err)


def moment_closed_form(lam, m: int, p: int) -> float:
    lv = float(as_spin(lam).value)
    return math.factorial(m) * special.gamma(m - 2 * lv - p)


# --------------------------------------------------------------------------
# semispinor forms


def _dual_factor(lam, p: int, m: int) -> complex:
    """Left-slot coefficient of the dual Cartan-Weyl function.

    ``conj(i**m) / sqrt(m! Gamma)``: the conjugate of the analytic function
    of the spin evaluated at ``conj(lam)``, which for real ``lam`` keeps the
    principal root of ``Gamma`` unconjugated even when ``Gamma < 0``.
    """
    return cartan_weyl_factor(lam, p, m) * (-1) ** m


def semispinor_form(lam, p: int, f: Mapping, g: Mapping, spec: QuadratureSpec = QuadratureSpec(),
                    basis: str = "monomial", continuation: bool = True) -> FormValue:
    """``<f, g> = int conj(f) I g dmu`` on block ``p`` with ``I g(zeta) = g(-zeta)``.

    ``f`` and ``g`` map degree ``m`` to a coefficient, either of ``zeta**m``
    (``basis="monomial"``) or of the Cartan-Weyl function ``f_m``
    (``basis="cartan_weyl"``).  Off-diagonal pairs vanish exactly.
    """
    if basis not in ("monomial", "cartan_weyl"):
        raise ValueError(f"unknown basis {basis!r}")
    total = 0j
    err = 0.0
    for m in sorted(set(f) & set(g)):
        fm, gm = complex(f[m]), complex(g[m])
        if basis == "cartan_weyl":
            left = np.conj(fm) * _dual_factor(lam, p, m)
            right = gm * cartan_weyl_factor(lam, p, m)
        else:
            left, right = np.conj(fm), gm
        if left == 0 or right == 0:
            continue
        mom = radial_moment(lam, m, p, spec, continuation)
        w = left * right * (-1) ** m
        total += w * mom.value
        err += abs(w) * mom.error
    return FormValue(total, err)


def graded_form(lam, f: Mapping, g: Mapping, spec: QuadratureSpec = QuadratureSpec(),
                basis: str = "monomial") -> FormValue:
    """Blockwise sum of :func:`semispinor_form` over ``{(p, m): coeff}`` inputs."""
    blocks = sorted({k[0] for k in f} | {k[0] for k in g})
    total, err = 0j, 0.0
    for p in blocks:
        fp = {k[1]: v for k, v in f.items() if k[0] == p}
        gp = {k[1]: v for k, v in g.items() if k[0] == p}
        if fp and gp:
            r = semispinor_form(lam, p, fp, gp, spec, basis)
            total += r.value
            err += r.error
    return FormValue(total, err)


def gram_matrix(lam, p: int, m_max: int, spec: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """``G[m, m'] = <f_m, f_m'>`` in the Cartan-Weyl basis of block ``p``."""
    out = np.zeros((m_max + 1, m_max + 1), dtype=complex)
    for m in range(m_max + 1):
        for n in range(m_max + 1):
            out[m, n] = semispinor_form(lam, p, {m: 1}, {n: 1}, spec, "cartan_weyl").value
    return out


def _block_ladders(lam, p: int):
    """Actions of ``L3, L+, L-`` of block ``p`` on ``{m: coeff}`` monomial data."""
    lv = float(as_spin(lam).value)
    Lam = lv + p / 2.0

    def L3(v):
        return {m: (m - Lam) * c for m, c in v.items()}

    def Lp(v):
        return {m + 1: c for m, c in v.items()}

    def Lm(v):
        return {m - 1: m * (2 * Lam - m + 1) * c for m, c in v.items() if m > 0}

    return L3, Lp, Lm


def _combine(*pairs):
    out = {}
    for s, v in pairs:
        for m, c in v.items():
            out[m] = out.get(m, 0) + s * c
    return out


def invariance_residuals(lam, p: int, m_max: int, spec: QuadratureSpec = QuadratureSpec()) -> dict:
    """Largest violation of form invariance over Cartan-Weyl pairs ``m, m' <= m_max``.

    Keys: ``"3"``, ``"1"``, ``"2"`` for ``<f, L_i g> - <L_i f, g>`` and
    ``"+-"`` for ``<f, L+ g> - <L- f, g>`` (the ladders are adjoint to each
    other, not to themselves).
    """
    L3, Lp, Lm = _block_ladders(lam, p)
    ops = {
        "3": (L3, L3),
        "1": (lambda v: _combine((0.5, Lp(v)), (0.5, Lm(v))),) * 2,
        "2": (lambda v: _combine((-0.5j, Lp(v)), (0.5j, Lm(v))),) * 2,
        "+-": (Lp, Lm),
    }

    def mono(m):
        return {m: cartan_weyl_factor(lam, p, m)}

    def dual(m):
        # left-slot vector whose monomial coefficient conjugates to the dual factor
        return {m: np.conj(_dual_factor(lam, p, m))}

    out = {}
    for key, (right_op, left_op) in ops.items():
        worst = 0.0
        for m in range(m_max + 1):
            for n in range(m_max + 1):
                lhs = semispinor_form(lam, p, dual(m), right_op(mono(n)), spec).value
                rhs = semispinor_form(lam, p, left_op(dual(m)), mono(n), spec).value
                worst = max(worst, abs(lhs - rhs))
        out[key] = worst
    return out


# --------------------------------------------------------------------------
# four-variable pairings for h_8


def _star(e):
    """Exponents of the conjugate monomial: ``z <-> zb``."""
    a1, a2, b1, b2 = e
    return (b1, b2, a1, a2)


def h8_form(f: Mapping, g: Mapping, kind: str = "gaussian") -> FormValue:
    """Pairing of polynomials in ``(z1, z2, zb1, zb2)`` given as ``{(a1, a2, b1, b2): coeff}``.

    ``kind="gaussian"``
        ``<z**a zb**b, z**c zb**d> = delta_{b+c, a+d} (b+c)!`` per mode, the
        Gaussian integral of ``conj(f) g``.
    ``kind="dual"``
        The flat pairing between a space of polynomials and its dual space of
        negative-exponent monomials: ``<f, g>`` is the coefficient of
        ``(z1 z2 zb1 zb2)**-1`` in ``conj(f) g``, where ``conj`` swaps ``z``
        and ``zb`` and conjugates coefficients.  No derivative ever produces
        that monomial, so derivatives integrate by parts without boundary
        terms and ``d/dz`` is minus the adjoint of ``d/dzb``.
    """
    if kind not in ("gaussian", "dual"):
        raise ValueError(f"unknown kind {kind!r}")
    total = 0
    for e, c in f.items():
        s = _star(e)
        cc = conj(c)
        for h, d in g.items():
            prod = tuple(x + y for x, y in zip(s, h))
            if kind == "gaussian":
                if min(prod) >= 0 and prod[0] == prod[2] and prod[1] == prod[3]:
                    total = total + cc * d * math.factorial(prod[0]) * math.factorial(prod[1])
            elif all(x == -1 for x in prod):
                total = total + cc * d
    return FormValue(total, 0.0)
