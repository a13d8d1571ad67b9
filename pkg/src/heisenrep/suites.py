"""Verification suites and report serialization.

Each suite yields :class:`CheckRecord` rows.  A record carries a tolerance
class rather than a raw tolerance, so exact identities can never pass with a
nonzero residual.  Reports are deterministic: same config, same bytes.

Report JSON layout (also in ``docs/report-schema.json``)::

    {
      "tool": "heisenrep",
      "version": str,
      "config": {key: str | list[str] | dict},
      "summary": {"checks": int, "passed": int, "failed": int},
      "checks": [
        {"suite": str, "check": str, "anchor": str, "class": str,
         "residual": float, "tolerance": float, "pass": bool}, ...
      ]
    }
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from . import forms, h8, interlace, oscillators, symmetry
from .core import (
    HeisenrepError,
    PoleError,
    commutator,
    ShiftOperator,
    SpinParameter,
    TruncationWindow,
    interior_residual,
    magnitude,
)

TOLERANCES = {"exact": 0.0, "float_algebra": 1e-10, "quadrature": 1e-6, "group_action": 1e-8}

SUITES = (
    "fock-h2",
    "decycle-h2",
    "nonfock-h4",
    "su2-blocks",
    "sp2r-casimirs",
    "gauss-actions",
    "forms-quadrature",
    "interlace-kernel",
    "two-units",
    "h8-algebra",
    "u11-grading",
)

FIELDS = ("suite", "check", "anchor", "class", "residual", "tolerance", "pass")
CSV_FIELDS = ("suite", "check", "anchor", "residual", "tolerance", "pass")
FORMATS = ("json", "csv", "text")


class UnknownSuite(HeisenrepError, ValueError):
    pass


class ConfigError(HeisenrepError, ValueError):
    """Invalid configuration value; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class SuiteConfig:
    """Inputs for :func:`run_suites`.

    ``lambdas`` are exact rationals; float suites evaluate them as floats.
    ``window`` is ``(p_min, p_max, m_max)`` for the graded-window suites.
    """

    lambdas: tuple = (Fraction(-1, 4), Fraction(-3, 10))
    window: tuple = (-6, 6, 24)
    fock_m_max: int = 12
    quadrature: forms.QuadratureSpec = forms.QuadratureSpec()
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))
    suites: tuple = SUITES
    seed: int = 20240101
    workers: int = 1

    def __post_init__(self):
        lams = tuple(self.lambdas)
        if not lams:
            raise ConfigError("lambda", "at least one value required")
        for lam in lams:
            if not isinstance(lam, Fraction):
                raise ConfigError("lambda", f"{lam!r} is not an exact rational")
            try:
                SpinParameter(lam)
            except HeisenrepError as exc:
                raise ConfigError("lambda", str(exc)) from exc
        object.__setattr__(self, "lambdas", lams)
        try:
            w = TruncationWindow(*self.window)
        except (TypeError, ValueError) as exc:
            raise ConfigError("window", str(exc)) from exc
        if w.p_max - w.p_min < 2 or w.m_max < 4:
            raise ConfigError("window", "need at least three blocks and m_max >= 4")
        if self.fock_m_max < 6:
            raise ConfigError("fock_m_max", "must be at least 6")
        tol = dict(self.tolerances)
        if set(tol) != set(TOLERANCES):
            raise ConfigError("tolerances", f"keys must be {sorted(TOLERANCES)}")
        if tol["exact"] != 0:
            raise ConfigError("tolerances.exact", "exact class tolerance is fixed at 0")
        for k, v in tol.items():
            if k != "exact" and not (v > 0):
                raise ConfigError(f"tolerances.{k}", "must be positive")
        object.__setattr__(self, "tolerances", tol)
        for s in self.suites:
            if s not in SUITES:
                raise UnknownSuite(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
        object.__setattr__(self, "suites", tuple(self.suites))
        if self.workers < 1:
            raise ConfigError("workers", "must be at least 1")

    def echo(self) -> dict:
        q = self.quadrature
        return {
            "lambda": [str(x) for x in self.lambdas],
            "window": "{}:{}:{}".format(*self.window),
            "fock_m_max": str(self.fock_m_max),
            "quadrature": f"nodes={q.nodes} R={q.R!r} series_terms={q.series_terms}",
            "tolerances": {k: repr(float(self.tolerances[k])) for k in sorted(self.tolerances)},
            "suites": list(self.suites),
            "seed": str(self.seed),
        }

    @property
    def graded_window(self) -> TruncationWindow:
        return TruncationWindow(*self.window)


@dataclass(frozen=True)
class CheckRecord:
    suite: str
    check: str
    anchor: str
    tol_class: str
    residual: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "check": self.check,
            "anchor": self.anchor,
            "class": self.tol_class,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple
    config: dict
    version: str = __version__

    @property
    def summary(self) -> dict:
        n = len(self.checks)
        ok = sum(c.passed for c in self.checks)
        return {"checks": n, "passed": ok, "failed": n - ok}

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "tool": "heisenrep",
            "version": self.version,
            "config": self.config,
            "summary": self.summary,
            "checks": [c.as_dict() for c in self.checks],
        }


class _Collector:
    def __init__(self, suite: str, config: SuiteConfig):
        self.suite = suite
        self.tol = config.tolerances
        self.rows = []

    def add(self, check: str, anchor: str, tol_class: str, residual):
        tol = float(self.tol[tol_class])
        if tol_class == "exact":
            passed = residual == 0
        else:
            passed = bool(np.isfinite(magnitude(residual))) and magnitude(residual) <= tol
        res = float(magnitude(residual)) if residual != 0 else 0.0
        self.rows.append(CheckRecord(self.suite, check, anchor, tol_class, res, tol, passed))

    def worst(self, values):
        vals = list(values)
        return max(vals, key=magnitude) if vals else 0


def _tag(name, **params):
    if not params:
        return name
    return name + "[" + ",".join(f"{k}={v}" for k, v in params.items()) + "]"


def _set_mismatch(a, b) -> int:
    return len(set(a) ^ set(b))


# --------------------------------------------------------------------------
# suites


def _fock_h2(cfg, out: _Collector):
    n = cfg.fock_m_max
    for modes in (1, 2):
        f = oscillators.fock_ladders(modes, n)
        one = ShiftOperator.identity(f.box)
        zero = ShiftOperator.zero(f.box, shift=None)
        res = []
        for k in range(modes):
            for j in range(modes):
                tgt = one if k == j else zero
                res.append(interior_residual(commutator(f.lowering[k], f.raising[j]), tgt, margin=1))
                res.append(interior_residual(commutator(f.lowering[k], f.lowering[j]), zero, margin=1))
        out.add(_tag("[a1_k,a2_l]=delta", modes=modes),
                "canonical commutation relations, z-realization", "exact", out.worst(res))
        spec = oscillators.number_spectrum(f, 1)
        out.add(_tag("number spectrum", modes=modes), "number operator of the Fock representation",
                "exact", _set_mismatch(spec, range(n + 1)))
        low, up = f.cartan_weyl()
        worst = 0.0
        for e in f.box.interior(1):
            for k in range(modes):
                e_up = tuple(x + (i == k) for i, x in enumerate(e))
                worst = max(worst, abs(up[k][(e_up, e)] - math.sqrt(e[k] + 1)))
                if e[k] > 0:
                    e_dn = tuple(x - (i == k) for i, x in enumerate(e))
                    worst = max(worst, abs(low[k][(e_dn, e)] - math.sqrt(e[k])))
        out.add(_tag("cartan-weyl sqrt(m)", modes=modes), "ladder coefficients in the orthonormal basis",
                "float_algebra", worst)
    split = symmetry.h2_semispinor_split(max(n, 40))
    for name, sup in (("even", split.even), ("odd", split.odd)):
        r = symmetry.su2_relation_residuals(split.L3, split.Lp, split.Lm, sup, Fraction(-3, 16))
        out.add(_tag("casimir=-3/16", subspace=name), "semispinor parity subspaces of one oscillator",
                "float_algebra", r["casimir"])
        out.add(_tag("su(2) brackets", subspace=name), "quadratic bilinears of one oscillator", "exact",
                out.worst(v for k, v in r.items() if k != "casimir"))
    lw = split.lowest_weights()
    out.add("lowest weights 1/4,3/4", "lowest weights of the two semispinors", "exact",
            abs(lw[0] - Fraction(1, 4)) + abs(lw[1] - Fraction(3, 4)))


def _lam(lam):
    return {"lambda": lam}


def _decycle_h2(cfg, out: _Collector):
    w = cfg.graded_window
    for lam in cfg.lambdas:
        res = oscillators.decycled_residuals(oscillators.phi_phibar(lam, w))
        for kind in ("phi", "phibar", "mixed"):
            out.add(_tag(f"decycled {kind} relations", **_lam(lam)), "decycled oscillator relations",
                    "exact", out.worst(v for k, v in res.items() if k[0] == kind))
        fam = oscillators.nonfock_b_family(lam, range(w.p_min, w.p_max + 1), 2 * w.m_max)
        out.add(_tag("shifted b relation=-1/4 eps", **_lam(lam)), "spin-raising b operators", "exact",
                oscillators.b_relation_residual(fam))


def _nonfock_h4(cfg, out: _Collector):
    w = cfg.graded_window
    for lam in cfg.lambdas:
        rep = oscillators.nonfock_h4(lam, w)
        out.add(_tag("[a^a_alpha,a^b_beta]=delta eps", **_lam(lam)), "non-Fock h4 commutation relations",
                "exact", out.worst(oscillators.h4_residuals(rep).values()))
        out.add(_tag("weight-basis ladder coefficients", **_lam(lam)),
                "weight basis of the non-Fock representation", "float_algebra",
                oscillators.weight_coefficient_residual(rep))
        mins = []
        for grow in range(5):
            sub = TruncationWindow(w.p_min - grow, w.p_max, min(w.m_max, 6))
            mins.append(min(oscillators.number_spectrum(oscillators.nonfock_h4(lam, sub), 2)))
        stalls = sum(1 for a, b in zip(mins, mins[1:]) if not b < a)
        out.add(_tag("no ground state", **_lam(lam)), "mode-2 spectrum unbounded below", "exact", stalls)


def _su2_blocks(cfg, out: _Collector):
    w = cfg.graded_window
    for lam in cfg.lambdas:
        res, cas = [], []
        for p in w.blocks:
            b = symmetry.su2_semispinor(lam, p, w.m_max)
            r = symmetry.su2_relation_residuals(
                b.L3, b.Lp, b.Lm, b.window.interior(b.margin), b.casimir_value()
            )
            res.extend(v for k, v in r.items() if k != "casimir")
            cas.append(r["casimir"])
        out.add(_tag("block su(2) brackets", **_lam(lam)), "semispinor blocks of the graded space",
                "exact", out.worst(res))
        out.add(_tag("block casimir=Lam(Lam+1)", **_lam(lam)), "semispinor blocks of the graded space",
                "exact", out.worst(cas))
        L3, Lp, Lm = symmetry.graded_su2(oscillators.nonfock_h4(lam, w))
        r = symmetry.su2_relation_residuals(L3, Lp, Lm, w.interior((1, 2)))
        out.add(_tag("graded su(2) from bilinears", **_lam(lam)), "su(2) from non-Fock bilinears",
                "exact", out.worst(r.values()))
    f = symmetry.fock_su2(cfg.fock_m_max)
    worst = 0
    for deg in range(cfg.fock_m_max - 1):
        j = Fraction(deg, 2)
        r = symmetry.su2_relation_residuals(f.L3, f.Lp, f.Lm, f.homogeneous(deg), j * (j + 1))
        worst = out.worst([worst, *r.values()])
    out.add("fock su(2) casimir=j(j+1)", "two-mode Fock su(2)", "exact", worst)


def _sp2r(cfg, out: _Collector):
    w = cfg.graded_window
    small = TruncationWindow(max(w.p_min, -4), min(w.p_max, 4), min(w.m_max, 12))
    sources = [({"source": "fock"}, None, oscillators.fock_ladders(2, cfg.fock_m_max))]
    sources += [
        ({"source": "nonfock", "lambda": lam}, lam, oscillators.nonfock_h4(lam, small))
        for lam in cfg.lambdas
    ]
    for params, lam, src in sources:
        g = symmetry.sp2r_generators(src)
        sup = symmetry.generator_interior(src)
        one = ShiftOperator.identity(g.L0.space)
        for check, op, val in (
            ("C=-3/4", g.casimir_C(), Fraction(-3, 4)),
            ("C'=0", g.casimir_Cprime(), 0),
            ("Gamma^2=1/2", g.gamma_square(), Fraction(1, 2)),
        ):
            out.add(_tag(check, **params), "sp(2,R) Casimir values", "float_algebra",
                    interior_residual(op, one.scale(val), support=sup))
        if lam is None:
            want = {Fraction(k, 2) for k in range(2 * cfg.fock_m_max + 1)}
        else:
            want = {lam + Fraction(p, 2) for p in small.blocks}
        out.add(_tag("Sp L0", **params), "spectrum of L0", "exact",
                _set_mismatch(symmetry.l0_spectrum(src), want))


def _random_borel(rng):
    d = complex(*rng.uniform(0.8, 1.25, 1), *rng.uniform(-0.3, 0.3, 1))
    s = complex(*rng.uniform(-0.8, 0.8, 2))
    return symmetry.upper(d, s)


def _random_regular(rng):
    a = complex(1 + rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))
    b, c = (complex(*rng.uniform(-0.3, 0.3, 2)) for _ in range(2))
    return symmetry.GroupElement(a, b, c, (1 + b * c) / a)


def _gauss_actions(cfg, out: _Collector):
    rng = np.random.default_rng(cfg.seed)
    n_terms = 40
    for lam in cfg.lambdas:
        lv = float(lam)
        fact = np.array([math.factorial(k) for k in range(n_terms)], dtype=float)
        f = (rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)) / fact
        worst = 0.0
        for _ in range(20):
            b1, b2 = _random_borel(rng), _random_borel(rng)
            lhs = symmetry.borel_plus_action(lv, b1 @ b2, f)
            rhs = symmetry.borel_plus_action(lv, b1, symmetry.borel_plus_action(lv, b2, f))
            worst = max(worst, float(np.abs(lhs - rhs).max() / np.abs(lhs).max()))
        out.add(_tag("Borel homomorphism", **_lam(lam)), "upper-triangular subgroup action",
                "group_action", worst)
        worst = 0.0
        keep = 20
        for _ in range(10):
            v = _random_regular(rng)
            tau = complex(*rng.uniform(-0.5, 0.5, 2))
            pref, slope = symmetry.exponential_action(lv, v, tau)
            got = symmetry.factorwise_action(lv, v, tau, 60)[:keep]
            want = pref * symmetry.exponential_coeffs(slope, keep)
            worst = max(worst, float(np.abs(got - want).max()))
        out.add(_tag("exponential prefactor/slope law", **_lam(lam)), "group action on exponentials",
                "group_action", worst)
        try:
            symmetry.exponential_action(lv, symmetry.GroupElement(1, -1, 2, -1), 0.5)
            rejected = 1
        except PoleError:
            rejected = 0
        out.add(_tag("near-pole rejection", **_lam(lam)), "group action on exponentials", "exact", rejected)
        tau = 0.7 - 0.2j
        c = symmetry.coherent_state(lv, tau, 60)
        lm = symmetry.lminus_matrix(lv, 59)
        out.add(_tag("coherent eigenvector", **_lam(lam)), "coherent state of L-", "group_action",
                float(np.abs((lm @ c - tau * c)[:50]).max()))
        m_max = 60
        for label, scale in (("n!(-tau)^n Laguerre", 1.0), ("n!(-tau/2)^n Laguerre", 0.5)):
            worst = 0.0
            for n in range(9):
                e = np.zeros(m_max + 1, dtype=complex)
                e[n] = 1.0
                for t in (0.5, 1.0, -0.7):
                    series = symmetry.exp_lminus(lv, t, e)[: n + 1]
                    closed = symmetry.exp_lminus_closed_form(lv, n, t, scale)
                    worst = max(worst, float(np.abs(series - closed).max()))
            out.add(_tag(f"exp(tau L-) vs {label}", **_lam(lam)), "exponential of the lowering generator",
                    "group_action", worst)


def _forms(cfg, out: _Collector):
    spec = cfg.quadrature
    for lam in cfg.lambdas:
        lv = float(lam)
        gram, mom, inv = 0.0, 0.0, 0.0
        for p in (-1, 0, 1):
            g = forms.gram_matrix(lv, p, 6, spec)
            gram = max(gram, float(np.abs(g - np.diag([(-1.0) ** m for m in range(7)])).max()))
            for m in range(7):
                if m - 2 * lv - p <= 0:
                    continue
                v = forms.radial_moment(lv, m, p, spec).value
                ref = forms.moment_closed_form(lv, m, p)
                mom = max(mom, abs(v - ref) / abs(ref))
            inv = max(inv, max(forms.invariance_residuals(lv, p, 4, spec).values()))
        out.add(_tag("gram=diag((-1)^m)", **_lam(lam)), "invariant form on semispinor blocks",
                "quadrature", gram)
        out.add(_tag("radial moments vs Gamma products", **_lam(lam)), "radial moment integrals",
                "quadrature", mom)
        out.add(_tag("form invariance", **_lam(lam)), "invariance of the semispinor form",
                "quadrature", inv)
    x = 1.7
    worst = max(abs(forms.bessel_k(nu, x) - float(_kv(nu, x))) / float(_kv(nu, x))
                for nu in (-1.6, -0.5, 0.4, 1.3, 2.9))
    out.add("bessel K oracle", "modified Bessel function of the measure", "quadrature", worst)


def _kv(nu, x):
    from scipy import special

    return special.kv(nu, x)


def _interlace(cfg, out: _Collector):
    for lam in cfg.lambdas:
        blocks = interlace.kernel_blocks(lam, range(-5, 6), 20)
        res = [interlace.kernel_shift_check(blocks, poly) for poly in ((0, 1), (1,), (-1, 1), (2, -3, 1))]
        out.add(_tag("shift property f(zb2)K=f(1)K", **_lam(lam)), "interlacing kernel", "exact", out.worst(res))
        member = sum(
            interlace.in_kernel(poly) != (sum(poly) == 0) for poly in ((-1, 1), (2, -3, 1), (1,), (0, 1))
        )
        out.add(_tag("kernel membership f(1)=0", **_lam(lam)), "kernel of the interlacing operator",
                "exact", member)
        for gen in interlace.GENERATORS:
            out.add(_tag(f"interlace {gen}", **_lam(lam)), "interlacing of Fock and graded actions", "exact",
                    interlace.interlace_residual(lam, gen))


def _two_units(cfg, out: _Collector):
    w = cfg.graded_window
    small = TruncationWindow(max(w.p_min, -4), min(w.p_max, 4), min(w.m_max, 10))
    for lam in cfg.lambdas:
        r = interlace.two_units_check(small, lam)
        out.add(_tag("structural equality of units", **_lam(lam)), "two units of the non-Fock algebra",
                "exact", int(not r.structurally_equal) + int(r.entry_values != frozenset({1})))
        out.add(_tag("[L_i, 1]=0", **_lam(lam)), "two units of the non-Fock algebra", "exact",
                out.worst(r.identity_commutators.values()))
        diff = [
            r.mixing[i][a][g] - r.expected_mixing[i][a][g]
            for i in r.mixing for a in range(2) for g in range(2)
        ]
        out.add(_tag("spinor mixing [L_i,a1_alpha]", **_lam(lam)), "su(2) acting on the units", "exact",
                out.worst(diff + list(r.mixing_residuals.values())))
    space = interlace.extended_fock_space(6, 6, 4)
    ps = interlace.phase_split_check(space)
    out.add("phase split of L0", "extended Fock space", "exact",
            out.worst([ps.l0_l_on_z, ps.l0_i_on_z, ps.gamma0_on_z, ps.casimir_on_scalars]))


def _h8(cfg, out: _Collector):
    d = h8.dirac_set()
    out.add("clifford relations", "Dirac matrices", "exact", d.clifford_residual())
    rep = h8.h8_phi_rep(3)
    out.add("[phi_a,phibar_b]=delta", "involutive Heisenberg algebra", "exact",
            out.worst(h8.heisenberg_residuals(rep).values()))
    alg = h8.bilinear_algebra(rep, d)
    kappa = h8.i_bracket_constant(alg)
    br = h8.bracket_residuals(alg, kappa)
    out.add("so(4) brackets of I", "Dirac bilinears", "exact", out.worst(v for k, v in br.items() if k[0] == "I"))
    out.add("[I,A]=[I,B]=[A,B]=0", "Dirac bilinears", "exact", out.worst(v for k, v in br.items() if k[0] != "I"))
    try:
        mom = h8.momentum_ops(rep, d)
        out.add("i phibar gamma P+ phi = zb sigma+ z", "momentum operators", "exact", mom.consistency)
        out.add("rank of 16 generators", "Dirac bilinears and momenta", "exact",
                abs(h8.independence_rank(alg, mom) - 16))
    except h8.DiracArrangementError:
        out.add("i phibar gamma P+ phi = zb sigma+ z", "momentum operators", "exact", 1)
    herm = h8.hermiticity_residuals(3)
    out.add("Dirac conjugation contracts", "involution of the Heisenberg algebra", "exact",
            out.worst(v for k, v in herm.items() if k.startswith("a")))
    out.add("momentum Hermiticity", "momentum operators", "exact",
            out.worst(v for k, v in herm.items() if k.startswith("p")))


def _u11(cfg, out: _Collector):
    u = h8.u11_restriction(4, 6)
    br = h8.u11_brackets(u)
    out.add("u(1,1) brackets", "u(1,1) restriction", "exact", out.worst(r for _, r in br.values()))
    fval = u.F.diagonal()
    out.add("F z^j zb^k=(j-k)", "fermionic charge", "exact",
            out.worst(fval[e] - (e[0] - e[1]) for e in u.box.basis))
    rep = h8.f0_structure_checks(4, 6)
    out.add("F-sector block diagonality", "structure of F0", "exact", rep.off_sector_entries)
    out.add("F>=0 on F0", "structure of F0", "exact", sum(1 for v in rep.f_spectrum if v < 0))
    diff = [
        1 if rep.casimirs[k] is None else rep.casimirs[k] - rep.expected_casimirs[k]
        for k in rep.casimirs
    ]
    out.add("sector casimir=w(w+1)", "structure of F0", "exact", out.worst(diff))
    lau = rep.laurent
    out.add("one-way invariance", "singular span and tail", "exact",
            int(not lau.tail_invariant) + int(not lau.union_invariant)
            + int(lau.singular_invariant) + int(not lau.witness_outside))


_RUNNERS = {
    "fock-h2": _fock_h2,
    "decycle-h2": _decycle_h2,
    "nonfock-h4": _nonfock_h4,
    "su2-blocks": _su2_blocks,
    "sp2r-casimirs": _sp2r,
    "gauss-actions": _gauss_actions,
    "forms-quadrature": _forms,
    "interlace-kernel": _interlace,
    "two-units": _two_units,
    "h8-algebra": _h8,
    "u11-grading": _u11,
}


def _run_one(name: str, config: SuiteConfig) -> list:
    out = _Collector(name, config)
    _RUNNERS[name](config, out)
    return out.rows


def run_suites(config: SuiteConfig) -> VerificationReport:
    """Run the selected suites and collect their checks in suite order."""
    names = list(config.suites)
    if config.workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            chunks = list(pool.map(lambda n: _run_one(n, config), names))
    else:
        chunks = [_run_one(n, config) for n in names]
    rows = tuple(r for chunk in chunks for r in chunk)
    return VerificationReport(rows, config.echo())


# --------------------------------------------------------------------------
# serialization


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    """Serialize ``report`` as UTF-8 ``json``, ``csv`` or ``text``.

    The text format prefixes failing checks with ``FAIL`` and passing ones
    with ``ok``.
    """
    if fmt == "json":
        return (json.dumps(report.as_dict(), indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for c in report.checks:
            d = c.as_dict()
            w.writerow([repr(d[k]) if isinstance(d[k], float) else d[k] for k in CSV_FIELDS])
        return buf.getvalue().encode("utf-8")
    if fmt == "text":
        lines = []
        for c in report.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(
                f"{mark} {c.suite:<17} {c.check:<55} residual={c.residual:.3g} "
                f"tol={c.tolerance:.0e} ({c.tol_class})"
            )
        s = report.summary
        lines.append(f"{s['passed']}/{s['checks']} checks passed, {s['failed']} failed")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def report_from_json(data) -> VerificationReport:
    """Rebuild a report from its JSON form, validating the layout.

    Raises
    ------
    ValueError
        If a required key is missing or has the wrong type.
    """
    if isinstance(data, (bytes, str)):
        data = json.loads(data)
    for key, typ in (("tool", str), ("version", str), ("config", dict), ("summary", dict), ("checks", list)):
        if not isinstance(data.get(key), typ):
            raise ValueError(f"report field {key!r} missing or not a {typ.__name__}")
    types = {"suite": str, "check": str, "anchor": str, "class": str,
             "residual": (int, float), "tolerance": (int, float), "pass": bool}
    rows = []
    for i, c in enumerate(data["checks"]):
        for k, t in types.items():
            if not isinstance(c.get(k), t):
                raise ValueError(f"checks[{i}].{k} missing or of wrong type")
        rows.append(CheckRecord(c["suite"], c["check"], c["anchor"], c["class"],
                                float(c["residual"]), float(c["tolerance"]), c["pass"]))
    return VerificationReport(tuple(rows), data["config"], data["version"])
