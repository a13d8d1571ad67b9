"""Command-line front end: ``heisenrep {check, spectrum, kernel, dump-operator, report}``.

Exit status: 0 on success, 1 when a check fails, 2 on usage or configuration
errors.  Error messages name the offending flag or config key.

Config files hold one ``key = value`` pair per line; ``#`` starts a comment.
Recognised keys::

    lambda = -1/4, -3/10
    window = -6:6:24
    fock_m_max = 12
    suites = fock-h2, sp2r-casimirs
    seed = 20240101
    workers = 1
    quadrature.nodes = 64
    quadrature.R = 40
    tol.float_algebra = 1e-10

The path defaults to ``$HEISENREP_CONFIG``.  Command-line flags override the
file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import __version__, interlace, oscillators, suites, symmetry
from .core import HeisenrepError, SpinParameter, TruncationWindow, parse_rational
from .forms import QuadratureSpec

ENV_CONFIG = "HEISENREP_CONFIG"

CONFIG_KEYS = (
    "lambda", "window", "fock_m_max", "suites", "seed", "workers",
    "quadrature.nodes", "quadrature.R", "quadrature.series_terms",
    *(f"tol.{k}" for k in suites.TOLERANCES),
)

OPERATORS = ("phi1", "phi2", "phibar1", "phibar2", "a1_1", "a1_2", "a2_1", "a2_2", "L3", "L+", "L-")


class UsageError(Exception):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")


# --------------------------------------------------------------------------
# parsing helpers


def parse_lambda(text: str, where: str = "--lambda") -> Fraction:
    try:
        lam = parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(where, str(exc)) from exc
    try:
        SpinParameter(lam)
    except HeisenrepError as exc:
        raise UsageError(where, str(exc)) from exc
    return lam


def parse_lambdas(text: str, where: str = "--lambda") -> tuple:
    parts = [t for t in text.split(",") if t.strip()]
    if not parts:
        raise UsageError(where, "no values given")
    return tuple(parse_lambda(t, where) for t in parts)


def _ints(text: str, n: int, where: str) -> tuple:
    parts = text.split(":")
    if len(parts) != n:
        raise UsageError(where, f"expected {n} colon-separated integers, got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise UsageError(where, f"non-integer in {text!r}") from exc


def _float(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise UsageError(where, f"not a number: {text!r}") from exc
    return v


def _int(text: str, where: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise UsageError(where, f"not an integer: {text!r}") from exc


def read_config(path: str) -> dict:
    """Parse a ``key = value`` file into ``{key: (value, location)}``."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError("--config", f"cannot read {path}: {exc.strerror}") from exc
    out = {}
    for no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}", f"expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{no}", f"unknown key {key!r}")
        out[key] = (value, f"{path}:{no} key {key!r}")
    return out


def build_config(args) -> suites.SuiteConfig:
    """Merge the config file (if any) with command-line overrides."""
    path = args.config or os.environ.get(ENV_CONFIG)
    file_cfg = read_config(path) if path else {}
    kw = {}
    tol = dict(suites.TOLERANCES)
    quad = {}
    for key, (value, where) in file_cfg.items():
        if key == "lambda":
            kw["lambdas"] = parse_lambdas(value, where)
        elif key == "window":
            kw["window"] = _ints(value, 3, where)
        elif key == "suites":
            kw["suites"] = tuple(s.strip() for s in value.split(",") if s.strip())
        elif key in ("fock_m_max", "seed", "workers"):
            kw[key] = _int(value, where)
        elif key.startswith("tol."):
            tol[key[4:]] = _float(value, where)
        elif key == "quadrature.R":
            quad["R"] = _float(value, where)
        else:
            quad[key.split(".", 1)[1]] = _int(value, where)
    if args.lam:
        kw["lambdas"] = tuple(x for t in args.lam for x in parse_lambdas(t))
    if args.window:
        kw["window"] = _ints(args.window, 3, "--window")
    if args.suite:
        kw["suites"] = tuple(args.suite)
    if args.fock_m_max is not None:
        kw["fock_m_max"] = args.fock_m_max
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.workers is not None:
        kw["workers"] = args.workers
    for item in args.tol or ():
        if "=" not in item:
            raise UsageError("--tol", f"expected class=value, got {item!r}")
        k, v = item.split("=", 1)
        if k not in suites.TOLERANCES:
            raise UsageError("--tol", f"unknown tolerance class {k!r}")
        tol[k] = _float(v, "--tol")
    kw["tolerances"] = tol
    try:
        if quad:
            kw["quadrature"] = QuadratureSpec(**quad)
        return suites.SuiteConfig(**kw)
    except suites.ConfigError as exc:
        flag = {"lambda": "--lambda", "window": "--window", "fock_m_max": "--fock-m-max",
                "workers": "--workers"}.get(exc.field, "--tol" if exc.field.startswith("tol") else exc.field)
        raise UsageError(flag, str(exc)) from exc
    except suites.UnknownSuite as exc:
        raise UsageError("--suite", str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise UsageError("quadrature", str(exc)) from exc


def _write(data: bytes, output):
    if output:
        with open(output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def _window(args, default=(-2, 2)) -> TruncationWindow:
    lo, hi = _ints(args.p_window, 2, "--p-window") if args.p_window else default
    try:
        return TruncationWindow(lo, hi, args.m_max)
    except ValueError as exc:
        raise UsageError("--p-window", str(exc)) from exc


# --------------------------------------------------------------------------
# subcommands


def cmd_check(args) -> int:
    cfg = build_config(args)
    report = suites.run_suites(cfg)
    _write(suites.emit_report(report, args.format), args.output)
    for c in report.failures():
        print(f"FAIL {c.suite} {c.check} residual={c.residual:.3g}", file=sys.stderr)
    return 0 if report.all_passed else 1


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return f"{float(v):g}\t{v}"
    return f"{float(v):g}\t{v!r}"


def cmd_spectrum(args) -> int:
    lines = []
    if args.rep in ("fock-h2", "fock-h4"):
        modes = 1 if args.rep == "fock-h2" else 2
        if args.m_max < 2:
            raise UsageError("--m-max", "must be at least 2")
        rep = oscillators.fock_ladders(modes, args.m_max)
        n = rep.number_operator(min(args.mode, modes) - 1).diagonal()
        lines.append("index\teigenvalue\texact")
        for idx in rep.box.basis:
            lines.append(f"{idx}\t{_fmt(n[idx])}")
    else:
        lam = parse_lambda(args.lam[0] if args.lam else "-1/4")
        w = _window(args)
        rep = oscillators.nonfock_h4(lam, w)
        ext = oscillators.nonfock_h4(lam, TruncationWindow(w.p_min - 1, w.p_max, w.m_max))
        k = args.mode - 1
        n = (ext.a2[k] @ ext.a1[k]).diagonal()
        lines.append("p\tm\teigenvalue\texact")
        for c in w.basis:
            lines.append(f"{c.p}\t{c.m}\t{_fmt(n[c])}")
        l0 = sorted(symmetry.l0_spectrum(rep))
        lines.append("# Sp L0: " + ", ".join(str(v) for v in l0))
    _write(("\n".join(lines) + "\n").encode("utf-8"), args.output)
    return 0


def cmd_kernel(args) -> int:
    lam = parse_lambda(args.lam[0] if args.lam else "-1/4")
    lo, hi = _ints(args.p_window, 2, "--p-window") if args.p_window else (-5, 5)
    if hi - lo < 2:
        raise UsageError("--p-window", "need at least three blocks")
    if args.j_max < 4:
        raise UsageError("--j-max", "must be at least 4")
    blocks = interlace.kernel_blocks(lam, range(lo, hi + 1), args.j_max)
    lines = ["p\tzb2 exponent\tfirst coefficients 1/j!"]
    for b in blocks:
        lines.append(f"{b.p}\t{b.exponent}\t" + " ".join(str(c) for c in b.coeffs[:5]))
    lines.append("check\tresidual")
    for poly in ((0, 1), (-1, 1), (2, -3, 1)):
        lines.append(f"shift f={poly}\t{interlace.kernel_shift_check(blocks, poly)}")
        lines.append(f"in kernel f={poly}\t{interlace.in_kernel(poly)}")
    for gen in interlace.GENERATORS:
        r = interlace.interlace_residual(lam, gen, range(lo, hi + 1), args.j_max)
        lines.append(f"interlace {gen}\t{r}")
    _write(("\n".join(lines) + "\n").encode("utf-8"), args.output)
    return 0


def _named_operator(name: str, lam, w: TruncationWindow):
    if name.startswith("phi"):
        pair = oscillators.phi_phibar(lam, w)
        seq = pair.phibar if name.startswith("phibar") else pair.phi
        return seq[int(name[-1]) - 1]
    if name.startswith("a"):
        rep = oscillators.nonfock_h4(lam, w)
        seq = rep.a1 if name[1] == "1" else rep.a2
        return seq[int(name[-1]) - 1]
    L3, Lp, Lm = symmetry.graded_su2(oscillators.nonfock_h4(lam, w))
    return {"L3": L3, "L+": Lp, "L-": Lm}[name]


def cmd_dump(args) -> int:
    lam = parse_lambda(args.lam[0] if args.lam else "-1/4")
    op = _named_operator(args.name, lam, _window(args))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("row_p", "row_m", "col_p", "col_m", "value"))
    for r, c, v in op.entries():
        w.writerow((r.p, r.m, c.p, c.m, str(v)))
    _write(buf.getvalue().encode("utf-8"), args.output)
    return 0


def cmd_report(args) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            report = suites.report_from_json(fh.read())
    except OSError as exc:
        raise UsageError("--input", f"cannot read {args.input}: {exc.strerror}") from exc
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError("--input", str(exc)) from exc
    _write(suites.emit_report(report, args.format), args.output)
    return 0 if report.all_passed else 1


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heisenrep", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"heisenrep {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, output=True):
        sp.add_argument("--lambda", dest="lam", action="append", metavar="P/Q",
                        help="spin parameter as an exact rational; repeat or comma-separate")
        if output:
            sp.add_argument("--output", "-o", help="write to this file instead of stdout")

    c = sub.add_parser("check", help="run verification suites and emit a report")
    common(c)
    c.add_argument("--config", help=f"key = value config file (default ${ENV_CONFIG})")
    c.add_argument("--suite", action="append", metavar="NAME", help="suite to run; repeatable")
    c.add_argument("--window", metavar="PMIN:PMAX:MMAX")
    c.add_argument("--fock-m-max", type=int)
    c.add_argument("--tol", action="append", metavar="CLASS=VALUE")
    c.add_argument("--seed", type=int)
    c.add_argument("--workers", type=int)
    c.add_argument("--format", choices=suites.FORMATS, default="json")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("spectrum", help="print number-operator spectra")
    common(s)
    s.add_argument("--rep", choices=("fock-h2", "fock-h4", "nonfock-h4"), default="nonfock-h4")
    s.add_argument("--p-window", metavar="PMIN:PMAX")
    s.add_argument("--m-max", type=int, default=4)
    s.add_argument("--mode", type=int, choices=(1, 2), default=2)
    s.set_defaults(func=cmd_spectrum)

    k = sub.add_parser("kernel", help="print interlacing-kernel blocks and checks")
    common(k)
    k.add_argument("--p-window", metavar="PMIN:PMAX")
    k.add_argument("--j-max", type=int, default=20)
    k.set_defaults(func=cmd_kernel)

    d = sub.add_parser("dump-operator", help="write a graded-window operator as CSV triplets")
    common(d)
    d.add_argument("--name", choices=OPERATORS, required=True)
    d.add_argument("--p-window", metavar="PMIN:PMAX")
    d.add_argument("--m-max", type=int, default=4)
    d.set_defaults(func=cmd_dump)

    r = sub.add_parser("report", help="reformat an existing JSON report")
    r.add_argument("--input", "-i", required=True)
    r.add_argument("--format", choices=suites.FORMATS, default="text")
    r.add_argument("--output", "-o")
    r.set_defaults(func=cmd_report)
    return p


def _join_negative_values(argv):
    """Turn ``--flag -1/4`` into ``--flag=-1/4`` so argparse keeps negative rationals."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok.startswith("--") and "=" not in tok and len(nxt) > 1 and nxt[0] == "-" and nxt[1].isdigit():
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, HeisenrepError) as exc:
        print(f"heisenrep: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
