"""Command-line interface.

Exit codes: 0 success, 1 a bound or assertion was violated, 2 bad input,
3 numerical failure (singular matrix, precision escalation exhausted).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import mpmath

from . import construct, intpoly, lwe
from .mpnum import DEFAULT_PRECISION, CondReport, PrecisionExhaustedError, SingularMatrixError, sci

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
PRECISION_ENV = "CYCLOCOND_PRECISION"
FORMATS = ("json", "csv", "pretty")


class InputError(ValueError):
    pass


class Output:
    """Collects one command's result in all three encodings."""

    def __init__(self, document, header=None, rows=(), pretty=""):
        self.document = document
        self.header = header
        self.rows = list(rows)
        self.pretty = pretty
        self.status = EXIT_OK

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.document, indent=2, sort_keys=False) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            if self.header:
                w.writerow(self.header)
            w.writerows(self.rows)
            return buf.getvalue()
        return self.pretty if self.pretty.endswith("\n") else self.pretty + "\n"


# ---------------------------------------------------------------------------
# argument helpers


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not an integer: %r" % text)
    if not construct.is_odd_prime(p):
        raise argparse.ArgumentTypeError("%d is not an odd prime" % p)
    return p


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not an integer: %r" % text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive: %d" % n)
    return n


def _prime_range(text: str) -> list[int]:
    try:
        lo, hi = (int(v) for v in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO..HI, got %r" % text)
    primes = [p for p in range(max(lo, 3), hi + 1) if construct.is_odd_prime(p)]
    if not primes:
        raise argparse.ArgumentTypeError("no odd primes in %s" % text)
    return primes


def _prime_list(text: str) -> list[int]:
    return [_prime(t) for t in text.replace(" ", "").split(",") if t]


def _precision(text: str) -> int:
    try:
        bits = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not an integer: %r" % text)
    if bits < 53:
        raise argparse.ArgumentTypeError("precision must be at least 53 bits")
    return bits


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--precision", type=_precision, default=d(None),
                        help="working precision in bits (default 256, or $%s)" % PRECISION_ENV)
    parser.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    parser.add_argument("--format", choices=FORMATS, default=d("pretty"), help="output encoding")
    parser.add_argument("--output", default=d(None), help="write to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclocond",
        description="Conditioning of Vandermonde and quasi-Vandermonde matrices for real cyclotomic fields.")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        _global_options(sp, suppress=True)
        return sp

    sp = add("phi", "cyclotomic polynomial Phi_n")
    sp.add_argument("--n", type=_positive, required=True)

    sp = add("phi-plus", "minimal polynomial of 2cos(2pi/n)")
    sp.add_argument("--n", type=_positive, required=True)

    sp = add("cond", "Frobenius condition number of one matrix")
    sp.add_argument("--target", required=True,
                    choices=("vandermonde-real", "vandermonde-chebyshev", "vandermonde-cyclotomic", "quasi", "kuian"))
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", type=_prime)
    g.add_argument("--n", type=_positive)

    sp = add("table", "conditioning table for a list of primes")
    sp.add_argument("--primes", type=_prime_list, default=list(construct.DEFAULT_TABLE_PRIMES),
                    help="comma-separated odd primes (default 13,101,127,257,509)")
    sp.add_argument("--half-scale", action="store_true",
                    help="also compute cond of the Vandermonde matrix on the halved nodes")

    sp = add("verify", "check every conditioning bound of the K_4p^+ chain")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", type=_prime)
    g.add_argument("--range", type=_prime_range, dest="prime_range", metavar="LO..HI")

    sp = add("factor", "dump the full factorization for one prime")
    sp.add_argument("--p", type=_prime, required=True)

    sp = add("noise", "noise amplification experiment through U_4p and its inverse")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--q", type=int, default=None, help="prime modulus (default: smallest prime >= 2^14, = 1 mod 4p)")
    sp.add_argument("--sigma", type=float, default=3.2)
    sp.add_argument("--trials", type=_positive, default=1000)
    sp.add_argument("--dump-trials", action="store_true", help="emit one CSV row per trial")
    return parser


def resolve_precision(cli_value: int | None) -> int:
    if cli_value is not None:
        return cli_value
    env = os.environ.get(PRECISION_ENV)
    if env:
        try:
            return _precision(env)
        except argparse.ArgumentTypeError as exc:
            raise InputError("%s: %s" % (PRECISION_ENV, exc))
    return DEFAULT_PRECISION


# ---------------------------------------------------------------------------
# commands


def _poly_output(kind: str, n: int, poly: intpoly.IntPolynomial) -> Output:
    doc = {"kind": kind, "n": n, "degree": poly.degree, "coeffs": [str(c) for c in poly.coeffs]}
    return Output(doc, ("degree", "coeff"), enumerate(poly.coeffs), "%s(%d) = %s" % (kind, n, poly))


def cmd_phi(args, precision) -> Output:
    return _poly_output("Phi", args.n, intpoly.cyclotomic(args.n))


def cmd_phi_plus(args, precision) -> Output:
    if args.n < 5:
        raise InputError("phi-plus requires n >= 5")
    return _poly_output("Phi_plus", args.n, intpoly.real_cyclotomic(args.n))


def _pretty_report(r: CondReport) -> str:
    line = "%-10s p=%-4s cond=%s" % (r.name, "" if r.p is None else r.p, sci(r.cond))
    if r.bound is not None:
        line += "  bound=%s  %s" % (sci(r.bound), "ok" if r.bound_satisfied else "VIOLATED")
    if r.lower_bound is not None:
        line += "  lower=%s  %s" % (sci(r.lower_bound), "ok" if r.lower_bound_satisfied else "VIOLATED")
    if r.refined_bound is not None:
        line += "  refined=%s  %s" % (sci(r.refined_bound), "ok" if r.refined_bound_satisfied else "VIOLATED")
    return line + "  [%d bits]" % r.precision_used


def _reports_output(reports: list[CondReport], extra: dict | None = None) -> Output:
    doc = {"reports": [r.to_dict() for r in reports]}
    if extra:
        doc.update(extra)
    out = Output(doc, CondReport.CSV_HEADER, [r.csv_row() for r in reports],
                 "\n".join(_pretty_report(r) for r in reports))
    if not all(r.all_satisfied for r in reports):
        out.status = EXIT_VIOLATION
    return out


def cmd_cond(args, precision) -> Output:
    t = args.target
    needs_p = t in ("vandermonde-real", "vandermonde-chebyshev", "quasi")
    if needs_p and args.p is None:
        raise InputError("--target %s takes --p" % t)
    if not needs_p and args.n is None:
        raise InputError("--target %s takes --n" % t)
    if t == "vandermonde-real":
        rep = construct.cond_vandermonde_real(args.p, precision)
    elif t == "vandermonde-chebyshev":
        rep = construct.cond_vandermonde_chebyshev(args.p, precision)
    elif t == "quasi":
        p = args.p
        fact = construct.factorize(p, precision)
        from .mpnum import cond
        rep = cond(fact.U4p, name="U4p", p=p).with_bounds(bound=p ** 3 * (p + 1) * (2 * p - 1) ** 2)
    elif t == "vandermonde-cyclotomic":
        if args.n < 3:
            raise InputError("vandermonde-cyclotomic requires n >= 3")
        rep = construct.cond_vandermonde_cyclotomic(args.n, precision)
    else:
        rep = construct.kuian_reference(args.n, precision)
    return _reports_output([rep])


def cmd_table(args, precision) -> Output:
    rows = construct.conditioning_table(args.primes, precision, args.half_scale)
    lines = ["%-6s %-6s %-13s %-13s %-13s %-13s %-13s %s" % (
        "prime", "degree", "cond(V)", "cond(V) f64", "cond(U)", "4p^6", "ref cond(U)", "flags")]
    for r in rows:
        flags = []
        if r.v_flag:
            flags.append("V differs from reference by >10x (ref %s)" % r.reference_V)
        if r.u_rel_err is not None and r.u_rel_err > mpmath.mpf("0.01"):
            flags.append("U differs from reference by %s" % sci(r.u_rel_err, 3))
        if r.error:
            flags.append("error: " + r.error)
        lines.append("%-6d %-6d %-13s %-13s %-13s %-13s %-13s %s" % (
            r.p, r.degree, sci(r.cond_V), sci(r.cond_V_float64), sci(r.cond_U), sci(r.bound_term),
            r.reference_U or "-", "; ".join(flags)))
        if r.cond_V_half is not None:
            lines.append("       cond(V) on halved nodes: %s" % sci(r.cond_V_half))
    doc = {"precision_bits": precision, "rows": [r.to_dict() for r in rows]}
    out = Output(doc, construct.TableRow.CSV_HEADER, [r.csv_row() for r in rows], "\n".join(lines))
    if any(r.error for r in rows) and all(r.cond_U is None and r.cond_V is None for r in rows):
        out.status = EXIT_NUMERIC
    return out


def cmd_verify(args, precision) -> Output:
    primes = [args.p] if args.p is not None else args.prime_range
    reports = []
    extra = []
    for p in primes:
        if p < 5:
            raise InputError("the bound suite needs p >= 5")
        fact = construct.factorize(p, precision)
        reports.extend(construct.verify_bounds(p, precision, fact))
        nb = construct.diagonal_norm_bounds(fact)
        extra.append({"p": p, "residual_FQC": mpmath.nstr(fact.residual_FQC, 6),
                      "residual_PU": mpmath.nstr(fact.residual_PU, 6),
                      "norm_P_ok": nb["P_ok"], "norm_P_inv_ok": nb["P_inv_ok"]})
    out = _reports_output(reports, {"primes": primes, "checks": extra})
    if not all(e["norm_P_ok"] and e["norm_P_inv_ok"] is not False for e in extra):
        out.status = EXIT_VIOLATION
    violated = [r for r in reports if not r.all_satisfied]
    summary = "%d reports, %d violated" % (len(reports), len(violated))
    out.pretty = out.pretty + "\n" + summary
    if violated:
        out.pretty += "\n" + "\n".join("VIOLATED: " + _pretty_report(r) for r in violated)
    return out


def cmd_factor(args, precision) -> Output:
    fact = construct.factorize(args.p, precision)
    doc = fact.to_json()
    rows = []
    for name in ("Q4p", "F", "C", "M4p", "N4p", "P", "U4p"):
        for i, row in enumerate(doc[name]["entries"]):
            for j, v in enumerate(row):
                rows.append((name, i, j, v))
    pretty = [
        "factorization for p=%d at %d bits" % (args.p, precision),
        "rows: node 0 first in Q4p, then psi_j = 2cos(j pi/2p) for odd j != p, increasing j",
        "columns: polynomial degree",
        "epsilon = %d" % fact.epsilon,
        "r = %s" % (list(fact.r_vector),),
        "residual ||FQC - M||_F = %s" % sci(fact.residual_FQC),
        "residual ||PU - N||_F = %s" % sci(fact.residual_PU),
    ]
    if args.p <= 7:
        for name, M in (("Q4p", fact.Q4p), ("U4p", fact.U4p)):
            pretty.append("%s =" % name)
            pretty.extend("  " + "  ".join("%12s" % sci(v) for v in r) for r in M.tolist())
    return Output(doc, ("matrix", "row", "col", "value"), rows, "\n".join(pretty))


def cmd_noise(args, precision) -> Output:
    if args.q is None:
        params = lwe.LweParams.with_default_modulus(args.p, args.sigma, args.seed)
    else:
        params = lwe.LweParams(args.p, args.q, args.sigma, args.seed)
    doc = lwe.run_noise_experiment(params, args.trials, precision, dump_trials=args.dump_trials)
    if args.dump_trials:
        header = ("trial", "error_norm_sq", "u_forward", "u_inverse", "v_forward", "v_inverse")
        rows = [tuple(r[k] for k in header) for r in doc["trial_rows"]]
    else:
        header = ("matrix", "direction", "trials", "mean_ratio", "max_ratio", "frobenius_bound", "within_bound")
        stats = [doc["forward"], doc["inverse"], doc["contrast"]["forward"], doc["contrast"]["inverse"]]
        rows = [tuple(s[k] for k in header) for s in stats]
    lines = ["p=%d q=%d sigma=%s trials=%d seed=%d" % (params.p, params.q, params.sigma, args.trials, params.seed)]
    for label, s in (("U", doc["forward"]), ("U^-1", doc["inverse"]),
                     ("V", doc["contrast"]["forward"]), ("V^-1", doc["contrast"]["inverse"])):
        lines.append("%-5s mean=%s max=%s frobenius=%s %s" % (
            label, sci(mpmath.mpf(s["mean_ratio"])), sci(mpmath.mpf(s["max_ratio"])),
            sci(mpmath.mpf(s["frobenius_bound"])), "ok" if s["within_bound"] else "VIOLATED"))
    lines.append("cond(U)=%s cond(V)=%s" % (sci(mpmath.mpf(doc["cond_u"])), sci(mpmath.mpf(doc["contrast"]["cond_v"]))))
    out = Output(doc, header, rows, "\n".join(lines))
    if not (doc["forward"]["within_bound"] and doc["inverse"]["within_bound"]):
        out.status = EXIT_VIOLATION
    return out


COMMANDS = {
    "phi": cmd_phi,
    "phi-plus": cmd_phi_plus,
    "cond": cmd_cond,
    "table": cmd_table,
    "verify": cmd_verify,
    "factor": cmd_factor,
    "noise": cmd_noise,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        precision = resolve_precision(args.precision)
        result = COMMANDS[args.command](args, precision)
    except (InputError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except (PrecisionExhaustedError, SingularMatrixError, ArithmeticError) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    text = result.render(args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
