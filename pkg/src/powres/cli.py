"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (bad input), 2 when a
verification or integrity check fails.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import certificate, construct, reciprocity, represent, survey
from .arith import require_prime
from .errors import DomainError, IntegrityError

EXIT_DOMAIN = 1
EXIT_INTEGRITY = 2


def _epsilon(text: str) -> Fraction:
    try:
        return construct.parse_epsilon(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_represent(args) -> int:
    rep = represent.represent(args.p, args.kind)
    print(f"L={rep.L} M={rep.M}")
    return 0


def cmd_forms(args) -> int:
    forms = represent.reduced_forms(args.p)
    print(f"h(-{args.p}) = {len(forms)}")
    for f in forms:
        print(f"({f.a}, {f.b}, {f.c})")
    best = represent.max_a_form(args.p)
    print(f"max a: ({best.a}, {best.b}, {best.c})")
    return 0


def cmd_criterion(args) -> int:
    p, q = require_prime(args.p), require_prime(args.q, "q")
    if args.kind == "cubic":
        rep = represent.represent_cubic(p)
        res = reciprocity.cubic_criterion(q, rep)
        oracle = reciprocity.euler_oracle(q, p, 3)
        subject = f"{q}"
    else:
        rep = represent.represent_quartic(p)
        res = reciprocity.quartic_criterion(q, rep)
        star = reciprocity.q_star(q)
        oracle = reciprocity.euler_oracle(star % p, p, 4)
        subject = f"q* = {star}"
    print(f"L={rep.L} M={rep.M}")
    print(f"criterion  {'holds' if res.holds else 'fails'}" + (f"  x={res.witness_x}" if res.holds else ""))
    if res.via_shared_denominator:
        print("           (both denominators vanish mod q)")
    print(f"oracle     {subject} is {'a' if oracle else 'not a'} {'cubic' if args.kind == 'cubic' else 'biquadratic'} residue mod {p}")
    if res.holds != oracle:
        print("MISMATCH between criterion and oracle", file=sys.stderr)
        return EXIT_INTEGRITY
    return 0


def cmd_oracle(args) -> int:
    p = require_prime(args.p)
    ok = reciprocity.euler_oracle(args.q, p, args.k)
    print("true" if ok else "false")
    return 0


def cmd_rk(args) -> int:
    p = require_prime(args.p)
    r = reciprocity.smallest_prime_residue(p, args.k)
    print(f"r_{args.k}({p}) = {r}")
    if args.k == 3:
        print(f"2 sqrt(p) = {2 * p ** 0.5:.6f}  below={r * r < 4 * p}")
    return 0


def cmd_residues(args) -> int:
    config = construct.PipelineConfig(
        p=args.p, k=args.k, epsilon=args.epsilon, enum_cap=args.cap, rough_z=args.z, branch=args.branch
    )
    certs = construct.run_pipeline(config)
    records = [certificate.to_record(c) for c in certs]
    if args.out:
        with open(args.out, "w") as fh:
            fh.writelines(r + "\n" for r in records)
    report = construct.count_report(certs, config)
    for branch in config.branches():
        print(f"branch           {branch.value}  cap={config.cap(branch)} z={config.z(branch)}")
    for line in report.lines():
        print(line)
    if config.k == 3:
        rep = represent.represent_cubic(config.p)
        for q, oracle_ok, bound_ok in construct.nagell_witnesses(rep):
            print(f"nagell q={q}  cube={oracle_ok}  q<2sqrt(p)={bound_ok}")
    if not args.out:
        print()
        for r in records:
            print(r)
    return 0


def cmd_verify_nagell(args) -> int:
    report = survey.verify_nagell(args.max, workers=args.workers)
    print(f"primes checked   {report.checked}")
    print(f"max r3(p)/sqrt p {report.max_ratio:.6f}  (p = {report.worst_p})")
    print(f"violations       {len(report.violations)}")
    for row in report.violations:
        print(f"  p={row.p} r3={row.r3} r3_ok={row.r3_ok} lm_factor={row.lm_factor} lm_ok={row.lm_ok}")
    return 0 if report.ok else EXIT_INTEGRITY


def cmd_survey(args) -> int:
    rows = survey.survey(args.min, args.max, args.k, args.epsilon, args.cap, args.z, workers=args.workers)
    lines = [",".join(survey.SURVEY_HEADER)] + [r.csv() for r in rows]
    if args.out:
        with open(args.out, "w") as fh:
            fh.writelines(line + "\n" for line in lines)
    else:
        print("\n".join(lines))
    bad = [r.p for r in rows if r.remark_ok is False]
    print(f"rows {len(rows)}", file=sys.stderr)
    if bad:
        print(f"p^(1/9) count check failed for p in {bad}", file=sys.stderr)
        return EXIT_INTEGRITY
    return 0


def cmd_check(args) -> int:
    fh = sys.stdin if args.path == "-" else open(args.path)
    with fh:
        checked, failures = certificate.check_lines(fh)
    for lineno, problems in failures:
        print(f"line {lineno}: " + "; ".join(problems))
    print(f"checked {checked}  rejected {len(failures)}")
    return EXIT_INTEGRITY if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powres", description="Certified small prime power residues.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("represent", help="4p = L^2 + 27M^2 or p = L^2 + 4M^2")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--kind", choices=["cubic", "quartic"], required=True)
    s.set_defaults(func=cmd_represent)

    s = sub.add_parser("forms", help="reduced forms of discriminant -p")
    s.add_argument("--p", type=int, required=True)
    s.set_defaults(func=cmd_forms)

    s = sub.add_parser("criterion", help="rational residuacity criterion vs Euler oracle")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--kind", choices=["cubic", "quartic"], required=True)
    s.set_defaults(func=cmd_criterion)

    s = sub.add_parser("oracle", help="Euler criterion: is q a k-th power mod p")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--k", type=int, choices=[2, 3, 4], required=True)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("rk", help="smallest prime k-th power residue")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--k", type=int, choices=[2, 3, 4], required=True)
    s.set_defaults(func=cmd_rk)

    s = sub.add_parser("residues", help="run a pipeline and write certificates")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--k", type=int, choices=[2, 3, 4], required=True)
    s.add_argument("--epsilon", type=_epsilon, default=Fraction(1, 2))
    s.add_argument("--cap", type=int, default=None, help="enumerate n = 1..cap (default from epsilon)")
    s.add_argument("--z", type=int, default=None, help="roughness threshold; 1 disables")
    s.add_argument("--branch", choices=[b.value for b in construct.Branch], default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_residues)

    s = sub.add_parser("verify-nagell", help="check r_3(p) < 2 sqrt(p) for all p <= max")
    s.add_argument("--max", type=int, required=True)
    s.set_defaults(func=cmd_verify_nagell)

    s = sub.add_parser("survey", help="CSV of per-prime pipeline statistics")
    s.add_argument("--min", type=int, required=True)
    s.add_argument("--max", type=int, required=True)
    s.add_argument("--k", type=int, choices=[2, 3, 4], required=True)
    s.add_argument("--epsilon", type=_epsilon, default=Fraction(1, 2))
    s.add_argument("--cap", type=int, default=None)
    s.add_argument("--z", type=int, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_survey)

    s = sub.add_parser("check", help="re-validate a certificate file ('-' for stdin)")
    s.add_argument("path")
    s.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.workers = survey.default_workers()
    try:
        return args.func(args)
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
