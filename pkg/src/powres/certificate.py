"""Line-oriented certificate records and an independent checker.

One record per line, ``key=value`` tokens separated by single spaces, fields in
the fixed order

    p k q statement n m witness_x value (L M | a b c) bound_ok criterion_ok oracle_ok epsilon

Booleans are written as 0/1, epsilon as an exact fraction. The checker needs
nothing but the line. It rebuilds f0 from (L, M) or (a, b, c) and recomputes
the divisibility, the rational criterion at the recorded witness, the Euler
criterion (builtin pow) and the size bound. Primality goes through sympy
rather than the library's own Miller-Rabin.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from sympy import isprime

from .construct import ResidueCertificate, Statement
from .errors import DomainError
from .reciprocity import cubic_congruence, legendre, quartic_congruence
from .represent import QuadraticForm, Representation

HEAD = ("p", "k", "q", "statement", "n", "m", "witness_x", "value")
TAIL = ("bound_ok", "criterion_ok", "oracle_ok", "epsilon")


def to_record(cert: ResidueCertificate) -> str:
    src = cert.source
    if isinstance(src, Representation):
        middle = [("L", src.L), ("M", src.M)]
    else:
        middle = [("a", src.a), ("b", src.b), ("c", src.c)]
    fields = [
        ("p", cert.p),
        ("k", cert.k),
        ("q", cert.q),
        ("statement", cert.statement.value),
        ("n", cert.n),
        ("m", cert.m),
        ("witness_x", cert.witness_x),
        ("value", cert.value),
        *middle,
        ("bound_ok", int(cert.bound_ok)),
        ("criterion_ok", int(cert.criterion_ok)),
        ("oracle_ok", int(cert.oracle_ok)),
        ("epsilon", cert.epsilon),
    ]
    return " ".join(f"{k}={v}" for k, v in fields)


def parse_record(line: str) -> dict:
    tokens = line.split()
    try:
        pairs = [t.split("=", 1) for t in tokens]
        keys = [k for k, _ in pairs]
    except ValueError:
        raise DomainError(f"malformed record: {line!r}") from None
    if keys in (list(HEAD) + ["L", "M"] + list(TAIL), list(HEAD) + ["a", "b", "c"] + list(TAIL)):
        rec = dict(pairs)
    else:
        raise DomainError(f"unexpected field layout: {keys}")
    out = {}
    for key, raw in rec.items():
        if key == "statement":
            out[key] = Statement(raw)
        elif key == "epsilon":
            out[key] = Fraction(raw)
        elif key in TAIL:
            if raw not in ("0", "1"):
                raise DomainError(f"{key} must be 0 or 1")
            out[key] = raw == "1"
        else:
            out[key] = int(raw)
    return out


def check_record(line: str) -> list[str]:
    """Problems found in one certificate line; an empty list means it verifies."""
    try:
        r = parse_record(line)
    except (DomainError, ValueError) as exc:
        return [str(exc)]
    p, k, q, m = r["p"], r["k"], r["q"], r["m"]
    problems = []
    if not isprime(p):
        problems.append("p is not prime")
    if not isprime(q):
        problems.append("q is not prime")
    if q == p:
        problems.append("q equals p")
    if k not in (2, 3, 4) or (p - 1) % k:
        problems.append(f"p ≢ 1 (mod {k})")
        return problems
    x = r["witness_x"]
    if not 0 <= x < q:
        problems.append("witness out of range")

    if k == 3:
        L, M = r["L"], r["M"]
        if 4 * p != L * L + 27 * M * M:
            problems.append("4p != L^2 + 27M^2")
        value = M * (m**3 - 9 * m) + L * (m * m - 1)
        if q in (2, 3) or (6 * L * M) % q == 0:
            problems.append("q divides 6LM")
        elif not cubic_congruence(q, L, M, x)[0]:
            problems.append("cubic criterion fails at witness")
        oracle = pow(q, (p - 1) // 3, p) == 1
        statement = Statement.Q_RESIDUE
    elif k == 4:
        L, M = r["L"], r["M"]
        if p != L * L + 4 * M * M:
            problems.append("p != L^2 + 4M^2")
        value = M * (m**4 - 6 * m * m + 1) + 2 * L * (m**3 - m)
        if q == 2 or (2 * L * M) % q == 0:
            problems.append("q divides 2LM")
        elif not quartic_congruence(q, L, M, x)[0]:
            problems.append("quartic criterion fails at witness")
        star = q if q % 4 == 1 else -q
        oracle = pow(star % p, (p - 1) // 4, p) == 1
        statement = Statement.Q_STAR_RESIDUE
    else:
        form = QuadraticForm(r["a"], r["b"], r["c"])
        disc = form.discriminant
        if disc not in (-p, 4 * p):
            problems.append("discriminant is neither -p nor 4p")
        value = form.a * m * m + form.b * m + form.c
        if q == 2 or form.a % q == 0:
            problems.append("q divides 2a")
        elif (x * x - disc) % q or legendre(disc, q) != 1:
            problems.append("discriminant is not a square mod q at witness")
        oracle = pow(q, (p - 1) // 2, p) == 1
        statement = Statement.Q_RESIDUE

    if value != r["value"]:
        problems.append(f"value mismatch: f0({m}) = {value}")
    if value == 0 or value % q:
        problems.append("q does not divide f0(m)")
    if r["statement"] is not statement:
        problems.append("statement does not match k")
    if not oracle:
        problems.append("Euler criterion rejects")
    if not (r["criterion_ok"] and r["oracle_ok"]):
        problems.append("record carries a failed check flag")
    exponent = Fraction(1, 2) + r["epsilon"]
    bound = q**exponent.denominator < p**exponent.numerator
    if bound != r["bound_ok"]:
        problems.append("bound_ok flag disagrees with q < p^(1/2+eps)")
    return problems


def check_lines(lines: Iterable[str]) -> tuple[int, list[tuple[int, list[str]]]]:
    """Check every non-blank line; returns (records checked, [(line number, problems)])."""
    checked, failures = 0, []
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        checked += 1
        problems = check_record(line)
        if problems:
            failures.append((lineno, problems))
    return checked, failures
