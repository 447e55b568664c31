"""Sieve polynomials and the residue-producing pipelines.

Each pipeline builds a polynomial f0 whose prime divisors are provably
k-th power residues modulo p, moves to an arithmetic progression
m = stride*n + n0 that avoids the fixed prime divisors 2 and 3, and then
factors the values f(n) = f0(m) / removed for n = 1..cap. Every prime found is
turned into a certificate and checked twice: once with the rational
criterion at an explicit witness, once with the Euler criterion.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import factorize, iroot, primes_up_to, require_prime, valuation
from .errors import DomainError, IntegrityError
from .reciprocity import cubic_congruence, euler_oracle, legendre, q_star, quartic_congruence
from .represent import Kind, QuadraticForm, Representation, max_a_form, represent_cubic, represent_quartic

DEFAULT_CEILING = 10**6


class Branch(enum.Enum):
    CUBIC = "cubic"
    QUARTIC = "quartic"
    SHIFT = "shift"  # (x + floor(sqrt p))^2 - p, p = 1 mod 4
    FORM = "form"  # reduced form of discriminant -p with maximal a, p = 3 mod 4
    EFFECTIVE = "effective"  # x^2 + x + (1 + p)/4, p = 3 mod 4


class Statement(enum.Enum):
    Q_RESIDUE = "QResidue"
    Q_STAR_RESIDUE = "QStarResidue"


# Exponents (as multiples of epsilon) for the default enumeration cap n <= p^(c*eps)
# and roughness threshold z = p^(c*eps). The z exponents come from dividing the cap
# exponent by the relevant sifting limit (7 for cubics, 9.1 for quartics, 4.27 for
# quadratics), rounded the way the counting argument does.
CAP_EXPONENT = {
    Branch.CUBIC: Fraction(1, 4),
    Branch.QUARTIC: Fraction(1, 5),
    Branch.SHIFT: Fraction(19, 20),
    Branch.FORM: Fraction(1, 5),
    Branch.EFFECTIVE: Fraction(1, 5),
}
ROUGH_EXPONENT = {
    Branch.CUBIC: Fraction(1, 28),
    Branch.QUARTIC: Fraction(1, 46),
    Branch.SHIFT: Fraction(95, 427),
    Branch.FORM: Fraction(1, 25),
    Branch.EFFECTIVE: Fraction(1, 25),
}
# count thresholds p^(c*eps) from the three theorems
COUNT_EXPONENT = {2: Fraction(1, 25), 3: Fraction(1, 30), 4: Fraction(1, 50)}


def floor_power(p: int, exponent: Fraction) -> int:
    """floor(p ** exponent) computed exactly for a nonnegative rational exponent."""
    exponent = Fraction(exponent)
    if exponent < 0:
        raise DomainError("negative exponent")
    return iroot(p**exponent.numerator, exponent.denominator)


def below_power(x: int, p: int, exponent: Fraction) -> bool:
    """Exact test of 0 <= x < p ** exponent."""
    exponent = Fraction(exponent)
    return x ** exponent.denominator < p**exponent.numerator


def above_power(x: int, p: int, exponent: Fraction) -> bool:
    """Exact test of x > p ** exponent for x >= 0."""
    exponent = Fraction(exponent)
    return x ** exponent.denominator > p**exponent.numerator


def parse_epsilon(text) -> Fraction:
    eps = Fraction(str(text))
    if not (0 < eps <= Fraction(1, 2)):
        raise DomainError(f"epsilon must lie in (0, 1/2], got {text}")
    return eps


# --- polynomials -----------------------------------------------------------


def poly_eval(coeffs, x: int) -> int:
    """Evaluate an ascending coefficient list at x (Horner)."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_substitute(coeffs, stride: int, n0: int) -> list[int]:
    """Coefficients of f(stride*x + n0), ascending."""
    out = [0] * len(coeffs)
    for i, c in enumerate(coeffs):
        for j in range(i + 1):
            out[j] += c * math.comb(i, j) * stride**j * n0 ** (i - j)
    return out


@dataclass(frozen=True)
class SievePolynomial:
    branch: Branch
    base_coeffs: tuple[int, ...]
    stride: int
    n0: int
    removed: int
    shifted_coeffs: tuple[int, ...]
    source: Representation | QuadraticForm

    @classmethod
    def build(cls, branch, base_coeffs, stride, n0, removed, source):
        shifted = poly_substitute(base_coeffs, stride, n0)
        if any(c % removed for c in shifted):
            raise IntegrityError(f"{removed} does not divide f0({stride}x + {n0})")
        return cls(branch, tuple(base_coeffs), stride, n0, removed, tuple(c // removed for c in shifted), source)

    def f0(self, x: int) -> int:
        return poly_eval(self.base_coeffs, x)

    def f(self, n: int) -> int:
        return poly_eval(self.shifted_coeffs, n)

    def argument(self, n: int) -> int:
        return self.stride * n + self.n0

    @property
    def degree(self) -> int:
        return len(self.base_coeffs) - 1


def build_cubic_poly(rep: Representation) -> SievePolynomial:
    """f0(x) = M(x^3 - 9x) + L(x^2 - 1), moved to 32x + n0 with n0 in {0, 1}."""
    if rep.kind is not Kind.CUBIC:
        raise DomainError("build_cubic_poly needs a cubic representation")
    L, M = rep.L, rep.M
    base = (-L, -9 * M, L, M)
    n0 = next(x for x in (0, 1) if poly_eval(base, x) % 32)
    e = valuation(poly_eval(base, n0), 2)
    return SievePolynomial.build(Branch.CUBIC, base, 32, n0, 2**e, rep)


def build_quartic_poly(rep: Representation) -> SievePolynomial:
    """f0(x) = M(x^4 - 6x^2 + 1) + 2L(x^3 - x), moved to 72x + n0 with 0 < n0 <= 72."""
    if rep.kind is not Kind.QUARTIC:
        raise DomainError("build_quartic_poly needs a quartic representation")
    L, M = rep.L, rep.M
    base = (M, -2 * L, -6 * M, 2 * L, M)
    r2 = 2 if M % 8 == 0 else 0
    r3 = 2 if M % 9 == 0 else 0
    n0 = next(x for x in range(1, 73) if x % 8 == r2 and x % 9 == r3)
    value = poly_eval(base, n0)
    v, w = valuation(value, 2), valuation(value, 3)
    if v > 2 or w > 1:
        raise IntegrityError(f"unexpected 2,3-valuations ({v}, {w}) of f0({n0})")
    return SievePolynomial.build(Branch.QUARTIC, base, 72, n0, 2**v * 3**w, rep)


def build_quadratic_poly(p: int, branch: Branch | str) -> SievePolynomial:
    branch = Branch(branch)
    require_prime(p)
    if branch is Branch.SHIFT:
        if p % 4 != 1:
            raise DomainError(f"shift branch needs p ≡ 1 (mod 4), got p = {p}")
        r = math.isqrt(p)
        base = (r * r - p, 2 * r, 1)
        return SievePolynomial.build(branch, base, 1, 0, 1, QuadraticForm(1, 2 * r, r * r - p))
    if branch not in (Branch.FORM, Branch.EFFECTIVE):
        raise DomainError(f"not a quadratic branch: {branch.value}")
    if p % 4 != 3:
        raise DomainError(f"{branch.value} branch needs p ≡ 3 (mod 4), got p = {p}")
    if branch is Branch.EFFECTIVE:
        form = QuadraticForm(1, 1, (1 + p) // 4)
        return SievePolynomial.build(branch, (form.c, form.b, form.a), 1, 0, 1, form)
    form = max_a_form(p)
    base = (form.c, form.b, form.a)
    n0 = next(x for x in (0, 1, 2) if poly_eval(base, x) % 4)
    e = valuation(poly_eval(base, n0), 2)
    return SievePolynomial.build(branch, base, 4, n0, 2**e, form)


def root_count(poly: SievePolynomial, q: int) -> int:
    """Number of x in [0, q) with f(x) = 0 (mod q), by brute force."""
    coeffs = [c % q for c in poly.shifted_coeffs]
    return sum(1 for x in range(q) if poly_eval(coeffs, x) % q == 0)


# --- pipeline --------------------------------------------------------------


@dataclass(frozen=True)
class PipelineConfig:
    p: int
    k: int
    epsilon: Fraction = Fraction(1, 2)
    enum_cap: int | None = None
    rough_z: int | None = None
    ceiling: int = DEFAULT_CEILING
    branch: Branch | None = None

    def __post_init__(self):
        require_prime(self.p)
        object.__setattr__(self, "epsilon", parse_epsilon(self.epsilon))
        if self.k not in (2, 3, 4):
            raise DomainError(f"k must be 2, 3 or 4, got {self.k}")
        if self.k == 2 and self.p == 2:
            raise DomainError("p must be odd")
        if self.k in (3, 4) and self.p % self.k != 1:
            raise DomainError(f"p ≢ 1 (mod {self.k}): p = {self.p}")
        if self.branch is not None:
            object.__setattr__(self, "branch", Branch(self.branch))
            if self.branch not in self._natural_branches():
                raise DomainError(f"branch {self.branch.value} does not apply to p = {self.p}, k = {self.k}")
        for name in ("enum_cap", "rough_z", "ceiling"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise DomainError(f"{name} must be >= 1")

    def branches(self) -> list[Branch]:
        if self.branch is not None:
            return [self.branch]
        return self._natural_branches()

    def _natural_branches(self) -> list[Branch]:
        if self.k == 3:
            return [Branch.CUBIC]
        if self.k == 4:
            return [Branch.QUARTIC]
        return [Branch.SHIFT] if self.p % 4 == 1 else [Branch.FORM, Branch.EFFECTIVE]

    def cap(self, branch: Branch) -> int:
        cap = self.enum_cap
        if cap is None:
            cap = floor_power(self.p, CAP_EXPONENT[branch] * self.epsilon)
        return max(1, min(cap, self.ceiling))

    def z(self, branch: Branch) -> int:
        if self.rough_z is not None:
            return self.rough_z
        return max(1, floor_power(self.p, ROUGH_EXPONENT[branch] * self.epsilon))

    @property
    def bound_exponent(self) -> Fraction:
        return Fraction(1, 2) + self.epsilon


@dataclass(frozen=True)
class ResidueCertificate:
    p: int
    k: int
    q: int
    statement: Statement
    n: int
    m: int
    witness_x: int
    value: int
    source: Representation | QuadraticForm
    bound_ok: bool
    criterion_ok: bool
    oracle_ok: bool
    epsilon: Fraction
    branch: Branch = field(default=Branch.CUBIC, compare=False)


def _is_rough(value: int, small_primes: list[int]) -> bool:
    return all(value % d for d in small_primes)


def collect_primes(poly: SievePolynomial, cap: int, z: int = 1) -> dict[int, int]:
    """Map each prime dividing some z-rough f(n), 1 <= n <= cap, to the least such n."""
    small = primes_up_to(z - 1) if z > 2 else []
    found: dict[int, int] = {}
    for n in range(1, cap + 1):
        value = abs(poly.f(n))
        if value == 0 or (small and not _is_rough(value, small)):
            continue
        if value == 1:
            continue
        for q in factorize(value).primes:
            found.setdefault(q, n)
    return found


def excluded_primes(poly: SievePolynomial, p: int) -> set[int]:
    """Primes the pipeline refuses to certify for this polynomial."""
    src = poly.source
    if poly.branch is Branch.CUBIC:
        bad = 6 * src.L * src.M
    elif poly.branch is Branch.QUARTIC:
        bad = 2 * src.L * src.M
    elif poly.branch is Branch.FORM:
        bad = 2 * src.a
    else:
        bad = 2
    return set(factorize(bad).primes) | {p}


def quadratic_witness(form: QuadraticForm, m: int, q: int) -> int:
    # 4a*f0(m) = (2am + b)^2 - disc, so the witness squares to disc mod q
    return (2 * form.a * m + form.b) % q


def certify(poly: SievePolynomial, config: PipelineConfig, q: int, n: int) -> ResidueCertificate:
    p, k = config.p, config.k
    m = poly.argument(n)
    value = poly.f0(m)
    if value == 0 or value % q:
        raise IntegrityError(f"{q} does not divide f0({m}) = {value}")
    src = poly.source
    if k == 3:
        witness = -m % q
        criterion_ok = cubic_congruence(q, src.L, src.M, witness)[0]
        oracle_ok = euler_oracle(q, p, 3)
        statement = Statement.Q_RESIDUE
    elif k == 4:
        witness = -m % q
        criterion_ok = quartic_congruence(q, src.L, src.M, witness)[0]
        oracle_ok = euler_oracle(q_star(q) % p, p, 4)
        statement = Statement.Q_STAR_RESIDUE
    else:
        witness = quadratic_witness(src, m, q)
        disc = src.discriminant
        criterion_ok = (witness * witness - disc) % q == 0 and legendre(disc, q) == 1
        oracle_ok = euler_oracle(q, p, 2)
        statement = Statement.Q_RESIDUE
    cert = ResidueCertificate(
        p=p,
        k=k,
        q=q,
        statement=statement,
        n=n,
        m=m,
        witness_x=witness,
        value=value,
        source=src,
        bound_ok=below_power(q, p, config.bound_exponent),
        criterion_ok=criterion_ok,
        oracle_ok=oracle_ok,
        epsilon=config.epsilon,
        branch=poly.branch,
    )
    if not (criterion_ok and oracle_ok):
        raise IntegrityError(f"certificate for q={q}, p={p}, k={k} failed: {cert}")
    return cert


def build_polys(config: PipelineConfig) -> list[SievePolynomial]:
    if config.k == 3:
        return [build_cubic_poly(represent_cubic(config.p))]
    if config.k == 4:
        return [build_quartic_poly(represent_quartic(config.p))]
    return [build_quadratic_poly(config.p, b) for b in config.branches()]


def run_pipeline(config: PipelineConfig) -> list[ResidueCertificate]:
    """Enumerate, factor, filter, and certify; certificates sorted by q."""
    best: dict[int, ResidueCertificate] = {}
    for poly in build_polys(config):
        found = collect_primes(poly, config.cap(poly.branch), config.z(poly.branch))
        skip = excluded_primes(poly, config.p)
        for q, n in found.items():
            if q in skip or (q in best and best[q].n <= n):
                continue
            best[q] = certify(poly, config, q, n)
    return [best[q] for q in sorted(best)]


# --- reporting -------------------------------------------------------------


@dataclass(frozen=True)
class CountReport:
    p: int
    k: int
    epsilon: Fraction
    count: int
    threshold: float
    threshold_met: bool
    count_below_p: int
    remark_threshold: float | None
    remark_met: bool | None
    min_q: int | None
    max_q: int | None
    bound_ok_count: int

    def lines(self) -> list[str]:
        out = [
            f"p                {self.p}",
            f"k                {self.k}",
            f"epsilon          {self.epsilon}",
            f"certified        {self.count}",
            f"threshold        {self.threshold:.6g}  (p^(eps*{COUNT_EXPONENT[self.k]}))  met={self.threshold_met}",
            f"q < p^(1/2+eps)  {self.bound_ok_count}",
            f"min q            {self.min_q if self.min_q is not None else '-'}",
            f"max q            {self.max_q if self.max_q is not None else '-'}",
        ]
        if self.remark_threshold is not None:
            out.append(f"q < p            {self.count_below_p}  vs p^(1/9) = {self.remark_threshold:.6g}  met={self.remark_met}")
        return out


def count_report(certs: list[ResidueCertificate], config: PipelineConfig) -> CountReport:
    """Compare the certified count with the asymptotic thresholds (informational only)."""
    p, k = config.p, config.k
    qs = [c.q for c in certs]
    exponent = COUNT_EXPONENT[k] * config.epsilon
    below_p = sum(1 for q in qs if q < p)
    remark = k == 2
    return CountReport(
        p=p,
        k=k,
        epsilon=config.epsilon,
        count=len(qs),
        threshold=p ** float(exponent),
        threshold_met=above_power(len(qs), p, exponent),
        count_below_p=below_p,
        remark_threshold=p ** (1 / 9) if remark else None,
        remark_met=above_power(below_p, p, Fraction(1, 9)) if remark else None,
        min_q=min(qs) if qs else None,
        max_q=max(qs) if qs else None,
        bound_ok_count=sum(1 for c in certs if c.bound_ok),
    )


def nagell_witnesses(rep: Representation) -> list[tuple[int, bool, bool]]:
    """Prime divisors q of L*M with (oracle says cube, q < 2 sqrt p)."""
    if rep.kind is not Kind.CUBIC:
        raise DomainError("nagell_witnesses needs a cubic representation")
    LM = rep.L * rep.M
    if LM == 1:
        return []
    return [(q, q != rep.p and euler_oracle(q, rep.p, 3), q * q < 4 * rep.p) for q in factorize(LM).primes]


def prime_residue_count(p: int, k: int, limit: int | None = None) -> int:
    """Number of primes q < limit (default p), q != p, that are k-th power residues mod p."""
    limit = p if limit is None else limit
    if (p - 1) % k:
        raise DomainError(f"p ≢ 1 (mod {k}): p = {p}")
    qs = [q for q in primes_up_to(limit - 1) if q != p]
    if p >= 1 << 31:
        return sum(1 for q in qs if euler_oracle(q, p, k))
    # vectorised square-and-multiply; p < 2^31 keeps every product inside int64
    base = np.array(qs, dtype=np.int64) % p
    acc = np.ones_like(base)
    e = (p - 1) // k
    while e:
        if e & 1:
            acc = acc * base % p
        base = base * base % p
        e >>= 1
    return int(np.count_nonzero(acc == 1))
