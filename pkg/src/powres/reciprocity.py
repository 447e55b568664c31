"""Rational residuacity criteria for cubic and biquadratic residues, plus Euler-criterion oracles.

The cubic criterion decides whether a prime q is a cube modulo p from the
representation 4p = L^2 + 27M^2 alone: q is a cube iff

    L / 3M  ==  (x^3 - 9x) / (3(x^2 - 1))   (mod q)

for some integer x. The biquadratic one uses p = L^2 + 4M^2 and

    L / 2M  ==  (x^4 - 6x^2 + 1) / (4(x^3 - x))   (mod q)

and speaks about q* = (-1)^((q-1)/2) q. A congruence between fractions where
a denominator vanishes mod q is taken to hold exactly when both do.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import is_prime, mod_inverse, mod_pow, primes_up_to, require_prime
from .errors import DomainError
from .represent import Kind, Representation


@dataclass(frozen=True)
class CriterionResult:
    holds: bool
    witness_x: int | None = None
    via_shared_denominator: bool = False


@dataclass(frozen=True)
class SignedPrime:
    q: int
    q_star: int

    @classmethod
    def of(cls, q: int) -> "SignedPrime":
        if q % 2 == 0:
            raise DomainError(f"q* is defined for odd primes only, got {q}")
        return cls(q, q_star(q))


def q_star(q: int) -> int:
    return q if q % 4 == 1 else -q


def euler_oracle(value: int, p: int, k: int) -> bool:
    """True iff value is a k-th power residue modulo the prime p (needs p = 1 mod k)."""
    if k not in (2, 3, 4):
        raise DomainError(f"k must be 2, 3 or 4, got {k}")
    if (p - 1) % k:
        raise DomainError(f"p ≢ 1 (mod {k}): p = {p}")
    if value % p == 0:
        raise DomainError(f"{value} ≡ 0 (mod {p})")
    return mod_pow(value, (p - 1) // k, p) == 1


def _fractions_agree(q: int, left_num: int, left_den: int, right_num: int, right_den: int) -> tuple[bool, bool]:
    """Compare left_num/left_den with right_num/right_den modulo q.

    Returns (agree, degenerate) where degenerate marks the both-denominators-vanish case.
    """
    ld, rd = left_den % q, right_den % q
    if ld == 0 or rd == 0:
        return ld == 0 and rd == 0, ld == 0 and rd == 0
    lhs = left_num * mod_inverse(ld, q) % q
    rhs = right_num * mod_inverse(rd, q) % q
    return lhs == rhs, False


def _check_rep(rep: Representation, kind: Kind):
    if rep.kind is not kind:
        raise DomainError(f"expected a {kind.value} representation, got {rep.kind.value}")


def cubic_congruence(q: int, L: int, M: int, x: int) -> tuple[bool, bool]:
    """Evaluate the cubic congruence at a single x; returns (holds, degenerate)."""
    x %= q
    return _fractions_agree(q, L, 3 * M, x**3 - 9 * x, 3 * (x * x - 1))


def quartic_congruence(q: int, L: int, M: int, x: int) -> tuple[bool, bool]:
    """Evaluate the biquadratic congruence at a single x; returns (holds, degenerate)."""
    x %= q
    return _fractions_agree(q, L, 2 * M, x**4 - 6 * x * x + 1, 4 * (x**3 - x))


def _validate_q(q: int, rep: Representation, excluded: tuple[int, ...]):
    if q in excluded or q == rep.p or q < 2 or not is_prime(q):
        raise DomainError(f"q must be a prime outside {excluded + (rep.p,)}, got {q}")


def _search(q: int, rep: Representation, congruence) -> CriterionResult:
    for x in range(q):
        ok, degenerate = congruence(q, rep.L, rep.M, x)
        if ok:
            return CriterionResult(True, x, degenerate)
    return CriterionResult(False)


def cubic_criterion(q: int, rep: Representation) -> CriterionResult:
    """Decide whether q is a cube mod p by exhaustive search over x in [0, q)."""
    _check_rep(rep, Kind.CUBIC)
    _validate_q(q, rep, (2, 3))
    return _search(q, rep, cubic_congruence)


def quartic_criterion(q: int, rep: Representation) -> CriterionResult:
    """Decide whether q* is a fourth power mod p by exhaustive search over x in [0, q)."""
    _check_rep(rep, Kind.QUARTIC)
    _validate_q(q, rep, (2,))
    return _search(q, rep, quartic_congruence)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for an odd prime p, computed by Jacobi reciprocity."""
    if p < 3 or p % 2 == 0:
        raise DomainError(f"legendre needs an odd prime modulus, got {p}")
    a %= p
    n, m, sign = a, p, 1
    while n:
        while n % 2 == 0:
            n //= 2
            if m % 8 in (3, 5):
                sign = -sign
        if n % 4 == 3 and m % 4 == 3:
            sign = -sign
        n, m = m % n, n
    return sign if m == 1 else 0


def iter_primes(start: int = 2):
    """Primes >= start in ascending order, sieved in growing blocks."""
    lo, block = start, 1 << 12
    while True:
        for q in primes_up_to(lo + block):
            if q >= lo:
                yield q
        lo += block + 1
        block *= 2


def smallest_prime_residue(p: int, k: int) -> int:
    """r_k(p): the least prime q != p that is a k-th power residue modulo p."""
    require_prime(p)
    if (p - 1) % k:
        raise DomainError(f"p ≢ 1 (mod {k}): p = {p}")
    for q in iter_primes():
        if q != p and euler_oracle(q, p, k):
            return q
    raise AssertionError("unreachable")
