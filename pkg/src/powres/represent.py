"""Representations 4p = L^2 + 27M^2, p = L^2 + 4M^2, and reduced forms of discriminant -p."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .arith import mod_sqrt, require_prime
from .errors import DomainError

# Above this the O(sqrt p) scan is replaced by Cornacchia; both agree (tested).
BRUTE_LIMIT = 1 << 32


class Kind(enum.Enum):
    CUBIC = "cubic"  # 4p = L^2 + 27 M^2
    QUARTIC = "quartic"  # p = L^2 + 4 M^2


@dataclass(frozen=True)
class Representation:
    p: int
    kind: Kind
    L: int
    M: int

    def __post_init__(self):
        p, L, M = self.p, self.L, self.M
        if L <= 0 or M <= 0:
            raise DomainError("L and M must be positive")
        if self.kind is Kind.CUBIC:
            ok = 4 * p == L * L + 27 * M * M and p % 3 == 1 and math.gcd(L, M) in (1, 2)
        else:
            ok = p == L * L + 4 * M * M and p % 4 == 1 and math.gcd(L, M) == 1
        if not ok:
            raise DomainError(f"invalid {self.kind.value} representation {self}")


@dataclass(frozen=True, order=True)
class QuadraticForm:
    """Positive definite form a x^2 + b xy + c y^2."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def __call__(self, x: int, y: int = 1) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y


def _square_root_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _scan(total: int, weight: int) -> tuple[int, int]:
    # least M > 0 with total - weight*M^2 a positive square
    M = 1
    while weight * M * M < total:
        L = _square_root_exact(total - weight * M * M)
        if L:
            return L, M
        M += 1
    raise AssertionError(f"no representation {total} = L^2 + {weight} M^2")


def cornacchia(d: int, p: int) -> tuple[int, int] | None:
    """Solve x^2 + d y^2 = p for prime p with x, y > 0, or return None."""
    r = mod_sqrt(-d, p)
    if r is None:
        return None
    r = p - r  # larger root, p/2 < r < p
    a, b = p, r
    bound = math.isqrt(p)
    while b > bound:
        a, b = b, a % b
    rest = p - b * b
    if rest % d:
        return None
    y = _square_root_exact(rest // d)
    if not y:
        return None
    return b, y


def _cubic_via_cornacchia(p: int) -> tuple[int, int]:
    x, y = cornacchia(3, p)
    # 4p = (2x)^2 + 12y^2 = (x+3y)^2 + 3(x-y)^2 = (x-3y)^2 + 3(x+y)^2
    if y % 3 == 0:
        L, M = 2 * x, 2 * y // 3
    elif (x - y) % 3 == 0:
        L, M = x + 3 * y, (x - y) // 3
    else:
        L, M = x - 3 * y, (x + y) // 3
    return abs(L), abs(M)


def represent_cubic(p: int) -> Representation:
    """The unique positive (L, M) with 4p = L^2 + 27 M^2."""
    require_prime(p)
    if p % 3 != 1:
        raise DomainError(f"p ≢ 1 (mod 3): p = {p}")
    if p < BRUTE_LIMIT:
        L, M = _scan(4 * p, 27)
    else:
        L, M = _cubic_via_cornacchia(p)
    return Representation(p, Kind.CUBIC, L, M)


def represent_quartic(p: int) -> Representation:
    """The unique positive (L, M) with p = L^2 + 4 M^2."""
    require_prime(p)
    if p % 4 != 1:
        raise DomainError(f"p ≢ 1 (mod 4): p = {p}")
    if p < BRUTE_LIMIT:
        L, M = _scan(p, 4)
    else:
        x, y = cornacchia(1, p)
        L, M = (x, y // 2) if y % 2 == 0 else (y, x // 2)
    return Representation(p, Kind.QUARTIC, L, M)


def represent(p: int, kind: Kind | str) -> Representation:
    kind = Kind(kind)
    return represent_cubic(p) if kind is Kind.CUBIC else represent_quartic(p)


def _check_minus_p(p: int):
    require_prime(p)
    if p % 4 != 3:
        raise DomainError(f"p ≢ 3 (mod 4): p = {p}")


def _forms_with_a(a: int, p: int) -> list[QuadraticForm]:
    """Reduced forms (a, b, c) of discriminant -p for one fixed a, ascending b."""
    # b^2 = 4ac - p is odd, so only odd b in [-a, a] can occur
    lo = -a + 1 if a % 2 == 0 else -a
    if a < 64:
        bs = [b for b in range(lo, a + 1, 2) if (b * b + p) % (4 * a) == 0]
    else:
        arr = np.arange(lo, a + 1, 2, dtype=object if p > 1 << 60 else np.int64)
        bs = [int(b) for b in arr[(arr * arr + p) % (4 * a) == 0]]
    out = []
    for b in bs:
        c = (b * b + p) // (4 * a)
        if c < a or (b < 0 and (a == c or -b == a)):
            continue
        out.append(QuadraticForm(a, b, c))
    return out


def reduced_forms(p: int) -> list[QuadraticForm]:
    """All reduced forms of discriminant -p, ordered by (a, b, c)."""
    _check_minus_p(p)
    forms = []
    for a in range(1, math.isqrt(p // 3) + 1):
        forms.extend(_forms_with_a(a, p))
    return forms


def class_number(p: int) -> int:
    return len(reduced_forms(p))


def max_a_form(p: int) -> QuadraticForm:
    """Reduced form of discriminant -p with the largest a (ties: larger b, then larger c).

    Scans a downward from sqrt(p/3) and stops at the first a that admits a form.
    """
    _check_minus_p(p)
    for a in range(math.isqrt(p // 3), 0, -1):
        found = _forms_with_a(a, p)
        if found:
            return max(found, key=lambda f: (f.b, f.c))
    raise AssertionError("the principal form always exists")
