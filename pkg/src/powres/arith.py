"""Exact integer primitives: primality, modular arithmetic, prime sieving, factorization.

Every function here is pure. The only module-level state is an immutable
tuple of small primes built at import time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotInvertibleError, RangeError

# Miller-Rabin with the first 13 prime bases is deterministic below this bound
# (Sorenson & Webster 2015); it covers the full unsigned 64-bit range and then some.
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MAX_SUPPORTED = 3317044064679887385961981 - 1

TRIAL_BOUND = 1 << 12
SEGMENT = 1 << 22


def _small_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for d in range(3, math.isqrt(limit) + 1, 2):
        if flags[d]:
            flags[d * d :: 2 * d] = False
    return np.flatnonzero(flags).astype(np.int64)


SMALL_PRIMES: tuple[int, ...] = tuple(int(x) for x in _small_sieve(TRIAL_BOUND))


def _check_range(n: int) -> None:
    if n > MAX_SUPPORTED:
        raise RangeError(f"{n} exceeds supported range (< {MAX_SUPPORTED + 1})")


def is_prime(n: int) -> bool:
    """Deterministic primality test for 1 <= n <= MAX_SUPPORTED."""
    if n < 1:
        raise DomainError(f"is_prime expects a positive integer, got {n}")
    _check_range(n)
    if n < 2:
        return False
    for sp in MR_BASES:
        if n % sp == 0:
            return n == sp
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_prime(p: int, name: str = "p") -> int:
    if not isinstance(p, int) or p < 2 or not is_prime(p):
        raise DomainError(f"{name} not prime: {p}")
    return p


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """Left-to-right square-and-multiply; result in [0, modulus)."""
    if modulus < 2:
        raise DomainError("modulus must be >= 2")
    if exponent < 0:
        raise DomainError("exponent must be nonnegative")
    _check_range(modulus)
    base %= modulus
    result = 1
    for bit in bin(exponent)[2:]:
        result = result * result % modulus
        if bit == "1":
            result = result * base % modulus
    return result


def mod_inverse(a: int, modulus: int) -> int:
    """Inverse of a modulo `modulus` via the extended Euclidean algorithm."""
    if modulus < 2:
        raise DomainError("modulus must be >= 2")
    r0, r1 = modulus, a % modulus
    s0, s1 = 0, 1
    while r1:
        t = r0 // r1
        r0, r1 = r1, r0 - t * r1
        s0, s1 = s1, s0 - t * s1
    if r0 != 1:
        raise NotInvertibleError(f"{a} is not invertible modulo {modulus}")
    return s0 % modulus


def mod_sqrt(a: int, modulus: int) -> int | None:
    """Square root of a modulo an odd prime (Tonelli-Shanks).

    Returns the root in [0, modulus/2], or None when a is a non-residue.
    """
    p = modulus
    a %= p
    if p == 2 or a == 0:
        return a
    if mod_pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = mod_pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while mod_pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c = s, mod_pow(z, q, p)
        t, r = mod_pow(a, q, p), mod_pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = mod_pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return min(r, p - r)


def primes_up_to(limit: int) -> list[int]:
    """All primes <= limit in ascending order (segmented odd-only sieve)."""
    if limit < 2:
        return []
    if limit <= SEGMENT:
        return _small_sieve(limit).tolist()
    base = _small_sieve(math.isqrt(limit))[1:]
    out = [2]
    low = 3
    while low <= limit:
        high = min(low + 2 * SEGMENT, limit + 1)
        # mask[i] stands for the odd number low + 2*i
        mask = np.ones((high - low + 1) // 2, dtype=bool)
        for d in base.tolist():
            if d * d >= high:
                break
            start = max(d * d, (low + d - 1) // d * d)
            if start % 2 == 0:
                start += d
            mask[(start - low) // 2 :: d] = False
        out.extend((low + 2 * np.flatnonzero(mask)).tolist())
        low = high if high % 2 else high + 1
    return out


@dataclass(frozen=True)
class Factorization:
    base: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        for q, e in self.factors:
            prod *= q**e
        if prod != self.base:
            raise DomainError(f"factors do not multiply back to {self.base}")

    @property
    def primes(self) -> list[int]:
        return [q for q, _ in self.factors]

    def __iter__(self):
        return iter(self.factors)


def _rho(n: int, c: int) -> int | None:
    # Brent's cycle variant with batched gcds.
    y, r, g, prod = 2, 1, 1, 1
    x = ys = y
    batch = 128
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(batch, r - k)):
                y = (y * y + c) % n
                prod = prod * abs(x - y) % n
            g = math.gcd(prod, n)
            k += batch
        r *= 2
        if r > 1 << 26:
            return None
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g if g != n else None


def _split(n: int) -> int:
    """Return a nontrivial divisor of the odd composite n."""
    for c in range(1, 64):
        d = _rho(n, c)
        if d:
            return d
    # deterministic fallback; values reaching here are far below 2**80 in practice
    d = TRIAL_BOUND + 1
    while d * d <= n:
        if n % d == 0:
            return d
        d += 2
    raise AssertionError(f"failed to split composite {n}")


def factorize(n: int) -> Factorization:
    """Complete factorization of 1 <= n <= MAX_SUPPORTED."""
    if n < 1:
        raise DomainError(f"factorize expects a positive integer, got {n}")
    _check_range(n)
    counts: dict[int, int] = {}
    m = n
    for d in SMALL_PRIMES:
        if d * d > m:
            break
        while m % d == 0:
            m //= d
            counts[d] = counts.get(d, 0) + 1
    stack = [m] if m > 1 else []
    while stack:
        x = stack.pop()
        if x < TRIAL_BOUND * TRIAL_BOUND or is_prime(x):
            # cofactors below TRIAL_BOUND**2 with no factor under TRIAL_BOUND are prime
            counts[x] = counts.get(x, 0) + 1
            continue
        d = _split(x)
        stack.extend((d, x // d))
    return Factorization(n, tuple(sorted(counts.items())))


def least_prime_factor(n: int) -> int:
    if n < 2:
        raise DomainError("least_prime_factor needs n >= 2")
    return factorize(n).factors[0][0]


def valuation(n: int, q: int) -> int:
    """Exponent of the prime q in the nonzero integer n."""
    if n == 0:
        raise DomainError("valuation of zero is undefined")
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


def iroot(x: int, k: int) -> int:
    """Largest integer r with r**k <= x, for x >= 0."""
    if x < 0 or k < 1:
        raise DomainError("iroot needs x >= 0 and k >= 1")
    if x < 2 or k == 1:
        return x
    r = 1 << -(-x.bit_length() // k)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r
