"""Prime enumeration and the prime-counting helpers pi(x), Pi(x), Pi(S)."""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable


@lru_cache(maxsize=32)
def _sieve(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return tuple(i for i, f in enumerate(flags) if f)


def primes_upto(x) -> list[int]:
    """All primes p <= x (x may be a float)."""
    return list(_sieve(int(math.floor(x))))


def primes_between(a, b) -> list[int]:
    """Primes p with a < p <= b."""
    return [p for p in primes_upto(b) if p > a]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime > n."""
    n += 1
    while not is_prime(n):
        n += 1
    return n


def prev_prime(n: int) -> int | None:
    """Largest prime < n, or None."""
    n -= 1
    while n >= 2:
        if is_prime(n):
            return n
        n -= 1
    return None


def prime_pi(x) -> int:
    return len(_sieve(int(math.floor(x))))


def primorial(x) -> int:
    """Pi(x): product of all primes <= x."""
    return math.prod(_sieve(int(math.floor(x))))


def prod_set(S: Iterable[int]) -> int:
    """Pi(S) for a finite set of primes (1 for the empty set)."""
    return math.prod(S)


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of |n| by trial division (small inputs)."""
    n = abs(n)
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out.append(n)
    return out


def smallest_prime_divisor(n: int) -> int:
    if n < 2:
        raise ValueError("need n >= 2")
    return prime_factors(n)[0]


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1
