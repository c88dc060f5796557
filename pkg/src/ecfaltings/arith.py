"""Integer helpers: valuations, primality, factorization."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .errors import FactorizationFailure

DEFAULT_TRIAL_BOUND = 10**6

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def valuation(p: int, n) -> float | int:
    """p-adic valuation of an integer or Fraction; ``math.inf`` for zero."""
    if n == 0:
        return math.inf
    if isinstance(n, Fraction):
        return valuation(p, n.numerator) - valuation(p, n.denominator)
    n = abs(int(n))
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic for n < 3.3e24 with these bases."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
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


def _pollard_rho(n: int, rng: random.Random, max_iter: int) -> int | None:
    # Brent's variant
    if n % 2 == 0:
        return 2
    for _ in range(20):
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        x = ys = y
        it = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            it += r
            if it > max_iter:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factorize(n: int, trial_bound: int = DEFAULT_TRIAL_BOUND,
              rho_iterations: int = 2_000_000) -> dict[int, int]:
    """Prime factorization of ``|n|`` as ``{prime: exponent}``.

    Trial division up to ``trial_bound``, then Pollard rho on the cofactor.
    Raises FactorizationFailure when rho gives up.
    """
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    step = 2
    while p <= trial_bound and p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += step
        step = 6 - step
    if n == 1:
        return out
    if p * p > n:
        out[n] = out.get(n, 0) + 1
        return out
    rng = random.Random(n)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m, rng, rho_iterations)
        if d is None:
            raise FactorizationFailure(f"could not split {m}")
        stack.extend((d, m // d))
    return dict(sorted(out.items()))


def prime_divisors(n: int, **kw) -> list[int]:
    return sorted(factorize(n, **kw))


def radical(n: int, **kw) -> int:
    return math.prod(prime_divisors(n, **kw)) if n not in (1, -1) else 1
