"""Exact arithmetic substrate: rationals, valuations, CRT, primality, factoring.

Rationals are :class:`fractions.Fraction`, which is always stored reduced with
a positive denominator. Valuations return ``int`` or ``math.inf`` (for zero).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .errors import FactorizationLimit, NonCoprimeModuli, NonPrimeModulus

Rational = Fraction
INF = math.inf

# Deterministic Miller-Rabin witnesses: exact for n < 3.3e24, hence for n < 2^64.
_SMALL_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_U64 = 1 << 64
DEFAULT_TRIAL_BOUND = 10**6


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-5/3"`` to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"rational literal must be an exact fraction: {x!r}")
        return Fraction(text)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def rational_str(x: Fraction) -> str:
    x = as_rational(x)
    return f"{x.numerator}" if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@lru_cache(maxsize=None)
def primes_up_to(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


_SMALL_PRIMES = primes_up_to(1000)
# Fixed witness set for the probabilistic regime; no randomness anywhere.
_LARGE_WITNESSES = _SMALL_PRIMES[:64]


def _strong_probable_prime(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Primality of ``|n|``.

    Deterministic below 2^64. Above that, 64 strong-probable-prime rounds with
    the first 64 primes as bases; a composite passes all of them with
    probability at most 4^-64 under the usual heuristic.
    """
    n = abs(int(n))
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    witnesses = _SMALL_WITNESSES if n < _U64 else _LARGE_WITNESSES
    return all(_strong_probable_prime(n, a, d, s) for a in witnesses)


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or p < 2 or not is_prime(p):
        raise NonPrimeModulus(f"{p} is not prime")


def _int_valuation(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def valuation(x, p: int):
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    _check_prime(p)
    x = as_rational(x)
    if x == 0:
        return INF
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def crt_lift(congruences: Iterable[tuple[int, int]]) -> int:
    """Least non-negative x with x = r (mod m) for every (m, r)."""
    congruences = [(int(m), int(r)) for m, r in congruences]
    for m, _ in congruences:
        if m <= 0:
            raise ValueError(f"modulus must be positive, got {m}")
    for i, (m1, _) in enumerate(congruences):
        for m2, _ in congruences[i + 1 :]:
            if math.gcd(m1, m2) != 1:
                raise NonCoprimeModuli(m1, m2)
    x, modulus = 0, 1
    for m, r in congruences:
        # x + modulus*k = r (mod m)
        k = ((r - x) * pow(modulus, -1, m)) % m if m > 1 else 0
        x += modulus * k
        modulus *= m
    return x % modulus


def prime_set(primes: Iterable[int]) -> tuple[int, ...]:
    """Validated, sorted, duplicate-free tuple of primes."""
    out = sorted(set(int(p) for p in primes))
    for p in out:
        _check_prime(p)
    return tuple(out)


def strip_primes(n: int, primes: Iterable[int]) -> int:
    """Remove every factor of the given primes from the integer ``n``."""
    n = abs(n)
    for p in primes:
        if n == 0:
            break
        while n % p == 0:
            n //= p
    return n


def support_within(x, primes: Iterable[int]) -> bool:
    """True iff numerator and denominator of nonzero x only involve ``primes``."""
    x = as_rational(x)
    if x == 0:
        return False
    primes = tuple(primes)
    return strip_primes(x.numerator, primes) == 1 and strip_primes(x.denominator, primes) == 1


def is_s_unit(x, S: Iterable[int]) -> bool:
    return support_within(x, S)


def in_z_s(x, S: Iterable[int]) -> bool:
    """Membership in Z[1/S]: the denominator is supported on S."""
    return strip_primes(as_rational(x).denominator, S) == 1


def s_part(n: int, S: Iterable[int]) -> int:
    """The largest positive divisor of ``n`` supported on S."""
    n = abs(n)
    return n // strip_primes(n, S)


def factorize(n: int, trial_bound: int = DEFAULT_TRIAL_BOUND, hints: Iterable[int] = ()) -> dict[int, int]:
    """Complete factorization of ``|n|`` by trial division plus a primality test
    on the cofactor. Raises FactorizationLimit if a composite cofactor with no
    factor below ``trial_bound`` remains.

    ``hints`` are primes known to be likely divisors; they are divided out first.
    """
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for p in sorted(set(hints)):
        if p > 1 and n % p == 0:
            _check_prime(p)
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out[p] = k
    if n == 1:
        return out
    if is_prime(n):
        out[n] = 1
        return out
    limit = min(trial_bound, math.isqrt(n))
    for p in primes_up_to(max(limit, 2)):
        if p * p > n:
            break
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out[p] = k
            if n == 1 or is_prime(n):
                break
    if n > 1:
        if not is_prime(n):
            raise FactorizationLimit(n, trial_bound)
        out[n] = out.get(n, 0) + 1
    return out


def support(x, trial_bound: int = DEFAULT_TRIAL_BOUND, hints: Iterable[int] = ()) -> tuple[int, ...]:
    """Primes dividing the numerator or denominator of a nonzero rational."""
    x = as_rational(x)
    if x == 0:
        raise ValueError("zero has no finite support")
    primes = set(factorize(x.numerator, trial_bound, hints)) | set(factorize(x.denominator, trial_bound, hints))
    return tuple(sorted(primes))


def squarefree_decomposition(n: int, factors: dict[int, int] | None = None) -> tuple[int, int, tuple[int, ...]]:
    """Write n = core * s^2 with core squarefree (sign kept in core).

    Returns (core, s, primes dividing core)."""
    if n == 0:
        raise ValueError("zero has no squarefree part")
    if factors is None:
        factors = factorize(n)
    core, s, core_primes = (1 if n > 0 else -1), 1, []
    for p, k in sorted(factors.items()):
        s *= p ** (k // 2)
        if k % 2:
            core *= p
            core_primes.append(p)
    return core, s, tuple(core_primes)


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(k == 1 for k in factorize(n).values())


def legendre_symbol(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """A square root of a modulo the prime p (Tonelli-Shanks), or None."""
    a %= p
    if p == 2 or a == 0:
        return a
    if legendre_symbol(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre_symbol(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def integer_nth_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def frac_mod_one(x) -> Fraction:
    """Representative of x in Q/Z lying in [0, 1)."""
    x = as_rational(x)
    return x - (x.numerator // x.denominator)


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out
