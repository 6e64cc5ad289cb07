"""Quadratic Hilbert symbols over Q, valued in {0, 1/2} subset Q/Z."""

from __future__ import annotations

from fractions import Fraction

from .arith import as_rational, is_prime, legendre_symbol, support
from .errors import ZeroArgument

REAL = "inf"
HALF = Fraction(1, 2)


def parse_place(text):
    """``"inf"``/``"oo"``/``"R"`` -> REAL, otherwise a prime."""
    if text in (REAL, None):
        return REAL
    s = str(text).strip().lower()
    if s in ("inf", "oo", "r", "infinity", "real"):
        return REAL
    p = int(s)
    if not is_prime(p) or p < 2:
        raise ValueError(f"{text!r} is not a place of Q")
    return p


def _square_class_integer(x: Fraction) -> int:
    # x and num*den differ by the square den^2
    return x.numerator * x.denominator


def _split(n: int, p: int) -> tuple[int, int]:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


def hilbert_symbol(a, b, v) -> Fraction:
    """0 if z^2 = a x^2 + b y^2 has a nontrivial solution over Q_v, else 1/2."""
    a, b = as_rational(a), as_rational(b)
    if a == 0 or b == 0:
        raise ZeroArgument("Hilbert symbol needs nonzero arguments")
    if v == REAL:
        return HALF if a < 0 and b < 0 else Fraction(0)
    p = v
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    alpha, u = _split(_square_class_integer(a), p)
    beta, w = _split(_square_class_integer(b), p)
    if p == 2:
        eps_u, eps_w = (u - 1) // 2 % 2, (w - 1) // 2 % 2
        om_u, om_w = (u * u - 1) // 8 % 2, (w * w - 1) // 8 % 2
        e = eps_u * eps_w + alpha * om_w + beta * om_u
    else:
        eps = (p - 1) // 2 % 2
        e = alpha * beta * eps
        if beta % 2 and legendre_symbol(u, p) == -1:
            e += 1
        if alpha % 2 and legendre_symbol(w, p) == -1:
            e += 1
    return HALF if e % 2 else Fraction(0)


def local_norm_test(a: int, c, v) -> bool:
    """True iff c is a norm from Q_v(sqrt a)."""
    c = as_rational(c)
    if c == 0 or a == 0:
        raise ZeroArgument("local norm test needs nonzero arguments")
    return hilbert_symbol(a, c, v) == 0


def relevant_places(a, b) -> list:
    """Places where (a, b)_v can be nonzero: infinity and primes dividing 2ab."""
    primes = set(support(a)) | set(support(b)) | {2}
    return [REAL] + sorted(primes)
