"""Exact rational solutions of x^2 - a y^2 = c.

Solvability is decided by Hasse's norm theorem (Hilbert symbols at the finitely
many relevant places). Solutions are built by a descent on the conic
X^2 = a Y^2 + b Z^2: a square root of a modulo |b| spans a lattice whose
reduced vector has norm b*t with |t| of order sqrt|a|, and the two norms are
composed. Only the top-level value needs a factorization; everything after
the first step involves numbers no larger than the radicand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import (
    DEFAULT_TRIAL_BOUND,
    as_rational,
    crt_lift,
    factorize,
    is_squarefree,
    squarefree_decomposition,
    sqrt_mod_prime,
)
from .errors import NotSquarefree, UnsupportedDegree, ZeroArgument
from .hilbert import REAL, local_norm_test


@dataclass(frozen=True)
class QuadraticNormEquation:
    a: int
    c: Fraction

    def __post_init__(self):
        if self.a in (0, 1) or not is_squarefree(self.a):
            raise NotSquarefree(f"a = {self.a} must be squarefree and not 0 or 1")
        object.__setattr__(self, "c", as_rational(self.c))
        if self.c == 0:
            raise ZeroArgument("c must be nonzero")


@dataclass(frozen=True)
class NormSolution:
    x: Fraction
    y: Fraction

    def norm(self, a: int) -> Fraction:
        return self.x * self.x - a * self.y * self.y


@dataclass(frozen=True)
class NormConfig:
    trial_bound: int = DEFAULT_TRIAL_BOUND
    small_search: int = 50  # |y| bound for the quick integral search


def _places(a: int, c: Fraction, trial_bound: int, hints=()) -> list:
    primes = {2}
    primes |= set(factorize(a, trial_bound))
    primes |= set(factorize(c.numerator, trial_bound, hints))
    primes |= set(factorize(c.denominator, trial_bound, hints))
    return [REAL] + sorted(primes)


def global_norm_test(eq: QuadraticNormEquation, config: NormConfig = NormConfig(), hints=()) -> bool:
    """Is c a norm from Q(sqrt a)? Decided place by place.

    ``hints`` lists primes likely to divide c, to spare the factoring."""
    return all(local_norm_test(eq.a, eq.c, v) for v in _places(eq.a, eq.c, config.trial_bound, hints))


def _sqrt_mod_squarefree(a: int, primes) -> int | None:
    roots = []
    for p in primes:
        r = sqrt_mod_prime(a, p)
        if r is None:
            return None
        roots.append((p, r))
    return crt_lift(roots) if roots else 0


def _reduce(b: int, r: int, weight: int) -> tuple[int, int]:
    """Shortest vector of {(x, y): x = r y mod b} for the form x^2 + weight*y^2."""

    def q(v):
        return v[0] * v[0] + weight * v[1] * v[1]

    def dot(u, v):
        return u[0] * v[0] + weight * u[1] * v[1]

    u, v = (b, 0), (r, 1)
    if q(u) > q(v):
        u, v = v, u
    while True:
        k = round(Fraction(dot(u, v), q(u)))
        v = (v[0] - k * u[0], v[1] - k * u[1])
        if q(v) >= q(u):
            return u
        u, v = v, u


def _conic(a: int, b: int, b_primes=None) -> tuple[int, int, int] | None:
    """Nontrivial integers (X, Y, Z) with X^2 = a Y^2 + b Z^2, or None.

    a and b are squarefree; ``b_primes`` lists the primes of b when known."""
    if a < 0 and b < 0:
        return None
    if a == 1:
        return 1, 1, 0
    if b == 1:
        return 1, 0, 1
    if abs(a) > abs(b):
        sol = _conic(b, a)
        if sol is None:
            return None
        X, Y, Z = sol
        return X, Z, Y
    if b_primes is None:
        b_primes = tuple(factorize(b))
    r = _sqrt_mod_squarefree(a, b_primes)
    if r is None:
        return None
    B = abs(b)
    x, y = _reduce(B, r % B, abs(a))
    t = (x * x - a * y * y) // b
    t0, s, t_primes = squarefree_decomposition(t)
    # solve X1^2 = a Y1^2 + t0 Z1^2, with |t0| < |a|
    if t0 == 1:
        sub = (1, 0, 1)
    else:
        sub = _conic(t0, a, None)
        if sub is None:
            return None
        X1, Z1, Y1 = sub
        sub = (X1, Y1, Z1)
    X1, Y1, Z1 = sub
    X = x * X1 + a * y * Y1
    Y = x * Y1 + y * X1
    Z = t0 * s * Z1
    g = math.gcd(math.gcd(X, Y), Z)
    return X // g, Y // g, Z // g


def _small_integral(a: int, c: int, bound: int) -> NormSolution | None:
    for y in range(bound + 1):
        rhs = c + a * y * y
        if rhs < 0:
            if a < 0:
                break
            continue
        x = math.isqrt(rhs)
        if x * x == rhs:
            return NormSolution(Fraction(x), Fraction(y))
    return None


def solve(eq: QuadraticNormEquation, config: NormConfig = NormConfig(), hints=()) -> NormSolution | None:
    """An exact solution of x^2 - a y^2 = c, or None when c is not a norm.

    Raises FactorizationLimit if c cannot be factored within the trial bound.
    """
    a, c = eq.a, eq.c
    if not global_norm_test(eq, config, hints):
        return None
    if c.denominator == 1:
        quick = _small_integral(a, c.numerator, config.small_search)
        if quick is not None:
            return quick
    # c = n/d, and n*d = c*d^2
    d = c.denominator
    n = c.numerator * d
    factors = factorize(c.numerator, config.trial_bound, hints)
    for p, k in factorize(d, config.trial_bound, hints).items():
        factors[p] = factors.get(p, 0) + k
    core, s, core_primes = squarefree_decomposition(n, factors)
    sol = _conic(a, core, core_primes)
    if sol is None:
        raise AssertionError(f"descent failed on a norm: a={a}, c={c}")
    X, Y, Z = sol
    if Z == 0:
        raise AssertionError("degenerate conic solution for a non-square radicand")
    scale = Fraction(s, Z * d)
    out = NormSolution(X * scale, Y * scale)
    if out.norm(a) != c:
        raise AssertionError("norm solution failed exact verification")
    return out


def _poly_norm(poly, coords) -> Fraction:
    """N(sum coords[k] theta^k) for theta a root of the monic ``poly``."""
    n = len(poly) - 1
    if poly[-1] != 1:
        raise ValueError("defining polynomial must be monic")
    if len(coords) != n:
        raise ValueError(f"expected {n} coordinates")

    def mul_theta(vec):
        # multiply sum vec[k] theta^k by theta, reducing with the polynomial
        top = vec[-1]
        shifted = [Fraction(0)] + list(vec[:-1])
        return [shifted[k] - top * poly[k] for k in range(n)]

    column = [as_rational(x) for x in coords]
    columns = []
    for _ in range(n):
        columns.append(column)
        column = mul_theta(column)
    matrix = [[columns[j][i] for j in range(n)] for i in range(n)]
    return _det(matrix)


def _det(m) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for i in range(n):
        pivot = next((r for r in range(i, n) if m[r][i] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != i:
            m[i], m[pivot] = m[pivot], m[i]
            det = -det
        det *= m[i][i]
        for r in range(i + 1, n):
            f = m[r][i] / m[i][i]
            if f:
                for k in range(i, n):
                    m[r][k] -= f * m[i][k]
    return det


def verify_norm_value(d: int, field, x, c) -> bool:
    """Check N(x) = c, for a quadratic radicand ``field`` (d = 2) or a
    CyclicExtension carrying a defining polynomial."""
    c = as_rational(c)
    coords = [as_rational(v) for v in x]
    if len(coords) != d:
        return False
    if d == 1:
        return coords[0] == c
    if d == 2 and isinstance(field, int):
        return coords[0] ** 2 - field * coords[1] ** 2 == c
    a = getattr(field, "quadratic_radicand", lambda: None)()
    if d == 2 and a is not None:
        # quadratic coordinates are always in the basis (1, sqrt a)
        return coords[0] ** 2 - a * coords[1] ** 2 == c
    poly = getattr(field, "poly", None)
    if poly is None:
        raise UnsupportedDegree(f"no norm form attached for degree {d}")
    return _poly_norm([as_rational(v) for v in poly], coords) == c
