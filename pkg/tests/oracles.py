"""Brute-force oracles used only by the tests.

Nothing here imports the package: every answer comes from enumeration.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

INF = "inf"


def small_factor(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_core(x) -> int:
    """The squarefree integer in the square class of the nonzero rational x."""
    x = Fraction(x)
    n = x.numerator * x.denominator
    core = -1 if n < 0 else 1
    for p, k in small_factor(n).items():
        if k % 2:
            core *= p
    return core


def is_squarefree(n: int) -> bool:
    return n != 0 and all(k == 1 for k in small_factor(n).values())


def _val(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@lru_cache(maxsize=None)
def _tables(p: int, k: int):
    q = p**k
    xs = np.arange(q, dtype=np.int64)
    val = np.zeros(q, dtype=np.int64)
    for i in range(1, k):
        val[xs % p**i == 0] = i
    val[0] = k
    sq = xs * xs % q
    big = 10 * k
    best = np.full(q, big, dtype=np.int64)
    np.minimum.at(best, sq, val)
    unit_root = np.zeros(q, dtype=bool)
    unit_root[sq[val == 0]] = True
    return q, val, sq, best, unit_root, big


@lru_cache(maxsize=None)
def _isotropic_mod(a_res: int, b_res: int, va: int, vb: int, p: int) -> bool:
    # a primitive solution of a x^2 + b y^2 = z^2 has some partial derivative
    # of valuation <= v(2) + 1, so precision 2(v(2) + 1) + 1 decides via Hensel
    v2 = 1 if p == 2 else 0
    k = 2 * (v2 + 1) + 1
    q, val, sq, best, unit_root, big = _tables(p, k)
    r = (a_res * sq[:, None] + b_res * sq[None, :]) % q
    vx, vy = val[:, None], val[None, :]
    zb = best[r]
    delta = np.minimum(np.minimum(v2 + va + vx, v2 + vb + vy), v2 + zb)
    xy_unit = (vx == 0) | (vy == 0)
    ok1 = xy_unit & (zb < big) & (2 * delta + 1 <= k)
    ok2 = unit_root[r] & (2 * v2 + 1 <= k)
    return bool(ok1.any() or ok2.any())


def conic_solvable(a, b, place) -> bool:
    """Does a x^2 + b y^2 = z^2 have a nontrivial solution over Q_place?"""
    a, b = squarefree_core(a), squarefree_core(b)
    if place == INF:
        return a > 0 or b > 0
    p = int(place)
    q = p ** (2 * ((1 if p == 2 else 0) + 1) + 1)
    return _isotropic_mod(a % q, b % q, _val(a, p), _val(b, p), p)


def hilbert_oracle(a, b, place) -> Fraction:
    return Fraction(0) if conic_solvable(a, b, place) else Fraction(1, 2)


def is_norm_bruteforce(a: int, c) -> bool:
    """Is c = x^2 - a y^2 over Q? Search X^2 = a Y^2 + N W^2 inside Holzer's box."""
    N = squarefree_core(c)
    if N == 1:
        return True
    wmax = math.isqrt(abs(a)) + 1
    ys = np.arange(math.isqrt(abs(N)) + 2, dtype=np.int64)
    for w in range(1, wmax + 1):
        rhs = a * ys * ys + N * w * w
        rhs = rhs[rhs >= 0]
        roots = np.floor(np.sqrt(rhs.astype(np.float64))).astype(np.int64)
        for shift in (-1, 0, 1):
            r = roots + shift
            if np.any(r * r == rhs):
                return True
    return False


def square_class_reps(place) -> list[int]:
    """Representatives of Q_v^* / (Q_v^*)^2."""
    if place == INF:
        return [1, -1]
    p = int(place)
    if p == 2:
        return [1, 3, 5, 7, 2, 6, 10, 14]
    n = next(x for x in range(2, p) if pow(x, (p - 1) // 2, p) == p - 1)
    return [1, n, p, n * p]
