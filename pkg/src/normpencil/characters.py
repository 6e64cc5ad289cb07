"""Cyclic extensions of Q as Dirichlet characters with values in Q/Z.

A character is stored as a value table on the unit group modulo its conductor,
together with its prime-power components. Local invariants of the cyclic
algebra (K/Q, t) come from the idele class character attached to chi:

* at p not dividing the conductor: ``val_p(t) * chi(p)``;
* at p dividing the conductor, with t = p^k u: ``k * chi'(p) - chi_p(u)`` where
  chi_p is the p-component and chi' the product of the remaining components;
* at the real place: ``chi(-1)`` if t < 0, else 0.

These are the values of one character of Q^* \\ A^*, so the sum over all
places vanishes identically. That property is what the test-suite checks.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

from .arith import (
    as_rational,
    crt_lift,
    factorize,
    frac_mod_one,
    is_prime,
    is_squarefree,
    rational_str,
    support,
    valuation,
)
from .hilbert import REAL
from .errors import DegenerateExtension, InvalidCharacter, NotSquarefree, ZeroArgument

QmodZ = Fraction  # always normalized to [0, 1)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _primitive_root(q: int, e: int) -> int:
    """A generator of (Z/q^e)^* for odd prime q."""
    order = q - 1
    prime_factors = list(factorize(order))
    g = 2
    while any(pow(g, order // r, q) == 1 for r in prime_factors):
        g += 1
    if e > 1 and pow(g, q - 1, q * q) == 1:
        g += q
    return g


def unit_group_generators(m: int) -> list[tuple[int, int]]:
    """Independent generators (g, order) with (Z/m)^* = prod <g>."""
    if m < 1:
        raise ValueError("modulus must be positive")
    out = []
    parts = [(q, e, q**e) for q, e in sorted(factorize(m).items())] if m > 1 else []
    for q, e, qe in parts:
        rest = m // qe
        local = []
        if q == 2:
            if e >= 2:
                local.append((qe - 1, 2))
            if e >= 3:
                local.append((5, qe // 8 * 2))
        else:
            local.append((_primitive_root(q, e), qe // q * (q - 1)))
        for g, order in local:
            lifted = crt_lift([(qe, g), (rest, 1)]) if rest > 1 else g % qe
            out.append((lifted, order))
    return out


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """A primitive character, stored modulo its conductor.

    ``table[n]`` is chi(n) in [0, 1) for units n mod the conductor and None otherwise.
    """

    modulus: int
    table: tuple

    def __post_init__(self):
        if len(self.table) != self.modulus:
            raise InvalidCharacter("table length must equal the modulus")

    # construction -------------------------------------------------------
    @classmethod
    def from_function(cls, m: int, fn) -> "DirichletCharacter":
        table = tuple(frac_mod_one(fn(n)) if math.gcd(n, m) == 1 else None for n in range(m))
        return cls._primitive(m, table)

    @classmethod
    def from_generator_values(cls, m: int, values: dict[int, Fraction]) -> "DirichletCharacter":
        """Character mod m determined by its values on generators of (Z/m)^*.

        Raises InvalidCharacter if the generators do not generate, or the
        assignment is not a homomorphism."""
        if m < 1:
            raise InvalidCharacter("modulus must be positive")
        gens = []
        for g, v in values.items():
            g %= m
            if math.gcd(g, m) != 1:
                raise InvalidCharacter(f"{g} is not a unit mod {m}")
            gens.append((g, frac_mod_one(as_rational(v))))
        table: list = [None] * m
        start = 1 % m
        table[start] = Fraction(0)
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for g, v in gens:
                y = x * g % m
                val = frac_mod_one(table[x] + v)
                if table[y] is None:
                    table[y] = val
                    queue.append(y)
                elif table[y] != val:
                    raise InvalidCharacter("generator values do not define a homomorphism")
        units = sum(1 for n in range(m) if math.gcd(n, m) == 1)
        if sum(1 for t in table if t is not None) != units:
            raise InvalidCharacter(f"the given generators do not generate (Z/{m})^*")
        return cls._primitive(m, tuple(table))

    @classmethod
    def _primitive(cls, m: int, table: tuple) -> "DirichletCharacter":
        for f in sorted(d for d in range(1, m + 1) if m % d == 0):
            if all(
                table[n] == 0 for n in range(1, m) if table[n] is not None and n % f == 1 % f
            ):
                break
        if f == m:
            return cls(m, table)
        reduced: list = [None] * f
        for r in range(f):
            if math.gcd(r, f) != 1:
                continue
            n = r
            while math.gcd(n, m) != 1:
                n += f
            reduced[r] = table[n % m]
        return cls(f, tuple(reduced))

    # basic data -----------------------------------------------------------
    @property
    def conductor(self) -> int:
        return self.modulus

    @cached_property
    def order(self) -> int:
        d = 1
        for v in self.table:
            if v is not None:
                d = d * v.denominator // math.gcd(d, v.denominator)
        return d

    def __call__(self, n: int):
        """chi(n) in [0, 1), or None if n is not coprime to the conductor."""
        return self.table[n % self.modulus]

    def __eq__(self, other):
        return isinstance(other, DirichletCharacter) and (self.modulus, self.table) == (
            other.modulus,
            other.table,
        )

    def __hash__(self):
        return hash((self.modulus, self.table))

    @cached_property
    def components(self) -> dict[int, tuple[int, tuple]]:
        """p -> (p^e, table of the p-component on (Z/p^e)^*)."""
        out = {}
        if self.modulus == 1:
            return out
        for q, e in factorize(self.modulus).items():
            qe = q**e
            rest = self.modulus // qe
            tab = []
            for x in range(qe):
                if x % q == 0:
                    tab.append(None)
                else:
                    y = crt_lift([(qe, x), (rest, 1)]) if rest > 1 else x
                    tab.append(self.table[y % self.modulus])
            out[q] = (qe, tuple(tab))
        return out

    def component_value(self, q: int, x) -> QmodZ:
        """chi_q evaluated at a q-adic unit x (int or q-integral Fraction)."""
        qe, tab = self.components[q]
        x = as_rational(x)
        residue = x.numerator * pow(x.denominator, -1, qe) % qe
        val = tab[residue]
        if val is None:
            raise ValueError(f"{x} is not a {q}-adic unit")
        return val

    def away_value(self, p: int, n: int) -> QmodZ:
        """Product of all components except the p-component, evaluated at n."""
        total = Fraction(0)
        for q, (qe, tab) in self.components.items():
            if q != p:
                total += tab[n % qe]
        return frac_mod_one(total)

    def literal(self) -> str:
        gens = unit_group_generators(self.modulus)
        body = ",".join(f"{g}={rational_str(self(g))}" for g, _ in gens)
        return f"chi:{self.modulus}:{body}"


@lru_cache(maxsize=4096)
def quadratic_character(a: int) -> DirichletCharacter:
    """The character of Q(sqrt(a)), of conductor |disc|."""
    a = int(a)
    if a == 1:
        raise DegenerateExtension("a = 1 gives the trivial extension")
    if a == 0 or not is_squarefree(a):
        raise NotSquarefree(f"{a} is not a nonzero squarefree integer")
    disc = a if a % 4 == 1 else 4 * a
    m = abs(disc)
    table = tuple(
        (Fraction(0) if kronecker(disc, n) == 1 else Fraction(1, 2)) if math.gcd(n, m) == 1 else None
        for n in range(m)
    )
    return DirichletCharacter(m, table)


@dataclass(frozen=True)
class CyclicExtension:
    """A cyclic field K/Q, given by its character.

    ``poly`` optionally attaches a monic defining polynomial (coefficients from
    the constant term upward) so that norm coordinates can be checked for
    degree > 2.
    """

    character: DirichletCharacter
    poly: tuple | None = field(default=None, compare=False)
    label: str | None = field(default=None, compare=False)

    @property
    def degree(self) -> int:
        return self.character.order

    @property
    def conductor(self) -> int:
        return self.character.conductor

    @cached_property
    def ramified_primes(self) -> tuple[int, ...]:
        return tuple(sorted(self.character.components))

    @property
    def totally_imaginary(self) -> bool:
        return self.character(-1) != 0

    def quadratic_radicand(self) -> int | None:
        """Squarefree a with K = Q(sqrt(a)) when K is quadratic, else None."""
        if self.degree != 2:
            return None
        f = self.conductor
        disc = -f if self.totally_imaginary else f
        if disc % 4 == 0:
            disc //= 4
        return disc

    def __str__(self):
        if self.label:
            return self.label
        a = self.quadratic_radicand()
        return f"quad:{a}" if a is not None else self.character.literal()


def quadratic_field(a: int) -> CyclicExtension:
    return CyclicExtension(quadratic_character(a), label=f"quad:{int(a)}")


def parse_field(text: str) -> CyclicExtension:
    """Parse ``quad:a`` or ``chi:m:g1=v1,g2=v2``."""
    text = text.strip()
    kind, _, rest = text.partition(":")
    if kind == "quad":
        return quadratic_field(int(rest))
    if kind == "chi":
        mod_text, _, gen_text = rest.partition(":")
        m = int(mod_text)
        values = {}
        for item in filter(None, gen_text.split(",")):
            g, _, v = item.partition("=")
            values[int(g)] = as_rational(v)
        return CyclicExtension(DirichletCharacter.from_generator_values(m, values), label=text)
    raise ValueError(f"unknown field literal {text!r}")


def splits_completely(K: CyclicExtension, p: int) -> bool:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    chi = K.character
    if chi.conductor % p == 0:
        return False
    return chi(p) == 0


def local_invariant(K: CyclicExtension, t, p: int) -> QmodZ:
    """inv_p of the cyclic algebra (K/Q, t)."""
    t = as_rational(t)
    if t == 0:
        raise ZeroArgument("local invariant of (K, 0) is undefined")
    k = valuation(t, p)
    chi = K.character
    if p not in chi.components:
        return frac_mod_one(k * chi(p))
    unit = t / Fraction(p) ** k
    return frac_mod_one(k * chi.away_value(p, p) - chi.component_value(p, unit))


def real_invariant(K: CyclicExtension, t) -> QmodZ:
    t = as_rational(t)
    if t == 0:
        raise ZeroArgument("real invariant of (K, 0) is undefined")
    if t > 0:
        return Fraction(0)
    return K.character(-1)


def invariant_places(K: CyclicExtension, t) -> tuple[int, ...]:
    """Finite primes where inv_p(K, t) can be nonzero."""
    return tuple(sorted(set(support(t)) | set(K.ramified_primes)))


def reciprocity_sum(K: CyclicExtension, t) -> QmodZ:
    """Sum of inv_v(K, t) over all places of Q (real place included)."""
    total = real_invariant(K, t)
    for p in invariant_places(K, t):
        total += local_invariant(K, t, p)
    return frac_mod_one(total)


def place_invariant(K: CyclicExtension, t, place) -> QmodZ:
    """inv_v for v a prime or the real place ("inf")."""
    if place == REAL:
        return real_invariant(K, t)
    return local_invariant(K, t, place)
