import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st
from oracles import INF, hilbert_oracle

from normpencil.characters import (
    CyclicExtension,
    DirichletCharacter,
    kronecker,
    local_invariant,
    parse_field,
    place_invariant,
    quadratic_character,
    quadratic_field,
    real_invariant,
    reciprocity_sum,
    splits_completely,
    unit_group_generators,
)
from normpencil.errors import InvalidCharacter, NotSquarefree

HALF = Fraction(1, 2)
radicands = st.integers(-60, 60).filter(lambda a: a not in (0, 1) and sympy.factorint(abs(a)) and all(k == 1 for k in sympy.factorint(abs(a)).values()) or a == -1)
nonzero_rationals = st.builds(Fraction, st.integers(-10**5, 10**5).filter(bool), st.integers(1, 10**5))
CUBIC_7 = "chi:7:3=1/3"


def test_quadratic_character_examples():
    chi = quadratic_character(-1)
    assert chi.conductor == 4 and chi(3) == HALF
    # the squares mod 5 are {1, 4}
    chi5 = quadratic_character(5)
    assert chi5.conductor == 5 and chi5(2) == HALF and {x * x % 5 for x in range(1, 5)} == {1, 4}
    with pytest.raises(NotSquarefree):
        quadratic_character(4)


@given(radicands, st.integers(1, 500))
def test_quadratic_character_is_kronecker(a, n):
    chi = quadratic_character(a)
    disc = a if a % 4 == 1 else 4 * a
    if math.gcd(n, disc) != 1:
        assert chi(n) is None
    elif n % 2:
        assert chi(n) == (0 if sympy.jacobi_symbol(disc % n if n > 1 else 1, n) == 1 else HALF)
    else:
        assert chi(n) == (0 if kronecker(disc, n) == 1 else HALF)


def test_splits_completely_examples():
    K = quadratic_field(-1)
    assert splits_completely(K, 5) and not splits_completely(K, 3) and not splits_completely(K, 2)


@given(st.sampled_from([p for p in sympy.primerange(3, 400)]))
def test_splitting_in_gaussian_field_by_exhaustion(p):
    has_root = any((x * x + 1) % p == 0 for x in range(p))
    assert splits_completely(quadratic_field(-1), p) == has_root


@given(st.sampled_from([p for p in sympy.primerange(2, 300) if p != 7]))
def test_cubic_splitting_by_roots_of_the_defining_polynomial(p):
    # Q(zeta_7)^+ is cut out by x^3 + x^2 - 2x - 1
    roots = sum(1 for x in range(p) if (x**3 + x * x - 2 * x - 1) % p == 0)
    assert splits_completely(parse_field(CUBIC_7), p) == (roots == 3)


def test_local_invariant_examples():
    K = quadratic_field(-1)
    assert local_invariant(K, 3, 3) == HALF
    assert local_invariant(K, 7, 3) == 0
    assert local_invariant(K, -1, 2) == HALF
    assert real_invariant(K, -3) == HALF and real_invariant(K, 3) == 0
    assert real_invariant(quadratic_field(5), -3) == 0


def test_reciprocity_examples():
    assert reciprocity_sum(quadratic_field(-1), -1) == 0
    assert reciprocity_sum(quadratic_field(5), 7) == 0
    assert reciprocity_sum(parse_field(CUBIC_7), 1) == 0


@given(radicands, nonzero_rationals, st.sampled_from([2, 3, 5, 7, INF]))
def test_quadratic_invariant_matches_conic_oracle(a, t, v):
    assert place_invariant(quadratic_field(a), t, v) == hilbert_oracle(a, t, v)


@given(nonzero_rationals, nonzero_rationals, st.sampled_from(["quad:-1", "quad:5", CUBIC_7, "chi:9:2=1/3", "chi:13:2=1/4"]), st.sampled_from([2, 3, 5, 7, 13, 29]))
def test_local_invariant_is_additive(s, t, field, p):
    K = parse_field(field)
    assert local_invariant(K, s * t, p) == (local_invariant(K, s, p) + local_invariant(K, t, p)) % 1


@given(nonzero_rationals, st.sampled_from(["quad:-1", "quad:-5", CUBIC_7, "chi:9:2=1/3", "chi:13:2=1/4", "chi:16:5=1/4,15=1/2"]))
def test_reciprocity_property(t, field):
    assert reciprocity_sum(parse_field(field), t) == 0


@given(st.sampled_from(["quad:-1", CUBIC_7, "chi:13:2=1/4"]), st.sampled_from([2, 3, 5, 7, 13]), st.integers(1, 10**4).filter(lambda n: n % 13 and n % 7))
def test_norms_of_units_have_trivial_invariant(field, p, n):
    # an unramified unit is a local norm; a d-th power is a norm everywhere
    K = parse_field(field)
    assert local_invariant(K, Fraction(n) ** K.degree, p) == 0


@given(st.integers(2, 100))
def test_unit_group_generators_generate(m):
    gens = unit_group_generators(m)
    seen, frontier = {1 % m}, [1 % m]
    while frontier:
        x = frontier.pop()
        for g, _ in gens:
            y = x * g % m
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    assert len(seen) == sympy.totient(m)
    for g, order in gens:
        assert sympy.n_order(g, m) == order if m > 2 else True


@given(st.integers(3, 100), st.data())
def test_characters_are_homomorphisms(m, data):
    values = {}
    for g, o in unit_group_generators(m):
        values[g] = Fraction(data.draw(st.integers(0, o - 1)), o)
    chi = DirichletCharacter.from_generator_values(m, values)
    units = [x for x in range(1, m) if math.gcd(x, m) == 1]
    x, y = data.draw(st.sampled_from(units)), data.draw(st.sampled_from(units))
    assert chi(x * y) == (chi(x) + chi(y)) % 1
    assert m % chi.conductor == 0


def test_invalid_character_assignment():
    with pytest.raises(InvalidCharacter):
        DirichletCharacter.from_generator_values(7, {3: Fraction(1, 4)})
    with pytest.raises(InvalidCharacter):
        DirichletCharacter.from_generator_values(8, {3: Fraction(1, 2)})


def test_field_literals():
    K = parse_field("quad:-1")
    assert K.degree == 2 and K.totally_imaginary and K.quadratic_radicand() == -1
    L = parse_field(CUBIC_7)
    assert L.degree == 3 and L.conductor == 7 and not L.totally_imaginary
    assert isinstance(L, CyclicExtension) and L.quadratic_radicand() is None
    with pytest.raises(ValueError):
        parse_field("cubic:7")


@given(radicands, st.integers(-300, 300), st.integers(-300, 300), st.sampled_from(list(sympy.primerange(2, 60))))
def test_norms_have_trivial_invariants(a, x, y, p):
    t = x * x - a * y * y
    assume(t != 0)
    assert local_invariant(quadratic_field(a), t, p) == 0


@given(st.sampled_from(["quad:-1", "quad:10", CUBIC_7, "chi:13:2=1/4"]), st.sampled_from(list(sympy.primerange(2, 500))))
def test_splitting_is_invariant_of_p_at_p(field, p):
    K = parse_field(field)
    assume(K.conductor % p)
    assert splits_completely(K, p) == (local_invariant(K, p, p) == 0)
