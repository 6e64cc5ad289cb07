"""Simultaneous prime values of affine linear forms in two variables.

The search itself is a plain deterministic sweep: increasing sup-norm shells,
lexicographic order inside a shell, restricted to an open cone. The second
half of the module manufactures such a search from approximation data
(``prop1_reduction``) and turns a hit into a pair (lambda, mu) whose shifted
values lambda - e_i mu are primes times S-units (``prop1_pairs``).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .arith import (
    as_rational,
    crt_lift,
    factorize,
    in_z_s,
    is_prime,
    is_s_unit,
    prime_set,
    primes_up_to,
    s_part,
    valuation,
)
from .errors import (
    DenominatorOutsideS,
    InsufficientCone,
    InternalInconsistency,
    LocalObstruction,
    ProportionalForms,
    SearchExhausted,
    TargetDegenerate,
)


@dataclass(frozen=True)
class AffineLinearForm:
    a: int
    b: int
    c: int = 0

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise ValueError("a linear form needs a nonzero homogeneous part")

    def __call__(self, m: int, n: int) -> int:
        return self.a * m + self.b * n + self.c

    def homogeneous(self, m: int, n: int) -> int:
        return self.a * m + self.b * n


@dataclass(frozen=True)
class Cone:
    """Open cone {alpha*x + beta*y > 0 for each (alpha, beta)} with a witness point."""

    constraints: tuple
    witness: tuple

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple((int(a), int(b)) for a, b in self.constraints))
        for alpha, beta in self.constraints:
            if alpha == 0 and beta == 0:
                raise ValueError("degenerate half-plane constraint (0, 0)")
        if not self.contains(*self.witness):
            raise ValueError(f"witness {self.witness} is not inside the cone")

    def contains(self, m: int, n: int) -> bool:
        return all(alpha * m + beta * n > 0 for alpha, beta in self.constraints)


@dataclass(frozen=True)
class SearchConfig:
    max_radius: int = 10_000
    count: int = 1
    admissibility_bound: int = 0  # primes up to this are also checked by enumeration
    witness_radius: int = 2_000

    def __post_init__(self):
        if self.max_radius < 0 or self.count < 1:
            raise ValueError("max_radius must be >= 0 and count >= 1")


@dataclass(frozen=True)
class Hit:
    point: tuple
    primes: tuple


# admissibility ---------------------------------------------------------------


def _check_non_proportional(forms: Sequence[AffineLinearForm]) -> None:
    for i, f in enumerate(forms):
        for g in forms[i + 1 :]:
            if f.a * g.b == f.b * g.a and f.a * g.c == f.c * g.a and f.b * g.c == f.c * g.b:
                raise ProportionalForms(f"{f} and {g} are proportional")


def _obstructs(forms: Sequence[AffineLinearForm], p: int) -> bool:
    for m in range(p):
        for n in range(p):
            if all(f(m, n) % p for f in forms):
                return False
    return True


def admissibility_check(forms: Sequence[AffineLinearForm], bound: int = 0) -> int | None:
    """Least prime p at which every (m, n) makes some form value divisible by p,
    or None when no prime obstructs.

    Only two kinds of prime can obstruct: p <= r (the r zero-lines mod p may
    cover the plane) and primes dividing gcd(a_i, b_i, c_i) for some form.
    Beyond those, r lines of p points each cannot cover p^2 points.
    """
    forms = list(forms)
    _check_non_proportional(forms)
    candidates = set(primes_up_to(max(len(forms), bound)))
    for f in forms:
        g = math.gcd(math.gcd(f.a, f.b), f.c)
        if g > 1:
            candidates.add(min(factorize(g)))
    for p in sorted(candidates):
        if _obstructs(forms, p):
            return p
    return None


# sweep -----------------------------------------------------------------------


def _free_interval(constraints, fixed_is_m: bool, value: int, lo: int, hi: int):
    """Range of the free coordinate in [lo, hi] satisfying all constraints."""
    for alpha, beta in constraints:
        coef, const = (beta, alpha * value) if fixed_is_m else (alpha, beta * value)
        # coef * t + const > 0
        if coef > 0:
            lo = max(lo, (-const) // coef + 1)
        elif coef < 0:
            hi = min(hi, -((-const) // (-coef)) - 1)
        elif const <= 0:
            return range(0)
        if lo > hi:
            return range(0)
    return range(lo, hi + 1)


def shell_points(constraints, s: int) -> Iterator[tuple[int, int]]:
    """Points of sup-norm exactly s inside the open cone, in lexicographic order."""
    if s == 0:
        if not constraints:
            yield (0, 0)
        return
    for n in _free_interval(constraints, True, -s, -s, s):
        yield (-s, n)
    low = ((m, -s) for m in _free_interval(constraints, False, -s, -s + 1, s - 1))
    high = ((m, s) for m in _free_interval(constraints, False, s, -s + 1, s - 1))
    yield from heapq.merge(low, high)
    for n in _free_interval(constraints, True, s, -s, s):
        yield (s, n)


def sweep(cone: Cone, max_radius: int) -> Iterator[tuple[int, int]]:
    for s in range(max_radius + 1):
        yield from shell_points(cone.constraints, s)


def iter_constellations(forms: Sequence[AffineLinearForm], cone: Cone, max_radius: int) -> Iterator[Hit]:
    """Every cone point within ``max_radius`` where all |form values| are prime, in sweep order.

    The admissibility check is left to the caller."""
    forms = list(forms)
    for m, n in sweep(cone, max_radius):
        values = []
        for f in forms:
            v = abs(f(m, n))
            if not is_prime(v):
                break
            values.append(v)
        else:
            yield Hit((m, n), tuple(values))


def find_constellations(forms: Sequence[AffineLinearForm], cone: Cone, config: SearchConfig) -> list[Hit]:
    """The first ``config.count`` cone points at which every |form value| is prime."""
    forms = list(forms)
    obstruction = admissibility_check(forms, config.admissibility_bound)
    if obstruction is not None:
        raise LocalObstruction(obstruction, "forms are not admissible")
    hits: list[Hit] = []
    for hit in iter_constellations(forms, cone, config.max_radius):
        hits.append(hit)
        if len(hits) == config.count:
            return hits
    err = SearchExhausted(config.max_radius, len(hits))
    err.hits = hits
    raise err


# reduction from approximation data --------------------------------------------


def _residue(x: Fraction, modulus: int) -> int:
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


@dataclass
class ConstellationProblem:
    """Reduced search data: lambda = (lambda0 + M m)/scale, mu = (mu0 + M n)/scale."""

    S: tuple
    e: tuple  # distinct roots, one form each
    C: Fraction
    forms: list
    cone: Cone
    lambda0: int
    mu0: int
    M: int
    scale: int
    d: int
    M_parts: list
    c: list
    N: int
    exponents: dict
    precisions: dict
    order: list = field(default_factory=list)

    def lift(self, m: int, n: int) -> tuple[Fraction, Fraction]:
        return (
            Fraction(self.lambda0 + self.M * m, self.scale),
            Fraction(self.mu0 + self.M * n, self.scale),
        )

    def invariant_failures(self) -> list[str]:
        out = []
        _check_non_proportional(self.forms)
        if self.M != math.prod(p**k for p, k in self.exponents.items()):
            out.append("M is not the product of p^m_p")
        for i, e in enumerate(self.e):
            Mi, ci = self.M_parts[i], self.c[i]
            if (self.M // Mi) % self.N or self.M % Mi:
                out.append(f"N does not divide M/M_{i}")
            if self.d * (self.lambda0 - e * self.mu0) != Mi * ci:
                out.append(f"d(lambda0 - e_{i} mu0) != M_{i} c_{i}")
            if any(ci % p == 0 for p in self.S):
                out.append(f"c_{i} not coprime to S")
        if not self.lambda0 > self.C * self.mu0 > 0:
            out.append("lambda0 > C mu0 > 0 fails")
        return out


def prop1_reduction(S, targets, C, e, precisions, witness_radius: int = 2_000) -> ConstellationProblem:
    """Build linear forms, constants and a cone whose prime constellations give
    pairs (lambda, mu) close to the targets with lambda - e_i mu = prime * S-unit.

    ``targets`` maps p -> (lambda_p, mu_p); ``precisions`` maps p -> n_p.
    """
    S = prime_set(S)
    if set(targets) != set(S):
        raise ValueError("targets must be indexed exactly by S")
    e_distinct = tuple(dict.fromkeys(as_rational(x) for x in e))
    if not e_distinct:
        raise ValueError("need at least one e_i")
    for x in e_distinct:
        if not in_z_s(x, S):
            raise DenominatorOutsideS(f"e = {x} is not in Z_S")
    if len(e_distinct) > 1 and not S:
        raise ValueError("S must be nonempty to separate distinct e_i")
    targets = {p: (as_rational(l), as_rational(m)) for p, (l, m) in targets.items()}
    for p, (lp, mp) in targets.items():
        for x in e_distinct:
            if lp - x * mp == 0:
                raise TargetDegenerate(f"lambda_p - e mu_p = 0 at p={p}, e={x}")
    C = max(as_rational(C), 1 + max(e_distinct), Fraction(1))

    # common S-unit making every target p-integral
    scale = 1
    for p, (lp, mp) in targets.items():
        k = max(0, *(-valuation(x, p) for x in (lp, mp) if x != 0))
        scale *= p**k
    n_int = {p: int(precisions.get(p, 0)) + valuation(scale, p) + 1 for p in S}
    lam_t = {p: scale * lp for p, (lp, _) in targets.items()}
    mu_t = {p: scale * mp for p, (_, mp) in targets.items()}

    P = math.prod(p ** n_int[p] for p in S)
    lam_res = crt_lift([(p ** n_int[p], _residue(lam_t[p], p ** n_int[p])) for p in S])
    mu0 = crt_lift([(p ** n_int[p], _residue(mu_t[p], p ** n_int[p])) for p in S])
    if mu0 == 0:
        mu0 = P
    bound = C * mu0
    k = max(0, math.floor((bound - lam_res) / P) + 1)
    lambda0 = lam_res + k * P

    d = 1
    for x in e_distinct:
        d = d * x.denominator // math.gcd(d, x.denominator)
    shifted = [d * (lambda0 - x * mu0) for x in e_distinct]
    for v in shifted:
        assert v.denominator == 1 and v > 0
    M_parts = [s_part(int(v), S) for v in shifted]
    cs = [int(v) // Mi for v, Mi in zip(shifted, M_parts)]

    spread = max(cs) - min(cs)
    N = 1
    if len(cs) > 1:
        while N <= spread:
            N *= S[0]
    exponents = {
        p: max(n_int[p], valuation(N, p) + max(valuation(Mi, p) for Mi in M_parts)) for p in S
    }
    M = math.prod(p**k for p, k in exponents.items())

    forms = []
    for x, Mi, ci in zip(e_distinct, M_parts, cs):
        a = M * d // Mi
        b = -(M * d * x / Mi)
        assert b.denominator == 1
        forms.append(AffineLinearForm(a, int(b), ci))

    # the cone x > C y > 0 has no points below shell C + 1
    cone, order = _ordering_cone(forms, C, witness_radius + math.ceil(C))
    return ConstellationProblem(
        S=S,
        e=e_distinct,
        C=C,
        forms=forms,
        cone=cone,
        lambda0=lambda0,
        mu0=mu0,
        M=M,
        scale=scale,
        d=d,
        M_parts=M_parts,
        c=cs,
        N=N,
        exponents=exponents,
        precisions=n_int,
        order=order,
    )


def _ordering_cone(forms, C: Fraction, radius: int):
    base = ((C.denominator, -C.numerator), (0, 1))
    for s in range(1, radius + 1):
        for m, n in shell_points(base, s):
            values = [f.homogeneous(m, n) for f in forms]
            if len(set(values)) == len(values):
                order = sorted(range(len(forms)), key=lambda i: -values[i])
                constraints = list(base)
                for i, j in zip(order, order[1:]):
                    constraints.append((forms[i].a - forms[j].a, forms[i].b - forms[j].b))
                last = forms[order[-1]]
                constraints.append((last.a, last.b))
                return Cone(tuple(constraints), (m, n)), order
    raise InsufficientCone(f"no point with pairwise distinct form values within radius {radius}")


@dataclass(frozen=True)
class Prop1Result:
    lam: Fraction
    mu: Fraction
    assignments: tuple  # per input e_i: (p_i, u_i)
    problem: ConstellationProblem = field(compare=False, repr=False)
    hit: Hit = field(compare=False, repr=False)


def prop1_pairs(S, targets, C, e, precisions, config: SearchConfig = SearchConfig()) -> Prop1Result:
    """(lambda, mu) in Z_S^2 with lambda > C mu > 0, close to the targets, and
    lambda - e_i mu = p_i u_i (p_i prime outside S, u_i an S-unit, p_i = p_j iff e_i = e_j)."""
    e = [as_rational(x) for x in e]
    problem = prop1_reduction(S, targets, C, e, precisions, config.witness_radius)
    hit = find_constellations(problem.forms, problem.cone, SearchConfig(
        max_radius=config.max_radius, count=1, admissibility_bound=config.admissibility_bound,
    ))[0]
    lam, mu = problem.lift(*hit.point)
    prime_of = dict(zip(problem.e, hit.primes))
    assignments = tuple((prime_of[x], (lam - x * mu) / prime_of[x]) for x in e)
    failures = verify_prop1(S, targets, C, e, precisions, lam, mu, assignments)
    if failures:
        raise InternalInconsistency("; ".join(failures))
    return Prop1Result(lam, mu, assignments, problem, hit)


def verify_prop1(S, targets, C, e, precisions, lam, mu, assignments) -> list[str]:
    """Re-check the three output conditions from raw valuations. Empty list = pass."""
    S = prime_set(S)
    lam, mu, C = as_rational(lam), as_rational(mu), as_rational(C)
    out = []
    if not (mu > 0 and lam > C * mu):
        out.append("condition (1): lambda > C mu > 0 fails")
    if not (in_z_s(lam, S) and in_z_s(mu, S)):
        out.append("lambda, mu not in Z_S")
    for p in S:
        lp, mp = (as_rational(x) for x in targets[p])
        n = int(precisions.get(p, 0))
        if valuation(lam - lp, p) < n or valuation(mu - mp, p) < n:
            out.append(f"condition (2): not close enough at p={p}")
    if len(assignments) != len(e):
        return out + ["one assignment per e_i expected"]
    for (x, (p, u)) in zip(e, assignments):
        x, u = as_rational(x), as_rational(u)
        if not is_prime(p) or p in S:
            out.append(f"condition (3): p={p} is not a prime outside S")
        if lam - x * mu != p * u:
            out.append(f"condition (3): lambda - e mu != p u for e={x}")
        if not is_s_unit(u, S):
            out.append(f"condition (3): u={u} is not an S-unit")
    for i, (xi, (pi, _)) in enumerate(zip(e, assignments)):
        for xj, (pj, _) in list(zip(e, assignments))[i + 1 :]:
            if (as_rational(xi) == as_rational(xj)) != (pi == pj):
                out.append(f"condition (3): p_i = p_j iff e_i = e_j fails for {xi}, {xj}")
    return out
