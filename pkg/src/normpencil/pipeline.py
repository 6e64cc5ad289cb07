"""Rational points on pencils of norm equations

    b_i * prod_j (u - e_ij v)^m_ij = N_{K_i/Q}(x_i),   i = 1..r,

with K_i cyclic. ``solve`` runs the fibration argument end to end. It moves
the real point to (1, 0), enlarges S, picks (lambda, mu) from a prime
constellation, checks the local invariants place by place, solves the norm
equations and rescales by rho^d. Each step leaves a claim in the transcript,
and ``verify_certificate`` re-checks every claim with its own calls.
"""

from __future__ import annotations

import itertools
import json
import math
import shlex
import subprocess
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .arith import (
    as_rational,
    integer_nth_root,
    is_prime,
    prime_set,
    rational_str,
    support,
    support_within,
    valuation,
)
from .characters import (
    CyclicExtension,
    parse_field,
    place_invariant,
    quadratic_field,
    real_invariant,
    splits_completely,
)
from .constellation import SearchConfig, prop1_pairs, shell_points
from .errors import (
    DegenerateCandidate,
    DegenerateTarget,
    InternalInconsistency,
    LocalObstruction,
    RealObstruction,
    VerticalConditionFailed,
)
from .hilbert import REAL
from .norms import NormConfig, QuadraticNormEquation, global_norm_test, verify_norm_value
from .norms import solve as solve_norm
from .tau import VerifyReport

DELEGATED = "delegated"


# instance data ---------------------------------------------------------------


@dataclass(frozen=True)
class Root:
    e: Fraction
    m: int = 1


@dataclass(frozen=True)
class Factor:
    field: CyclicExtension
    b: Fraction
    roots: tuple
    field_text: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "b", as_rational(self.b))
        if self.b == 0:
            raise ValueError("b must be nonzero")
        if not self.roots:
            raise ValueError("a factor needs at least one root")
        roots = tuple(Root(as_rational(r.e), int(r.m)) for r in self.roots)
        if any(r.m < 1 for r in roots):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(self, "roots", roots)
        if not self.field_text:
            object.__setattr__(self, "field_text", str(self.field))

    @property
    def total_degree(self) -> int:
        return sum(r.m for r in self.roots)

    def multiplicity(self, e: Fraction) -> int:
        return sum(r.m for r in self.roots if r.e == e)

    def distinct_roots(self) -> list:
        return list(dict.fromkeys(r.e for r in self.roots))

    def value(self, u, v) -> Fraction:
        out = self.b
        for r in self.roots:
            out *= (u - r.e * v) ** r.m
        return out


@dataclass(frozen=True)
class Instance:
    factors: tuple

    def distinct_roots(self) -> list:
        return list(dict.fromkeys(r.e for f in self.factors for r in f.roots))

    @property
    def d(self) -> int:
        return math.prod(f.field.degree for f in self.factors)


@dataclass(frozen=True)
class Target:
    lam: Fraction
    mu: Fraction
    precision: int = 1


@dataclass(frozen=True)
class LocalData:
    S: tuple = ()
    targets: dict = field(default_factory=dict)  # p -> Target
    real_target: tuple | None = None
    real_tolerance: Fraction = Fraction(1)
    C: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "S", prime_set(set(self.S) | set(self.targets)))
        object.__setattr__(self, "real_tolerance", as_rational(self.real_tolerance))
        object.__setattr__(self, "C", as_rational(self.C))
        if self.real_tolerance <= 0:
            raise ValueError("real_tolerance must be positive")
        if self.real_target is not None:
            object.__setattr__(self, "real_target", tuple(as_rational(x) for x in self.real_target))


@dataclass(frozen=True)
class ChangeOfBasis:
    """(u, v) = matrix * (u', v')."""

    matrix: tuple

    @classmethod
    def identity(cls) -> "ChangeOfBasis":
        return cls(((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))))

    @property
    def det(self) -> Fraction:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def apply(self, x, y) -> tuple:
        (a, b), (c, d) = self.matrix
        return a * x + b * y, c * x + d * y

    def inverse(self, u, v) -> tuple:
        (a, b), (c, d) = self.matrix
        det = self.det
        return (d * u - b * v) / det, (a * v - c * u) / det

    @property
    def sup_norm(self) -> Fraction:
        return max(abs(a) + abs(b) for a, b in self.matrix)

    def min_valuation(self, p: int) -> int:
        """min(0, val_p of the entries): the precision lost when mapping back."""
        return min([0] + [valuation(x, p) for row in self.matrix for x in row if x != 0])

    def root_data(self, e: Fraction) -> tuple[Fraction, Fraction]:
        """(c, e') with u - e v = c (u' - e' v')."""
        (a, b), (c, d) = self.matrix
        scale = a - e * c
        return scale, -(b - e * d) / scale


@dataclass(frozen=True)
class PipelineConfig:
    search: SearchConfig = SearchConfig()
    norm: NormConfig = NormConfig()
    local_radius: int = 24
    external_norm_solver: str | None = None


@dataclass
class SolutionCertificate:
    point: tuple
    coordinates: list  # per factor: tuple of Fractions, or None when delegated
    primes: list  # per distinct root: {"e", "e_normalized", "p", "unit"}
    transcript: list  # claim dicts, in order
    S: tuple
    matrix: tuple
    real_target: tuple
    real_tolerance: Fraction
    rho: tuple  # (A, B, d)
    pre_point: tuple

    @property
    def delegated(self) -> list:
        return [i for i, c in enumerate(self.coordinates) if c is None]

    def to_json(self) -> dict:
        rs = rational_str
        return {
            "point": [rs(x) for x in self.point],
            "coordinates": [DELEGATED if c is None else [rs(x) for x in c] for c in self.coordinates],
            "delegated": self.delegated,
            "primes": [
                {"e": rs(r["e"]), "e_normalized": rs(r["e_normalized"]), "p": r["p"], "unit": rs(r["unit"])}
                for r in self.primes
            ],
            "S": list(self.S),
            "normalization": {
                "matrix": [[rs(x) for x in row] for row in self.matrix],
                "real_target": [rs(x) for x in self.real_target],
                "real_tolerance": rs(self.real_tolerance),
            },
            "rho": {"numerator": self.rho[0], "denominator": self.rho[1], "d": self.rho[2]},
            "pre_point": [rs(x) for x in self.pre_point],
            "transcript": self.transcript,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SolutionCertificate":
        q = as_rational
        norm = data["normalization"]
        return cls(
            point=tuple(q(x) for x in data["point"]),
            coordinates=[None if c == DELEGATED else tuple(q(x) for x in c) for c in data["coordinates"]],
            primes=[
                {"e": q(r["e"]), "e_normalized": q(r["e_normalized"]), "p": int(r["p"]), "unit": q(r["unit"])}
                for r in data["primes"]
            ],
            transcript=list(data["transcript"]),
            S=tuple(int(p) for p in data["S"]),
            matrix=tuple(tuple(q(x) for x in row) for row in norm["matrix"]),
            real_target=tuple(q(x) for x in norm["real_target"]),
            real_tolerance=q(norm["real_tolerance"]),
            rho=(int(data["rho"]["numerator"]), int(data["rho"]["denominator"]), int(data["rho"]["d"])),
            pre_point=tuple(q(x) for x in data["pre_point"]),
        )


# local conditions ------------------------------------------------------------


def _values(instance: Instance, lam, mu) -> list:
    return [f.value(as_rational(lam), as_rational(mu)) for f in instance.factors]


def check_local(instance: Instance, place, candidate) -> bool:
    """Every factor value at the candidate has invariant 0 at ``place``."""
    values = _values(instance, *candidate)
    if any(v == 0 for v in values):
        raise DegenerateCandidate(f"{candidate} lies on a degenerate line")
    return all(place_invariant(f.field, v, place) == 0 for f, v in zip(instance.factors, values))


def _is_degenerate(instance: Instance, lam, mu) -> bool:
    return any(lam - e * mu == 0 for e in instance.distinct_roots())


def _local_points(instance: Instance, p: int, radius: int):
    for s in range(1, radius + 1):
        for x, y in shell_points((), s):
            for j in range(3):
                cand = (Fraction(x, p**j), Fraction(y, p**j))
                if not _is_degenerate(instance, *cand) and check_local(instance, p, cand):
                    yield cand


def find_local_point(instance: Instance, p: int, radius: int = 24) -> tuple:
    """A rational (lambda, mu) that is a local point at p, found by a bounded search.

    Candidates are (x, y) / p^j for integer (x, y) in sup-norm shells and j = 0, 1, 2.
    """
    for cand in _local_points(instance, p, radius):
        return cand
    raise LocalObstruction(p, f"no local point within search radius {radius}", undecided=True)


def vertical_signature(instance: Instance, lam, mu, place) -> tuple:
    """m_ij * inv_v(K_i, lambda - e_ij mu) for every factor with several distinct roots.

    Summed over S and the real place these must vanish: the new prime p_j
    dividing lambda - e_j mu then carries invariant 0 by reciprocity.
    """
    out = []
    for f in instance.factors:
        roots = f.distinct_roots()
        if len(roots) > 1:
            out.extend(f.multiplicity(e) * place_invariant(f.field, lam - e * mu, place) % 1 for e in roots)
    return tuple(out)


def _signature_options(instance: Instance, p: int, radius: int) -> list:
    """First local point for each distinct vertical signature at p.

    Invariants at p only see residues modulo small powers of p, so the shells
    stop at 2p + 2 (at least 8) unless ``radius`` is smaller."""
    seen = {}
    for cand in _local_points(instance, p, min(radius, max(8, 2 * p + 2))):
        seen.setdefault(vertical_signature(instance, *cand, p), cand)
    if not seen:
        raise LocalObstruction(p, f"no local point within search radius {radius}", undecided=True)
    return list(seen.items())


def _real_candidates(instance: Instance) -> list:
    roots = sorted(set(instance.distinct_roots()))
    ts = [roots[0] - 1] + [(a + b) / 2 for a, b in zip(roots, roots[1:])] + [roots[-1] + 1]
    candidates = [(Fraction(1), Fraction(0)), (Fraction(-1), Fraction(0))]
    for t in ts:
        candidates += [(t, Fraction(1)), (-t, Fraction(-1))]
    return [c for c in candidates if not _is_degenerate(instance, *c) and check_local(instance, REAL, c)]


def choose_real_target(instance: Instance) -> tuple:
    """First real point, in a fixed order, where every factor has real invariant 0.

    The sign pattern only changes across roots, so one candidate per interval
    between consecutive roots (and per sign of (u, v)) is enough."""
    candidates = _real_candidates(instance)
    if not candidates:
        raise RealObstruction("no real point has every factor value a local norm")
    return candidates[0]


def continuity_requirement(instance: Instance, p: int, lam, mu) -> int:
    """Precision n such that every factor keeps its p-adic invariant when
    (lambda, mu) moves by p^n."""
    need = 1
    for f in instance.factors:
        cond = valuation(f.field.conductor, p)
        for e in f.distinct_roots():
            x = lam - e * mu
            shift = min(0, valuation(e, p)) if e != 0 else 0
            need = max(need, valuation(x, p) + max(cond, 1) - shift)
    return need


# normalization and S -----------------------------------------------------------


def normalize_real_target(instance: Instance, local_data: LocalData):
    """Change variables so the real target becomes (1, 0).

    Returns (instance', local_data', change) with (u, v) = change.apply(u', v').
    """
    u0, v0 = local_data.real_target if local_data.real_target is not None else (Fraction(1), Fraction(0))
    for e in instance.distinct_roots():
        if u0 - e * v0 == 0:
            raise DegenerateTarget(f"real target lies on the line u = {rational_str(e)} v")
    if u0 != 0:
        T = ChangeOfBasis(((u0, Fraction(0)), (v0, Fraction(1))))
    else:
        T = ChangeOfBasis(((Fraction(0), Fraction(-1)), (v0, Fraction(0))))

    factors = []
    for f in instance.factors:
        b = f.b
        roots = []
        for r in f.roots:
            scale, e_new = T.root_data(r.e)
            b *= scale**r.m
            roots.append(Root(e_new, r.m))
        if real_invariant(f.field, b) != 0:
            raise RealObstruction(f"factor over {f.field_text} is negative at the real target")
        factors.append(Factor(f.field, b, tuple(roots), f.field_text))

    targets = {}
    for p, t in local_data.targets.items():
        lam, mu = T.inverse(t.lam, t.mu)
        targets[p] = Target(lam, mu, t.precision - T.min_valuation(p))
    data = LocalData(
        S=local_data.S,
        targets=targets,
        real_target=(Fraction(1), Fraction(0)),
        real_tolerance=local_data.real_tolerance / T.sup_norm,
        C=local_data.C,
    )
    return Instance(tuple(factors)), data, T


def enlarge_s(instance: Instance, local_data: LocalData, radius: int = 24) -> LocalData:
    """Grow S until every b_i is an S-unit, every e_ij is in Z_S and every K_i
    is unramified outside S. Primes without a target get a searched local point."""
    S = set(local_data.S)
    for f in instance.factors:
        S |= set(support(f.b))
        S |= set(f.field.ramified_primes)
        for r in f.roots:
            S |= set(support(Fraction(r.e.denominator)))
    targets = dict(local_data.targets)
    for p in sorted(S):
        if p not in targets:
            lam, mu = find_local_point(instance, p, radius)
            targets[p] = Target(lam, mu, 1)
    return replace(local_data, S=prime_set(S), targets=targets)


def _complete_local_data(instance: Instance, local_data: LocalData, radius: int) -> LocalData:
    """enlarge_s, with local points at the new primes chosen so that the
    vertical signatures (see ``vertical_signature``) sum to zero."""
    if all(len(f.distinct_roots()) == 1 for f in instance.factors):
        return enlarge_s(instance, local_data, radius)
    S = set(local_data.S)
    for f in instance.factors:
        S |= set(support(f.b)) | set(f.field.ramified_primes)
        for r in f.roots:
            S |= set(support(Fraction(r.e.denominator)))
    fixed = [vertical_signature(instance, t.lam, t.mu, p) for p, t in local_data.targets.items()]
    free = [p for p in sorted(S) if p not in local_data.targets]
    options = [_signature_options(instance, p, radius) for p in free]
    for choice in itertools.product(*options):
        total = [sum(col, Fraction(0)) % 1 for col in zip(*fixed, *(sig for sig, _ in choice))]
        if all(x == 0 for x in total):
            targets = dict(local_data.targets)
            for p, (_, (lam, mu)) in zip(free, choice):
                targets[p] = Target(lam, mu, 1)
            return replace(local_data, S=prime_set(S), targets=targets)
    raise VerticalConditionFailed(
        "no choice of local points makes every linear factor's invariants sum to zero",
        undecided=bool(free),
    )


# rescaling -----------------------------------------------------------------------


def _prime_in_progression(P: int, start: int, avoid) -> int:
    k = max(1, -(-(start - 1) // P))
    while True:
        q = 1 + k * P
        if q not in avoid and is_prime(q):
            return q
        k += 1


def _nearest_prime_in_progression(P: int, target: int, avoid) -> int:
    k0 = max(1, (target - 1) // P)
    for step in range(0, 1 << 30):
        for k in (k0 + step, k0 - step - 1):
            q = 1 + k * P
            if k >= 1 and q not in avoid and is_prime(q):
                return q
    raise InternalInconsistency("no prime in progression")  # pragma: no cover


def _choose_rho(lam, mu, d, P, T, real_target, tol, avoid):
    """rho = A/B with A, B primes = 1 mod P such that T(lam, mu)/rho^d is within tol of real_target."""
    u0, v0 = real_target
    start = P + 1
    for _ in range(200):
        B = _prime_in_progression(P, start, avoid)
        A = _nearest_prime_in_progression(P, integer_nth_root(math.floor(lam * B**d), d), avoid)
        rho = Fraction(A, B)
        u, v = T.apply(lam / rho**d, mu / rho**d)
        if max(abs(u - u0), abs(v - v0)) <= tol:
            return A, B
        start = 4 * B
    raise InternalInconsistency("could not meet the real tolerance by rescaling")


# external norm solver hook -----------------------------------------------------


def _external_norm(command: str, factor: Factor, value: Fraction):
    """Run the external solver; returns audited coordinates or None."""
    args = [
        tok.format(field=factor.field_text, value=rational_str(value), degree=factor.field.degree)
        for tok in shlex.split(command)
    ]
    try:
        out = subprocess.run(args, capture_output=True, text=True, timeout=600, check=True).stdout
        coords = tuple(as_rational(tok) for tok in out.split())
    except (OSError, subprocess.SubprocessError, ValueError):
        return None
    if factor.field.poly is None or len(coords) != factor.field.degree:
        return None
    if not verify_norm_value(factor.field.degree, factor.field, coords, value):
        return None
    return coords


# the driver -------------------------------------------------------------------------


def _claim(kind: str, step: str | None = None, **data) -> dict:
    out = {"kind": kind}
    if step is not None:
        out["step"] = step
    for k, v in data.items():
        out[k] = rational_str(v) if isinstance(v, Fraction) else v
    return out


def _check_user_targets(instance: Instance, local_data: LocalData) -> None:
    for p, t in sorted(local_data.targets.items()):
        if _is_degenerate(instance, t.lam, t.mu):
            raise DegenerateTarget(f"target at {p} lies on a degenerate line")
        if not check_local(instance, p, (t.lam, t.mu)):
            raise LocalObstruction(p, "the supplied target is not a local point")


def solve(instance: Instance, local_data: LocalData, config: PipelineConfig = PipelineConfig()) -> SolutionCertificate:
    if not instance.factors:
        raise ValueError("the instance has no factors")
    _check_user_targets(instance, local_data)
    if local_data.real_target is not None:
        if not check_local(instance, REAL, local_data.real_target):
            raise RealObstruction("the real target is not a local point")
        real_candidates = [local_data.real_target]
    else:
        real_candidates = _real_candidates(instance)
        if not real_candidates:
            raise RealObstruction("no real point has every factor value a local norm")
    failure = None
    for real_target in real_candidates:
        data = replace(local_data, real_target=real_target)
        norm_inst, norm_data, T = normalize_real_target(instance, data)
        try:
            norm_data = _complete_local_data(norm_inst, norm_data, config.local_radius)
            break
        except VerticalConditionFailed as exc:
            failure = exc
    else:
        raise failure
    S = norm_data.S
    precisions = {
        p: max(t.precision, continuity_requirement(norm_inst, p, t.lam, t.mu)) for p, t in norm_data.targets.items()
    }
    # mu/lambda < 1/C keeps the rescaled point within the normalized tolerance
    C = max(norm_data.C, Fraction(2) / norm_data.real_tolerance)
    roots = norm_inst.distinct_roots()

    targets = {p: (t.lam, t.mu) for p, t in norm_data.targets.items()}
    result = prop1_pairs(S, targets, C, roots, precisions, config.search)
    lam, mu = result.lam, result.mu
    prime_of = {e: p for e, (p, _) in zip(roots, result.assignments)}
    orig_roots = instance.distinct_roots()
    primes = [
        {"e": e0, "e_normalized": e, "p": prime_of[e], "unit": (lam - e * mu) / prime_of[e]}
        for e0, e in zip(orig_roots, roots)
    ]

    transcript = []
    values = [f.value(lam, mu) for f in norm_inst.factors]
    for i, (f, value) in enumerate(zip(norm_inst.factors, values)):
        # (i) closeness on S gives vanishing invariants there
        for place in (REAL,) + S:
            inv = place_invariant(f.field, value, place)
            if inv != 0:
                raise InternalInconsistency(f"factor {i}: invariant {inv} at {place} after approximation")
            transcript.append(_claim("local_invariant", "i", factor=i, place=place, value=value, invariant="0"))
    for i, (f, value) in enumerate(zip(norm_inst.factors, values)):
        own = sorted({prime_of[e] for e in f.distinct_roots()})
        # (ii) away from S and the new primes the value is a unit in an unramified extension
        transcript.append(
            _claim("unit_support", "ii", factor=i, value=value, primes=list(S) + own, ramified=list(f.field.ramified_primes))
        )
        # (iii) reciprocity pins the invariant at each new prime
        for e in f.distinct_roots():
            p = prime_of[e]
            others = [REAL] + list(S) + [q for q in own if q != p]
            derived = -sum((place_invariant(f.field, value, v) for v in others), Fraction(0)) % 1
            direct = place_invariant(f.field, value, p)
            if derived != direct or direct != 0:
                raise InternalInconsistency(f"factor {i}: reciprocity check failed at {p}")
            transcript.append(_claim("reciprocity", "iii", factor=i, prime=p, value=value, invariant=derived))
            splits = splits_completely(f.field, p)
            if f.multiplicity(e) == 1 and len(own) == 1 and not splits:
                raise InternalInconsistency(f"factor {i}: p = {p} has invariant 0 but does not split")
            transcript.append(_claim("splits", "iii", factor=i, prime=p, splits=splits, required=f.multiplicity(e) == 1 and len(own) == 1))
        # (iv) all local invariants vanish, so the value is a global norm
        transcript.append(_claim("global_norm", "iv", factor=i, value=value))

    # (vi) rescale by rho^d: rho = 1 mod p^k on S, lambda / rho^d close to 1
    u_pre, v_pre = T.apply(lam, mu)
    moduli = {p: 1 for p in S}
    for p, t in local_data.targets.items():
        lowest = min([0] + [valuation(x, p) for x in (u_pre, v_pre) if x != 0])
        moduli[p] = max(1, t.precision - lowest)
    P = math.prod(p**k for p, k in moduli.items())
    d = instance.d
    avoid = set(prime_of.values())
    A, B = _choose_rho(lam, mu, d, P, T, real_target, data.real_tolerance, avoid)
    rho = Fraction(A, B)
    lam2, mu2 = lam / rho**d, mu / rho**d
    u, v = T.apply(lam2, mu2)

    # (v) norm coordinates for the rescaled values
    hints = set(S) | avoid | {A, B}
    coordinates = []
    for i, (f, f_orig, value) in enumerate(zip(norm_inst.factors, instance.factors, values)):
        K = f.field
        scale = rho ** -(d * f.total_degree // K.degree)
        final_value = f_orig.value(u, v)
        coords, status = None, DELEGATED
        if K.degree == 1:
            coords, status = (final_value,), "exact"
        elif K.degree == 2:
            a = K.quadratic_radicand()
            sol = solve_norm(QuadraticNormEquation(a, value), config.norm, hints)
            if sol is None:
                raise InternalInconsistency(f"factor {i}: Hasse test failed on a value with vanishing invariants")
            coords, status = (sol.x * scale, sol.y * scale), "exact"
        elif config.external_norm_solver:
            coords = _external_norm(config.external_norm_solver, f_orig, final_value)
            status = "external" if coords is not None else DELEGATED
        coordinates.append(coords)
        transcript.append(_claim("norm_solution", "v", factor=i, status=status))

    transcript.append(
        _claim(
            "scaling",
            "vi",
            rho=rho,
            d=d,
            moduli={str(p): k for p, k in sorted(moduli.items())},
            pre_point=[rational_str(lam), rational_str(mu)],
            point=[rational_str(lam2), rational_str(mu2)],
        )
    )
    for p, t in sorted(local_data.targets.items()):
        attained = min(valuation(u - t.lam, p), valuation(v - t.mu, p))
        transcript.append(
            _claim("approximation", place=p, precision=t.precision, attained="inf" if attained == math.inf else attained)
        )
    dist = max(abs(u - real_target[0]), abs(v - real_target[1]))
    transcript.append(
        _claim(
            "real_approximation",
            target=[rational_str(x) for x in real_target],
            tolerance=data.real_tolerance,
            distance=dist,
        )
    )
    for e0, e in zip(orig_roots, roots):
        occurrences = [
            [i, j, r.m] for i, f in enumerate(instance.factors) for j, r in enumerate(f.roots) if r.e == e0
        ]
        if len(occurrences) > 1 or occurrences[0][2] > 1:
            transcript.append(_claim("shared_prime", root=e0, prime=prime_of[e], occurrences=occurrences))

    cert = SolutionCertificate(
        point=(u, v),
        coordinates=coordinates,
        primes=primes,
        transcript=transcript,
        S=S,
        matrix=T.matrix,
        real_target=real_target,
        real_tolerance=data.real_tolerance,
        rho=(A, B, d),
        pre_point=(lam, mu),
    )
    report = verify_certificate(instance, local_data, cert)
    if not report.ok:
        raise InternalInconsistency("; ".join(report.reasons))
    return cert


# verification ------------------------------------------------------------------------


def _hints(cert: SolutionCertificate) -> set:
    return set(cert.S) | {r["p"] for r in cert.primes} | {cert.rho[0], cert.rho[1]}


def _is_global_norm(K: CyclicExtension, value: Fraction, hints) -> bool:
    a = K.quadratic_radicand()
    if a is not None:
        return global_norm_test(QuadraticNormEquation(a, value), hints=hints)
    places = [REAL] + sorted(set(support(value, hints=hints)) | set(K.ramified_primes))
    return all(place_invariant(K, value, v) == 0 for v in places)


def verify_certificate(instance: Instance, local_data: LocalData, cert: SolutionCertificate) -> VerifyReport:
    """Re-check a certificate from scratch; the report lists every failure."""
    report = VerifyReport()
    try:
        _verify(instance, local_data, cert, report)
    except (ArithmeticError, KeyError, IndexError, TypeError, ValueError) as exc:
        report.fail(f"malformed certificate: {exc}")
    return report


def _verify(instance: Instance, local_data: LocalData, cert: SolutionCertificate, report: VerifyReport) -> None:
    u, v = cert.point
    T = ChangeOfBasis(cert.matrix)
    if T.det == 0:
        report.fail("normalization matrix is singular")
        return
    if T.apply(Fraction(1), Fraction(0)) != tuple(cert.real_target):
        report.fail("normalization does not send (1, 0) to the real target")
    A, B, d = cert.rho
    if d != instance.d:
        report.fail(f"d = {d}, expected {instance.d}")
    if not (is_prime(A) and is_prime(B)):
        report.fail("rho numerator and denominator must be primes")
    rho = Fraction(A, B)
    lam, mu = cert.pre_point
    if T.apply(lam / rho**d, mu / rho**d) != (u, v):
        report.fail("point != T(pre_point / rho^d)")
    normalized = [(T.root_data(e)) for e in instance.distinct_roots()]

    # equations
    if len(cert.coordinates) != len(instance.factors):
        report.fail("one coordinate vector per factor expected")
        return
    for i, (f, coords) in enumerate(zip(instance.factors, cert.coordinates)):
        value = f.value(u, v)
        if value == 0:
            report.fail(f"factor {i}: value vanishes")
            continue
        if coords is not None and not verify_norm_value(f.field.degree, f.field, coords, value):
            report.fail(f"factor {i}: coordinates do not satisfy the norm equation")

    # approximation
    for p, t in sorted(local_data.targets.items()):
        if valuation(u - t.lam, p) < t.precision or valuation(v - t.mu, p) < t.precision:
            report.fail(f"approximation at {p} below precision {t.precision}")
    target = local_data.real_target or cert.real_target
    tol = local_data.real_tolerance if local_data.real_target else cert.real_tolerance
    if max(abs(u - target[0]), abs(v - target[1])) > tol:
        report.fail("real approximation outside tolerance")

    # primes
    S = tuple(cert.S)
    if not set(local_data.S) <= set(S):
        report.fail("certificate S does not contain the requested primes")
    if len(cert.primes) != len(normalized):
        report.fail("one prime per distinct root expected")
        return
    seen = set()
    for rec, e0, (_, e) in zip(cert.primes, instance.distinct_roots(), normalized):
        p = rec["p"]
        if rec["e"] != e0 or rec["e_normalized"] != e:
            report.fail(f"prime record for root {rational_str(e0)} has the wrong root")
        if not is_prime(p) or p in S:
            report.fail(f"p = {p} is not a prime outside S")
        if lam - e * mu != p * rec["unit"] or not support_within(rec["unit"], S):
            report.fail(f"lambda - e mu is not p times an S-unit for root {rational_str(e0)}")
        if p in seen:
            report.fail(f"prime {p} assigned to two distinct roots")
        seen.add(p)

    for claim in cert.transcript:
        _verify_claim(instance, cert, T, claim, report)


def _verify_claim(instance, cert, T, claim, report) -> None:
    kind = claim.get("kind")
    u, v = cert.point
    lam, mu = cert.pre_point
    if kind in ("local_invariant", "unit_support", "reciprocity", "splits", "global_norm", "norm_solution"):
        i = claim["factor"]
        f = instance.factors[i]
        pre_value = f.value(*T.apply(lam, mu))
        if "value" in claim and as_rational(claim["value"]) != pre_value:
            report.fail(f"{kind} claim for factor {i} records the wrong value")
            return
    if kind == "local_invariant":
        place = claim["place"]
        if place_invariant(f.field, pre_value, place) != as_rational(claim["invariant"]):
            report.fail(f"local invariant of factor {i} at {place} is not {claim['invariant']}")
    elif kind == "unit_support":
        if not support_within(pre_value, claim["primes"]):
            report.fail(f"factor {i}: value has support outside {claim['primes']}")
        if not set(f.field.ramified_primes) <= set(cert.S):
            report.fail(f"factor {i}: field ramifies outside S")
    elif kind == "reciprocity":
        p = claim["prime"]
        others = [REAL] + [q for q in support(pre_value, hints=_hints(cert)) if q != p]
        others += [q for q in f.field.ramified_primes if q not in others and q != p]
        derived = -sum((place_invariant(f.field, pre_value, w) for w in others), Fraction(0)) % 1
        if derived != as_rational(claim["invariant"]) or place_invariant(f.field, pre_value, p) != derived:
            report.fail(f"reciprocity deduction at {p} fails for factor {i}")
    elif kind == "splits":
        p = claim["prime"]
        if splits_completely(f.field, p) != claim["splits"] or (claim.get("required") and not claim["splits"]):
            report.fail(f"splitting claim for p = {p} in factor {i} fails")
    elif kind == "global_norm":
        if not _is_global_norm(f.field, pre_value, _hints(cert)):
            report.fail(f"factor {i}: value is not a global norm")
    elif kind == "norm_solution":
        delegated = cert.coordinates[i] is None
        if delegated != (claim["status"] == DELEGATED):
            report.fail(f"factor {i}: norm status does not match the coordinates")
    elif kind == "scaling":
        rho = as_rational(claim["rho"])
        A, B, d = cert.rho
        if rho != Fraction(A, B) or claim["d"] != d:
            report.fail("scaling claim disagrees with rho")
        for p, k in claim["moduli"].items():
            if valuation(rho - 1, int(p)) < k:
                report.fail(f"rho is not 1 mod {p}^{k}")
        if set(int(p) for p in claim["moduli"]) != set(cert.S):
            report.fail("scaling moduli must cover S")
        if [as_rational(x) for x in claim["pre_point"]] != [lam, mu]:
            report.fail("scaling claim has the wrong pre-point")
        if [as_rational(x) for x in claim["point"]] != [lam / rho**d, mu / rho**d]:
            report.fail("scaling claim has the wrong point")
    elif kind == "approximation":
        p = claim["place"]
        attained = claim["attained"]
        attained = math.inf if attained == "inf" else attained
        if attained < claim["precision"]:
            report.fail(f"approximation claim at {p} below precision")
    elif kind == "real_approximation":
        target = [as_rational(x) for x in claim["target"]]
        dist = max(abs(u - target[0]), abs(v - target[1]))
        if dist != as_rational(claim["distance"]) or dist > as_rational(claim["tolerance"]):
            report.fail("real approximation claim fails")
    elif kind == "shared_prime":
        p = claim["prime"]
        e = as_rational(claim["root"])
        for i, j, m in claim["occurrences"]:
            r = instance.factors[i].roots[j]
            if r.e != e or r.m != m:
                report.fail(f"shared prime claim lists the wrong root at ({i}, {j})")
        if valuation(u - e * v, p) != 1:
            report.fail(f"val_{p}(u - {rational_str(e)} v) != 1")
    else:
        report.fail(f"unknown claim kind {kind!r}")


def vertical_invariant_vanishing(instance: Instance, cert: SolutionCertificate) -> bool:
    """Every factor value has invariant 0 at every place of its support, the
    ramified primes and the real place."""
    u, v = cert.point
    hints = _hints(cert)
    for f in instance.factors:
        value = f.value(u, v)
        if value == 0:
            return False
        places = [REAL] + sorted(set(support(value, hints=hints)) | set(f.field.ramified_primes))
        if any(place_invariant(f.field, value, w) != 0 for w in places):
            return False
    return True


# file formats ---------------------------------------------------------------------------


def parse_factor(data: dict) -> Factor:
    text = data["field"]
    if isinstance(text, int):
        K, text = quadratic_field(text), f"quad:{text}"
    else:
        K = parse_field(str(text))
    if data.get("poly") is not None:
        K = replace(K, poly=tuple(as_rational(c) for c in data["poly"]))
    roots = tuple(Root(as_rational(r["e"]), int(r.get("m", 1))) for r in data["roots"])
    return Factor(K, as_rational(data["b"]), roots, str(text))


def parse_problem(data: dict) -> tuple[Instance, LocalData]:
    factors = tuple(parse_factor(f) for f in data["factors"])
    targets = {
        int(p): Target(as_rational(t["lambda"]), as_rational(t["mu"]), int(t.get("precision", 1)))
        for p, t in data.get("targets", {}).items()
    }
    real = data.get("real_target")
    local = LocalData(
        S=tuple(int(p) for p in data.get("S", ())),
        targets=targets,
        real_target=tuple(as_rational(x) for x in real) if real is not None else None,
        real_tolerance=as_rational(data.get("real_tolerance", "1")),
        C=as_rational(data.get("C", "0")),
    )
    return Instance(factors), local


def load_problem(path) -> tuple[Instance, LocalData]:
    return parse_problem(json.loads(Path(path).read_text(encoding="utf-8")))


def problem_to_json(instance: Instance, local_data: LocalData) -> dict:
    rs = rational_str
    out = {
        "factors": [
            {
                "field": f.field_text,
                "b": rs(f.b),
                "roots": [{"e": rs(r.e), "m": r.m} for r in f.roots],
                **({"poly": [rs(c) for c in f.field.poly]} if f.field.poly is not None else {}),
            }
            for f in instance.factors
        ],
        "S": list(local_data.S),
        "targets": {
            str(p): {"lambda": rs(t.lam), "mu": rs(t.mu), "precision": t.precision}
            for p, t in sorted(local_data.targets.items())
        },
        "real_tolerance": rs(local_data.real_tolerance),
        "C": rs(local_data.C),
    }
    if local_data.real_target is not None:
        out["real_target"] = [rs(x) for x in local_data.real_target]
    return out
