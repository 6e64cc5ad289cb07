"""Rational parameters tau with prescribed local behaviour.

``find_tau`` feeds the targets (tau_p, 1) through the prime-constellation
construction and reads off tau = lambda / mu. The result is a certificate that
``verify_tau`` re-checks from raw valuations, without touching the search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import as_rational, in_z_s, is_prime, prime_set, rational_str, support_within, valuation
from .characters import CyclicExtension, local_invariant, splits_completely
from .constellation import SearchConfig, prop1_pairs
from .errors import DenominatorOutsideS, InternalInconsistency, RamifiedOutsideS


@dataclass(frozen=True)
class TauCertificate:
    tau: Fraction
    assignments: tuple  # ((e_i, p_i), ...) for the input list, repeats kept
    S: tuple
    C: Fraction
    attained_precisions: dict
    augmented: bool = False
    augmentation: tuple = ()
    lam: Fraction | None = field(default=None, compare=False)
    mu: Fraction | None = field(default=None, compare=False)

    def prime_for(self, i: int) -> int:
        return self.assignments[i][1]

    def to_json(self) -> dict:
        return {
            "tau": rational_str(self.tau),
            "lambda": rational_str(self.lam) if self.lam is not None else None,
            "mu": rational_str(self.mu) if self.mu is not None else None,
            "assignments": [{"e": rational_str(e), "p": p} for e, p in self.assignments],
            "S": list(self.S),
            "C": rational_str(self.C),
            "attained_precisions": {
                str(p): (v if v != math.inf else "inf") for p, v in self.attained_precisions.items()
            },
            "augmented": self.augmented,
            "augmentation": [rational_str(x) for x in self.augmentation],
        }


@dataclass
class VerifyReport:
    reasons: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.reasons

    def __bool__(self):
        return self.ok

    def fail(self, reason: str) -> None:
        self.reasons.append(reason)


def continuity_precision(K: CyclicExtension, p: int, x: Fraction) -> int:
    """Precision k such that inv_p(K, y) = inv_p(K, x) whenever val_p(y - x) >= k."""
    f = 0
    if p in K.character.components:
        qe = K.character.components[p][0]
        f = valuation(qe, p)
    return valuation(x, p) + max(f, 1)


def _augment(e: list[Fraction], avoid) -> list[Fraction]:
    extra, k = [], 0
    while len(set(e) | set(extra)) < 2:
        if Fraction(k) not in e and Fraction(k) not in avoid:
            extra.append(Fraction(k))
        k += 1
    return extra


def find_tau(S, targets, C, e, precisions, config: SearchConfig = SearchConfig(), fields=()) -> TauCertificate:
    """tau close to every tau_p, tau > C, with fresh primes p_i such that
    val_{p_i}(tau - e_i) = 1 and val_p(tau - e_i) <= 0 away from S and p_i.

    ``fields`` lists cyclic extensions for which the approximation must be fine
    enough that the local invariants at S of tau - e_i equal those of tau_p - e_i.
    """
    S = prime_set(S)
    e = [as_rational(x) for x in e]
    for x in e:
        if not in_z_s(x, S):
            raise DenominatorOutsideS(f"denominator of {x} has primes outside S")
    targets = {p: as_rational(t) for p, t in targets.items()}
    extra = _augment(e, set(targets.values()))
    all_e = e + extra

    internal = {}
    for p in S:
        tp = targets[p]
        need = int(precisions.get(p, 0)) + max(0, -valuation(tp, p)) if tp else int(precisions.get(p, 0))
        loss = min(0, valuation(tp, p)) if tp else 0
        for x in all_e:
            if tp - x != 0:
                need = max(need, valuation(tp - x, p) + 1 - loss)
                for K in fields:
                    need = max(need, continuity_precision(K, p, tp - x) - loss)
        internal[p] = need

    result = prop1_pairs(S, {p: (targets[p], Fraction(1)) for p in S}, C, all_e, internal, config)
    tau = result.lam / result.mu
    assignments = tuple((x, p) for x, (p, _) in zip(e, result.assignments[: len(e)]))
    attained = {p: valuation(tau - targets[p], p) for p in S}
    cert = TauCertificate(
        tau=tau,
        assignments=assignments,
        S=S,
        C=as_rational(C),
        attained_precisions=attained,
        augmented=bool(extra),
        augmentation=tuple(extra),
        lam=result.lam,
        mu=result.mu,
    )
    for K in fields:
        if not set(K.ramified_primes) <= set(S):
            continue
        for i in range(len(e)):
            if not verify_splitting_property(cert, K, i, targets):
                raise InternalInconsistency(f"splitting property fails for {K} at index {i}")
    return cert


def verify_tau(cert: TauCertificate, e, S, targets, precisions) -> VerifyReport:
    """Re-derive the four approximation/valuation conditions from scratch."""
    report = VerifyReport()
    S = prime_set(S)
    e = [as_rational(x) for x in e]
    tau = as_rational(cert.tau)
    if [x for x, _ in cert.assignments] != e:
        report.fail("certificate e-list does not match the input")
        return report
    for p in S:
        n = int(precisions.get(p, 0))
        if valuation(tau - as_rational(targets[p]), p) < n:
            report.fail(f"(1) val_{p}(tau - tau_p) < {n}")
    if not tau > as_rational(cert.C):
        report.fail("(2) tau <= C")
    for x, p in cert.assignments:
        if not is_prime(p) or p in S:
            report.fail(f"p = {p} is not a prime outside S")
            continue
        diff = tau - x
        if diff == 0:
            report.fail(f"tau = e = {x}")
            continue
        # val_q(diff) > 0 only for q dividing the numerator
        if not support_within(Fraction(diff.numerator), S + (p,)):
            report.fail(f"(3) tau - {rational_str(x)} has positive valuation outside S and {p}")
        if valuation(diff, p) != 1:
            report.fail(f"(4) val_{p}(tau - {rational_str(x)}) != 1")
    pairs = cert.assignments
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            if (pairs[i][0] == pairs[j][0]) != (pairs[i][1] == pairs[j][1]):
                report.fail(f"p_i = p_j iff e_i = e_j fails at ({i}, {j})")
    return report


def satisfies_h1(cert: TauCertificate) -> bool:
    """The stricter condition val_p(tau - e_i) = 0 for every p outside S and p_i."""
    return all(support_within(cert.tau - x, cert.S + (p,)) for x, p in cert.assignments)


def splitting_constant(K: CyclicExtension, S, targets, e_i) -> Fraction:
    """c = sum over p in S of inv_p(K, tau_p - e_i)."""
    total = Fraction(0)
    for p in S:
        total += local_invariant(K, as_rational(targets[p]) - as_rational(e_i), p)
    return total - math.floor(total)


def verify_splitting_property(cert: TauCertificate, K: CyclicExtension, i: int, targets) -> bool:
    """inv_{p_i}(K, tau - e_i) = -c, and p_i splits completely when c = 0."""
    if not set(K.ramified_primes) <= set(cert.S):
        raise RamifiedOutsideS(f"{K} ramifies outside S = {cert.S}")
    e_i, p_i = cert.assignments[i]
    c = splitting_constant(K, cert.S, targets, e_i)
    inv = local_invariant(K, cert.tau - e_i, p_i)
    if inv != (-c) % 1:
        return False
    if c == 0 and not splits_completely(K, p_i):
        return False
    return True
