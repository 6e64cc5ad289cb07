import copy
import sys
from dataclasses import replace
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from normpencil.characters import parse_field, quadratic_field
from normpencil.constellation import SearchConfig
from normpencil.errors import DegenerateCandidate, LocalObstruction, RealObstruction
from normpencil.pipeline import (
    Factor,
    Instance,
    LocalData,
    PipelineConfig,
    Root,
    SolutionCertificate,
    Target,
    check_local,
    enlarge_s,
    normalize_real_target,
    parse_problem,
    problem_to_json,
    solve,
    verify_certificate,
    vertical_invariant_vanishing,
)

GAUSS = quadratic_field(-1)
CUBIC = replace(parse_field("chi:7:3=1/3"), poly=(Fraction(-1), Fraction(-2), Fraction(1), Fraction(1)))


def linear(K, b, *roots):
    return Factor(K, Fraction(b), tuple(Root(Fraction(e)) for e in roots))


def gaussian_pair():
    instance = Instance((linear(GAUSS, 1, 0), linear(GAUSS, 1, 1)))
    return instance, LocalData(S=(2,), targets={2: Target(Fraction(5), Fraction(1), 1)})


def pval(x, p):
    x = Fraction(x)
    return sympy.multiplicity(p, x.numerator) - sympy.multiplicity(p, x.denominator) if x else float("inf")


def check_solution(instance, local, cert):
    report = verify_certificate(instance, local, cert)
    assert report.ok, report.reasons
    assert vertical_invariant_vanishing(instance, cert)
    u, v = cert.point
    for f, coords in zip(instance.factors, cert.coordinates):
        value = f.value(u, v)
        assert value != 0
        if coords is not None and f.field.degree == 2:
            a = f.field.quadratic_radicand()
            assert coords[0] ** 2 - a * coords[1] ** 2 == value
    for p, t in local.targets.items():
        assert pval(u - t.lam, p) >= t.precision and pval(v - t.mu, p) >= t.precision
    if local.real_target is not None:
        u0, v0 = local.real_target
        assert max(abs(u - u0), abs(v - v0)) <= local.real_tolerance


# local conditions ----------------------------------------------------------------


def test_check_local_examples():
    instance = Instance((linear(GAUSS, 1, 0),))
    assert check_local(instance, 5, (5, 1))
    assert not check_local(instance, 3, (3, 1))
    assert check_local(instance, 3, (9, 1))
    with pytest.raises(DegenerateCandidate):
        check_local(instance, 3, (0, 1))


def test_normalization_examples():
    instance = Instance((linear(GAUSS, -1, 0),))
    inst2, data2, T = normalize_real_target(instance, LocalData(real_target=(-1, 0)))
    assert inst2.factors[0].b > 0 and T.apply(1, 0) == (-1, 0)
    with pytest.raises(RealObstruction):
        normalize_real_target(instance, LocalData(real_target=(1, 0)))
    ok = Instance((linear(GAUSS, 1, 0),))
    _, _, T = normalize_real_target(ok, LocalData())
    assert T.matrix == ((1, 0), (0, 1))


def test_enlarge_s_examples():
    data = enlarge_s(Instance((linear(quadratic_field(5), Fraction(1, 3), 0),)), LocalData(S=(2,)))
    assert {2, 3} <= set(data.S) and set(data.targets) == set(data.S)
    data = enlarge_s(Instance((linear(GAUSS, 1, 0),)), LocalData(S=(3,)))
    assert {2, 3} <= set(data.S)
    closed = enlarge_s(Instance((linear(GAUSS, 1, 0),)), data)
    assert closed.S == data.S and closed.targets == data.targets


# end to end ------------------------------------------------------------------------


def test_gaussian_pair():
    instance, local = gaussian_pair()
    cert = solve(instance, local)
    check_solution(instance, local, cert)
    assert all(r["p"] % 4 == 1 for r in cert.primes)
    assert [c["kind"] for c in cert.transcript].count("splits") == 2


def test_trivial_single_factor():
    instance = Instance((linear(GAUSS, 1, 0),))
    check_solution(instance, LocalData(), solve(instance, LocalData()))


def test_obstruction_at_three():
    # 21 u^2 is a norm at 2 (21 = 5 mod 8) but has invariant 1/2 at 3 for Q(i)
    instance = Instance((Factor(GAUSS, 21, (Root(Fraction(0), 2),)),))
    with pytest.raises(LocalObstruction) as info:
        solve(instance, LocalData())
    assert info.value.place == 3


def test_real_obstruction():
    instance = Instance((Factor(GAUSS, -1, (Root(Fraction(0), 2),)),))
    with pytest.raises(RealObstruction):
        solve(instance, LocalData())


def test_real_target_and_tolerance():
    instance = Instance((linear(GAUSS, 1, 0), linear(quadratic_field(2), -1, 3)))
    local = LocalData(real_target=(2, 1), real_tolerance=Fraction(1, 100), targets={5: Target(2, 1, 2)})
    check_solution(instance, local, solve(instance, local))


def test_factor_with_several_roots():
    instance = Instance((Factor(GAUSS, 1, (Root(Fraction(0)), Root(Fraction(1)))),))
    check_solution(instance, LocalData(), solve(instance, LocalData()))


def test_repeated_root_records_shared_prime():
    instance = Instance((Factor(GAUSS, 1, (Root(Fraction(1), 2),)), linear(GAUSS, 1, 1)))
    cert = solve(instance, LocalData())
    check_solution(instance, LocalData(), cert)
    shared = [c for c in cert.transcript if c["kind"] == "shared_prime"]
    assert shared and sorted(tuple(o[:2]) for o in shared[0]["occurrences"]) == [(0, 0), (1, 0)]


def test_cubic_factor_is_delegated():
    instance = Instance((linear(CUBIC, 1, 0), linear(GAUSS, 1, 2)))
    cert = solve(instance, LocalData())
    check_solution(instance, LocalData(), cert)
    assert cert.delegated == [0]


def test_external_solver_fills_cube_values(tmp_path):
    script = tmp_path / "cube_root.py"
    script.write_text(
        "import sys\n"
        "from fractions import Fraction\n"
        "c = Fraction(sys.argv[1])\n"
        "def root(n):\n"
        "    r = round(abs(n) ** (1 / 3))\n"
        "    r = next(x for x in range(max(r - 2, 0), r + 3) if x ** 3 == abs(n))\n"
        "    return r if n >= 0 else -r\n"
        "print(Fraction(root(c.numerator), root(c.denominator)), 0, 0)\n"
    )
    instance = Instance((Factor(CUBIC, 1, (Root(Fraction(0), 3),)),))
    config = PipelineConfig(external_norm_solver=f"{sys.executable} {script} {{value}}")
    cert = solve(instance, LocalData(), config)
    check_solution(instance, LocalData(), cert)
    assert cert.delegated == []
    assert any(c["kind"] == "norm_solution" and c["status"] == "external" for c in cert.transcript)


def test_external_solver_garbage_stays_delegated(tmp_path):
    script = tmp_path / "wrong.py"
    script.write_text("print(1, 2, 3)\n")
    instance = Instance((Factor(CUBIC, 1, (Root(Fraction(0), 3),)),))
    config = PipelineConfig(external_norm_solver=f"{sys.executable} {script}")
    cert = solve(instance, LocalData(), config)
    assert cert.delegated == [0]
    check_solution(instance, LocalData(), cert)


# certificate checking -------------------------------------------------------------


def test_perturbed_coordinate_is_flagged():
    instance, local = gaussian_pair()
    cert = solve(instance, local)
    x, y = cert.coordinates[0]
    bad = copy.deepcopy(cert)
    bad.coordinates[0] = (x + 1, y)
    report = verify_certificate(instance, local, bad)
    assert not report.ok and any("norm equation" in r for r in report.reasons)


def test_inert_prime_is_flagged():
    instance, local = gaussian_pair()
    cert = solve(instance, local)
    bad = copy.deepcopy(cert)
    for claim in bad.transcript:
        if claim["kind"] == "splits" and claim["factor"] == 0:
            claim["prime"] = 19
    report = verify_certificate(instance, local, bad)
    assert not report.ok and any("splitting" in r for r in report.reasons)


def test_json_round_trip():
    instance, local = gaussian_pair()
    cert = solve(instance, local)
    again = SolutionCertificate.from_json(cert.to_json())
    assert again.to_json() == cert.to_json()
    inst2, local2 = parse_problem(problem_to_json(instance, local))
    assert inst2 == instance and local2 == local


def test_vertical_invariants():
    instance, local = gaussian_pair()
    cert = solve(instance, local)
    three = Instance((linear(GAUSS, 3, 0),))
    fake = copy.deepcopy(cert)
    fake.point = (Fraction(1), Fraction(0))
    assert not vertical_invariant_vanishing(three, fake)
    assert vertical_invariant_vanishing(Instance(()), cert)


# the soundness property -------------------------------------------------------------

factor_st = st.tuples(
    st.sampled_from([-1, -2, 2, 5, -3, 3]),
    st.sampled_from([1, -1, 2, -2, 5, -5, 3, Fraction(1, 3)]),
    st.sampled_from([0, 1, 2, -1, Fraction(1, 2)]),
    st.integers(1, 2),
)


@given(st.lists(factor_st, min_size=1, max_size=2), st.sampled_from([None, (3, 1), (-1, 2)]))
@settings(max_examples=40, deadline=None)
def test_solve_is_sound(specs, real_target):
    instance = Instance(
        tuple(Factor(quadratic_field(a), Fraction(b), (Root(Fraction(e), m),)) for a, b, e, m in specs)
    )
    local = LocalData(real_target=real_target)
    try:
        cert = solve(instance, local, PipelineConfig(search=SearchConfig(max_radius=2000)))
    except (LocalObstruction, ValueError):
        return
    check_solution(instance, local, cert)
