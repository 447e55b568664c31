import math
import random
from fractions import Fraction

import pytest
from sympy import primefactors

from powres.arith import is_prime, primes_up_to
from powres.construct import (
    Branch,
    PipelineConfig,
    Statement,
    build_cubic_poly,
    build_quadratic_poly,
    build_quartic_poly,
    collect_primes,
    count_report,
    floor_power,
    nagell_witnesses,
    poly_substitute,
    prime_residue_count,
    root_count,
    run_pipeline,
)
from powres.errors import DomainError
from powres.reciprocity import euler_oracle, legendre, q_star
from powres.represent import QuadraticForm, represent_cubic, represent_quartic


def cubic_f0(L, M, x):
    return M * (x**3 - 9 * x) + L * (x * x - 1)


def quartic_f0(L, M, x):
    return M * (x**4 - 6 * x * x + 1) + 2 * L * (x**3 - x)


def v(n, q):
    e = 0
    while n % q == 0:
        n //= q
        e += 1
    return e


# --- polynomial construction ---------------------------------------------


def test_build_cubic_p13():
    poly = build_cubic_poly(represent_cubic(13))
    assert poly.base_coeffs == (-5, -9, 5, 1)  # x^3 + 5x^2 - 9x - 5
    assert (poly.stride, poly.n0, poly.removed) == (32, 0, 1)
    assert all(poly.f(n) == cubic_f0(5, 1, 32 * n) for n in range(20))


def test_build_cubic_p7():
    poly = build_cubic_poly(represent_cubic(7))
    assert poly.f0(0) == -1
    assert (poly.n0, poly.removed) == (0, 1)


def test_cubic_f0_at_one_is_minus_8M():
    for p in primes_up_to(3000):
        if p % 3 == 1:
            rep = represent_cubic(p)
            assert build_cubic_poly(rep).f0(1) == -8 * rep.M


def test_build_quartic_p13():
    poly = build_quartic_poly(represent_quartic(13))
    value = quartic_f0(3, 1, 72)
    assert poly.n0 == 72
    assert poly.removed == 2 ** v(value, 2) * 3 ** v(value, 3)
    assert poly.f0(0) == 1


def test_build_quartic_p37():
    poly = build_quartic_poly(represent_quartic(37))
    value = quartic_f0(1, 3, 72)
    assert poly.n0 == 72
    assert v(value, 3) <= 1 and v(value, 2) <= 2
    assert poly.removed == 2 ** v(value, 2) * 3 ** v(value, 3)
    assert poly.f0(0) == 3


def test_quartic_n0_cases():
    seen = set()
    for p in primes_up_to(200000):
        if p % 4 != 1:
            continue
        rep = represent_quartic(p)
        poly = build_quartic_poly(rep)
        m2 = 2 if rep.M % 8 == 0 else 0
        m3 = 2 if rep.M % 9 == 0 else 0
        assert poly.n0 % 8 == m2 and poly.n0 % 9 == m3 and 0 < poly.n0 <= 72
        seen.add((m2, m3))
        if len(seen) == 4:
            break
    assert seen == {(0, 0), (0, 2), (2, 0), (2, 2)}


def test_cubic_n0_equal_one_occurs():
    # n0 = 1 is needed when 32 | L
    p = next(p for p in primes_up_to(10**6) if p % 3 == 1 and represent_cubic(p).L % 32 == 0)
    poly = build_cubic_poly(represent_cubic(p))
    assert poly.n0 == 1
    assert all(poly.f(n) % 2 for n in range(50))


def test_build_quadratic_examples():
    shift = build_quadratic_poly(13, Branch.SHIFT)
    assert shift.base_coeffs == (9 - 13, 6, 1)
    assert shift.f(1) == 3 and (shift.stride, shift.n0, shift.removed) == (1, 0, 1)

    form = build_quadratic_poly(23, Branch.FORM)
    assert form.source == QuadraticForm(2, 1, 3)
    assert form.base_coeffs == (3, 1, 2)
    assert (form.stride, form.n0, form.removed) == (4, 0, 1)

    eff = build_quadratic_poly(23, Branch.EFFECTIVE)
    assert eff.base_coeffs == (6, 1, 1)
    assert eff.f0(0) == (1 - (-23)) // 4


def test_build_quadratic_domain():
    with pytest.raises(DomainError):
        build_quadratic_poly(23, Branch.SHIFT)
    with pytest.raises(DomainError):
        build_quadratic_poly(13, Branch.FORM)
    with pytest.raises(DomainError):
        build_quadratic_poly(13, Branch.CUBIC)


def test_form_branch_n0_search():
    seen = set()
    for p in primes_up_to(20000):
        if p % 4 == 3:
            poly = build_quadratic_poly(p, Branch.FORM)
            assert poly.f0(poly.n0) % 4
            assert all(poly.f0(x) % 4 == 0 for x in range(poly.n0))
            seen.add(poly.n0)
    assert seen <= {0, 1, 2}


def test_effective_branch_parity_depends_on_p_mod_8():
    # (1 + p)/4 is odd for p = 3 mod 8 and even for p = 7 mod 8
    assert all(build_quadratic_poly(11, "effective").f(n) % 2 == 1 for n in range(30))
    assert all(build_quadratic_poly(7, "effective").f(n) % 2 == 0 for n in range(30))


def test_poly_substitute_matches_evaluation():
    rng = random.Random(3)
    for _ in range(50):
        coeffs = [rng.randrange(-100, 100) for _ in range(rng.randrange(1, 6))]
        s, n0 = rng.randrange(1, 100), rng.randrange(0, 100)
        sub = poly_substitute(coeffs, s, n0)
        for x in range(-5, 6):
            assert sum(c * x**i for i, c in enumerate(sub)) == sum(c * (s * x + n0) ** i for i, c in enumerate(coeffs))


# --- root counts -----------------------------------------------------------


def test_root_count_examples():
    cubic = build_cubic_poly(represent_cubic(13))
    assert root_count(cubic, 2) == 0
    assert all(root_count(cubic, q) <= 3 for q in primes_up_to(200)[2:])
    shift = build_quadratic_poly(13, "shift")
    assert all(root_count(shift, q) <= 2 for q in primes_up_to(200))
    # f(x) = (x+3)^2 - 13 mod 3 = x^2 - 1: roots 1, 2
    assert root_count(shift, 3) == 2


# --- pipeline ---------------------------------------------------------------


def test_config_validation():
    with pytest.raises(DomainError):
        PipelineConfig(11, 3)
    with pytest.raises(DomainError):
        PipelineConfig(13, 4, enum_cap=0)
    with pytest.raises(DomainError):
        PipelineConfig(12, 2)
    with pytest.raises(DomainError):
        PipelineConfig(13, 2, epsilon="0.6")
    with pytest.raises(DomainError):
        PipelineConfig(13, 2, branch="form")
    assert PipelineConfig(13, 3, "0.5").epsilon == Fraction(1, 2)


def test_config_defaults():
    cfg = PipelineConfig(10**6 + 33, 3, Fraction(1, 2))
    assert cfg.cap(Branch.CUBIC) == floor_power(10**6 + 33, Fraction(1, 8))
    assert cfg.z(Branch.CUBIC) == 1
    assert PipelineConfig(13, 3, enum_cap=10**9).cap(Branch.CUBIC) == 10**6
    assert PipelineConfig(13, 3, enum_cap=10**9, ceiling=50).cap(Branch.CUBIC) == 50
    assert floor_power(10**6, Fraction(1, 2)) == 1000
    assert floor_power(10**6 - 1, Fraction(1, 2)) == 999


def test_cubic_pipeline_p13_matches_factorization():
    certs = run_pipeline(PipelineConfig(13, 3, Fraction(1, 2), enum_cap=4, rough_z=1))
    expected = set()
    for n in range(1, 5):
        expected |= set(primefactors(cubic_f0(5, 1, 32 * n)))
    expected -= {2, 3, 5, 13}
    assert [c.q for c in certs] == sorted(expected)
    for c in certs:
        assert c.statement is Statement.Q_RESIDUE
        assert euler_oracle(c.q, 13, 3)
        # L/3M = ((-m)^3 - 9(-m)) / (3((-m)^2 - 1)) mod q
        q, x = c.q, -c.m
        assert 5 * pow(3, -1, q) % q == (x**3 - 9 * x) * pow(3 * (x * x - 1), -1, q) % q


def test_shift_pipeline_p13():
    certs = run_pipeline(PipelineConfig(13, 2, Fraction(1, 2), enum_cap=3, rough_z=1))
    qs = [c.q for c in certs]
    assert qs == [3, 23]
    assert legendre(3, 13) == 1 and pow(3, 6, 13) == 1
    assert certs[0].n == 1 and certs[0].value == 3


def test_quartic_pipeline_p37():
    certs = run_pipeline(PipelineConfig(37, 4, Fraction(1, 2), enum_cap=6, rough_z=1))
    assert certs
    for c in certs:
        assert c.statement is Statement.Q_STAR_RESIDUE
        assert euler_oracle(q_star(c.q) % 37, 37, 4)
        assert c.value == quartic_f0(1, 3, c.m) and c.value % c.q == 0


def test_pipeline_exclusions_and_dedup():
    for p in (1009, 100003, 99991):
        for k in (2, 3, 4):
            if (p - 1) % k:
                continue
            certs = run_pipeline(PipelineConfig(p, k, Fraction(1, 2), enum_cap=60, rough_z=1))
            qs = [c.q for c in certs]
            assert qs == sorted(set(qs))
            assert 2 not in qs and p not in qs
            if k == 3:
                rep = represent_cubic(p)
                assert all((6 * rep.L * rep.M) % q for q in qs)
            if k == 4:
                rep = represent_quartic(p)
                assert all((2 * rep.L * rep.M) % q for q in qs)
            for c in certs:
                assert c.m == _poly_for(c).stride * c.n + _poly_for(c).n0
                assert c.value == _poly_for(c).f0(c.m)


def _poly_for(cert):
    if cert.k == 3:
        return build_cubic_poly(cert.source)
    if cert.k == 4:
        return build_quartic_poly(cert.source)
    return build_quadratic_poly(cert.p, cert.branch)


def test_least_n_is_recorded():
    cfg = PipelineConfig(1009, 3, Fraction(1, 2), enum_cap=40, rough_z=1)
    poly = build_cubic_poly(represent_cubic(1009))
    for c in run_pipeline(cfg):
        first = next(n for n in range(1, 41) if poly.f(n) % c.q == 0)
        assert c.n == first


def test_roughness_filter():
    poly = build_cubic_poly(represent_cubic(1009))
    z = 50
    found = collect_primes(poly, 200, z)
    small = primes_up_to(z - 1)
    rough_ns = {n for n in range(1, 201) if all(poly.f(n) % d for d in small)}
    expected = {}
    for n in sorted(rough_ns):
        for q in primefactors(abs(poly.f(n))):
            expected.setdefault(q, n)
    assert found == expected
    assert min(found) >= z


def test_quadratic_discriminant_property():
    for p in (10007, 10009, 99991, 100003):
        for c in run_pipeline(PipelineConfig(p, 2, Fraction(1, 2), enum_cap=200, rough_z=1)):
            if p % 4 == 1:
                assert legendre(p, c.q) == 1
            else:
                assert legendre(-p, c.q) == 1
            assert c.witness_x**2 % c.q == c.source.discriminant % c.q


def test_p3_mod_4_merges_form_and_effective():
    p = 10007
    certs = run_pipeline(PipelineConfig(p, 2, Fraction(1, 2), enum_cap=30, rough_z=1))
    form_poly = build_quadratic_poly(p, "form")
    form = {q for q in collect_primes(form_poly, 30) if q != 2 and q != p and form_poly.source.a % q}
    eff = {q for q in collect_primes(build_quadratic_poly(p, "effective"), 30) if q != 2 and q != p}
    assert {c.q for c in certs} == form | eff
    assert {c.branch for c in certs} == {Branch.FORM, Branch.EFFECTIVE}


def test_count_report():
    cfg = PipelineConfig(13, 3)
    rep = count_report([], cfg)
    assert rep.count == 0 and not rep.threshold_met and rep.min_q is None

    cfg = PipelineConfig(1000003, 3, Fraction(1, 2))
    assert abs(count_report([], cfg).threshold - 1000003 ** (1 / 60)) < 1e-12
    assert abs(10 ** 0.1 - 1.2589) < 1e-4

    p = 1000003
    count = prime_residue_count(p, 2)
    assert count**9 > p
    assert 4.6 < p ** (1 / 9) < 4.7


def test_prime_residue_count_matches_legendre():
    for p in (101, 1009, 10007):
        direct = sum(1 for q in primes_up_to(p - 1) if legendre(q, p) == 1)
        assert prime_residue_count(p, 2) == direct
    p = 2**31 + 11
    assert is_prime(p)
    assert prime_residue_count(p, 2, limit=3000) == sum(1 for q in primes_up_to(2999) if legendre(q, p) == 1)


def test_nagell_witnesses():
    assert nagell_witnesses(represent_cubic(7)) == []
    for p in primes_up_to(5000):
        if p % 3 == 1 and p > 7:
            rows = nagell_witnesses(represent_cubic(p))
            assert rows and all(cube and bound for _, cube, bound in rows)


def test_default_pipeline_runs_for_large_prime():
    p = 1000000007
    for k in (2, 3):
        if (p - 1) % k == 0:
            certs = run_pipeline(PipelineConfig(p, k, Fraction(1, 3)))
            assert all(c.criterion_ok and c.oracle_ok for c in certs)
    assert math.isqrt(p) ** 2 != p
