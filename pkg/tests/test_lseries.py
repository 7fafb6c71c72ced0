from fractions import Fraction

import pytest

from klsym.epsilon import constant_c_closed
from klsym.errors import (DomainError, ResourceLimitError, VerificationError)
from klsym.lseries import (LPolynomial, SumCache, default_guard,
                           extract_functional_constant, lambda_coefficient,
                           power_sum, purity_check, reconstruct_from_lambdas,
                           reconstruct_lpolynomial)


@pytest.fixture(scope="module")
def cache():
    return SumCache()


def test_power_sum_hand_values(cache):
    assert power_sum(3, 1, 1, cache=cache) == -1
    assert power_sum(3, 2, 1, cache=cache) == -1
    assert power_sum(5, 3, 1, cache=cache) == 24


def test_power_sum_brute_force_oracle(cache):
    # independent path: per-x Kloosterman sums and the explicit h_k recurrence
    from klsym.char_sums import kloosterman_sum, sym_power_trace
    from klsym.cyclotomic import CycInt
    from klsym.finite_field import build_field

    for (p, j) in ((3, 1), (3, 2), (5, 1), (7, 1), (5, 2)):
        F = build_field(p, j)
        for k in range(1, 7):
            brute = CycInt.zero(p)
            for x in F.units():
                a = -kloosterman_sum(F, x)
                brute = brute + sym_power_trace(a, F.q, k)
            assert power_sum(p, k, j, cache=cache) == brute.as_rational_integer()


def test_k1_power_sums_are_minus_one(cache):
    # sum over x of Kl(x) is 1 in every field, so S_j = -1 for k = 1
    for (p, j) in ((3, 3), (5, 2), (7, 1), (11, 1)):
        assert power_sum(p, 1, j, cache=cache) == -1


def test_lambda_hand_values(cache):
    assert lambda_coefficient(3, 1, 1, cache=cache) == 0
    assert lambda_coefficient(3, 2, 1, cache=cache) == 0
    assert lambda_coefficient(5, 3, 1, cache=cache) == 25


def test_reconstruction_examples(cache):
    assert reconstruct_lpolynomial(3, 1, cache=cache).poly.coeffs == (1,)
    r = reconstruct_lpolynomial(5, 3, cache=cache)
    assert r.poly.coeffs == (1, 25)
    assert r.guard == 2 and r.lambdas[0] == 25
    assert reconstruct_lpolynomial(7, 2, cache=cache).poly.coeffs == (1,)


def test_galois_twisted_character_gives_same_sums(cache):
    # replacing psi by psi(t *) leaves every S_j unchanged
    for t in range(2, 5):
        twisted = SumCache()
        for j in (1, 2):
            base = [power_sum(5, k, j, cache=cache) for k in range(1, 5)]
            alt = [power_sum(5, k, j, cache=twisted, character_scale=t)
                   for k in range(1, 5)]
            assert base == alt


def test_worker_split_is_exact():
    serial = SumCache(workers=1)
    parallel = SumCache(workers=2)
    assert (serial.power_sums(7, 2, 6) == parallel.power_sums(7, 2, 6))
    assert (serial.power_sums(3, 4, 8) == parallel.power_sums(3, 4, 8))


def test_sum_cache_with_field_cache_dir(tmp_path):
    plain = SumCache()
    cached = SumCache(cache_dir=tmp_path)
    assert plain.power_sums(5, 2, 6) == cached.power_sums(5, 2, 6)
    reloaded = SumCache(cache_dir=tmp_path)  # second pass reads the cache
    assert plain.power_sums(5, 2, 6) == reloaded.power_sums(5, 2, 6)


def test_default_guard_rule():
    assert default_guard(3, 2) == 2
    assert default_guard(5, 3) == 2
    assert default_guard(13, 3) == 1
    assert default_guard(13, 4) == 0
    assert default_guard(47, 3) == 0


def test_budget_enforced():
    with pytest.raises(ResourceLimitError):
        reconstruct_lpolynomial(13, 11, guard=0, pair_budget=10**6)


def test_functional_constant_examples(cache):
    trivial = LPolynomial(p=5, k=1, delta=0, coeffs=(1,))
    c, residuals = extract_functional_constant(trivial)
    assert c == 1 and residuals == [0]
    poly = reconstruct_lpolynomial(5, 3, cache=cache).poly
    c, residuals = extract_functional_constant(poly)
    assert c == 25
    assert all(r == 0 for r in residuals)
    assert c == constant_c_closed(5, 3)


def test_purity_examples(cache):
    poly = reconstruct_lpolynomial(5, 3, cache=cache).poly
    report = purity_check(poly)
    assert report["moduli"] == [25.0]
    assert purity_check(LPolynomial(p=5, k=1, delta=0, coeffs=(1,)))["moduli"] == []
    impure = LPolynomial(p=5, k=3, delta=1, coeffs=(1, 1))
    with pytest.raises(VerificationError):
        purity_check(impure)


def test_lpolynomial_validation():
    with pytest.raises(VerificationError):
        LPolynomial(p=5, k=3, delta=1, coeffs=(2, 25)).validate()
    with pytest.raises(VerificationError):
        LPolynomial(p=5, k=3, delta=1, coeffs=(1, 24)).validate()
    LPolynomial(p=5, k=3, delta=1, coeffs=(1, -25)).validate()


def test_perturbed_lambda_trips_a_check(cache):
    result = reconstruct_lpolynomial(5, 3, cache=cache)
    delta, guard = result.poly.delta, result.guard
    lambdas = list(result.lambdas)
    for j in range(len(lambdas)):
        bad = list(lambdas)
        bad[j] += 1
        tripped = False
        try:
            poly = reconstruct_from_lambdas(5, 3, delta, bad, guard)
            extract_functional_constant(poly)
        except VerificationError:
            tripped = True
        assert tripped, f"perturbing Lambda_{j + 1} went unnoticed"


def test_perturbation_with_no_guard_is_still_caught(cache):
    # without guard coefficients the coefficient bounds or the functional
    # equation must flag the corruption
    result = reconstruct_lpolynomial(5, 3, cache=cache)
    bad = [result.lambdas[0] + 1]
    with pytest.raises(VerificationError):
        poly = reconstruct_from_lambdas(5, 3, 1, bad, 0)
        extract_functional_constant(poly)


def test_domain_guards(cache):
    with pytest.raises(DomainError):
        power_sum(5, -1, 1, cache=cache)
    with pytest.raises(DomainError):
        reconstruct_lpolynomial(5, 3, guard=-1, cache=cache)


def test_evaluate():
    poly = LPolynomial(p=5, k=3, delta=1, coeffs=(1, 25))
    assert poly.evaluate(Fraction(-1, 25)) == 0
