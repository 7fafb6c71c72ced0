import pytest

from klsym.errors import DomainError
from klsym.finite_field import is_prime
from klsym.local_data import (Pair, TameLine, ZeroStalkModel, delta_degree,
                              h1c_degree, infinity_decomposition,
                              infinity_invariant_eigenvalues,
                              odd_tame_pair_counts)

ODD_PRIMES_97 = [p for p in range(3, 98) if is_prime(p)]


def test_delta_degree_values():
    assert delta_degree(11, 7) == 3
    assert delta_degree(7, 5) == 2
    assert delta_degree(3, 1) == 0
    assert delta_degree(5, 3) == 1
    assert delta_degree(3, 6) == 0
    assert delta_degree(13, 10) == 4
    # degree 3 for every p > 7 at k = 7
    for p in ODD_PRIMES_97:
        if p > 7:
            assert delta_degree(p, 7) == 3


def test_delta_degree_guards():
    with pytest.raises(DomainError):
        delta_degree(2, 3)
    with pytest.raises(DomainError):
        delta_degree(9, 3)
    with pytest.raises(DomainError):
        delta_degree(5, 0)


def test_decomposition_even_k():
    d = infinity_decomposition(5, 4)
    assert d.r == 2
    tame, pairs = d.summands[0], d.summands[1:]
    assert isinstance(tame, TameLine)
    assert tame.character_parity == 0
    assert tame.twist_g_exponent == 4 and tame.twist_theta1_exponent == 2
    assert [s.wild_coeff for s in pairs] == [2, 1]
    assert all(not s.inner_quadratic for s in pairs)

    d36 = infinity_decomposition(3, 6)
    coeffs = [s.wild_coeff for s in d36.summands if isinstance(s, Pair)]
    assert coeffs == [0, 1, 2]  # the i = 0 pair is tame


def test_decomposition_odd_k():
    d = infinity_decomposition(5, 3)
    assert all(isinstance(s, Pair) for s in d.summands)
    assert [s.wild_coeff for s in d.summands] == [4, 3]
    assert all(s.inner_quadratic for s in d.summands)
    assert [s.twist_g_exponent for s in d.summands] == [3, 3]
    assert [s.twist_theta1_exponent for s in d.summands] == [1, 2]


def test_decomposition_rank_bookkeeping():
    for p in (3, 5, 7, 11, 13):
        for k in range(1, 21):
            assert infinity_decomposition(p, k).total_rank == k + 1


def test_invariant_eigenvalues():
    assert infinity_invariant_eigenvalues(5, 4) == [25]
    assert infinity_invariant_eigenvalues(3, 6) == [-27]
    assert infinity_invariant_eigenvalues(3, 8) == [81, -81]
    assert infinity_invariant_eigenvalues(5, 10) == [3125]
    for p in (3, 5, 7):
        for k in (1, 3, 5, 7, 9):
            assert infinity_invariant_eigenvalues(p, k) == []


def test_invariant_eigenvalue_weights():
    for p in (3, 5, 7, 11):
        for k in range(2, 41, 2):
            for lam in infinity_invariant_eigenvalues(p, k):
                assert lam * lam == p**k


def test_h1c_values():
    assert h1c_degree(11, 7) == 4
    assert h1c_degree(5, 4) == 2
    assert h1c_degree(3, 6) == 2


def test_h1c_counts_wild_pairs():
    for p in (3, 5, 7, 11):
        for k in range(1, 31):
            wild = sum(1 for s in infinity_decomposition(p, k).summands
                       if isinstance(s, Pair) and s.wild_coeff != 0)
            assert wild == h1c_degree(p, k)


def test_degree_consistency_grid():
    # the module's load-bearing identity
    for p in ODD_PRIMES_97:
        for k in range(1, 61):
            lhs = h1c_degree(p, k) - 1 - len(infinity_invariant_eigenvalues(p, k))
            assert lhs == delta_degree(p, k), (p, k)


def test_odd_counting_identity():
    for p in ODD_PRIMES_97:
        for k in range(1, 1001, 2):
            lhs, rhs = odd_tame_pair_counts(p, k)
            assert lhs == rhs, (p, k)
    with pytest.raises(DomainError):
        odd_tame_pair_counts(5, 4)


def test_zero_stalk_model():
    m = ZeroStalkModel(p=5, k=3)
    assert m.invariant_dimension == 1
    assert m.invariant_frobenius_eigenvalue == 1
    assert m.filtration_eigenvalues == (1, 5, 25, 125)
