import numpy as np
import pytest

from klsym.cyclotomic import CycInt
from klsym.errors import DomainError, ResourceLimitError
from klsym.finite_field import build_field, factorize, is_prime


def test_prime_helpers():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert factorize(720) == {2: 4, 3: 2, 5: 1}


def test_deterministic_moduli():
    assert build_field(5, 1).modulus == (0, 1)
    assert build_field(3, 2).modulus == (1, 0, 1)       # x^2 + 1
    assert build_field(3, 3).modulus == (1, 2, 0, 1)    # x^3 + 2x + 1


def test_bad_inputs():
    with pytest.raises(DomainError):
        build_field(2, 3)
    with pytest.raises(DomainError):
        build_field(4, 1)
    with pytest.raises(DomainError):
        build_field(5, 0)
    with pytest.raises(ResourceLimitError):
        build_field(3, 30)
    with pytest.raises(DomainError):
        build_field(3, 2, modulus=(2, 0, 1))  # x^2 + 2 = (x+1)(x+2) mod 3


def test_trace_examples():
    F9 = build_field(3, 2)
    i = F9.encode([0, 1])
    assert F9.trace_of(i) == 0
    assert F9.trace_of(1) == 2
    F5 = build_field(5, 1)
    assert [F5.trace_of(x) for x in range(5)] == [0, 1, 2, 3, 4]


def test_inverse_examples():
    F5 = build_field(5, 1)
    assert F5.inverse(2) == 3
    F9 = build_field(3, 2)
    i = F9.encode([0, 1])
    minus_i = F9.encode([0, 2])
    assert F9.inverse(i) == minus_i
    with pytest.raises(DomainError):
        F9.inverse(0)


def test_unit_group_cyclic():
    for (p, n) in ((3, 2), (3, 4), (5, 3), (7, 2), (11, 2), (13, 1)):
        F = build_field(p, n)
        N = F.q - 1
        assert F.pow(F.generator, N) == 1
        for ell in factorize(N):
            assert F.pow(F.generator, N // ell) != 1


def test_trace_fibers_uniform():
    for (p, n) in ((3, 2), (3, 3), (5, 2), (7, 2), (11, 2)):
        F = build_field(p, n)
        fibers = [0] * p
        for x in F.elements():
            fibers[F.trace_of(x)] += 1
        assert fibers == [p ** (n - 1)] * p


def test_character_orthogonality():
    # sum over F_q of psi(Tr x) vanishes in the cyclotomic ring
    for (p, n) in ((3, 2), (5, 2), (7, 2)):
        F = build_field(p, n)
        counts = [0] * p
        for x in F.elements():
            counts[F.trace_of(x)] += 1
        assert CycInt.from_exponents(p, counts) == CycInt.zero(p)


def test_exp_log_roundtrip():
    for (p, n) in ((3, 3), (5, 2), (11, 2)):
        F = build_field(p, n)
        N = F.q - 1
        assert (F.log[F.exp] == np.arange(N)).all()
        units = np.ones(F.q, dtype=bool)
        units[0] = False
        assert sorted(F.exp.tolist()) == list(range(1, F.q))
        assert units[F.exp].all()


def test_zech_identity():
    for (p, n) in ((3, 3), (5, 2), (7, 2)):
        F = build_field(p, n)
        N = F.q - 1
        for i in range(N):
            z = int(F.zech[i])
            one_plus = F.add(1, int(F.exp[i]))
            if z < 0:
                assert one_plus == 0
                assert i == N // 2  # g^i = -1 exactly at the half point
            else:
                assert int(F.exp[z]) == one_plus


def test_add_units_log():
    F = build_field(5, 2)
    N = F.q - 1
    for i in range(0, N, 3):
        for j in range(0, N, 5):
            expected = F.add(int(F.exp[i]), int(F.exp[j]))
            got = F.add_units_log(i, j)
            if got is None:
                assert expected == 0
            else:
                assert int(F.exp[got]) == expected


def test_unit_traces_recurrence_matches_tables():
    for (p, n) in ((3, 3), (5, 2), (7, 3), (11, 2)):
        with_tables = build_field(p, n)
        bare = build_field(p, n, table_threshold=1)
        assert not bare.has_tables
        assert (with_tables.unit_traces_by_log() == bare.unit_traces_by_log()).all()


def test_arithmetic_agrees_without_tables():
    F = build_field(5, 2)
    B = build_field(5, 2, table_threshold=1)
    for x in range(0, 25, 3):
        for y in range(0, 25, 4):
            assert F.mul(x, y) == B.mul(x, y)
        if x:
            assert F.inverse(x) == B.inverse(x)
        assert F.trace_of(x) == B.trace_of(x)


def test_cache_roundtrip(tmp_path):
    fresh = build_field(3, 4)
    built = build_field(3, 4, cache_dir=tmp_path)
    loaded = build_field(3, 4, cache_dir=tmp_path)
    assert (tmp_path / "fq_p3_n4_v1.tbl").exists()
    for a, b in ((fresh, built), (fresh, loaded)):
        assert a.modulus == b.modulus
        assert a.generator == b.generator
        assert (a.exp == b.exp).all()
        assert (a.log == b.log).all()
        assert (a.trace == b.trace).all()
        assert (a.zech == b.zech).all()


def test_minimal_polynomial():
    F9 = build_field(3, 2)
    i = F9.encode([0, 1])
    assert F9.minimal_polynomial(i) == (1, 0, 1)
    assert F9.minimal_polynomial(1) == (2, 1)  # X - 1
