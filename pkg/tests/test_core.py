import math
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wreathlab.core import (
    Partition,
    Permutation,
    all_permutations,
    compose,
    cycle_type,
    divisors,
    inverse,
    lcm,
    parse_cycles,
    partitions_of,
    totient,
    z_weight,
)


@st.composite
def perms(draw, max_degree=9):
    m = draw(st.integers(1, max_degree))
    return Permutation(draw(st.permutations(range(1, m + 1))))


@st.composite
def perm_pairs(draw):
    m = draw(st.integers(1, 9))
    p = draw(st.permutations(range(1, m + 1)))
    q = draw(st.permutations(range(1, m + 1)))
    return Permutation(p), Permutation(q)


def test_cycle_type_examples():
    assert cycle_type(Permutation([6, 5, 2, 1, 3, 4])) == Partition({3: 2})
    assert cycle_type(Permutation.identity(5)) == Partition({1: 5})
    assert cycle_type(Permutation([2, 1, 3])) == Partition({1: 1, 2: 1})


def test_cycles_of_intro_example():
    p = Permutation([6, 5, 2, 1, 3, 4])
    assert sorted(p.cycles()) == [(1, 6, 4), (2, 5, 3)]


def test_invalid_permutation():
    with pytest.raises(ValueError):
        Permutation([1, 1, 2])
    with pytest.raises(ValueError):
        Permutation([0, 1])


def test_compose_examples():
    p = Permutation([3, 1, 2, 5, 4])
    e = Permutation.identity(5)
    assert compose(p, e) == p
    assert compose(p, inverse(p)) == e
    t = Permutation([2, 1])
    assert compose(t, t) == Permutation.identity(2)
    with pytest.raises(ValueError):
        compose(p, t)


def test_compose_order():
    # (p o q)(i) = p(q(i))
    p, q = Permutation([2, 3, 1]), Permutation([1, 3, 2])
    r = compose(p, q)
    assert all(r(i) == p(q(i)) for i in range(1, 4))


def test_parse_cycles():
    assert parse_cycles("(1 3 2)", 3) == Permutation([3, 1, 2])
    assert parse_cycles("()", 3) == Permutation.identity(3)
    assert parse_cycles("(1)(2 3)") == Permutation([1, 3, 2])
    with pytest.raises(ValueError):
        parse_cycles("(1 2 1)")


def test_z_weight_examples():
    assert z_weight(Partition({1: 5})) == 120
    assert z_weight(Partition({1: 3, 2: 1})) == 12
    assert z_weight(Partition({5: 1})) == 5
    # class sizes in S5 by enumeration
    census = {}
    for p in all_permutations(5):
        t = cycle_type(p)
        census[t] = census.get(t, 0) + 1
    assert census[Partition({1: 3, 2: 1})] == 10
    assert census[Partition({5: 1})] == 24


def test_z_weight_is_big_int():
    lam = Partition({1: 30})
    assert z_weight(lam) == math.factorial(30)


def test_partitions_counts():
    assert partitions_of(0) == [Partition()]
    assert len(partitions_of(4)) == 5
    assert len(partitions_of(7)) == 15
    assert [len(partitions_of(n)) for n in range(1, 11)] == [1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def test_partitions_distinct_and_weighted():
    for n in range(9):
        ps = partitions_of(n)
        assert len(set(ps)) == len(ps)
        assert all(p.weight == n for p in ps)


def test_brute_force_partition_count():
    # p(7) by listing nonincreasing tuples directly
    def count(n, largest):
        if n == 0:
            return 1
        return sum(count(n - j, j) for j in range(1, min(n, largest) + 1))

    assert len(partitions_of(7)) == count(7, 7)


@pytest.mark.parametrize("n", range(1, 9))
def test_class_size_identity(n):
    assert sum(math.factorial(n) // z_weight(lam) for lam in partitions_of(n)) == math.factorial(n)


def test_totient_and_divisors():
    assert totient(1) == 1
    assert totient(12) == 4
    assert divisors(6) == (1, 2, 3, 6)
    for n in range(1, 1001):
        assert sum(totient(d) for d in divisors(n)) == n
    for n in (1, 7, 36, 97):
        assert totient(n) == sum(1 for j in range(1, n + 1) if math.gcd(j, n) == 1)
    assert lcm(4, 6) == 12


def test_partition_text_roundtrip():
    lam = Partition.parse("1^3 2")
    assert lam == Partition({1: 3, 2: 1})
    assert str(lam) == "1^3 2"
    assert Partition.parse(str(Partition({2: 2, 5: 1}))) == Partition({2: 2, 5: 1})
    assert str(Partition()) == "0"
    assert Partition.parse("") == Partition()


def test_partition_sparse_canonical():
    assert Partition({1: 2, 3: 0}) == Partition({1: 2})
    assert Partition({1: 2}).items == ((1, 2),)
    with pytest.raises(ValueError):
        Partition({1: -1})


def test_partition_counts_truncation():
    lam = Partition({1: 2, 3: 1, 7: 1})
    assert lam.counts(4) == (2, 0, 1, 0)
    assert lam.counts(0) == ()


@given(perms())
def test_weight_conservation(p):
    assert cycle_type(p).weight == p.degree


@given(perm_pairs())
@settings(max_examples=200)
def test_conjugation_invariance(pq):
    p, q = pq
    assert cycle_type(compose(q, compose(p, inverse(q)))) == cycle_type(p)


@given(perms())
def test_inverse_is_inverse(p):
    assert compose(p, p.inverse()) == Permutation.identity(p.degree)
    assert cycle_type(p.inverse()) == cycle_type(p)


@given(perms())
def test_cycle_string_roundtrip(p):
    assert parse_cycles(p.cycle_string(), p.degree) == p


def test_all_permutations_matches_itertools():
    assert {q.images for q in all_permutations(4)} == set(permutations(range(1, 5)))
