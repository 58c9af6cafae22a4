from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest

from wreathlab import chain
from wreathlab.core import Partition, Permutation, all_permutations, divisors, partitions_of, totient, z_weight
from wreathlab.harness import Distribution, chi_square_fit, tv
from wreathlab.wreath import CapExceeded, GroupSpec

P = Partition.parse

# the n = 5 display, times 120, labelled by state
DISPLAY_ROWS = {
    "1^5": {"1^5": 1, "1^3 2": 10, "1^2 3": 20, "1 4": 30, "1 2^2": 15, "2 3": 20, "5": 24},
    "1^3 2": {"1^5": 10, "1^3 2": 40, "1^2 3": 20, "1 4": 0, "1 2^2": 30, "2 3": 20, "5": 0},
    "1^2 3": {"1^5": 20, "1^3 2": 20, "1^2 3": 40, "1 4": 0, "1 2^2": 0, "2 3": 40, "5": 0},
    "1 4": {"1^5": 30, "1^3 2": 0, "1^2 3": 0, "1 4": 60, "1 2^2": 30, "2 3": 0, "5": 0},
    "1 2^2": {"1^5": 15, "1^3 2": 30, "1^2 3": 0, "1 4": 30, "1 2^2": 45, "2 3": 0, "5": 0},
    "2 3": {"1^5": 20, "1^3 2": 20, "1^2 3": 40, "1 4": 0, "1 2^2": 0, "2 3": 40, "5": 0},
    "5": {"1^5": 24, "1^3 2": 0, "1^2 3": 0, "1 4": 0, "1 2^2": 0, "2 3": 0, "5": 96},
}


def test_matrix_n5_matches_display():
    m = chain.exact_lumped_matrix(5)
    assert len(m.states) == 7
    for a, row in DISPLAY_ROWS.items():
        for b, x in row.items():
            assert m[P(a), P(b)] == F(x, 120)


def test_matrix_state_order_and_csv():
    m = chain.exact_lumped_matrix(5)
    assert [str(s) for s in m.states] == ["1^5", "1^3 2", "1^2 3", "1 2^2", "1 4", "2 3", "5"]
    lines = m.to_csv().splitlines()
    assert lines[0] == ",1^5,1^3 2,1^2 3,1 2^2,1 4,2 3,5"
    assert lines[-1] == "5,1/5,0/1,0/1,0/1,0/1,0/1,4/5"


def test_matrix_n1_and_row_23():
    m1 = chain.exact_lumped_matrix(1)
    assert m1.entries == ((F(1),),)
    row = chain.exact_lumped_matrix(5).row(P("2 3"))
    expect = {"1^5": F(1, 6), "1^3 2": F(1, 6), "1^2 3": F(1, 3), "2 3": F(1, 3)}
    assert {str(k): v for k, v in row.items() if v} == expect


@pytest.mark.parametrize("n", range(1, 11))
def test_symmetric_stochastic(n):
    m = chain.exact_lumped_matrix(n)
    assert m.is_symmetric() and m.rows_stochastic()


@pytest.mark.parametrize("n", range(1, 9))
def test_identity_row(n):
    row = chain.exact_row(Partition({1: n}))
    assert row == {lam: F(1, z_weight(lam)) for lam in partitions_of(n)}


@pytest.mark.parametrize("n", range(1, 13))
def test_long_cycle_row(n):
    row = chain.exact_row(Partition({n: 1}))
    assert row == {Partition({d: n // d}): F(totient(d), n) for d in divisors(n)}


def test_prime_long_cycle_row():
    for p in (2, 3, 5, 7, 11):
        assert set(chain.exact_row(Partition({p: 1}))) == {Partition({1: p}), Partition({p: 1})}


def test_distinct_parts_factorization():
    for n in range(1, 10):
        for lam in partitions_of(n):
            if all(a == 1 for _, a in lam.items):
                expect = {Partition(): F(1)}
                for part in lam.parts():
                    expect = chain._convolve(expect, chain.exact_row(Partition({part: 1})))
                assert chain.exact_row(lam) == expect


def test_matrix_cap():
    with pytest.raises(CapExceeded):
        chain.exact_lumped_matrix(31)


def test_one_step_laws_match_rows(rng):
    for lam in partitions_of(5):
        rows = chain.lumped_step_batch(lam, 100_000, rng)
        exact = Distribution({k.counts(5): v for k, v in chain.exact_row(lam).items()})
        assert float(tv(Distribution.from_samples(rows), exact)) <= 0.01


def test_scalar_step(rng):
    for _ in range(200):
        assert chain.lumped_step(P("1 4"), rng).weight == 5
    assert {chain.lumped_step(P("5"), rng) for _ in range(200)} == {P("1^5"), P("5")}


def test_run_lumped_and_reversibility(rng):
    run = chain.run_lumped(5, 20_000, P("5"), rng)
    assert len(run.trajectory) == 20_000
    assert sum(run.occupancy.values()) == 20_000
    pairs = Counter(zip(run.trajectory, run.trajectory[1:]))
    a, b = P("1^5"), P("1 4")
    assert pairs[a, b] == pytest.approx(pairs[b, a], rel=0.25)
    with pytest.raises(ValueError):
        chain.run_lumped(5, 0, P("5"), rng)
    with pytest.raises(ValueError):
        chain.run_lumped(5, 3, P("4"), rng)
    assert sum(run.thinned(7).values()) == 20_000 // 7


def test_decorrelation_lag():
    m = chain.exact_lumped_matrix(5)
    ev = sorted(abs(np.linalg.eigvalsh(m.as_float())))[-2]
    lag = chain.decorrelation_lag(m)
    assert ev**lag <= 0.01 < ev ** (lag - 1)
    assert chain.decorrelation_lag(np.eye(1)) == 1


S3 = list(all_permutations(3))


def test_element_step_identity_and_abelian(rng):
    g = chain.CommutingGraph(S3)
    e = Permutation.identity(3)
    hits = Counter(g.step(e, rng) for _ in range(6000))
    assert set(hits) == set(S3)
    c4 = GroupSpec.cyclic(4).elements()
    g4 = chain.CommutingGraph(c4)
    assert {g4.step(c4[1], rng) for _ in range(400)} == set(c4)


def test_element_step_centralizer(rng):
    s = Permutation([2, 3, 1])
    hits = Counter(chain.element_step(S3, s, rng) for _ in range(3000))
    assert set(hits) == {Permutation.identity(3), s, s.inverse()}
    assert all(abs(v / 3000 - 1 / 3) < 0.04 for v in hits.values())
    with pytest.raises(ValueError):
        chain.element_step(S3, Permutation.identity(4), rng)


def test_element_chain_stationary_law():
    g = chain.CommutingGraph(list(all_permutations(4)))
    pi = g.stationary()
    kmat = g.transition_matrix()
    assert np.allclose(pi @ kmat, pi)
    # pi(s) = 1 / (#classes * |class(s)|)
    sizes = Counter()
    from wreathlab.core import cycle_type

    types = [cycle_type(s) for s in g.elements]
    sizes.update(types)
    assert np.allclose(pi, [1 / (5 * sizes[t]) for t in types])


def test_element_chain_occupancy(rng):
    g = chain.CommutingGraph(list(all_permutations(4)))
    lag = chain.decorrelation_lag(g.transition_matrix())
    path = g.run(Permutation.identity(4), 200_000, rng)[lag - 1 :: lag]
    counts = np.bincount(path, minlength=24)
    assert chi_square_fit(counts, g.stationary()).pvalue > 1e-3
