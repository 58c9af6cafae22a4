import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wreathlab import stats
from wreathlab.core import Permutation
from wreathlab.coupling import sample_num_cycles
from wreathlab.cycle_index import build_cyclic, build_symmetric, cycles_gf, trivial, wreath_symmetric
from wreathlab.wreath import GroupSpec, enumerate_wreath, sample_induced_batch, sample_uniform


def test_descent_examples():
    assert stats.descents(Permutation.identity(6)) == 0
    assert stats.descents(Permutation(range(7, 0, -1))) == 6
    assert stats.descents(Permutation([6, 5, 2, 1, 3, 4])) == 3


def test_inversion_examples():
    assert stats.inversions(Permutation.identity(6)) == 0
    assert stats.inversions(Permutation([4, 3, 2, 1])) == 6
    assert stats.inversions(Permutation([2, 1, 4, 3])) == 2


@given(st.permutations(list(range(1, 40))))
def test_inversions_against_quadratic(v):
    assert stats.inversions(v) == sum(1 for i in range(len(v)) for j in range(i + 1, len(v)) if v[i] > v[j])


def test_batch_counts_match_scalar(rng):
    rows = np.argsort(rng.random((300, 257)), axis=1) + 1
    assert stats.inversions_batch(rows).tolist() == [stats.inversions(r) for r in rows.tolist()]
    assert stats.descents_batch(rows).tolist() == [stats.descents(r) for r in rows.tolist()]
    for m in (1, 2, 3, 8, 16):
        small = np.argsort(rng.random((50, m)), axis=1) + 1
        assert stats.inversions_batch(small).tolist() == [stats.inversions(r) for r in small.tolist()]


def test_cyclic_moment_examples():
    m = stats.cycle_count_moments_cyclic(4)
    assert m.mean == 2 == stats.mean_prime_power_closed(2, 2)
    assert m.variance + m.mean**2 == F(11, 2)
    one = stats.cycle_count_moments_cyclic(1)
    assert (one.mean, one.variance) == (1, 0)


def test_cyclic_report_detects_display_mismatch():
    rep = stats.cyclic_moment_report(30)
    assert rep["all_match"]
    assert {"p": 2, "a": 2, "printed": "5", "enumerated": "11/2"} in rep["printed_second_moment_mismatches"]


def test_multiplicativity():
    for a in range(1, 31):
        for b in range(1, 31):
            if math.gcd(a, b) == 1 and a * b <= 900:
                assert stats.cycle_count_moments_cyclic(a * b).mean == (
                    stats.cycle_count_moments_cyclic(a).mean * stats.cycle_count_moments_cyclic(b).mean)
                assert stats.cyclic_second_moment(a * b) == stats.cyclic_second_moment(a) * stats.cyclic_second_moment(b)


def brute_moments(k, n, stat):
    vals = [stat(p) for _, p in enumerate_wreath(GroupSpec.symmetric(k), n)]
    mean = F(sum(vals), len(vals))
    return mean, F(sum(v * v for v in vals), len(vals)) - mean**2


@pytest.mark.parametrize("k,n", [(2, 2), (3, 2), (2, 3), (1, 4), (4, 1)])
def test_descent_moments_brute_force(k, n):
    m = stats.wreath_descent_moments(k, n)
    assert (m.mean, m.variance) == brute_moments(k, n, stats.descents)


@pytest.mark.parametrize("k,n", [(2, 2), (3, 2), (2, 3), (1, 4), (4, 1)])
def test_inversion_moments_brute_force(k, n):
    m = stats.wreath_inversion_moments(k, n)
    assert (m.mean, m.variance) == brute_moments(k, n, stats.inversions)


def test_moment_examples():
    assert stats.wreath_descent_moments(3, 2) == stats.MomentPair(F(5, 2), F(11, 12))
    assert stats.wreath_inversion_moments(2, 2).mean == 3
    for n in range(2, 9):
        assert stats.wreath_descent_moments(1, n) == stats.descent_moments_symmetric(n) == stats.MomentPair(F(n - 1, 2), F(n + 1, 12))
        assert stats.wreath_inversion_moments(1, n) == stats.MomentPair(F(n * (n - 1), 4), F(n * (n - 1) * (2 * n + 5), 72))
        assert stats.wreath_descent_moments(n, 1) == stats.descent_moments_symmetric(n)
        assert stats.wreath_inversion_moments(n, 1) == stats.inversion_moments_symmetric(n)


def test_displayed_inversion_moments_differ_from_brute_force():
    mean, var = brute_moments(3, 2, stats.inversions)
    shown = stats.printed_inversion_moments(3, 2)
    assert (shown.mean, shown.variance) != (mean, var)
    # the displayed descent moments agree once k >= 2
    assert stats.printed_descent_moments(3, 2) == stats.wreath_descent_moments(3, 2)


def decomposition_holds(w, sigma):
    k = w.k
    d_ok = stats.descents(sigma) == sum(stats.descents(g) for g in w.gammas) + stats.descents(w.eta)
    i_ok = stats.inversions(sigma) == k * k * stats.inversions(w.eta) + sum(stats.inversions(g) for g in w.gammas)
    return d_ok and i_ok


@pytest.mark.parametrize("k,n", [(3, 2), (2, 3), (2, 4), (3, 3)])
def test_decompositions_on_enumeration(k, n):
    assert all(decomposition_holds(w, p) for w, p in enumerate_wreath(GroupSpec.symmetric(k), n))


def test_decompositions_on_random_draws(rng):
    g = GroupSpec.symmetric(7)
    for _ in range(10_000):
        w = sample_uniform(g, 6, rng)
        assert decomposition_holds(w, w.induced())


def test_goncharov_expansion():
    for n in range(10, 201):
        h = stats.harmonic(n)
        assert abs(h - math.log(n) - stats.EULER_GAMMA - 1 / (2 * n)) <= 1 / n**2
    for n in range(1, 31):
        exact = sum(j * c for j, c in enumerate(cycles_gf(build_symmetric(n))))
        assert exact == sum(F(1, i) for i in range(1, n + 1))


def test_wreath_cycle_moments_exact_small():
    for gamma, n in [("S3", 5), ("C4", 4), ("S2", 7)]:
        g = GroupSpec.parse(gamma)
        gf = cycles_gf(wreath_symmetric(g.cycle_index, n))
        mean = sum(j * c for j, c in enumerate(gf))
        var = sum(j * j * c for j, c in enumerate(gf)) - mean**2
        m, v = stats.wreath_cycle_moments(g, n)
        assert m == pytest.approx(float(mean), rel=1e-12)
        assert v == pytest.approx(float(var), rel=1e-12)


def test_stopped_sum_examples():
    rep = stats.stopped_sum_check(GroupSpec.cyclic(2), build_symmetric(2))
    assert rep.holds and rep.mean_identity
    rep = stats.stopped_sum_check(trivial(1), build_cyclic(6))
    assert rep.holds and rep.lhs[: len(cycles_gf(build_cyclic(6)))] == cycles_gf(build_cyclic(6))
    rep = stats.stopped_sum_check(GroupSpec.symmetric(3), build_symmetric(3))
    assert rep.holds and rep.mean_identity and not rep.mismatch


def test_clt_report_null_and_errors(rng):
    assert stats.clt_report(rng.standard_normal(100_000), 0.0, 1.0) < 0.01
    with pytest.raises(ValueError):
        stats.clt_report(np.ones(2000), 1.0, 0.0)
    with pytest.raises(ValueError):
        stats.clt_report(rng.standard_normal(999), 0.0, 1.0)
    assert stats.ks_threshold(10_000) == pytest.approx(0.0163)


def test_descents_clt_symmetric(rng):
    rows = np.argsort(rng.random((10_000, 2000)), axis=1)
    d = stats.descents_batch(rows)
    m = stats.descent_moments_symmetric(2000)
    assert stats.clt_report(d, float(m.mean), m.sd, lattice=True) <= 0.02


def test_cycle_clt_small_scale(rng):
    g = GroupSpec.symmetric(3)
    x = sample_num_cycles(g, 500, 5000, rng)
    mean, var = stats.wreath_cycle_moments(g, 500)
    assert abs(x.mean() - mean) < 4 * math.sqrt(var / len(x))
    assert stats.clt_report(x, mean, math.sqrt(var), lattice=True) < 0.06


def test_batch_inversions_on_wreath_rows(rng):
    rows = sample_induced_batch(GroupSpec.symmetric(3), 40, 200, rng)
    assert stats.inversions_batch(rows).tolist() == [stats.inversions(r) for r in rows.tolist()]
