"""Descents, inversions and cycle counts, with exact moments and normal-approximation checks."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats as sps

from .core import Permutation, divisors, totient
from .cycle_index import CycleIndex, cycles_gf, upoly_add, upoly_mul, upoly_trim, wreath_compose
from .wreath import GroupSpec

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class MomentPair:
    mean: Fraction
    variance: Fraction

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("negative variance")

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


def descents(p: Permutation | Sequence[int]) -> int:
    v = p.images if isinstance(p, Permutation) else p
    return sum(1 for a, b in zip(v, v[1:]) if a > b)


def inversions(p: Permutation | Sequence[int]) -> int:
    """Inversion count by merge sort, O(m log m)."""
    v = list(p.images if isinstance(p, Permutation) else p)
    return _sort_count(v)[1]


def _sort_count(v: list[int]) -> tuple[list[int], int]:
    if len(v) <= 1:
        return v, 0
    mid = len(v) // 2
    left, a = _sort_count(v[:mid])
    right, b = _sort_count(v[mid:])
    merged, inv, i, j = [], a + b, 0, 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            inv += len(left) - i
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, inv


def descents_batch(rows: np.ndarray) -> np.ndarray:
    return (rows[:, :-1] > rows[:, 1:]).sum(axis=1)


def inversions_batch(rows: np.ndarray) -> np.ndarray:
    """Inversion counts of many permutations of 1..m at once (Fenwick tree, vectorised over rows)."""
    size, m = rows.shape
    width = m + 2  # column 0 stays empty for queries, column m+1 absorbs overflowing updates
    tree = np.zeros(size * width, dtype=np.int32)
    base = np.arange(size, dtype=np.int64) * width
    out = np.zeros(size, dtype=np.int64)
    steps = m.bit_length() + 1
    for pos in range(m):
        v = rows[:, pos].astype(np.int64)
        i = v.copy()
        le = np.zeros(size, dtype=np.int64)
        for _ in range(steps):
            le += tree[base + i]
            i -= i & -i
        out += pos - le
        i = v
        for _ in range(steps):
            tree[base + i] += 1
            i = np.minimum(i + (i & -i), m + 1)
    return out


def cycle_count(p: Permutation) -> int:
    return len(p.cycles())


# -- exact moments ----------------------------------------------------------------


def cycle_count_moments_cyclic(k: int) -> MomentPair:
    """Number of cycles of a uniform element of C_k, from the divisor sums.

    mean = sum_{d|k} phi(d)/d and second moment = k sum_{d|k} phi(d)/d^2.
    """
    mean = sum((Fraction(totient(d), d) for d in divisors(k)), Fraction(0))
    second = k * sum((Fraction(totient(d), d * d) for d in divisors(k)), Fraction(0))
    return MomentPair(mean, second - mean * mean)


def cyclic_second_moment(k: int) -> Fraction:
    m = cycle_count_moments_cyclic(k)
    return m.variance + m.mean**2


def mean_prime_power_closed(p: int, a: int) -> Fraction:
    return 1 + a * (1 - Fraction(1, p))


def second_moment_prime_power_printed(p: int, a: int) -> Fraction:
    """The prime-power closed form as usually printed, with exponent a-1 inside."""
    return p**a * (1 + Fraction(1, p) * (1 - Fraction(1, p ** (a - 1))))


def second_moment_prime_power(p: int, a: int) -> Fraction:
    """Closed form that matches the divisor sum: p^a (1 + (1 - p^-a)/p)."""
    return p**a * (1 + Fraction(1, p) * (1 - Fraction(1, p**a)))


def cyclic_moment_report(k_max: int = 30) -> dict:
    """Compare divisor-sum moments with enumeration of C_k and with the prime-power closed forms."""
    rows = []
    mismatches = []
    for k in range(1, k_max + 1):
        m = cycle_count_moments_cyclic(k)
        perms = GroupSpec.cyclic(k).elements()
        counts = [len(p.cycles()) for p in perms]
        emean = Fraction(sum(counts), k)
        esecond = Fraction(sum(c * c for c in counts), k)
        ok = emean == m.mean and esecond == m.variance + m.mean**2
        rows.append({"k": k, "mean": str(m.mean), "second": str(m.variance + m.mean**2), "enumeration_match": ok})
        pa = _prime_power(k)
        if pa:
            p, a = pa
            printed = second_moment_prime_power_printed(p, a)
            if printed != esecond:
                mismatches.append({"p": p, "a": a, "printed": str(printed), "enumerated": str(esecond)})
            if mean_prime_power_closed(p, a) != emean or second_moment_prime_power(p, a) != esecond:
                ok = False
                rows[-1]["enumeration_match"] = False
    return {"rows": rows, "all_match": all(r["enumeration_match"] for r in rows), "printed_second_moment_mismatches": mismatches}


def _prime_power(k: int) -> tuple[int, int] | None:
    if k < 2:
        return None
    p = next(d for d in divisors(k) if d > 1)
    a, m = 0, k
    while m % p == 0:
        m //= p
        a += 1
    return (p, a) if m == 1 else None


def descent_moments_symmetric(m: int) -> MomentPair:
    if m <= 1:
        return MomentPair(Fraction(0), Fraction(0))
    return MomentPair(Fraction(m - 1, 2), Fraction(m + 1, 12))


def inversion_moments_symmetric(m: int) -> MomentPair:
    return MomentPair(Fraction(m * (m - 1), 4), Fraction(m * (m - 1) * (2 * m + 5), 72))


def wreath_descent_moments(k: int, n: int) -> MomentPair:
    """d(sigma) = sum_i d(gamma_i) + d(eta) with independent summands."""
    g, h = descent_moments_symmetric(k), descent_moments_symmetric(n)
    return MomentPair(n * g.mean + h.mean, n * g.variance + h.variance)


def wreath_inversion_moments(k: int, n: int) -> MomentPair:
    """I(sigma) = k^2 I(eta) + sum_i I(gamma_i) with independent summands."""
    g, h = inversion_moments_symmetric(k), inversion_moments_symmetric(n)
    return MomentPair(k * k * h.mean + n * g.mean, k**4 * h.variance + n * g.variance)


def printed_inversion_moments(k: int, n: int) -> MomentPair:
    """Mean k^2 C(n,2)/4 and variance k^4 n(n-1)(2n+5)/72 + n k(k+1)(2k+5)/72, as usually displayed."""
    return MomentPair(
        Fraction(k * k * math.comb(n, 2), 4),
        Fraction(k**4 * n * (n - 1) * (2 * n + 5), 72) + Fraction(n * k * (k + 1) * (2 * k + 5), 72),
    )


def printed_descent_moments(k: int, n: int) -> MomentPair:
    return MomentPair(Fraction(n * (k - 1), 2) + Fraction(n - 1, 2), Fraction(n * (k + 1), 12) + Fraction(n + 1, 12))


def harmonic(n: int, power: int = 1) -> float:
    return float(sum(1.0 / i**power for i in range(1, n + 1)))


def wreath_cycle_moments(gamma: GroupSpec, n: int) -> tuple[float, float]:
    """Exact mean and variance of the number of cycles in Gamma^n x| S_n.

    C = X_1 + ... + X_N with X_i i.i.d. cycle counts of Gamma and N the cycle count of
    S_n, so E C = mu E N and Var C = E N sigma^2 + mu^2 Var N, where
    E N = H_n and Var N = H_n - H_n^(2).
    """
    from .cycle_index import number_of_cycles_moments

    mu, var = number_of_cycles_moments(gamma.cycle_index)
    en = harmonic(n)
    vn = en - harmonic(n, 2)
    return float(mu) * en, en * float(var) + float(mu) ** 2 * vn


# -- stopped sums -------------------------------------------------------------------


@dataclass
class StoppedSumReport:
    holds: bool
    mean_identity: bool
    lhs: list[Fraction]
    rhs: list[Fraction]
    mismatch: dict[int, tuple[Fraction, Fraction]]


def stopped_sum_check(gamma: GroupSpec | CycleIndex, z_h: CycleIndex) -> StoppedSumReport:
    """Check C_G(x) = sum_j P_H(j) C_Gamma(x)^j for G = Gamma^n x| H, plus E_G(C) = E_Gamma(C) E_H(C)."""
    z_g = gamma.cycle_index if isinstance(gamma, GroupSpec) else gamma
    lhs = upoly_trim(cycles_gf(wreath_compose(z_h, z_g)))
    cg = cycles_gf(z_g)
    rhs = [Fraction(0)]
    power = [Fraction(1)]
    for j, pj in enumerate(cycles_gf(z_h)):
        if j:
            power = upoly_mul(power, cg)
        if pj:
            rhs = upoly_add(rhs, [pj * c for c in power])
    rhs = upoly_trim(rhs)
    width = max(len(lhs), len(rhs))
    lhs += [Fraction(0)] * (width - len(lhs))
    rhs += [Fraction(0)] * (width - len(rhs))
    mismatch = {j: (a, b) for j, (a, b) in enumerate(zip(lhs, rhs)) if a != b}

    def mean(coeffs):
        return sum((j * c for j, c in enumerate(coeffs)), Fraction(0))

    mean_ok = mean(lhs) == mean(cg) * mean(cycles_gf(z_h))
    return StoppedSumReport(not mismatch, mean_ok, lhs, rhs, mismatch)


# -- normal approximation ----------------------------------------------------------


def clt_report(samples, mean: float, sd: float, lattice: bool = False) -> float:
    """One-sample Kolmogorov-Smirnov distance of (samples - mean)/sd from N(0, 1).

    With ``lattice`` the samples are integer valued and the empirical CDF is compared
    with the normal CDF at half-integers (continuity correction), which removes the
    jump of size ~1/sd a continuous comparison would otherwise report.
    """
    x = np.asarray(samples, dtype=float)
    if not sd > 0 or not math.isfinite(sd):
        raise ValueError("standard deviation must be positive")
    if len(x) < 1000:
        raise ValueError("need at least 1000 samples")
    if not lattice:
        return float(sps.kstest((x - mean) / sd, "norm").statistic)
    vals, counts = np.unique(np.rint(x).astype(np.int64), return_counts=True)
    ecdf = np.cumsum(counts) / len(x)
    # ECDF is flat on [v, next v); the corrected CDF is evaluated at v + 1/2 and just below each v
    upper = sps.norm.cdf((vals + 0.5 - mean) / sd)
    lower = sps.norm.cdf((vals - 0.5 - mean) / sd)
    prev = np.concatenate([[0.0], ecdf[:-1]])
    return float(max(np.abs(ecdf - upper).max(), np.abs(prev - lower).max()))


def ks_threshold(n_samples: int) -> float:
    """Asymptotic alpha ~ 0.01 critical value 1.63 / sqrt(N)."""
    return 1.63 / math.sqrt(n_samples)
