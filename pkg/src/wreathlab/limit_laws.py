"""Dependent compound-Poisson vectors: A_i = sum over atoms of coeff_i * N_atom, N_atom ~ Poisson(rate).

Every limit law here is a :class:`LinearCompoundSpec`: a list of independent Poisson
atoms, each feeding fixed nonnegative integer multiples of itself into a few output
coordinates. Atoms shared between coordinates are what makes them dependent.
"""

from __future__ import annotations

import json
import math
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from .core import Partition, divisors, lcm, totient
from .cycle_index import CycleIndex
from .wreath import GroupSpec


@dataclass(frozen=True)
class Atom:
    key: Hashable
    rate: Fraction | float
    coeffs: Mapping[int, int]


@dataclass(frozen=True)
class LinearCompoundSpec:
    atoms: tuple[Atom, ...]
    B: int

    def __post_init__(self):
        kept = []
        for a in self.atoms:
            coeffs = {i: c for i, c in a.coeffs.items() if 1 <= i <= self.B and c}
            if coeffs and a.rate > 0:
                kept.append(Atom(a.key, a.rate, coeffs))
        object.__setattr__(self, "atoms", tuple(kept))

    def rates(self) -> np.ndarray:
        return np.array([float(a.rate) for a in self.atoms])

    def coeff_matrix(self) -> np.ndarray:
        m = np.zeros((len(self.atoms), self.B), dtype=np.int64)
        for r, a in enumerate(self.atoms):
            for i, c in a.coeffs.items():
                m[r, i - 1] = c
        return m

    def touching(self, i: int) -> list[Atom]:
        return [a for a in self.atoms if a.coeffs.get(i)]

    def keys_at(self, i: int) -> set:
        return {a.key for a in self.touching(i)}

    def mean(self, i: int) -> Fraction | float:
        return sum((a.rate * a.coeffs[i] for a in self.touching(i)), Fraction(0))

    def covariance(self, i: int, j: int) -> Fraction | float:
        return sum((a.rate * a.coeffs.get(i, 0) * a.coeffs.get(j, 0) for a in self.atoms), Fraction(0))

    def to_json(self) -> dict:
        atoms = []
        for a in self.atoms:
            entry = {"key": _key_json(a.key)}
            if isinstance(a.key, tuple) and len(a.key) == 2 and isinstance(a.key[1], Partition):
                entry.update(l=a.key[0], **{"lambda": str(a.key[1])})
            if isinstance(a.rate, Fraction):
                entry.update(rate_num=str(a.rate.numerator), rate_den=str(a.rate.denominator))
            else:
                entry.update(rate=float(a.rate))
            entry["coeffs"] = {str(i): c for i, c in sorted(a.coeffs.items())}
            atoms.append(entry)
        return {"B": self.B, "atoms": atoms}

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _key_json(key):
    if isinstance(key, tuple):
        return [_key_json(k) for k in key]
    if isinstance(key, Partition):
        return str(key)
    return key


# -- constructors --------------------------------------------------------------------


def build_spec(gamma: GroupSpec | CycleIndex, t: Fraction | int = 1, B: int = 10) -> LinearCompoundSpec:
    """Atoms Z_{l,lambda} ~ Poisson(t^l P_Gamma(lambda) / l) feeding a_j(lambda) into A_{jl}.

    With t < 1 this is the exact law of the cycle counts of a uniform element of
    Gamma^N x| S_N, N geometric with P(N = n) = (1 - t) t^n; with t = 1 it is the
    large-n limit.
    """
    t = Fraction(t)
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    if B < 1:
        raise ValueError("B must be positive")
    z = gamma.cycle_index if isinstance(gamma, GroupSpec) else gamma
    atoms = []
    for l in range(1, B + 1):
        for lam, p in sorted(z.type_distribution().items(), key=lambda kv: kv[0].sort_key()):
            coeffs = {j * l: a for j, a in lam.items}
            atoms.append(Atom((l, lam), t**l * p / l, coeffs))
    return LinearCompoundSpec(tuple(atoms), B)


def cyclic_spec(k: int, B: int) -> LinearCompoundSpec:
    """C_k^n x| S_n limit: A_i = sum_{l | (i, k)} (k/l) Y_{i,l}, Y_{i,l} ~ Poisson(l phi(l) / (k i))."""
    atoms = []
    for i in range(1, B + 1):
        for l in divisors(math.gcd(i, k)):
            atoms.append(Atom(("Y", i, l), Fraction(l * totient(l), k * i), {i: k // l}))
    return LinearCompoundSpec(tuple(atoms), B)


def s3_spec(B: int) -> LinearCompoundSpec:
    """S_3^n x| S_n limit in residue-class form.

    W_i ~ Poisson(1/6i) enters A_i three times; Z_i ~ Poisson(1/2i) enters A_i and A_{2i};
    Y_i ~ Poisson(1/i), present only for 3 | i, enters A_i.
    """
    atoms = []
    for i in range(1, B + 1):
        atoms.append(Atom(("W", i), Fraction(1, 6 * i), {i: 3}))
        atoms.append(Atom(("Z", i), Fraction(1, 2 * i), {i: 1, 2 * i: 1}))
        if i % 3 == 0:
            atoms.append(Atom(("Y", i), Fraction(1, i), {i: 1}))
    return LinearCompoundSpec(tuple(atoms), B)


def s3_table_row(i: int) -> list[tuple[int, Hashable]]:
    """The residue-class recipe for A_i as (coefficient, atom key) pairs."""
    row = [(3, ("W", i)), (1, ("Z", i))]
    if i % 2 == 0:
        row.append((1, ("Z", i // 2)))
    if i % 3 == 0:
        row.append((1, ("Y", i)))
    return row


def poisson_pmf(lam: float, j: int) -> float:
    return math.exp(-lam + j * math.log(lam) - math.lgamma(j + 1)) if lam > 0 else float(j == 0)


def skn_limit_spec(B: int, eps: float = 1e-12) -> LinearCompoundSpec:
    """S_k^n x| S_n as k, n -> infinity: A_i = sum_{ml = i} sum_j j X_{l,m,j}, X ~ Poisson(p^m_j / l).

    p^m_j is the Poisson(1/m) pmf at j. An atom is dropped once j * rate < eps, which
    lowers each mean by at most the dropped sum of j * rate.

    Each marginal A_i is exact. Across coordinates the atoms are taken independent, so
    this spec does not carry the dependence induced by a shared outer spacing (for
    instance A_1 and A_2 share outer 1-spacings); use
    :func:`wreathlab.coupling.sample_skn_double_limit_batch` for the joint law.
    """
    atoms = []
    for i in range(1, B + 1):
        for m in divisors(i):
            l = i // m
            j = 1
            while True:
                rate = poisson_pmf(1.0 / m, j) / l
                if j * rate < eps:
                    break
                atoms.append(Atom(("X", l, m, j), rate, {i: j}))
                j += 1
    return LinearCompoundSpec(tuple(atoms), B)


@dataclass(frozen=True)
class ProductActionSpec:
    """Limit of S_k x S_n on [k] x [n]: A_l = sum_{a | l} X_a sum_{i : lcm(i, a) = l} gcd(i, a) Y_i."""

    B: int

    def terms(self, l: int) -> list[tuple[int, int, int]]:
        """(a, i, gcd) triples with lcm(i, a) = l."""
        return [(a, i, math.gcd(a, i)) for a in divisors(l) for i in divisors(l) if lcm(a, i) == l]


# -- sampling ---------------------------------------------------------------------------


def sample(spec: LinearCompoundSpec, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw (A_1, ..., A_B); with ``size`` an array of shape (size, B)."""
    rates = spec.rates()
    m = spec.coeff_matrix()
    n = 1 if size is None else size
    if not len(rates):
        out = np.zeros((n, spec.B), dtype=np.int64)
    else:
        out = rng.poisson(rates, size=(n, len(rates))) @ m
    return out[0] if size is None else out


def sample_product_action(spec: ProductActionSpec | int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    B = spec.B if isinstance(spec, ProductActionSpec) else spec
    n = 1 if size is None else size
    rates = 1.0 / np.arange(1, B + 1)
    x = rng.poisson(rates, size=(n, B))
    y = rng.poisson(rates, size=(n, B))
    from .coupling import product_counts_from_limits

    out = product_counts_from_limits(y, x, B)
    return out[0] if size is None else out


# -- exact pmfs ---------------------------------------------------------------------------


def _scaled_poisson(rate: float, c: int, support_max: int) -> np.ndarray:
    v = np.zeros(support_max + 1)
    jmax = support_max // c
    v[: jmax * c + 1 : c] = stats.poisson.pmf(np.arange(jmax + 1), float(rate))
    return v


def marginal_pmf(spec: LinearCompoundSpec, i: int, support_max: int) -> np.ndarray:
    """P(A_i = x) for x = 0..support_max, by convolving the scaled Poisson atoms touching i."""
    out = np.zeros(support_max + 1)
    out[0] = 1.0
    for a in spec.touching(i):
        out = np.convolve(out, _scaled_poisson(a.rate, a.coeffs[i], support_max))[: support_max + 1]
    return out


def joint_pmf(spec: LinearCompoundSpec, coords: Sequence[int], support_max: int) -> np.ndarray:
    """Joint pmf of (A_c for c in coords) on {0..support_max}^d, as a d-dimensional array."""
    d = len(coords)
    if d > 4 or (d > 2 and support_max > 15):
        raise ValueError("full joint tables limited to 4 coordinates and support 15 (2 coordinates: any support)")
    shape = (support_max + 1,) * d
    out = np.zeros(shape)
    out[(0,) * d] = 1.0
    for a in spec.atoms:
        step = tuple(a.coeffs.get(c, 0) for c in coords)
        if not any(step):
            continue
        nmax = min(support_max // s for s in step if s)
        probs = stats.poisson.pmf(np.arange(nmax + 1), float(a.rate))
        new = np.zeros(shape)
        for nn, p in enumerate(probs):
            src = tuple(slice(0, support_max + 1 - nn * s) for s in step)
            dst = tuple(slice(nn * s, support_max + 1) for s in step)
            new[dst] += p * out[src]
        out = new
    return out
