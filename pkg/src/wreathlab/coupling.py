"""Cycle types of Gamma^n x| S_n from independent Bernoulli(1/i) indicators.

Draw zeta_1..zeta_n with P(zeta_i = 1) = 1/i and append a terminal 1. Every gap
between consecutive 1s is a *spacing*; a spacing of length l paired with the cycle
type Y of an independent uniform Gamma-element contributes a_j(Y) cycles of length
j*l. The union over spacings has the law of the cycle type of a uniform element of
the wreath product, and no permutation is ever built.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .core import Partition, Permutation, cycle_type, lcm
from .wreath import CapExceeded, GroupSpec, TypeTable, WreathElement, enumeration_cap, induced_permutation


@dataclass(frozen=True)
class IndicatorSequence:
    """Bits zeta_1..zeta_n followed by the terminal 1 (so ``len(bits) == n + 1``)."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits or self.bits[-1] != 1 or self.bits[0] != 1:
            raise ValueError("indicator sequence must start and end with 1")

    @property
    def n(self) -> int:
        return len(self.bits) - 1

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class Spacing:
    length: int
    left: int


def sample_indicators(n: int, rng: np.random.Generator) -> IndicatorSequence:
    if n < 1:
        raise ValueError("n must be positive")
    u = rng.random(n)
    bits = (u * np.arange(1, n + 1) < 1).astype(int)
    return IndicatorSequence(tuple(bits.tolist()) + (1,))


def spacings(seq: IndicatorSequence) -> list[Spacing]:
    ones = [i for i, b in enumerate(seq.bits, 1) if b]
    return [Spacing(b - a, a) for a, b in zip(ones, ones[1:])]


def bits_from_spacings(sp: list[Spacing]) -> IndicatorSequence:
    """Rebuild the bit string from its spacings."""
    bits = []
    for s in sp:
        bits.extend([1] + [0] * (s.length - 1))
    return IndicatorSequence(tuple(bits) + (1,))


def combine(spacing_lengths: list[int], ys: list[Partition]) -> Partition:
    """Union over spacings of l*Y: each j-cycle of Y becomes a (j*l)-cycle."""
    acc: dict[int, int] = {}
    for l, y in zip(spacing_lengths, ys):
        for j, a in y.items:
            acc[j * l] = acc.get(j * l, 0) + a
    return Partition(acc)


def sample_cycle_type(gamma: GroupSpec, n: int, rng: np.random.Generator) -> Partition:
    table = gamma.type_table
    sp = spacings(sample_indicators(n, rng))
    idx = table.draw(rng, len(sp))
    return combine([s.length for s in sp], [table.types[i] for i in idx])


def _pattern_probabilities(n: int) -> Iterator[tuple[list[int], Fraction]]:
    """Every zeta pattern (zeta_1 = 1 forced) as its spacing lengths, with its exact probability."""
    for tail in product((0, 1), repeat=n - 1):
        bits = (1,) + tail + (1,)
        p = Fraction(1)
        for i, b in enumerate(tail, 2):
            p *= Fraction(1, i) if b else Fraction(i - 1, i)
        ones = [i for i, b in enumerate(bits) if b]
        yield [b - a for a, b in zip(ones, ones[1:])], p


def exact_coupled_distribution(gamma: GroupSpec, n: int, B: int | None = None, cap: int | None = None) -> dict[tuple[int, ...], Fraction]:
    """Exact law of (C_1, ..., C_B) by exhausting indicator patterns and Y assignments.

    ``B`` defaults to kn, i.e. the full cycle type.
    """
    table = gamma.type_table
    B = gamma.k * n if B is None else B
    work = 2 ** (n - 1) * len(table) ** n
    limit = enumeration_cap(cap)
    if work > limit:
        raise CapExceeded(f"coupling enumeration of {work} cases exceeds cap {limit}")
    ptypes = list(zip(table.types, table.exact))
    law: dict[tuple[int, ...], Fraction] = {}
    for lengths, p in _pattern_probabilities(n):
        for combo in product(ptypes, repeat=len(lengths)):
            q = p
            for _, py in combo:
                q *= py
            key = combine(lengths, [y for y, _ in combo]).counts(B)
            law[key] = law.get(key, 0) + q
    return law


# -- vectorised batch samplers -------------------------------------------------


def spacing_counts(bits: np.ndarray, L: int) -> np.ndarray:
    """Number of l-spacings, l = 1..L, in each row of a 0/1 array whose rows end in 1.

    The first column must be 1 too (zeta_1 = 1). Returns an int array (rows, L).
    """
    rows, m = bits.shape
    ones = np.cumsum(bits, axis=1, dtype=np.int32)
    out = np.zeros((rows, L), dtype=np.int64)
    b = bits.astype(bool)
    for l in range(1, min(L, m - 1) + 1):
        # 1 at position a, 1 at a+l, no 1 strictly between
        between = ones[:, l - 1 : m - 1] - ones[:, : m - l]
        hit = b[:, : m - l] & b[:, l:] & (between == 0)
        out[:, l - 1] = hit.sum(axis=1)
    return out


def indicator_block(rows: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``rows`` independent zeta_1..zeta_n 1 sequences as a bool array (rows, n+1)."""
    bits = np.empty((rows, n + 1), dtype=bool)
    bits[:, :n] = rng.random((rows, n)) * np.arange(1, n + 1) < 1
    bits[:, n] = True
    return bits


def spacing_lengths(rows: int, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Spacing lengths of ``rows`` independent zeta_1..zeta_n 1 sequences, without the bits.

    After a 1 at position i the next 1 is beyond j with probability prod_{m=i+1}^{j} (1 - 1/m)
    = i/j, so it sits at floor(i/U) + 1 (capped by the terminal 1 at n + 1). Each row costs
    O(number of 1s) = O(log n) on average. Returns (owner row, length) arrays.
    """
    pos = np.ones(rows, dtype=np.int64)
    live = np.arange(rows) if n >= 1 else np.zeros(0, dtype=np.int64)
    owners, lengths = [], []
    while live.size:
        u = rng.random(live.size)
        with np.errstate(divide="ignore"):
            nxt = np.floor(np.minimum(pos / u, n)).astype(np.int64) + 1
        owners.append(live)
        lengths.append(nxt - pos)
        keep = nxt <= n
        live, pos = live[keep], nxt[keep]
    if not owners:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(owners), np.concatenate(lengths)


def jump_spacing_counts(rows: int, n: int, L: int, rng: np.random.Generator) -> np.ndarray:
    """Same law as ``spacing_counts(indicator_block(rows, n, rng), L)``, in O(rows log n)."""
    owner, length = spacing_lengths(rows, n, rng)
    short = length <= L
    flat = owner[short] * L + (length[short] - 1)
    return np.bincount(flat, minlength=rows * L).reshape(rows, L)


def _chunks(size: int, chunk: int) -> Iterator[int]:
    while size > 0:
        c = min(size, chunk)
        yield c
        size -= c


JUMP_CHUNK = 1 << 18


def _chunk_rows(n: int, budget: int = 2_000_000) -> int:
    return max(1, budget // (n + 1))


def _attach_types(counts: np.ndarray, table: TypeTable, B: int, rng: np.random.Generator) -> np.ndarray:
    """Given per-row l-spacing counts (rows, L), draw a Y per spacing and return (rows, B) cycle counts."""
    rows, L = counts.shape
    cm = table.count_matrix(B)
    out = np.zeros((rows, B), dtype=np.int64)
    for l in range(1, L + 1):
        c = counts[:, l - 1]
        total = int(c.sum())
        if not total:
            continue
        owner = np.repeat(np.arange(rows), c)
        y = table.draw(rng, total)
        for j in range(1, B // l + 1):
            contrib = cm[y, j - 1]
            if contrib.any():
                np.add.at(out[:, j * l - 1], owner, contrib)
    return out


def sample_cycle_counts(gamma: GroupSpec, n: int, B: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` draws of (a_1, ..., a_B) for a uniform element of Gamma^n x| S_n, via the indicators."""
    out = []
    for rows in _chunks(size, JUMP_CHUNK):
        out.append(_attach_types(jump_spacing_counts(rows, n, B, rng), gamma.type_table, B, rng))
    return np.concatenate(out) if out else np.zeros((0, B), dtype=np.int64)


def sample_num_cycles(gamma: GroupSpec, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Total number of cycles of ``size`` uniform elements of Gamma^n x| S_n."""
    parts = gamma.type_table.part_counts()
    out = []
    for rows in _chunks(size, JUMP_CHUNK):
        owner, _ = spacing_lengths(rows, n, rng)
        y = gamma.type_table.draw(rng, owner.size)
        out.append(np.bincount(owner, weights=parts[y], minlength=rows).astype(np.int64))
    return np.concatenate(out)


# -- S_k^n x| S_n with inner indicator sequences ---------------------------------


def sample_skn_type(k: int, n: int, B: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Truncated counts (C_1, ..., C_B) for S_k^n x| S_n: inner Feller sequences replace Y.

    An outer j-spacing carries its own inner sequence of length k; an inner l-spacing
    then yields a (j*l)-cycle.
    """
    out = [0] * B
    for outer in spacings(sample_indicators(n, rng)):
        for inner in spacings(sample_indicators(k, rng)):
            b = outer.length * inner.length
            if b <= B:
                out[b - 1] += 1
    return tuple(out)


def _skn_from_outer(outer: np.ndarray, B: int, inner_counts) -> np.ndarray:
    rows = outer.shape[0]
    out = np.zeros((rows, B), dtype=np.int64)
    for j in range(1, B + 1):
        c = outer[:, j - 1]
        total = int(c.sum())
        if not total:
            continue
        L = B // j
        owner = np.repeat(np.arange(rows), c)
        inner = inner_counts(total, L)  # (total, L)
        for l in range(1, L + 1):
            np.add.at(out[:, j * l - 1], owner, inner[:, l - 1])
    return out


def sample_skn_batch(k: int, n: int, B: int, size: int, rng: np.random.Generator) -> np.ndarray:
    def inner_counts(total, L):
        return np.concatenate([jump_spacing_counts(r, k, L, rng) for r in _chunks(total, JUMP_CHUNK)])

    out = []
    for rows in _chunks(size, JUMP_CHUNK):
        outer = jump_spacing_counts(rows, n, B, rng)
        out.append(_skn_from_outer(outer, B, inner_counts))
    return np.concatenate(out)


def sample_skn_inner_limit_batch(n: int, B: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Law of C^{inf,n}: outer sequence of length n, each inner sequence infinite.

    The l-spacing counts of an infinite Bernoulli(1/i) sequence are independent
    Poisson(1/l), so every inner sequence is replaced by those counts.
    """
    rates = 1.0 / np.arange(1, B + 1)

    def inner_counts(total, L):
        return rng.poisson(rates[:L], size=(total, L))

    out = []
    for rows in _chunks(size, JUMP_CHUNK):
        outer = jump_spacing_counts(rows, n, B, rng)
        out.append(_skn_from_outer(outer, B, inner_counts))
    return np.concatenate(out)


def sample_skn_double_limit_batch(B: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Law of C^{inf,inf}: outer and inner spacing counts both independent Poisson(1/l)."""
    rates = 1.0 / np.arange(1, B + 1)
    outer = rng.poisson(rates, size=(size, B))
    return _skn_from_outer(outer, B, lambda total, L: rng.poisson(rates[:L], size=(total, L)))


# -- product action S_k x S_n on [k] x [n] ------------------------------------------


def _combine_product(c1: np.ndarray, c2: np.ndarray, B: int) -> np.ndarray:
    out = np.zeros((c1.shape[0], B), dtype=np.int64)
    for i in range(1, B + 1):
        for j in range(1, B + 1):
            l = lcm(i, j)
            if l <= B:
                out[:, l - 1] += math.gcd(i, j) * c1[:, i - 1] * c2[:, j - 1]
    return out


def sample_product_coupled(k: int, n: int, B: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Truncated cycle counts of (sigma, tau) acting on [k] x [n], from two indicator sequences."""
    out = [0] * B
    s1 = spacings(sample_indicators(k, rng))
    s2 = spacings(sample_indicators(n, rng))
    for a in s1:
        for b in s2:
            l = lcm(a.length, b.length)
            if l <= B:
                out[l - 1] += math.gcd(a.length, b.length)
    return tuple(out)


def sample_product_batch(k: int, n: int, B: int, size: int, rng: np.random.Generator) -> np.ndarray:
    out = []
    for rows in _chunks(size, JUMP_CHUNK):
        c1 = jump_spacing_counts(rows, k, B, rng)
        c2 = jump_spacing_counts(rows, n, B, rng)
        out.append(_combine_product(c1, c2, B))
    return np.concatenate(out)


def product_counts_from_limits(x: np.ndarray, y: np.ndarray, B: int) -> np.ndarray:
    return _combine_product(x, y, B)


# -- sequential urn construction (reference sampler) --------------------------------


def urn_construction(gamma: GroupSpec, n: int, rng: np.random.Generator) -> tuple[WreathElement, list[int]]:
    """Build a uniform element block by block, recording closure times.

    Start at the leftmost unused block; repeatedly pull a random block from the urn,
    attach a uniform gamma to it and make it the image of the current block, until the
    starting block itself is pulled (closing k open cycles at once). Returns the element
    and the sequence of closed eta-cycle lengths.
    """
    urn = list(range(1, n + 1))
    eta = [0] * n
    gammas: list[Permutation | None] = [None] * n
    closures = []
    while urn:
        head = min(urn)
        cur, length = head, 0
        while True:
            pick = urn.pop(int(rng.integers(len(urn))))
            gammas[pick - 1] = gamma.sample(rng)
            eta[cur - 1] = pick
            length += 1
            if pick == head:
                break
            cur = pick
        closures.append(length)
    w = WreathElement(tuple(gammas), Permutation(eta, check=False))
    return w, closures


def urn_cycle_type(gamma: GroupSpec, n: int, rng: np.random.Generator) -> Partition:
    w, _ = urn_construction(gamma, n, rng)
    return cycle_type(induced_permutation(w))
