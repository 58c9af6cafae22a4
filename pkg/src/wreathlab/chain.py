"""The commuting-graph walk and its lumped chain on partitions.

From s, move to a uniform element of the centralizer of s. In S_n the centralizer of
an element of type 1^{a_1} 2^{a_2} ... is the product of the wreath products
C_i^{a_i} x| S_{a_i}, so one lumped step refreshes each part-size class independently.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import Partition, Permutation, compose, partitions_of
from .coupling import sample_cycle_counts, sample_cycle_type
from .cycle_index import build_cyclic, wreath_symmetric
from .wreath import CapExceeded, GroupSpec

MATRIX_CAP = 30


@dataclass(frozen=True)
class LumpedMatrix:
    """Exact transition matrix on partitions of n.

    States are ordered by their ascending part lists, so 1^n comes first and (n) last.
    For n = 5 that is 1^5, 1^3 2, 1^2 3, 1 2^2, 1 4, 2 3, 5.
    """

    n: int
    states: tuple[Partition, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    def index(self, lam: Partition) -> int:
        return self.states.index(lam)

    def __getitem__(self, key: tuple[Partition, Partition]) -> Fraction:
        a, b = key
        return self.entries[self.index(a)][self.index(b)]

    def row(self, lam: Partition) -> dict[Partition, Fraction]:
        return dict(zip(self.states, self.entries[self.index(lam)]))

    def is_symmetric(self) -> bool:
        m = len(self.states)
        return all(self.entries[i][j] == self.entries[j][i] for i in range(m) for j in range(i))

    def rows_stochastic(self) -> bool:
        return all(sum(r) == 1 and all(x >= 0 for x in r) for r in self.entries)

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.entries])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + [str(s) for s in self.states])
        for s, r in zip(self.states, self.entries):
            w.writerow([str(s)] + [f"{x.numerator}/{x.denominator}" for x in r])
        return buf.getvalue()


@lru_cache(maxsize=None)
def centralizer_type_law(i: int, a: int) -> dict[Partition, Fraction]:
    """Cycle-type law of a uniform element of C_i^a x| S_a acting on i*a points."""
    z = wreath_symmetric(build_cyclic(i), a)
    return z.type_distribution()


def _convolve(p: dict[Partition, Fraction], q: dict[Partition, Fraction]) -> dict[Partition, Fraction]:
    out: dict[Partition, Fraction] = {}
    for s, x in p.items():
        for t, y in q.items():
            u = s + t
            out[u] = out.get(u, 0) + x * y
    return out


def exact_row(lam: Partition) -> dict[Partition, Fraction]:
    row = {Partition(): Fraction(1)}
    for i, a in lam.items:
        row = _convolve(row, centralizer_type_law(i, a))
    return row


def exact_lumped_matrix(n: int, cap: int = MATRIX_CAP) -> LumpedMatrix:
    if n > cap:
        raise CapExceeded(f"n = {n} exceeds lumped-matrix cap {cap}")
    states = tuple(partitions_of(n))
    entries = []
    for lam in states:
        row = exact_row(lam)
        entries.append(tuple(row.get(s, Fraction(0)) for s in states))
    return LumpedMatrix(n, states, tuple(entries))


def lumped_step(lam: Partition, rng: np.random.Generator) -> Partition:
    """One move: for every part size i, the type of a uniform element of C_i^{a_i} x| S_{a_i}."""
    out = Partition()
    for i, a in lam.items:
        out = out + sample_cycle_type(GroupSpec.cyclic(i), a, rng)
    return out


def lumped_step_batch(lam: Partition, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent one-step moves from ``lam`` as count vectors (a_1, ..., a_n)."""
    n = lam.weight
    out = np.zeros((size, n), dtype=np.int64)
    for i, a in lam.items:
        out += sample_cycle_counts(GroupSpec.cyclic(i), a, n, size, rng)
    return out


@dataclass
class ChainRun:
    trajectory: list[Partition]
    occupancy: Counter

    def thinned(self, every: int) -> Counter:
        return Counter(self.trajectory[every - 1 :: every])


def run_lumped(n: int, steps: int, start: Partition, rng: np.random.Generator) -> ChainRun:
    if steps < 1:
        raise ValueError("steps must be positive")
    if start.weight != n:
        raise ValueError(f"start state {start} is not a partition of {n}")
    traj = []
    state = start
    for _ in range(steps):
        state = lumped_step(state, rng)
        traj.append(state)
    return ChainRun(traj, Counter(traj))


def decorrelation_lag(matrix: LumpedMatrix | np.ndarray, tol: float = 0.01) -> int:
    """Smallest lag t with |second eigenvalue|^t <= tol (reversible chains, so the spectrum is real)."""
    m = matrix.as_float() if isinstance(matrix, LumpedMatrix) else np.asarray(matrix, dtype=float)
    ev = np.sort(np.abs(np.linalg.eigvals(m).real))[::-1]
    slem = ev[1] if len(ev) > 1 else 0.0
    if slem <= tol:
        return 1
    return int(np.ceil(np.log(tol) / np.log(slem)))


# -- element-level walk on an explicit group ----------------------------------------


class CommutingGraph:
    """Precomputed centralizers of an explicitly listed group (at most 10^4 elements)."""

    def __init__(self, elements: Sequence[Permutation], cap: int = 10**4):
        if len(elements) > cap:
            raise CapExceeded(f"group of order {len(elements)} exceeds {cap}")
        self.elements = list(elements)
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.centralizers = [
            np.array([j for j, h in enumerate(self.elements) if compose(g, h) == compose(h, g)])
            for g in self.elements
        ]

    def step(self, s: Permutation, rng: np.random.Generator) -> Permutation:
        i = self.index.get(s)
        if i is None:
            raise ValueError(f"{s} is not in the group")
        c = self.centralizers[i]
        return self.elements[c[int(rng.integers(len(c)))]]

    def run(self, start: Permutation, steps: int, rng: np.random.Generator) -> np.ndarray:
        """Indices of the visited elements."""
        i = self.index[start]
        u = rng.random(steps)
        out = np.empty(steps, dtype=np.int64)
        for t in range(steps):
            c = self.centralizers[i]
            i = c[int(u[t] * len(c))]
            out[t] = i
        return out

    def transition_matrix(self) -> np.ndarray:
        m = len(self.elements)
        out = np.zeros((m, m))
        for i, c in enumerate(self.centralizers):
            out[i, c] = 1.0 / len(c)
        return out

    def stationary(self) -> np.ndarray:
        """pi(s) proportional to 1/|class(s)|; |class(s)| = |G| / |C_G(s)|."""
        w = np.array([len(c) for c in self.centralizers], dtype=float)
        return w / w.sum()


def element_step(group: Sequence[Permutation], s: Permutation, rng: np.random.Generator) -> Permutation:
    if s not in group:
        raise ValueError(f"{s} is not in the group")
    cent = [t for t in group if compose(s, t) == compose(t, s)]
    return cent[int(rng.integers(len(cent)))]
