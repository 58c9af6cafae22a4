"""Wreath products Gamma^n x| S_n acting on {1, ..., kn}.

Block p holds the points (p-1)k+1 .. pk. An element (gamma_1, ..., gamma_n; eta)
sends position j of block p to position gamma_{eta(p)}(j) of block eta(p):

    sigma((p-1)k + j) = (eta(p) - 1)k + gamma_{eta(p)}(j)

This is the convention under which both worked examples in the literature come out
right (the k=2, n=3 one-line image 6 5 2 1 3 4 and the k=3, n=4 element of type 4 8).
"""

from __future__ import annotations

import json
import math
import os
import re
from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from itertools import permutations, product
from pathlib import Path

import numpy as np

from .core import Partition, Permutation, all_permutations, compose, cycle_type, parse_cycles
from .cycle_index import CycleIndex, build_cyclic, build_symmetric, from_elements

DEFAULT_CAP = 10**7
CLOSURE_CAP = 10**4


class CapExceeded(ValueError):
    """An enumeration would exceed the configured size limit."""


def enumeration_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    return int(os.environ.get("WREATHLAB_CAP", DEFAULT_CAP))


class GroupSpec:
    """A permutation group Gamma of degree k: S_k, C_k, or an explicit element list."""

    def __init__(self, kind: str, k: int, elements: Sequence[Permutation] | None = None, check: bool = True):
        if kind not in ("symmetric", "cyclic", "explicit"):
            raise ValueError(f"unknown group kind {kind!r}")
        if k < 1:
            raise ValueError("k must be positive")
        self.kind = kind
        self.k = k
        self._elements = None
        if kind == "explicit":
            if not elements:
                raise ValueError("explicit group needs elements")
            elements = list(dict.fromkeys(elements))
            if any(g.degree != k for g in elements):
                raise ValueError("elements must all have degree k")
            if check and len(elements) <= CLOSURE_CAP:
                _check_group(elements)
            self._elements = elements

    @classmethod
    def symmetric(cls, k: int) -> GroupSpec:
        return cls("symmetric", k)

    @classmethod
    def cyclic(cls, k: int) -> GroupSpec:
        return cls("cyclic", k)

    @classmethod
    def trivial(cls, k: int = 1) -> GroupSpec:
        if k == 1:
            return cls("symmetric", 1)
        return cls("explicit", k, [Permutation.identity(k)])

    @classmethod
    def explicit(cls, elements: Sequence[Permutation]) -> GroupSpec:
        return cls("explicit", elements[0].degree, elements)

    @classmethod
    def parse(cls, text: str) -> GroupSpec:
        """``"S3"``, ``"C4"`` or ``"@path.json"`` (an explicit element list)."""
        text = text.strip()
        if text.startswith("@"):
            return cls.load(text[1:])
        m = re.fullmatch(r"([SsCc])(\d+)", text)
        if not m:
            raise ValueError(f"bad group spec {text!r}; expected S<k>, C<k> or @file.json")
        k = int(m.group(2))
        return cls.symmetric(k) if m.group(1) in "Ss" else cls.cyclic(k)

    @classmethod
    def load(cls, path: str | Path) -> GroupSpec:
        data = json.loads(Path(path).read_text())
        if isinstance(data, dict):
            raw, k = data["elements"], data.get("degree")
        else:
            raw, k = data, None
        elements = []
        for e in raw:
            elements.append(parse_cycles(e, k) if isinstance(e, str) else Permutation(e))
        if k is None:
            k = max(g.degree for g in elements)
            elements = [Permutation(list(g.images) + list(range(g.degree + 1, k + 1))) for g in elements]
        return cls.explicit(elements)

    def __repr__(self) -> str:
        if self.kind == "explicit":
            return f"GroupSpec(explicit, k={self.k}, order={self.order})"
        return f"{'S' if self.kind == 'symmetric' else 'C'}{self.k}"

    @property
    def order(self) -> int:
        if self.kind == "symmetric":
            return math.factorial(self.k)
        if self.kind == "cyclic":
            return self.k
        return len(self._elements)

    def elements(self) -> list[Permutation]:
        if self._elements is None:
            if self.kind == "symmetric":
                self._elements = list(all_permutations(self.k))
            else:
                self._elements = [_rotation(self.k, r) for r in range(self.k)]
        return self._elements

    @cached_property
    def cycle_index(self) -> CycleIndex:
        if self.kind == "symmetric":
            return build_symmetric(self.k)
        if self.kind == "cyclic":
            return build_cyclic(self.k)
        return from_elements(self._elements)

    @cached_property
    def type_table(self) -> TypeTable:
        return TypeTable.from_cycle_index(self.cycle_index)

    def sample(self, rng: np.random.Generator) -> Permutation:
        if self.kind == "symmetric":
            return Permutation(rng.permutation(self.k) + 1, check=False)
        if self.kind == "cyclic":
            return _rotation(self.k, int(rng.integers(self.k)))
        return self._elements[int(rng.integers(len(self._elements)))]

    def sample_batch(self, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
        """0-based one-line images, array of shape ``shape + (k,)``."""
        k = self.k
        if self.kind == "symmetric":
            return np.argsort(rng.random(shape + (k,)), axis=-1)
        if self.kind == "cyclic":
            r = rng.integers(k, size=shape)
            return (np.arange(k) + r[..., None]) % k
        table = np.array([g.images for g in self._elements]) - 1
        return table[rng.integers(len(table), size=shape)]


def _rotation(k: int, r: int) -> Permutation:
    return Permutation([(j + r) % k + 1 for j in range(k)], check=False)


def _check_group(elements: Sequence[Permutation]) -> None:
    s = set(elements)
    k = elements[0].degree
    if Permutation.identity(k) not in s:
        raise ValueError("element list does not contain the identity")
    for g in elements:
        if g.inverse() not in s:
            raise ValueError(f"not closed under inverses: {g}")
        for h in elements:
            if compose(g, h) not in s:
                raise ValueError(f"not closed under composition: {g} * {h}")


class TypeTable:
    """Cycle-type distribution of a uniform group element, ready for vectorised draws."""

    def __init__(self, types: Sequence[Partition], probs: Sequence[Fraction]):
        self.types = list(types)
        self.exact = list(probs)
        p = np.array([float(x) for x in probs])
        self.probs = p / p.sum()
        self.cdf = np.cumsum(self.probs)
        self.cdf[-1] = 1.0

    @classmethod
    def from_cycle_index(cls, z: CycleIndex) -> TypeTable:
        items = sorted(z.type_distribution().items(), key=lambda tp: tp[0].sort_key())
        return cls([t for t, _ in items], [p for _, p in items])

    def __len__(self) -> int:
        return len(self.types)

    def draw(self, rng: np.random.Generator, size=None):
        """Indices into ``types``."""
        u = rng.random(size)
        return np.searchsorted(self.cdf, u, side="right")

    def count_matrix(self, B: int) -> np.ndarray:
        """Row t holds (a_1, ..., a_B) of type t."""
        return np.array([t.counts(B) for t in self.types], dtype=np.int64).reshape(len(self.types), B)

    def part_counts(self) -> np.ndarray:
        return np.array([t.num_parts for t in self.types], dtype=np.int64)


@dataclass(frozen=True)
class WreathElement:
    gammas: tuple[Permutation, ...]
    eta: Permutation

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(self.gammas))
        if len(self.gammas) != self.eta.degree:
            raise ValueError("need exactly one gamma per block")
        if len({g.degree for g in self.gammas}) > 1:
            raise ValueError("gammas must share a degree")

    @property
    def n(self) -> int:
        return self.eta.degree

    @property
    def k(self) -> int:
        return self.gammas[0].degree if self.gammas else 0

    def induced(self) -> Permutation:
        return induced_permutation(self)

    def __mul__(self, other: WreathElement) -> WreathElement:
        return multiply(self, other)

    def __str__(self) -> str:
        return "[" + ",".join(g.cycle_string() for g in self.gammas) + "];" + self.eta.cycle_string()

    @classmethod
    def parse(cls, text: str, k: int | None = None) -> WreathElement:
        """Parse ``"[(1 3 2),(1)(2 3),(3 1 2),()];(1 4 3 2)"``.

        Block size defaults to the largest label among the gammas.
        """
        m = re.fullmatch(r"\s*\[(.*)\]\s*;\s*(.*)", text)
        if not m:
            raise ValueError(f"bad wreath element literal {text!r}")
        raw = [g.strip() for g in re.split(r",(?![^()]*\))", m.group(1))]
        if k is None:
            k = max((parse_cycles(g).degree for g in raw), default=1) or 1
        gammas = tuple(parse_cycles(g, k) for g in raw)
        eta = parse_cycles(m.group(2), len(gammas))
        return cls(gammas, eta)


def induced_permutation(w: WreathElement) -> Permutation:
    k = w.k
    images = []
    for p in range(1, w.n + 1):
        q = w.eta(p)
        g = w.gammas[q - 1]
        base = (q - 1) * k
        images.extend(base + g(j) for j in range(1, k + 1))
    return Permutation(images, check=False)


def multiply(w1: WreathElement, w2: WreathElement) -> WreathElement:
    """The element whose induced permutation is induced(w1) o induced(w2)."""
    eta = compose(w1.eta, w2.eta)
    inv1 = w1.eta.inverse()
    gammas = tuple(compose(w1.gammas[q - 1], w2.gammas[inv1(q) - 1]) for q in range(1, w1.n + 1))
    return WreathElement(gammas, eta)


def identity_element(k: int, n: int) -> WreathElement:
    return WreathElement((Permutation.identity(k),) * n, Permutation.identity(n))


def sample_uniform(gamma: GroupSpec, n: int, rng: np.random.Generator) -> WreathElement:
    gammas = tuple(gamma.sample(rng) for _ in range(n))
    eta = Permutation(rng.permutation(n) + 1, check=False)
    return WreathElement(gammas, eta)


def sample_induced_batch(gamma: GroupSpec, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` uniform elements as induced permutations, 1-based one-line rows of length kn."""
    k = gamma.k
    gam = gamma.sample_batch(rng, (size, n))  # (size, n, k), 0-based
    eta = np.argsort(rng.random((size, n)), axis=1)  # 0-based eta(p)
    rows = np.arange(size)[:, None]
    sigma = eta[:, :, None] * k + gam[rows, eta]
    return sigma.reshape(size, n * k) + 1


def wreath_order(gamma: GroupSpec, n: int) -> int:
    return gamma.order**n * math.factorial(n)


def enumerate_wreath(gamma: GroupSpec, n: int, cap: int | None = None) -> Iterator[tuple[WreathElement, Permutation]]:
    """Every element of Gamma^n x| S_n exactly once, with its induced permutation."""
    size = wreath_order(gamma, n)
    limit = enumeration_cap(cap)
    if size > limit:
        raise CapExceeded(f"|G| = {size} exceeds enumeration cap {limit}")
    elems = gamma.elements()
    etas = [Permutation(e, check=False) for e in permutations(range(1, n + 1))]
    for gammas in product(elems, repeat=n):
        for eta in etas:
            w = WreathElement(gammas, eta)
            yield w, induced_permutation(w)


def subgroup_closure(generators: Iterable[Permutation], cap: int = CLOSURE_CAP) -> GroupSpec:
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    k = gens[0].degree
    if any(g.degree != k for g in gens):
        raise ValueError("generators must share a degree")
    ident = Permutation.identity(k)
    seen = {ident}
    order = [ident]
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = compose(s, g)
            if h not in seen:
                seen.add(h)
                order.append(h)
                queue.append(h)
                if len(seen) > cap:
                    raise CapExceeded(f"subgroup exceeds {cap} elements")
    return GroupSpec("explicit", k, order, check=False)


def type_census(perms: Iterable[Permutation]) -> dict[Partition, Fraction]:
    """Exact cycle-type frequencies over a finite list of permutations."""
    counts: dict[Partition, int] = {}
    total = 0
    for p in perms:
        t = cycle_type(p)
        counts[t] = counts.get(t, 0) + 1
        total += 1
    return {t: Fraction(c, total) for t, c in counts.items()}
