"""Permutations, integer partitions and the bits of number theory everything else uses.

Permutations speak 1-based one-line notation at every interface: ``images[i-1]``
is the image of ``i``.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from functools import lru_cache


class Permutation:
    """A bijection of {1, ..., m} stored in one-line notation."""

    __slots__ = ("_images",)

    def __init__(self, images: Iterable[int], check: bool = True):
        images = tuple(int(v) for v in images)
        if check and sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{images} is not a permutation of 1..{len(images)}")
        self._images = images

    @classmethod
    def identity(cls, m: int) -> Permutation:
        return cls(range(1, m + 1), check=False)

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable[int]], m: int) -> Permutation:
        images = list(range(1, m + 1))
        seen = set()
        for cyc in cycles:
            cyc = list(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                if not 1 <= a <= m or a in seen:
                    raise ValueError(f"bad cycle {cyc} for degree {m}")
                seen.add(a)
                images[a - 1] = b
        return cls(images)

    @property
    def images(self) -> tuple[int, ...]:
        return self._images

    @property
    def degree(self) -> int:
        return len(self._images)

    def __call__(self, i: int) -> int:
        return self._images[i - 1]

    def __len__(self) -> int:
        return len(self._images)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self._images == other._images

    def __hash__(self) -> int:
        return hash(self._images)

    def __repr__(self) -> str:
        return f"Permutation({list(self._images)})"

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def inverse(self) -> Permutation:
        inv = [0] * len(self._images)
        for i, v in enumerate(self._images, 1):
            inv[v - 1] = i
        return Permutation(inv, check=False)

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles, each starting at its smallest point, fixed points included."""
        seen = [False] * (len(self._images) + 1)
        out = []
        for start in range(1, len(self._images) + 1):
            if seen[start]:
                continue
            cyc = []
            i = start
            while not seen[i]:
                seen[i] = True
                cyc.append(i)
                i = self._images[i - 1]
            out.append(tuple(cyc))
        return out

    def cycle_string(self) -> str:
        cyc = [c for c in self.cycles() if len(c) > 1]
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """(p o q)(i) = p(q(i))."""
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} vs {q.degree}")
    pi = p.images
    return Permutation([pi[v - 1] for v in q.images], check=False)


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, m: int | None = None) -> Permutation:
    """Parse cycle notation such as ``"(1 4 3 2)"`` or ``"(1)(2 3)"``; ``"()"`` is the identity.

    Without ``m`` the degree is the largest label mentioned.
    """
    text = text.strip()
    if not text or _CYCLE_RE.sub("", text).strip():
        raise ValueError(f"not cycle notation: {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(text):
        body = body.replace(",", " ").split()
        if body:
            cycles.append([int(v) for v in body])
    if m is None:
        m = max((max(c) for c in cycles), default=0)
    return Permutation.from_cycles(cycles, m)


class Partition:
    """Integer partition held as its multiplicity vector ``{part: count}``.

    Only strictly positive multiplicities are stored, so equality is structural.
    """

    __slots__ = ("_items", "_weight")

    def __init__(self, mult: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = mult.items() if isinstance(mult, Mapping) else mult
        acc: dict[int, int] = {}
        for i, a in items:
            i, a = int(i), int(a)
            if i < 1 or a < 0:
                raise ValueError(f"invalid part/multiplicity {i}^{a}")
            if a:
                acc[i] = acc.get(i, 0) + a
        self._items = tuple(sorted(acc.items()))
        self._weight = sum(i * a for i, a in self._items)

    @classmethod
    def from_parts(cls, parts: Iterable[int]) -> Partition:
        return cls(Counter(parts))

    @classmethod
    def parse(cls, text: str) -> Partition:
        """Inverse of ``str``: ``"1^3 2"`` -> {1: 3, 2: 1}; ``""`` or ``"0"`` is empty."""
        text = text.strip()
        if text in ("", "0", "()"):
            return cls()
        acc: Counter = Counter()
        for tok in text.split():
            part, _, exp = tok.partition("^")
            acc[int(part)] += int(exp) if exp else 1
        return cls(acc)

    @property
    def mult(self) -> dict[int, int]:
        return dict(self._items)

    @property
    def items(self) -> tuple[tuple[int, int], ...]:
        return self._items

    @property
    def weight(self) -> int:
        return self._weight

    @property
    def num_parts(self) -> int:
        return sum(a for _, a in self._items)

    def __getitem__(self, i: int) -> int:
        for j, a in self._items:
            if j == i:
                return a
        return 0

    def parts(self) -> list[int]:
        """Parts in ascending order."""
        return [i for i, a in self._items for _ in range(a)]

    def union(self, other: Partition) -> Partition:
        return Partition(list(self._items) + list(other._items))

    __add__ = union

    def scaled(self, l: int) -> Partition:
        """Every part multiplied by ``l``."""
        return Partition((i * l, a) for i, a in self._items)

    def counts(self, B: int) -> tuple[int, ...]:
        """Truncated count vector (a_1, ..., a_B)."""
        out = [0] * B
        for i, a in self._items:
            if i <= B:
                out[i - 1] = a
        return tuple(out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Partition) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __lt__(self, other: Partition) -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> tuple:
        return (self._weight, tuple(self.parts()))

    def __str__(self) -> str:
        if not self._items:
            return "0"
        return " ".join(str(i) if a == 1 else f"{i}^{a}" for i, a in self._items)

    def __repr__(self) -> str:
        return f"Partition({str(self)!r})"


def cycle_type(p: Permutation) -> Partition:
    return Partition(Counter(len(c) for c in p.cycles()))


def z_weight(lam: Partition) -> int:
    """z_lambda = prod i^{a_i} a_i!; n!/z_lambda is the size of the class of type lambda."""
    z = 1
    for i, a in lam.items:
        z *= i**a * math.factorial(a)
    return z


def partitions_of(n: int) -> list[Partition]:
    """All partitions of ``n``, ordered by their ascending part lists (1^n first, (n) last)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return [Partition.from_parts(p) for p in _ascending_parts(n, 1)]


@lru_cache(maxsize=None)
def _ascending_parts(n: int, smallest: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(smallest, n + 1):
        rest = n - first
        if rest and rest < first:
            continue
        for tail in _ascending_parts(rest, first):
            out.append((first,) + tail)
    return tuple(out)


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple[int, ...]:
    if n < 1:
        raise ValueError("n must be positive")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return tuple(small + large[::-1])


@lru_cache(maxsize=None)
def totient(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def all_permutations(m: int) -> Iterator[Permutation]:
    from itertools import permutations

    for images in permutations(range(1, m + 1)):
        yield Permutation(images, check=False)
