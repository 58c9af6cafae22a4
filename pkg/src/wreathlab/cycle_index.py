"""Cycle index polynomials over exact rationals.

A monomial ``prod x_i^{e_i}`` is stored as a sorted tuple of ``(i, e_i)`` pairs
(an *exponent vector*); its coefficient in Z_G is the probability that a uniform
element of G has that cycle type.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from collections.abc import Callable, Iterable, Mapping
from fractions import Fraction
from functools import lru_cache

from .core import Partition, Permutation, cycle_type, divisors, lcm, partitions_of, totient, z_weight

Mono = tuple[tuple[int, int], ...]

ONE: Mono = ()


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for i, e in b:
        acc[i] = acc.get(i, 0) + e
    return tuple(sorted(acc.items()))


def mono_weight(m: Mono) -> int:
    return sum(i * e for i, e in m)


def mono_from_partition(lam: Partition) -> Mono:
    return lam.items


def mono_to_partition(m: Mono) -> Partition:
    return Partition(m)


class Poly:
    """Sparse multivariate polynomial in x_1, x_2, ... with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, Fraction] | None = None):
        self.terms: dict[Mono, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[m] = self.terms.get(m, 0) + c
            self.terms = {m: c for m, c in self.terms.items() if c}

    @classmethod
    def const(cls, c) -> Poly:
        return cls({ONE: Fraction(c)})

    @classmethod
    def var(cls, i: int, e: int = 1) -> Poly:
        return cls({((i, e),) if e else ONE: Fraction(1)})

    def __add__(self, other: Poly) -> Poly:
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, 0) + c
        return Poly(acc)

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            other = Fraction(other)
            return Poly({m: c * other for m, c in self.terms.items()})
        acc: dict[Mono, Fraction] = defaultdict(Fraction)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                acc[mono_mul(m1, m2)] += c1 * c2
        return Poly(acc)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Poly:
        result = Poly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CycleIndex):
            other = other.poly
        return isinstance(other, Poly) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"Poly({format_terms(self.terms)})"

    def rename(self, f: Callable[[int], int]) -> Poly:
        """Substitute x_i -> x_{f(i)}."""
        acc: dict[Mono, Fraction] = defaultdict(Fraction)
        for m, c in self.terms.items():
            new: dict[int, int] = {}
            for i, e in m:
                j = f(i)
                new[j] = new.get(j, 0) + e
            acc[tuple(sorted(new.items()))] += c
        return Poly(acc)

    def restrict(self, keep: Iterable[int]) -> Poly:
        """Set every variable outside ``keep`` to 1."""
        keep = set(keep)
        acc: dict[Mono, Fraction] = defaultdict(Fraction)
        for m, c in self.terms.items():
            acc[tuple((i, e) for i, e in m if i in keep)] += c
        return Poly(acc)

    def coeff(self, m: Mono) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.terms.values(), Fraction(0))

    def variables(self) -> set[int]:
        return {i for m in self.terms for i, _ in m}

    def univariate(self) -> list[Fraction]:
        """Set every x_i = x; coefficient list indexed by the power of x."""
        deg = max((sum(e for _, e in m) for m in self.terms), default=0)
        out = [Fraction(0)] * (deg + 1)
        for m, c in self.terms.items():
            out[sum(e for _, e in m)] += c
        return out


class CycleIndex:
    """Z_G for a permutation group G of degree ``degree``."""

    __slots__ = ("degree", "poly")

    def __init__(self, degree: int, poly: Poly):
        self.degree = degree
        self.poly = poly

    def __repr__(self) -> str:
        return f"CycleIndex({self.degree}, {self})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CycleIndex) and self.degree == other.degree and self.poly == other.poly

    def __hash__(self) -> int:
        return hash((self.degree, frozenset(self.poly.terms.items())))

    @property
    def terms(self) -> dict[Mono, Fraction]:
        return self.poly.terms

    def validate(self) -> None:
        if any(c <= 0 for c in self.terms.values()):
            raise ValueError("non-positive coefficient")
        if self.poly.total() != 1:
            raise ValueError(f"coefficients sum to {self.poly.total()}")
        for m in self.terms:
            if mono_weight(m) != self.degree:
                raise ValueError(f"monomial {m} is not of weighted degree {self.degree}")

    def type_distribution(self) -> dict[Partition, Fraction]:
        return {Partition(m): c for m, c in self.terms.items()}

    def sorted_terms(self) -> list[tuple[Mono, Fraction]]:
        return sorted(self.terms.items(), key=lambda mc: _display_key(mc[0]))

    def __str__(self) -> str:
        return format_terms(self.terms)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [
                {"exponents": {str(i): e for i, e in m}, "num": str(c.numerator), "den": str(c.denominator)}
                for m, c in self.sorted_terms()
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)

    @classmethod
    def from_json(cls, data: dict | str) -> CycleIndex:
        if isinstance(data, str):
            data = json.loads(data)
        terms = {}
        for t in data["terms"]:
            m = tuple(sorted((int(i), int(e)) for i, e in t["exponents"].items()))
            terms[m] = Fraction(int(t["num"]), int(t["den"]))
        z = cls(int(data["degree"]), Poly(terms))
        z.validate()
        return z


def _display_key(m: Mono) -> tuple:
    # graded: smaller largest-variable first, then lexicographic on the (index, exponent) pairs
    return (max((i for i, _ in m), default=0), tuple(reversed(m)))


def format_terms(terms: Mapping[Mono, Fraction]) -> str:
    if not terms:
        return "0"
    parts = []
    for m, c in sorted(terms.items(), key=lambda mc: _display_key(mc[0])):
        mono = "*".join(f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in m) or "1"
        parts.append(f"{c}*{mono}" if c != 1 else mono)
    return " + ".join(parts)


# -- constructors ------------------------------------------------------------


def trivial(m: int) -> CycleIndex:
    """The trivial group on m points: x_1^m."""
    return CycleIndex(m, Poly.var(1, m) if m else Poly.const(1))


@lru_cache(maxsize=None)
def build_cyclic(n: int) -> CycleIndex:
    if n < 1:
        raise ValueError("n must be positive")
    return CycleIndex(n, Poly({((d, n // d),): Fraction(totient(d), n) for d in divisors(n)}))


@lru_cache(maxsize=None)
def build_symmetric(n: int) -> CycleIndex:
    if n < 0:
        raise ValueError("n must be non-negative")
    return CycleIndex(n, Poly({lam.items: Fraction(1, z_weight(lam)) for lam in partitions_of(n)}))


def from_elements(perms: Iterable[Permutation]) -> CycleIndex:
    perms = list(perms)
    if not perms:
        raise ValueError("empty element list")
    m = perms[0].degree
    acc: dict[Mono, int] = defaultdict(int)
    for p in perms:
        if p.degree != m:
            raise ValueError("degree mismatch among elements")
        acc[cycle_type(p).items] += 1
    return CycleIndex(m, Poly({mono: Fraction(c, len(perms)) for mono, c in acc.items()}))


def _block_variable(z_gamma: CycleIndex, i: int) -> Poly:
    # t_i = Z_Gamma(x_i, x_{2i}, ..., x_{ki})
    return z_gamma.poly.rename(lambda j: j * i)


def wreath_compose(z_h: CycleIndex, z_gamma: CycleIndex) -> CycleIndex:
    """Z of Gamma^n x| H: substitute t_i = Z_Gamma(x_i, x_{2i}, ...) into Z_H."""
    t: dict[int, Poly] = {}
    powers: dict[tuple[int, int], Poly] = {}
    acc = Poly()
    for m, c in z_h.terms.items():
        term = Poly.const(c)
        for i, e in m:
            if (i, e) not in powers:
                if i not in t:
                    t[i] = _block_variable(z_gamma, i)
                powers[i, e] = t[i] ** e
            term = term * powers[i, e]
        acc = acc + term
    return CycleIndex(z_h.degree * z_gamma.degree, acc)


def wreath_symmetric(z_gamma: CycleIndex, n: int, keep: Iterable[int] | None = None) -> CycleIndex | Poly:
    """Z of Gamma^n x| S_n via the recurrence m Z_m = sum_{i=1}^m t_i Z_{m-i}.

    Agrees with ``wreath_compose(build_symmetric(n), z_gamma)`` but never expands
    Z_{S_n}. With ``keep`` every other variable is set to 1 as the recursion runs and
    the bare marginal :class:`Poly` is returned.
    """
    keep = None if keep is None else set(keep)
    t = []
    for i in range(1, n + 1):
        ti = _block_variable(z_gamma, i)
        t.append(ti if keep is None else ti.restrict(keep))
    zs = [Poly.const(1)]
    for m in range(1, n + 1):
        acc = Poly()
        for i in range(1, m + 1):
            acc = acc + t[i - 1] * zs[m - i]
        zs.append(acc * Fraction(1, m))
    if keep is None:
        return CycleIndex(n * z_gamma.degree, zs[n])
    return zs[n]


def wreath_symmetric_sequence(z_gamma: CycleIndex, n_max: int, keep: Iterable[int]) -> list[Poly]:
    """Marginal cycle-index polynomials of Gamma^n x| S_n for n = 0..n_max, variables outside ``keep`` set to 1."""
    keep = set(keep)
    t = [_block_variable(z_gamma, i).restrict(keep) for i in range(1, n_max + 1)]
    zs = [Poly.const(1)]
    for m in range(1, n_max + 1):
        acc = Poly()
        for i in range(1, m + 1):
            acc = acc + t[i - 1] * zs[m - i]
        zs.append(acc * Fraction(1, m))
    return zs


def product_compose(z_a: CycleIndex, z_b: CycleIndex) -> CycleIndex:
    """Cycle index of A x B acting coordinatewise on [k] x [n]."""
    acc: dict[Mono, Fraction] = defaultdict(Fraction)
    for ma, ca in z_a.terms.items():
        for mb, cb in z_b.terms.items():
            mono: dict[int, int] = {}
            for i, e in ma:
                for j, f in mb:
                    l = lcm(i, j)
                    mono[l] = mono.get(l, 0) + math.gcd(i, j) * e * f
            acc[tuple(sorted(mono.items()))] += ca * cb
    return CycleIndex(z_a.degree * z_b.degree, Poly(acc))


# -- queries -----------------------------------------------------------------


def prob_of_type(z: CycleIndex, lam: Partition) -> Fraction:
    if lam.weight != z.degree:
        raise ValueError(f"partition of {lam.weight} vs cycle index of degree {z.degree}")
    return z.poly.coeff(lam.items)


def cycles_gf(z: CycleIndex) -> list[Fraction]:
    """Coefficients of C_G(x) = Z_G(x, x, ..., x); entry j is P(j cycles)."""
    return z.poly.univariate()


def marginal_gf(z: CycleIndex, keep: Iterable[int]) -> Poly:
    return z.poly.restrict(keep)


def number_of_cycles_moments(z: CycleIndex) -> tuple[Fraction, Fraction]:
    """Mean and variance of the number of cycles."""
    gf = cycles_gf(z)
    mean = sum((j * p for j, p in enumerate(gf)), Fraction(0))
    second = sum((j * j * p for j, p in enumerate(gf)), Fraction(0))
    return mean, second - mean * mean


# -- univariate helpers (coefficient lists, lowest power first) ----------------


def upoly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def upoly_trim(a: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def upoly_add(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out
