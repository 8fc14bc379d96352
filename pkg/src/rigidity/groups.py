"""Permutations of [n], explicit permutation groups and their orbit statistics.

Groups here are small (degree <= 8), so every group keeps its full sorted
element list.  Internally a permutation is a 0-based image tuple; points in
public results (supports, fixed points, orbits) and in cycle notation are
1-based, matching the universe [n] = {1..n}.

Composition follows function notation: ``(f * g)(x) == f(g(x))``.
"""
from __future__ import annotations

import itertools
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

MAX_DEGREE = 8
MAX_SUBGROUP_DEGREE = 6


def _compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(a[x] for x in b)


def _inverse(a: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def _identity(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def _order(a: tuple[int, ...]) -> int:
    seen = [False] * len(a)
    result = 1
    for start in range(len(a)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = a[x]
            length += 1
        result = math.lcm(result, length)
    return result


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection of [n]; ``imgs[j]`` is the (0-based) image of point j + 1 minus one."""

    imgs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "imgs", tuple(int(x) for x in self.imgs))
        if sorted(self.imgs) != list(range(len(self.imgs))):
            raise ValueError(f"{self.imgs} is not a permutation")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(_identity(n))

    @classmethod
    def from_cycles(cls, text: str, n: int) -> "Permutation":
        """Parse cycle notation such as ``"(1 2)(3 4 5)"`` on [n]."""
        imgs = list(range(n))
        text = text.strip()
        if text in ("", "()", "id", "e"):
            return cls(tuple(imgs))
        if not re.fullmatch(r"(\(\s*\d+(?:[\s,]+\d+)*\s*\)\s*)+", text):
            raise ValueError(f"cannot parse cycle notation {text!r}")
        result = tuple(range(n))
        for body in re.findall(r"\(([^)]*)\)", text):
            pts = [int(tok) - 1 for tok in re.split(r"[\s,]+", body.strip())]
            if len(set(pts)) != len(pts) or not all(0 <= p < n for p in pts):
                raise ValueError(f"bad cycle ({body}) on [{n}]")
            cyc = list(range(n))
            for a, b in zip(pts, pts[1:] + pts[:1]):
                cyc[a] = b
            # cycles written left to right are applied right to left
            result = _compose(result, tuple(cyc))
        return cls(result)

    @property
    def degree(self) -> int:
        return len(self.imgs)

    def __call__(self, point: int) -> int:
        """Image of a 1-based point."""
        return self.imgs[point - 1] + 1

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return Permutation(_compose(self.imgs, other.imgs))

    def inverse(self) -> "Permutation":
        return Permutation(_inverse(self.imgs))

    def is_identity(self) -> bool:
        return self.imgs == _identity(self.degree)

    def order(self) -> int:
        return _order(self.imgs)

    def moved(self) -> frozenset[int]:
        """1-based points moved by this permutation."""
        return frozenset(i + 1 for i, x in enumerate(self.imgs) if x != i)

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, 1-based, each starting at its smallest point."""
        seen = set()
        out = []
        for start in range(self.degree):
            if start in seen or self.imgs[start] == start:
                continue
            cyc = []
            x = start
            while x not in seen:
                seen.add(x)
                cyc.append(x + 1)
                x = self.imgs[x]
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)


def _closure(gens: Sequence[tuple[int, ...]], n: int) -> list[tuple[int, ...]]:
    ident = _identity(n)
    elements = {ident}
    frontier = [ident]
    gens = [g for g in set(gens) if g != ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _compose(x, g)
                if y not in elements:
                    elements.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(elements)


class PermGroup:
    """An explicit permutation group of degree n.

    ``elements`` is sorted lexicographically by image sequence; ``generators``
    is a sub-list whose closure is the whole group.
    """

    def __init__(self, degree: int, elements: Iterable[tuple[int, ...]],
                 generators: Iterable[tuple[int, ...]] | None = None):
        self.degree = degree
        self._elements = tuple(sorted(set(tuple(e) for e in elements)))
        self._element_set = frozenset(self._elements)
        if generators is None:
            generators = _greedy_generators(self._elements, degree)
        self._generators = tuple(tuple(g) for g in generators)

    @property
    def elements(self) -> tuple[Permutation, ...]:
        return tuple(Permutation(e) for e in self._elements)

    @property
    def generators(self) -> tuple[Permutation, ...]:
        return tuple(Permutation(g) for g in self._generators)

    @property
    def raw_elements(self) -> tuple[tuple[int, ...], ...]:
        return self._elements

    @property
    def raw_generators(self) -> tuple[tuple[int, ...], ...]:
        return self._generators

    def order(self) -> int:
        return len(self._elements)

    def __len__(self) -> int:
        return len(self._elements)

    def __contains__(self, g) -> bool:
        if isinstance(g, Permutation):
            g = g.imgs
        return tuple(g) in self._element_set

    def __eq__(self, other) -> bool:
        return (isinstance(other, PermGroup) and self.degree == other.degree
                and self._element_set == other._element_set)

    def __hash__(self) -> int:
        return hash((self.degree, self._element_set))

    def __repr__(self) -> str:
        gens = ", ".join(str(g) for g in self.generators) or "()"
        return f"PermGroup(degree={self.degree}, order={self.order()}, <{gens}>)"

    def is_trivial(self) -> bool:
        return len(self._elements) == 1

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return self.degree == other.degree and self._element_set <= other._element_set

    def check_group(self) -> bool:
        """Direct check of the group axioms and Lagrange's bound against n!."""
        ident = _identity(self.degree)
        if ident not in self._element_set:
            return False
        for a in self._elements:
            if _inverse(a) not in self._element_set:
                return False
            for b in self._generators:
                if _compose(a, b) not in self._element_set:
                    return False
        if any(g not in self._element_set for g in self._generators):
            return False
        if _closure(self._generators, self.degree) != list(self._elements):
            return False
        return math.factorial(self.degree) % len(self._elements) == 0

    @cached_property
    def is_abelian(self) -> bool:
        gens = self._generators
        return all(_compose(a, b) == _compose(b, a) for a in gens for b in gens)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*(_order(e) for e in self._elements))

    def element_orders(self) -> Counter:
        return Counter(_order(e) for e in self._elements)

    def center(self) -> list[tuple[int, ...]]:
        gens = self._generators
        return [z for z in self._elements if all(_compose(z, g) == _compose(g, z) for g in gens)]

    def conjugate(self, g: Permutation | Sequence[int]) -> "PermGroup":
        """The group g H g^-1."""
        g = tuple(g.imgs if isinstance(g, Permutation) else g)
        gi = _inverse(g)
        conj = lambda h: _compose(_compose(g, h), gi)  # noqa: E731
        return PermGroup(self.degree, (conj(h) for h in self._elements),
                         [conj(h) for h in self._generators])

    def restrict(self, points: Iterable[int]) -> "PermGroup":
        """H restricted to a union of orbits (1-based points), re-indexed in sorted order."""
        pts = sorted(set(points))
        zero = [p - 1 for p in pts]
        pos = {p: i for i, p in enumerate(zero)}
        images = set()
        for e in self._elements:
            try:
                images.add(tuple(pos[e[p]] for p in zero))
            except KeyError:
                raise ValueError(f"{pts} is not a union of orbits") from None
        gens = [tuple(pos[g[p]] for p in zero) for g in self._generators]
        return PermGroup(len(pts), images, gens)

    def orbits(self) -> list[frozenset[int]]:
        """Orbits on [n] as 1-based point sets, ordered by smallest point."""
        return [frozenset(p + 1 for p in orb)
                for orb in _orbits_of(self._generators, range(self.degree),
                                      lambda g, x: g[x])]

    def to_json(self) -> str:
        return json.dumps({"degree": self.degree,
                           "generators": [str(g) for g in self.generators]})

    @classmethod
    def from_json(cls, text: str) -> "PermGroup":
        data = json.loads(text)
        n = data["degree"]
        return close([Permutation.from_cycles(g, n) for g in data["generators"]], degree=n)


def _greedy_generators(elements: Sequence[tuple[int, ...]], n: int) -> list[tuple[int, ...]]:
    """A small generating set: scan elements by decreasing order, keep non-redundant ones."""
    target = len(elements)
    gens: list[tuple[int, ...]] = []
    current = {_identity(n)}
    for e in sorted(elements, key=lambda x: (-_order(x), x)):
        if len(current) == target:
            break
        if e in current:
            continue
        gens.append(e)
        current = set(_closure(gens, n))
    return gens


def close(generators: Sequence[Permutation], degree: int | None = None) -> PermGroup:
    """The group generated by ``generators``."""
    degrees = {g.degree for g in generators}
    if degree is not None:
        degrees.add(degree)
    if len(degrees) > 1:
        raise ValueError(f"generators have mixed degrees {sorted(degrees)}")
    if not degrees:
        raise ValueError("degree is required when there are no generators")
    n = degrees.pop()
    gens = []
    for g in generators:
        if not g.is_identity() and g.imgs not in gens:
            gens.append(g.imgs)
    return PermGroup(n, _closure(gens, n), gens)


def symmetric_group(n: int) -> PermGroup:
    gens = []
    if n >= 2:
        gens.append(tuple([1, 0] + list(range(2, n))))
        gens.append(tuple(list(range(1, n)) + [0]))
    return PermGroup(n, itertools.permutations(range(n)), gens)


def support(group_or_elements: PermGroup | Iterable[Permutation]) -> tuple[frozenset[int], int]:
    """(Spt, spt): points moved by some element of the generated group."""
    if isinstance(group_or_elements, PermGroup):
        gens = group_or_elements.raw_generators
    else:
        gens = [g.imgs for g in group_or_elements]
    # a point is moved by some group element iff some generator moves it
    moved = frozenset(i + 1 for g in gens for i, x in enumerate(g) if x != i)
    return moved, len(moved)


def fixed_points(H: PermGroup) -> frozenset[int]:
    moved, _ = support(H)
    return frozenset(range(1, H.degree + 1)) - moved


def has_fixed_point(H: PermGroup) -> bool:
    return bool(fixed_points(H))


def _orbits_of(gens, domain, act) -> list[list]:
    parent = {x: x for x in domain}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x in parent:
            a, b = find(x), find(act(g, x))
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict = {}
    for x in parent:
        groups.setdefault(find(x), []).append(x)
    return [sorted(v) for _, v in sorted(groups.items())]


@dataclass(frozen=True)
class OrbitStats:
    p: int
    q: int
    s: int
    point_orbits: tuple[frozenset[int], ...] = field(compare=False)
    pair_orbits: tuple[frozenset[tuple[int, int]], ...] = field(compare=False)


def orbit_stats(H: PermGroup) -> OrbitStats:
    """p = degree, q = orbits on points, s = orbits on ordered pairs."""
    n = H.degree
    gens = H.raw_generators
    points = _orbits_of(gens, range(n), lambda g, x: g[x])
    pairs = _orbits_of(gens, itertools.product(range(n), repeat=2),
                       lambda g, x: (g[x[0]], g[x[1]]))
    return OrbitStats(
        p=n,
        q=len(points),
        s=len(pairs),
        point_orbits=tuple(frozenset(x + 1 for x in o) for o in points),
        pair_orbits=tuple(frozenset((a + 1, b + 1) for a, b in o) for o in pairs),
    )


# -- subgroup enumeration -----------------------------------------------------

@lru_cache(maxsize=None)
def _subgroup_masks(d: int) -> tuple[int, ...]:
    """All subgroups of Sym_d as bitmasks over the lexicographic element list."""
    elems = list(itertools.permutations(range(d)))
    index = {e: i for i, e in enumerate(elems)}
    N = len(elems)
    mult = [[index[_compose(a, b)] for b in elems] for a in elems]
    inv = [index[_inverse(a)] for a in elems]
    ident = index[_identity(d)]

    def closure(gens: list[int]) -> int:
        mask = 1 << ident
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                row = mult[x]
                for g in gens:
                    y = row[g]
                    if not (mask >> y) & 1:
                        mask |= 1 << y
                        nxt.append(y)
            frontier = nxt
        return mask

    def members(mask: int) -> list[int]:
        return [i for i in range(N) if (mask >> i) & 1]

    def conjugates(mask: int) -> set[int]:
        mem = members(mask)
        out = set()
        for g in range(N):
            gi = inv[g]
            row = mult[g]
            m = 0
            for h in mem:
                m |= 1 << mult[row[h]][gi]
            out.add(m)
        return out

    cyclic = {}
    for i in range(N):
        cyclic.setdefault(closure([i]), i)
    known: set[int] = set()
    reps: list[int] = []

    def register(mask: int) -> bool:
        if mask in known:
            return False
        known.update(conjugates(mask))
        reps.append(mask)
        return True

    for mask in sorted(cyclic, key=lambda m: (bin(m).count("1"), m)):
        register(mask)
    # cyclic extension over conjugacy-class representatives
    queue = list(reps)
    while queue:
        H = queue.pop()
        gensH = _mask_generators(H, members, closure)
        for C, c in cyclic.items():
            if C & ~H == 0:
                continue
            K = closure(gensH + [c])
            if register(K):
                queue.append(K)
    return tuple(sorted(known, key=lambda m: (bin(m).count("1"), m)))


def _mask_generators(mask, members, closure) -> list[int]:
    gens: list[int] = []
    cur = closure([])
    for x in members(mask):
        if not (cur >> x) & 1:
            gens.append(x)
            cur = closure(gens)
            if cur == mask:
                break
    return gens


@lru_cache(maxsize=None)
def subgroups_of_sym(d: int) -> tuple[PermGroup, ...]:
    """Every subgroup of Sym_d (d <= 6), ordered by size then element set."""
    if not 1 <= d <= MAX_SUBGROUP_DEGREE:
        raise ValueError(f"subgroup enumeration supports degrees 1..{MAX_SUBGROUP_DEGREE}, got {d}")
    masks = _subgroup_masks(d)
    elems = list(itertools.permutations(range(d)))
    out = []
    for mask in masks:
        members = [elems[i] for i in range(len(elems)) if (mask >> i) & 1]
        out.append(PermGroup(d, members))
    return tuple(out)


# -- abstract isomorphism and classification ----------------------------------

def _extend_hom(G: PermGroup, gens, images, n_h: int) -> dict | None:
    """Extend gens -> images to a homomorphism on <gens>, or None if inconsistent."""
    ident = _identity(G.degree)
    phi = {ident: _identity(n_h)}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            px = phi[x]
            for g, h in zip(gens, images):
                y = _compose(x, g)
                py = _compose(px, h)
                seen = phi.get(y)
                if seen is None:
                    phi[y] = py
                    nxt.append(y)
                elif seen != py:
                    return None
        frontier = nxt
    return phi


def are_isomorphic(G: PermGroup, H: PermGroup) -> bool:
    """Abstract isomorphism by backtracking over images of a generating set of G."""
    if G.order() != H.order():
        return False
    if G.is_abelian != H.is_abelian or G.element_orders() != H.element_orders():
        return False
    gens = list(G.raw_generators)
    if not gens:
        return True
    by_order: dict[int, list] = {}
    for h in H.raw_elements:
        by_order.setdefault(_order(h), []).append(h)
    candidates = [by_order.get(_order(g), []) for g in gens]

    def search(i: int, images: list) -> bool:
        if i == len(gens):
            phi = _extend_hom(G, gens, images, H.degree)
            return phi is not None and len(set(phi.values())) == G.order()
        for h in candidates[i]:
            images.append(h)
            if _extend_hom(G, gens[: i + 1], images, H.degree) is not None and search(i + 1, images):
                return True
            images.pop()
        return False

    return search(0, [])


@dataclass(frozen=True)
class GroupClass:
    """Isomorphism-type label from the taxonomy of typical automorphism groups.

    ``kind`` is one of Trivial, Z2Power, Z3, Sym3, Z2PowerTimesZ3,
    Z2PowerTimesSym3, Other.
    """

    kind: str
    t: int = 0
    order: int = 0
    abelian: bool = False
    exponent: int = 0

    @classmethod
    def trivial(cls) -> "GroupClass":
        return cls("Trivial", order=1, abelian=True, exponent=1)

    @classmethod
    def z2_power(cls, t: int) -> "GroupClass":
        return cls("Z2Power", t, 2**t, True, 2)

    @classmethod
    def z3(cls) -> "GroupClass":
        return cls("Z3", 0, 3, True, 3)

    @classmethod
    def sym3(cls) -> "GroupClass":
        return cls("Sym3", 0, 6, False, 6)

    @classmethod
    def z2_power_times_z3(cls, t: int) -> "GroupClass":
        return cls("Z2PowerTimesZ3", t, 3 * 2**t, True, 6)

    @classmethod
    def z2_power_times_sym3(cls, t: int) -> "GroupClass":
        return cls("Z2PowerTimesSym3", t, 6 * 2**t, False, 6)

    @classmethod
    def other(cls, order: int, abelian: bool, exponent: int) -> "GroupClass":
        return cls("Other", 0, order, abelian, exponent)

    def label(self) -> str:
        if self.kind == "Trivial":
            return "Trivial"
        if self.kind == "Z2Power":
            return f"Z2^{self.t}"
        if self.kind in ("Z3", "Sym3"):
            return self.kind
        if self.kind == "Z2PowerTimesZ3":
            return f"Z2^{self.t} x Z3"
        if self.kind == "Z2PowerTimesSym3":
            return f"Z2^{self.t} x Sym3"
        return (f"Other(order={self.order},abelian={str(self.abelian).lower()},"
                f"exponent={self.exponent})")

    __str__ = label

    def sort_key(self) -> tuple:
        kinds = ("Trivial", "Z2Power", "Z3", "Sym3", "Z2PowerTimesZ3", "Z2PowerTimesSym3", "Other")
        return (kinds.index(self.kind), self.t, self.order, self.abelian, self.exponent)

    @classmethod
    def parse(cls, text: str) -> "GroupClass":
        text = text.strip()
        if text == "Trivial":
            return cls.trivial()
        if text == "Z3":
            return cls.z3()
        if text == "Sym3":
            return cls.sym3()
        m = re.fullmatch(r"Z2\^(\d+)(?: x (Z3|Sym3))?", text)
        if m:
            t = int(m.group(1))
            if t < 1:
                raise ValueError(f"bad group class {text!r}")
            if m.group(2) is None:
                return cls.z2_power(t)
            return cls.z2_power_times_z3(t) if m.group(2) == "Z3" else cls.z2_power_times_sym3(t)
        m = re.fullmatch(r"Other\(order=(\d+),abelian=(true|false),exponent=(\d+)\)", text)
        if m:
            return cls.other(int(m.group(1)), m.group(2) == "true", int(m.group(3)))
        raise ValueError(f"unknown group class {text!r}")


@lru_cache(maxsize=None)
def _z2_power_times_sym3_model(t: int) -> PermGroup:
    n = 2 * t + 3
    gens = []
    for j in range(t):
        g = list(range(n))
        g[2 * j], g[2 * j + 1] = 2 * j + 1, 2 * j
        gens.append(Permutation(g))
    base = 2 * t
    cyc = list(range(n))
    cyc[base], cyc[base + 1], cyc[base + 2] = base + 1, base + 2, base
    swap = list(range(n))
    swap[base], swap[base + 1] = base + 1, base
    gens += [Permutation(cyc), Permutation(swap)]
    return close(gens)


def _two_power(x: int) -> int | None:
    """t with x == 2**t, else None."""
    if x < 1 or x & (x - 1):
        return None
    return x.bit_length() - 1


def classify(H: PermGroup) -> GroupClass:
    order = H.order()
    abelian = H.is_abelian
    exponent = H.exponent
    if order == 1:
        return GroupClass.trivial()
    t = _two_power(order)
    if t is not None and exponent == 2:
        return GroupClass.z2_power(t)
    if order == 3:
        return GroupClass.z3()
    if order == 6 and not abelian:
        return GroupClass.sym3()
    if order % 3 == 0:
        t = _two_power(order // 3)
        if t is not None and t >= 1 and abelian and exponent == 6:
            return GroupClass.z2_power_times_z3(t)
    if order % 6 == 0:
        t = _two_power(order // 6)
        if t is not None and t >= 1 and not abelian:
            center = H.center()
            if (len(center) == 2**t and all(_order(z) <= 2 for z in center)
                    and are_isomorphic(H, _z2_power_times_sym3_model(t))):
                return GroupClass.z2_power_times_sym3(t)
    return GroupClass.other(order, abelian, exponent)
