"""Automorphism groups, support statistics and unlabelled counting."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .groups import (
    MAX_DEGREE,
    GroupClass,
    OrbitStats,
    Permutation,
    PermGroup,
    classify,
    orbit_stats,
)
from .structures import (
    Structure,
    TooLargeError,
    Vocabulary,
    slot_layout,
)

MAX_CANONICAL_DEGREE = 8


@dataclass(frozen=True)
class AutProfile:
    group: PermGroup
    spt: int
    spt_star: int
    spt_star_set: frozenset[int]
    restricted: PermGroup
    stats: OrbitStats
    group_class: GroupClass

    def to_dict(self) -> dict:
        return {
            "aut_order": self.group.order(),
            "generators": [str(g) for g in self.group.generators],
            "spt": self.spt,
            "spt_star": self.spt_star,
            "spt_star_set": sorted(self.spt_star_set),
            "class": self.group_class.label(),
            "q": self.stats.q,
            "s": self.stats.s,
        }


def _point_invariants(M: Structure) -> list[tuple]:
    """Per point: for every symbol, how often the point sits at each coordinate."""
    n = M.n
    inv: list[list[int]] = [[] for _ in range(n)]
    for m, tuples in zip(M.vocab.arities, M.tuple_sets):
        counts = [[0] * (m + 1) for _ in range(n)]
        for t in tuples:
            for j, a in enumerate(t):
                counts[a][j] += 1
            if len(set(t)) == 1:
                counts[t[0]][m] += 1
        for a in range(n):
            inv[a].extend(counts[a])
    return [tuple(x) for x in inv]


def _automorphisms(M: Structure) -> list[tuple[int, ...]]:
    """Backtracking over Sym_n; images must respect the invariant partition and
    every tuple inside the already-mapped prefix is checked as soon as it closes."""
    n = M.n
    inv = _point_invariants(M)
    rels = [(m, tuples) for m, tuples in zip(M.vocab.arities, M.tuple_sets)]
    # tuples whose largest coordinate is j, per j, so each is checked exactly once
    by_last: list[list[tuple[int, tuple[int, ...], bool]]] = [[] for _ in range(n)]
    for i, (m, tuples) in enumerate(rels):
        for t in itertools.product(range(n), repeat=m):
            by_last[max(t)].append((i, t, t in tuples))
    found = []
    imgs = [0] * n
    used = [False] * n

    def extend(j: int) -> None:
        if j == n:
            found.append(tuple(imgs))
            return
        for b in range(n):
            if used[b] or inv[b] != inv[j]:
                continue
            imgs[j] = b
            ok = True
            for i, t, present in by_last[j]:
                if (tuple(imgs[a] for a in t) in rels[i][1]) != present:
                    ok = False
                    break
            if ok:
                used[b] = True
                extend(j + 1)
                used[b] = False

    extend(0)
    return found


def automorphism_group(M: Structure) -> PermGroup:
    """Aut(M): all permutations g of [n] with g(R) = R for every relation."""
    if M.n > MAX_DEGREE:
        raise TooLargeError(f"exact automorphism computation supports n <= {MAX_DEGREE}, got {M.n}")
    return PermGroup(M.n, _automorphisms(M))


def profile_of_group(group: PermGroup) -> AutProfile:
    spt = max(len(Permutation(e).moved()) for e in group.raw_elements)
    star = frozenset().union(*(o for o in group.orbits() if len(o) > 1))
    restricted = group.restrict(star)
    return AutProfile(
        group=group,
        spt=spt,
        spt_star=len(star),
        spt_star_set=star,
        restricted=restricted,
        stats=orbit_stats(restricted),
        group_class=classify(group),
    )


def profile(M: Structure) -> AutProfile:
    return profile_of_group(automorphism_group(M))


def _cycle_count(perm) -> int:
    seen = [False] * len(perm)
    count = 0
    for start in range(len(perm)):
        if not seen[start]:
            count += 1
            x = start
            while not seen[x]:
                seen[x] = True
                x = perm[x]
    return count


def fixed_structure_count(g: Permutation, vocab: Vocabulary, n: int) -> int:
    """|{M in S_n : g in Aut(M)}| = 2 ** (cycles of g on the admissible slots)."""
    if g.degree != n:
        raise ValueError(f"permutation has degree {g.degree}, expected {n}")
    return 2 ** _cycle_count(slot_layout(vocab, n).slot_permutation(g.imgs))


def _partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in _partitions(n - part, part):
            yield (part,) + rest


def _class_size(shape: tuple[int, ...], n: int) -> int:
    z = 1
    for part, mult in ((p, shape.count(p)) for p in set(shape)):
        z *= part**mult * math.factorial(mult)
    return math.factorial(n) // z


def _representative(shape: tuple[int, ...], n: int) -> Permutation:
    imgs = list(range(n))
    start = 0
    for part in shape:
        for j in range(part):
            imgs[start + j] = start + (j + 1) % part
        start += part
    return Permutation(imgs)


@lru_cache(maxsize=None)
def unlabelled_count(vocab: Vocabulary, n: int) -> int:
    """Number of isomorphism classes in S_n, by Burnside over cycle types of Sym_n."""
    if n > MAX_DEGREE:
        raise TooLargeError(f"Burnside counting supports n <= {MAX_DEGREE}, got {n}")
    total = 0
    for shape in _partitions(n):
        g = _representative(shape, n)
        total += _class_size(shape, n) * fixed_structure_count(g, vocab, n)
    result = Fraction(total, math.factorial(n))
    assert result.denominator == 1
    return int(result)


def canonical_form(M: Structure) -> int:
    """Minimum encoding over all relabelings of M."""
    if M.n > MAX_CANONICAL_DEGREE:
        raise TooLargeError(f"canonical forms support n <= {MAX_CANONICAL_DEGREE}, got {M.n}")
    return min(M.relabel(g).encode() for g in itertools.permutations(range(M.n)))
