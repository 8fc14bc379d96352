"""Finite relational vocabularies and structures on the universe [n] = {1..n}.

Every relation is stored as a bitmap over its tuple index space.  A tuple
``(a_1, ..., a_m)`` of 1-based points has index ``sum((a_j - 1) * n**(m - j))``
(first coordinate most significant).  The integer encoding of a structure is
the concatenation of its relation bitmaps, the first symbol occupying the
lowest bits.

Besides the full encoding there is a *compact* code: one bit per admissible
slot.  For the ``all`` and ``irreflexive`` classes a slot is one tuple; for
``irreflexive-symmetric`` a slot is one unordered support set and setting it
materializes every coordinate permutation of that set.  Slots are ordered so
that the compact code is monotone in the full encoding, which lets exhaustive
enumeration walk ``range(2**slot_count)`` in increasing encoding order.
"""
from __future__ import annotations

import itertools
import json
import math
import struct
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

STRUCTURE_CLASSES = ("all", "irreflexive", "irreflexive-symmetric")

# Largest compact width enumerate_structures will walk.
MAX_ENUMERATION_SLOTS = 64

FILE_MAGIC = b"RSTR"
FILE_VERSION = 1


class VocabularyError(ValueError):
    pass


class TooLargeError(ValueError):
    """Raised when a request exceeds an exhaustive-computation guard."""


@dataclass(frozen=True)
class Vocabulary:
    arities: tuple[int, ...]
    structure_class: str = "all"

    def __post_init__(self):
        object.__setattr__(self, "arities", tuple(int(a) for a in self.arities))
        if not self.arities:
            raise VocabularyError("vocabulary needs at least one relation symbol")
        if any(a < 1 for a in self.arities):
            raise VocabularyError(f"arities must be positive, got {list(self.arities)}")
        if max(self.arities) < 2:
            raise VocabularyError("at least one relation symbol must have arity >= 2")
        if self.structure_class not in STRUCTURE_CLASSES:
            raise VocabularyError(
                f"unknown structure class {self.structure_class!r}; "
                f"expected one of {', '.join(STRUCTURE_CLASSES)}"
            )

    @property
    def r(self) -> int:
        """Maximal arity."""
        return max(self.arities)

    @property
    def k(self) -> int:
        """Number of symbols of maximal arity."""
        return self.arities.count(self.r)

    @property
    def l(self) -> int:  # noqa: E743
        """Number of symbols of arity r - 1."""
        return self.arities.count(self.r - 1)

    def to_dict(self) -> dict:
        return {"arities": list(self.arities), "class": self.structure_class}

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        return cls(tuple(data["arities"]), data.get("class", "all"))

    @classmethod
    def from_json(cls, text: str) -> "Vocabulary":
        return cls.from_dict(json.loads(text))

    @classmethod
    def parse(cls, arities: str, structure_class: str = "all") -> "Vocabulary":
        """Build a vocabulary from a comma list such as ``"2,2"``."""
        try:
            values = tuple(int(tok) for tok in arities.split(",") if tok.strip())
        except ValueError:
            raise VocabularyError(f"cannot parse arities {arities!r}") from None
        return cls(values, structure_class)


def tuple_index(t: Sequence[int], n: int) -> int:
    """Index of a 0-based tuple in [n]^m."""
    idx = 0
    for a in t:
        idx = idx * n + a
    return idx


def index_tuple(idx: int, n: int, m: int) -> tuple[int, ...]:
    """Inverse of :func:`tuple_index` (0-based coordinates)."""
    out = []
    for _ in range(m):
        idx, a = divmod(idx, n)
        out.append(a)
    return tuple(reversed(out))


def _admissible(t: Sequence[int], structure_class: str) -> bool:
    if structure_class == "all":
        return True
    return len(set(t)) == len(t)


@lru_cache(maxsize=None)
def _symbol_slots(m: int, n: int, structure_class: str) -> tuple[tuple[int, ...], ...]:
    """Admissible slots of one symbol, each a sorted tuple of tuple indices."""
    if structure_class == "irreflexive-symmetric":
        slots = []
        for subset in itertools.combinations(range(n), m):
            slots.append(tuple(sorted(tuple_index(p, n) for p in itertools.permutations(subset))))
        slots.sort(key=lambda s: s[-1])
        return tuple(slots)
    return tuple(
        (idx,)
        for idx in range(n**m)
        if _admissible(index_tuple(idx, n, m), structure_class)
    )


def admissible_slot_count(vocab: Vocabulary, n: int) -> int:
    """Number of compact slots, computed without building the layout."""
    total = 0
    for m in vocab.arities:
        if vocab.structure_class == "all":
            total += n**m
        elif vocab.structure_class == "irreflexive":
            total += math.perm(n, m)
        else:
            total += math.comb(n, m)
    return total


class SlotLayout:
    """Maps between compact slot codes and full encodings for (vocab, n)."""

    def __init__(self, vocab: Vocabulary, n: int):
        if n < 1:
            raise ValueError(f"universe size must be positive, got {n}")
        self.vocab = vocab
        self.n = n
        self.offsets: list[int] = []
        self.symbol_slots: list[tuple[tuple[int, ...], ...]] = []
        off = 0
        for m in vocab.arities:
            self.offsets.append(off)
            self.symbol_slots.append(_symbol_slots(m, n, vocab.structure_class))
            off += n**m
        self.width = off
        # (symbol, tuple indices) per global slot, in compact bit order
        self.slots: list[tuple[int, tuple[int, ...]]] = [
            (i, slot) for i, slots in enumerate(self.symbol_slots) for slot in slots
        ]
        self.slot_count = len(self.slots)
        self._slot_of: dict[tuple[int, int], int] = {}
        for c, (i, slot) in enumerate(self.slots):
            for t in slot:
                self._slot_of[(i, t)] = c

    def slot_of(self, symbol: int, t: int) -> int | None:
        return self._slot_of.get((symbol, t))

    def admissible_mask(self, symbol: int) -> int:
        mask = 0
        for slot in self.symbol_slots[symbol]:
            for t in slot:
                mask |= 1 << t
        return mask

    def relations_from_compact(self, code: int) -> tuple[int, ...]:
        rels = [0] * len(self.vocab.arities)
        c = 0
        while code:
            if code & 1:
                i, slot = self.slots[c]
                for t in slot:
                    rels[i] |= 1 << t
            code >>= 1
            c += 1
        return tuple(rels)

    def compact_from_relations(self, relations: Sequence[int]) -> int:
        code = 0
        for c, (i, slot) in enumerate(self.slots):
            if (relations[i] >> slot[0]) & 1:
                code |= 1 << c
        return code

    def slot_permutation(self, imgs: Sequence[int]) -> np.ndarray:
        """Image of every slot under the point permutation ``imgs`` (0-based)."""
        return _slot_permutation(self.vocab, self.n, tuple(imgs))


@lru_cache(maxsize=None)
def slot_layout(vocab: Vocabulary, n: int) -> SlotLayout:
    return SlotLayout(vocab, n)


@lru_cache(maxsize=4096)
def tuple_permutation(n: int, m: int, imgs: tuple[int, ...]) -> tuple[int, ...]:
    """Table t -> index of g(t) on [n]^m for the point permutation g."""
    out = []
    for idx in range(n**m):
        out.append(tuple_index([imgs[a] for a in index_tuple(idx, n, m)], n))
    return tuple(out)


@lru_cache(maxsize=8192)
def _slot_permutation(vocab: Vocabulary, n: int, imgs: tuple[int, ...]) -> np.ndarray:
    layout = slot_layout(vocab, n)
    out = np.empty(layout.slot_count, dtype=np.int64)
    for c, (i, slot) in enumerate(layout.slots):
        t = tuple_permutation(n, vocab.arities[i], imgs)[slot[0]]
        out[c] = layout.slot_of(i, t)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Structure:
    """A structure with universe [n]; ``relations[i]`` is the bitmap of symbol i."""

    vocab: Vocabulary
    n: int
    relations: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(int(x) for x in self.relations))
        if self.n < 1:
            raise ValueError(f"universe size must be positive, got {self.n}")
        if len(self.relations) != len(self.vocab.arities):
            raise ValueError("one bitmap per relation symbol is required")
        layout = slot_layout(self.vocab, self.n)
        for i, bits in enumerate(self.relations):
            if bits < 0 or bits & ~layout.admissible_mask(i):
                raise ValueError(f"relation {i} sets a tuple not admissible for class "
                                 f"{self.vocab.structure_class!r}")
            if self.vocab.structure_class == "irreflexive-symmetric":
                for slot in layout.symbol_slots[i]:
                    present = {(bits >> t) & 1 for t in slot}
                    if len(present) != 1:
                        raise ValueError(f"relation {i} is not closed under coordinate permutations")

    @classmethod
    def from_tuples(cls, vocab: Vocabulary, n: int,
                    relations: Sequence[Iterable[Sequence[int]]]) -> "Structure":
        """Build from 1-based tuples per symbol.

        For the irreflexive-symmetric class every coordinate permutation of a
        given tuple is added as well.
        """
        bitmaps = []
        for m, tuples in zip(vocab.arities, relations, strict=True):
            bits = 0
            for t in tuples:
                t = tuple(t)
                if len(t) != m or not all(1 <= a <= n for a in t):
                    raise ValueError(f"tuple {t} does not fit arity {m} on [{n}]")
                zero = [a - 1 for a in t]
                variants = (itertools.permutations(zero)
                            if vocab.structure_class == "irreflexive-symmetric" else [zero])
                for v in variants:
                    bits |= 1 << tuple_index(v, n)
            bitmaps.append(bits)
        return cls(vocab, n, tuple(bitmaps))

    @classmethod
    def empty(cls, vocab: Vocabulary, n: int) -> "Structure":
        return cls(vocab, n, (0,) * len(vocab.arities))

    def tuples(self, symbol: int) -> list[tuple[int, ...]]:
        """Sorted 1-based tuples of a relation."""
        m = self.vocab.arities[symbol]
        bits = self.relations[symbol]
        out = []
        idx = 0
        while bits:
            if bits & 1:
                out.append(tuple(a + 1 for a in index_tuple(idx, self.n, m)))
            bits >>= 1
            idx += 1
        return out

    def holds(self, symbol: int, t: Sequence[int]) -> bool:
        """Whether the 1-based tuple ``t`` is in relation ``symbol``."""
        return bool((self.relations[symbol] >> tuple_index([a - 1 for a in t], self.n)) & 1)

    @cached_property
    def tuple_sets(self) -> tuple[frozenset[tuple[int, ...]], ...]:
        """0-based tuple sets, one per symbol."""
        return tuple(
            frozenset(tuple(a - 1 for a in t) for t in self.tuples(i))
            for i in range(len(self.relations))
        )

    def encode(self) -> int:
        return encode(self)

    def compact(self) -> int:
        return slot_layout(self.vocab, self.n).compact_from_relations(self.relations)

    def relabel(self, imgs: Sequence[int]) -> "Structure":
        """The image g(M) under the 0-based point permutation ``imgs``."""
        imgs = tuple(imgs)
        rels = []
        for m, bits in zip(self.vocab.arities, self.relations):
            table = tuple_permutation(self.n, m, imgs)
            out = 0
            idx = 0
            while bits:
                if bits & 1:
                    out |= 1 << table[idx]
                bits >>= 1
                idx += 1
            rels.append(out)
        return Structure(self.vocab, self.n, tuple(rels))

    def to_bytes(self) -> bytes:
        return write_structure(self)

    def __repr__(self) -> str:
        rels = "; ".join(
            f"R{i}={{{', '.join(str(t) for t in self.tuples(i))}}}" for i in range(len(self.relations))
        )
        return f"Structure(n={self.n}, {rels})"


def encode(M: Structure) -> int:
    layout = slot_layout(M.vocab, M.n)
    code = 0
    for off, bits in zip(layout.offsets, M.relations):
        code |= bits << off
    return code


def decode(vocab: Vocabulary, n: int, code: int) -> Structure:
    layout = slot_layout(vocab, n)
    if code < 0 or code >> layout.width:
        raise ValueError(f"encoding {code:#x} out of range for n={n}")
    rels = []
    for off, m in zip(layout.offsets, vocab.arities):
        rels.append((code >> off) & ((1 << n**m) - 1))
    return Structure(vocab, n, tuple(rels))


def from_compact(vocab: Vocabulary, n: int, code: int) -> Structure:
    layout = slot_layout(vocab, n)
    if code < 0 or code >> layout.slot_count:
        raise ValueError(f"compact code {code:#x} out of range")
    return Structure(vocab, n, layout.relations_from_compact(code))


def enumerate_structures(vocab: Vocabulary, n: int) -> Iterator[Structure]:
    """Every structure in S_n exactly once, in increasing encoding order."""
    count = admissible_slot_count(vocab, n)
    if count > MAX_ENUMERATION_SLOTS:
        raise TooLargeError(f"{count} admissible slots: too large for exhaustive enumeration")
    layout = slot_layout(vocab, n)
    for code in range(1 << layout.slot_count):
        yield Structure(vocab, n, layout.relations_from_compact(code))


def sample_structure(vocab: Vocabulary, n: int,
                     rng: np.random.Generator | int | None = None) -> Structure:
    """Uniform random structure: each admissible slot present with probability 1/2."""
    rng = np.random.default_rng(rng)
    layout = slot_layout(vocab, n)
    bits = rng.integers(0, 2, size=layout.slot_count, dtype=np.uint8)
    code = 0
    for c in np.flatnonzero(bits):
        code |= 1 << int(c)
    return from_compact(vocab, n, code)


def induced_substructure(M: Structure, X: Iterable[int]) -> Structure:
    """Restriction of M to the 1-based point set X, re-indexed order-preservingly."""
    points = sorted(set(X))
    if not points:
        raise ValueError("cannot restrict to an empty set")
    if points[0] < 1 or points[-1] > M.n:
        raise ValueError(f"points {points} are not inside [{M.n}]")
    p = len(points)
    zero = [a - 1 for a in points]
    rels = []
    for m, bits in zip(M.vocab.arities, M.relations):
        out = 0
        for new_idx, t in enumerate(itertools.product(zero, repeat=m)):
            if (bits >> tuple_index(t, M.n)) & 1:
                out |= 1 << new_idx
        rels.append(out)
    return Structure(M.vocab, p, tuple(rels))


def is_isomorphism(f: Sequence[int], A: Structure, B: Structure) -> bool:
    """Whether the 0-based bijection ``f`` ([|A|] -> [|B|]) is an isomorphism A -> B."""
    if A.n != B.n or A.vocab.arities != B.vocab.arities or len(f) != A.n:
        return False
    if sorted(f) != list(range(A.n)):
        return False
    return A.relabel(f).relations == B.relations


def find_isomorphisms(A: Structure, B: Structure) -> list[tuple[int, ...]]:
    """All isomorphisms A -> B as 0-based image tuples, in lexicographic order."""
    if A.n != B.n or A.vocab.arities != B.vocab.arities:
        return []
    return [f for f in itertools.permutations(range(A.n)) if is_isomorphism(f, A, B)]


# -- binary file format -------------------------------------------------------

def write_structure(M: Structure) -> bytes:
    if len(M.vocab.arities) > 255 or max(M.vocab.arities) > 255:
        raise ValueError("vocabulary too large for the structure file format")
    out = bytearray(FILE_MAGIC)
    out.append(FILE_VERSION)
    out += struct.pack("<I", M.n)
    out.append(len(M.vocab.arities))
    out += bytes(M.vocab.arities)
    for m, bits in zip(M.vocab.arities, M.relations):
        size = (M.n**m + 7) // 8
        out += bits.to_bytes(size, "little")
    return bytes(out)


def read_structure(data: bytes, structure_class: str = "all") -> Structure:
    """Parse the ``RSTR`` format; the class is not stored and must be supplied."""
    if data[:4] != FILE_MAGIC:
        raise ValueError("not a structure file (bad magic)")
    if data[4] != FILE_VERSION:
        raise ValueError(f"unsupported structure file version {data[4]}")
    (n,) = struct.unpack_from("<I", data, 5)
    count = data[9]
    arities = tuple(data[10:10 + count])
    pos = 10 + count
    rels = []
    for m in arities:
        size = (n**m + 7) // 8
        chunk = data[pos:pos + size]
        if len(chunk) != size:
            raise ValueError("truncated structure file")
        bits = int.from_bytes(chunk, "little")
        if bits >> n**m:
            raise ValueError("padding bits set in relation bitmap")
        rels.append(bits)
        pos += size
    if pos != len(data):
        raise ValueError("trailing bytes after structure data")
    return Structure(Vocabulary(arities, structure_class), n, tuple(rels))
