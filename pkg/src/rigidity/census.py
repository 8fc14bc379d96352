"""Exhaustive and sampled censuses of S_n.

Structures are handled as compact slot codes packed into uint64 words
(see :class:`rigidity.structures.SlotLayout`).  A point permutation g acts on
slots, and M is invariant under g iff permuting the bits of its code by g
gives the code back.  Bit permutation is table driven: one 256-entry table per
(g, byte position, output word), so a batch check is a handful of gathers and
ORs over numpy arrays.

Rigidity dominates, so every batch is first screened against the elements of
prime order in Sym_n (a group is non-trivial iff it contains one); only the
few hits get their full automorphism group computed.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
import os
import re
import struct
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .automorphism import automorphism_group, profile_of_group
from .groups import GroupClass, PermGroup, _order, are_isomorphic
from .structures import (
    TooLargeError,
    Vocabulary,
    admissible_slot_count,
    from_compact,
    slot_layout,
)

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_SLOTS = 30
MAX_SAMPLED_DEGREE = 8
MAX_UNLABELLED_DEGREE = 5
CHUNK_SIZE = 1 << 20
SAMPLE_BLOCK = 1 << 16
# above this many permutations the full invariance mask is replaced by
# per-structure backtracking
FULL_MASK_LIMIT = 720

CHECKPOINT_MAGIC = b"RGC1"
CHECKPOINT_VERSION = 1


class CheckpointError(ValueError):
    pass


@dataclass(frozen=True)
class CensusKey:
    spt: int
    spt_star: int
    group_class: GroupClass
    q: int
    s: int

    @classmethod
    def rigid(cls) -> "CensusKey":
        return cls(0, 0, GroupClass.trivial(), 0, 0)

    def is_rigid(self) -> bool:
        return self.spt_star == 0

    def sort_key(self) -> tuple:
        return (self.spt_star, self.spt, self.group_class.sort_key(), self.q, self.s)

    def to_dict(self) -> dict:
        return {"spt": self.spt, "spt_star": self.spt_star,
                "class": self.group_class.label(), "q": self.q, "s": self.s}

    @classmethod
    def from_dict(cls, d: dict) -> "CensusKey":
        return cls(d["spt"], d["spt_star"], GroupClass.parse(d["class"]), d["q"], d["s"])


def key_of_group(group: PermGroup) -> CensusKey:
    """Census key of an automorphism group.

    Keys are built once per distinct group, so the faithfulness of the
    restriction to Spt* is re-checked here for every group a census meets.
    """
    if group.is_trivial():
        return CensusKey.rigid()
    prof = profile_of_group(group)
    if not are_isomorphic(group, prof.restricted):
        raise ArithmeticError(f"restriction to Spt* is not faithful for {group!r}")
    return CensusKey(prof.spt, prof.spt_star, prof.group_class, prof.stats.q, prof.stats.s)


# -- batch engine --------------------------------------------------------------

def _pack_words(bits: np.ndarray) -> np.ndarray:
    """(N, S) 0/1 matrix -> (W, N) uint64 words, slot c at bit c % 64 of word c // 64."""
    N, S = bits.shape
    W = max(1, (S + 63) // 64)
    padded = np.zeros((N, W * 64), dtype=np.uint8)
    padded[:, :S] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed.view("<u8").T).astype(np.uint64, copy=False)


class Engine:
    """Invariance tests of packed codes under point permutations for one (vocab, n)."""

    def __init__(self, vocab: Vocabulary, n: int):
        self.vocab = vocab
        self.n = n
        self.layout = slot_layout(vocab, n)
        self.slots = self.layout.slot_count
        self.words = max(1, (self.slots + 63) // 64)
        self.nbytes = max(1, (self.slots + 7) // 8)
        self.perms = list(itertools.permutations(range(n)))[1:]  # identity dropped
        prime = [p for p in self.perms if _is_prime(_order(p))]
        # transpositions first: they catch most non-rigid structures
        prime.sort(key=lambda p: (sum(1 for i, x in enumerate(p) if x != i), p))
        self.screen = prime
        self.full_mask = len(self.perms) + 1 <= FULL_MASK_LIMIT
        self._tables: dict[tuple[int, ...], list] = {}
        self._keys: dict = {}

    def tables(self, g: tuple[int, ...]) -> list[list[tuple[int, np.ndarray]]]:
        cached = self._tables.get(g)
        if cached is not None:
            return cached
        sigma = self.layout.slot_permutation(g)
        out: list[list[tuple[int, np.ndarray]]] = [[] for _ in range(self.words)]
        values = np.arange(256, dtype=np.uint64)
        for b in range(self.nbytes):
            per_word = [np.zeros(256, dtype=np.uint64) for _ in range(self.words)]
            for k in range(8):
                c = 8 * b + k
                if c >= self.slots:
                    break
                dest = int(sigma[c])
                bit = (values >> np.uint64(k)) & np.uint64(1)
                per_word[dest // 64] |= bit << np.uint64(dest % 64)
            for w in range(self.words):
                if per_word[w].any():
                    out[w].append((b, per_word[w]))
        if self.full_mask:
            self._tables[g] = out
        return out

    def byte_views(self, words: np.ndarray) -> list[np.ndarray]:
        return [((words[b // 8] >> np.uint64(8 * (b % 8))) & np.uint64(0xFF)).astype(np.intp)
                for b in range(self.nbytes)]

    def invariant(self, g, words: np.ndarray, views: list[np.ndarray]) -> np.ndarray:
        result = None
        for w, entries in enumerate(self.tables(g)):
            acc = np.zeros(words.shape[1], dtype=np.uint64)
            for b, table in entries:
                acc |= table[views[b]]
            eq = acc == words[w]
            result = eq if result is None else (result & eq)
        return result

    def classify_batch(self, words: np.ndarray) -> Counter:
        """Census keys for a batch of packed codes, aggregated."""
        N = words.shape[1]
        counts: Counter = Counter()
        if N == 0:
            return counts
        views = self.byte_views(words)
        hit = np.zeros(N, dtype=bool)
        for g in self.screen:
            hit |= self.invariant(g, words, views)
        idx = np.flatnonzero(hit)
        rigid = N - len(idx)
        if rigid:
            counts[CensusKey.rigid()] += rigid
        if len(idx) == 0:
            return counts
        sub = words[:, idx]
        if self.full_mask:
            sub_views = [v[idx] for v in views]
            mask = np.empty((len(idx), len(self.perms)), dtype=bool)
            for j, g in enumerate(self.perms):
                mask[:, j] = self.invariant(g, sub, sub_views)
            packed = np.packbits(mask, axis=1)
            rows, row_counts = np.unique(packed, axis=0, return_counts=True)
            for row, cnt in zip(rows, row_counts):
                counts[self._key_for_mask(row)] += int(cnt)
        else:
            for col in range(sub.shape[1]):
                code = 0
                for w in range(self.words):
                    code |= int(sub[w, col]) << (64 * w)
                M = from_compact(self.vocab, self.n, code)
                group = automorphism_group(M)
                key = self._keys.get(group.raw_elements)
                if key is None:
                    key = self._keys[group.raw_elements] = key_of_group(group)
                counts[key] += 1
        return counts

    def _key_for_mask(self, row: np.ndarray) -> CensusKey:
        raw = row.tobytes()
        key = self._keys.get(raw)
        if key is None:
            bits = np.unpackbits(row)[: len(self.perms)]
            elements = [tuple(range(self.n))] + [self.perms[j] for j in np.flatnonzero(bits)]
            key = self._keys[raw] = key_of_group(PermGroup(self.n, elements))
        return key


def _is_prime(x: int) -> bool:
    return x >= 2 and all(x % d for d in range(2, int(x**0.5) + 1))


@lru_cache(maxsize=8)
def _engine(vocab: Vocabulary, n: int) -> Engine:
    return Engine(vocab, n)


def _census_range(vocab: Vocabulary, n: int, lo: int, hi: int) -> Counter:
    codes = np.arange(lo, hi, dtype=np.uint64)[None, :]
    return _engine(vocab, n).classify_batch(codes)


def sample_block(vocab: Vocabulary, n: int, seed: int, block: int, size: int) -> np.ndarray:
    """Packed codes of one deterministic block of uniform samples."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
    bits = rng.integers(0, 2, size=(size, slot_layout(vocab, n).slot_count), dtype=np.uint8)
    return _pack_words(bits)


def _census_block(vocab: Vocabulary, n: int, seed: int, block: int, size: int) -> Counter:
    return _engine(vocab, n).classify_batch(sample_block(vocab, n, seed, block, size))


def _task(args):
    kind, payload = args
    if kind == "range":
        return _census_range(*payload)
    return _census_block(*payload)


# -- reports ---------------------------------------------------------------------

@dataclass
class CensusReport:
    vocab: Vocabulary
    n: int
    mode: str  # "exhaustive" or "sampled"
    counts: dict[CensusKey, int]
    total: int
    samples: int | None = None
    seed: int | None = None
    unlabelled: dict[CensusKey, int] | None = None
    elapsed: float = field(default=0.0, compare=False)

    def count(self, pred: Callable[[CensusKey], bool], unlabelled: bool = False) -> int:
        source = self.unlabelled if unlabelled else self.counts
        if source is None:
            raise ValueError("report has no unlabelled counts")
        return sum(c for k, c in source.items() if pred(k))

    def sorted_keys(self) -> list[CensusKey]:
        return sorted(self.counts, key=CensusKey.sort_key)

    def to_dict(self, include_timing: bool = False) -> dict:
        d: dict = {"vocab": self.vocab.to_dict(), "n": self.n, "mode": self.mode}
        if self.mode == "sampled":
            d["samples"] = self.samples
            d["seed"] = self.seed
        d["total"] = self.total
        d["keys"] = [{**k.to_dict(), "count": self.counts[k]} for k in self.sorted_keys()]
        if self.unlabelled is not None:
            d["unlabelled"] = {
                "total": sum(self.unlabelled.values()),
                "keys": [{**k.to_dict(), "count": self.unlabelled[k]}
                         for k in sorted(self.unlabelled, key=CensusKey.sort_key)],
            }
        else:
            d["unlabelled"] = None
        if include_timing:
            d["elapsed"] = self.elapsed
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "CensusReport":
        counts = {CensusKey.from_dict(e): e["count"] for e in d["keys"]}
        unl = None
        if d.get("unlabelled"):
            unl = {CensusKey.from_dict(e): e["count"] for e in d["unlabelled"]["keys"]}
        return cls(Vocabulary.from_dict(d["vocab"]), d["n"], d["mode"], counts, d["total"],
                   d.get("samples"), d.get("seed"), unl, d.get("elapsed", 0.0))

    @classmethod
    def from_json(cls, text: str) -> "CensusReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        lines = ["spt,spt_star,class,q,s,count,unlabelled"]
        for k in self.sorted_keys():
            unl = "" if self.unlabelled is None else str(self.unlabelled.get(k, 0))
            lines.append(f"{k.spt},{k.spt_star},{k.group_class.label()},{k.q},{k.s},"
                         f"{self.counts[k]},{unl}")
        return "\n".join(lines) + "\n"


def unlabelled_counts(counts: dict[CensusKey, int], n: int) -> dict[CensusKey, int]:
    """Isomorphism classes per key: each class holds n!/|Aut| labelled structures."""
    fact = math.factorial(n)
    out = {}
    for key, c in counts.items():
        classes = Fraction(c * key.group_class.order, fact)
        if classes.denominator != 1:
            raise ArithmeticError(f"labelled count {c} for {key} is not a multiple of n!/|Aut|")
        out[key] = int(classes)
    return out


# -- checkpoints -----------------------------------------------------------------

@dataclass
class Checkpoint:
    vocab: Vocabulary
    n: int
    mode: str
    chunk_size: int
    samples: int | None = None
    seed: int | None = None
    completed: list[tuple[int, int]] = field(default_factory=list)
    counts: Counter = field(default_factory=Counter)

    def header(self) -> tuple:
        return (self.vocab, self.n, self.mode, self.chunk_size, self.samples, self.seed)

    def add(self, lo: int, hi: int, counts: Counter) -> None:
        for a, b in self.completed:
            if lo < b and a < hi:
                raise CheckpointError(f"range [{lo}, {hi}) overlaps completed [{a}, {b})")
        self.completed.append((lo, hi))
        self.completed.sort()
        self.counts.update(counts)

    def merge(self, other: "Checkpoint") -> "Checkpoint":
        if self.header() != other.header():
            raise CheckpointError("checkpoints belong to different runs")
        out = Checkpoint(*self.header())
        out.counts = Counter(self.counts)
        out.completed = list(self.completed)
        for lo, hi in other.completed:
            out.add(lo, hi, Counter())
        out.counts.update(other.counts)
        return out

    def to_bytes(self) -> bytes:
        payload = {
            "vocab": self.vocab.to_dict(), "n": self.n, "mode": self.mode,
            "chunk_size": self.chunk_size, "samples": self.samples, "seed": self.seed,
            "completed": [list(r) for r in self.completed],
            "counters": [[k.spt, k.spt_star, k.group_class.label(), k.q, k.s, c]
                         for k, c in sorted(self.counts.items(), key=lambda kv: kv[0].sort_key())],
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return CHECKPOINT_MAGIC + bytes([CHECKPOINT_VERSION]) + struct.pack("<I", len(blob)) + blob

    @classmethod
    def from_bytes(cls, data: bytes) -> "Checkpoint":
        if data[:4] != CHECKPOINT_MAGIC:
            raise CheckpointError("not a census checkpoint (bad magic)")
        if len(data) < 9 or data[4] != CHECKPOINT_VERSION:
            raise CheckpointError("unsupported checkpoint version")
        (size,) = struct.unpack_from("<I", data, 5)
        blob = data[9:9 + size]
        if len(blob) != size or len(data) != 9 + size:
            raise CheckpointError("truncated or corrupt checkpoint")
        try:
            p = json.loads(blob)
            cp = cls(Vocabulary.from_dict(p["vocab"]), p["n"], p["mode"], p["chunk_size"],
                     p["samples"], p["seed"])
            for lo, hi in p["completed"]:
                cp.add(lo, hi, Counter())
            for spt, star, label, q, s, c in p["counters"]:
                cp.counts[CensusKey(spt, star, GroupClass.parse(label), q, s)] += c
        except (KeyError, ValueError, TypeError) as exc:
            raise CheckpointError(f"corrupt checkpoint: {exc}") from exc
        return cp

    def save(self, path: str | os.PathLike) -> None:
        tmp = f"{os.fspath(path)}.tmp"
        with open(tmp, "wb") as fh:
            fh.write(self.to_bytes())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Checkpoint":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


checkpoint_save = Checkpoint.save
checkpoint_resume = Checkpoint.load


# -- running ---------------------------------------------------------------------

def _chunks(total: int, size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def _pending(units: list[tuple[int, int]], completed: list[tuple[int, int]]) -> list[tuple[int, int]]:
    done = set(completed)
    out = []
    for lo, hi in units:
        if (lo, hi) in done:
            continue
        if any(lo < b and a < hi for a, b in completed):
            raise CheckpointError(f"checkpoint ranges do not align with chunk [{lo}, {hi})")
        out.append((lo, hi))
    return out


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("RIGIDITY_THREADS", "1")))
    except ValueError:
        return 1


def run_census(vocab: Vocabulary, n: int, mode: str = "exhaustive", *,
               samples: int | None = None, seed: int = 0, threads: int | None = None,
               checkpoint_path: str | os.PathLike | None = None,
               chunk_size: int = CHUNK_SIZE,
               on_chunk: Callable[[Checkpoint], None] | None = None) -> CensusReport:
    """Census of S_n, exhaustive or over ``samples`` uniform samples.

    The result depends only on (vocab, n, mode, samples, seed); ``threads``
    and ``chunk_size`` only change scheduling.  With ``checkpoint_path`` the
    partial counters are saved after every chunk and an existing file is
    resumed from.
    """
    started = time.perf_counter()
    threads = default_threads() if threads is None else max(1, threads)
    if mode == "exhaustive":
        slots = admissible_slot_count(vocab, n)
        if slots > MAX_EXHAUSTIVE_SLOTS:
            raise TooLargeError(
                f"exhaustive guard exceeded: {slots} slots > {MAX_EXHAUSTIVE_SLOTS}")
        total = 1 << slots
        units = _chunks(total, chunk_size)
        state = Checkpoint(vocab, n, mode, chunk_size)
    elif mode == "sampled":
        if n > MAX_SAMPLED_DEGREE:
            raise TooLargeError(f"sampled guard exceeded: n={n} > {MAX_SAMPLED_DEGREE}")
        if not samples or samples < 1:
            raise ValueError("sampled mode needs a positive sample count")
        total = samples
        units = [(b, b + 1) for b in range((samples + SAMPLE_BLOCK - 1) // SAMPLE_BLOCK)]
        state = Checkpoint(vocab, n, mode, SAMPLE_BLOCK, samples, seed)
    else:
        raise ValueError(f"unknown census mode {mode!r}")

    if checkpoint_path is not None and os.path.exists(checkpoint_path):
        saved = Checkpoint.load(checkpoint_path)
        if saved.header() != state.header():
            raise CheckpointError("checkpoint was written for a different census")
        state = saved
        logger.info("resuming with %d completed ranges", len(state.completed))
    pending = _pending(units, state.completed)

    def task(unit):
        lo, hi = unit
        if mode == "exhaustive":
            return ("range", (vocab, n, lo, hi))
        size = min(SAMPLE_BLOCK, samples - lo * SAMPLE_BLOCK)
        return ("block", (vocab, n, seed, lo, size))

    def record(unit, counts):
        state.add(unit[0], unit[1], counts)
        if checkpoint_path is not None:
            state.save(checkpoint_path)
        if on_chunk is not None:
            on_chunk(state)

    if threads > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for unit, counts in zip(pending, pool.map(_task, [task(u) for u in pending])):
                record(unit, counts)
    else:
        for unit in pending:
            record(unit, _task(task(unit)))

    counts = dict(state.counts)
    if sum(counts.values()) != total:
        raise ArithmeticError(f"census counted {sum(counts.values())} structures, expected {total}")
    unl = None
    if mode == "exhaustive" and n <= MAX_UNLABELLED_DEGREE:
        unl = unlabelled_counts(counts, n)
    return CensusReport(vocab, n, mode, counts, total,
                        samples if mode == "sampled" else None,
                        seed if mode == "sampled" else None,
                        unl, time.perf_counter() - started)


# -- ratio tables ----------------------------------------------------------------

_TERM = re.compile(
    r"^(?:(?P<lo>\d+)\s*<=\s*)?(?P<field>spt\*|spt|q|s)\s*"
    r"(?P<op>>=|<=|=|>|<)\s*(?P<val>\d+)$"
)


class Predicate:
    """Conjunction of terms over census keys, e.g. ``"spt>=2 & class=Z2^1"``.

    Terms: ``spt*=3``, ``spt*>=2``, ``spt>=2``, ``2<=spt*<=5``, ``q=2``,
    ``s=8``, ``class=Z3``, ``rigid``, ``all``.
    """

    def __init__(self, text: str):
        self.text = text.strip()
        self._tests = [self._term(t.strip()) for t in self.text.split("&") if t.strip()]
        if not self._tests:
            raise ValueError(f"empty predicate {text!r}")

    @staticmethod
    def _term(term: str) -> Callable[[CensusKey], bool]:
        if term in ("all", "*"):
            return lambda k: True
        if term == "rigid":
            return CensusKey.is_rigid
        if term.startswith("class="):
            cls = GroupClass.parse(term[len("class="):])
            return lambda k: k.group_class == cls
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"cannot parse predicate term {term!r}")
        attr = {"spt*": "spt_star", "spt": "spt", "q": "q", "s": "s"}[m["field"]]
        val = int(m["val"])
        lo = None if m["lo"] is None else int(m["lo"])
        ops = {">=": lambda a: a >= val, "<=": lambda a: a <= val, "=": lambda a: a == val,
               ">": lambda a: a > val, "<": lambda a: a < val}
        cmp = ops[m["op"]]
        if lo is not None:
            return lambda k: lo <= getattr(k, attr) and cmp(getattr(k, attr))
        return lambda k: cmp(getattr(k, attr))

    def __call__(self, key: CensusKey) -> bool:
        return all(t(key) for t in self._tests)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class RatioRow:
    n: int
    num: int
    den: int
    fraction: Fraction | float | None
    stderr: float | None = None

    def to_dict(self) -> dict:
        frac = self.fraction
        if frac is None:
            shown = "undefined"
        elif isinstance(frac, Fraction):
            shown = f"{frac.numerator}/{frac.denominator}"
        else:
            shown = frac
        out = {"n": self.n, "num": self.num, "den": self.den, "fraction": shown,
               "value": None if frac is None else float(frac)}
        if self.stderr is not None:
            out["stderr"] = self.stderr
        return out


def ratio_table(reports: Sequence[CensusReport], numerator: Predicate | str,
                denominator: Predicate | str, unlabelled: bool = False) -> list[RatioRow]:
    """Per report: |{numerator}| / |{denominator}|, each counted on its own.

    Exhaustive reports give exact fractions.  Sampled ones give estimates with
    a binomial standard error when the numerator keys are a subset of the
    denominator keys, and a delta-method error for a ratio of counts otherwise.
    """
    if not reports:
        return []
    num_p = numerator if isinstance(numerator, Predicate) else Predicate(numerator)
    den_p = denominator if isinstance(denominator, Predicate) else Predicate(denominator)
    vocabs = {r.vocab for r in reports}
    modes = {r.mode for r in reports}
    if len(vocabs) > 1 or len(modes) > 1:
        raise ValueError("all reports must share vocabulary and mode")
    rows = []
    for rep in sorted(reports, key=lambda r: r.n):
        den = rep.count(den_p, unlabelled)
        num = rep.count(num_p, unlabelled)
        if den == 0:
            rows.append(RatioRow(rep.n, num, den, None))
        elif rep.mode == "exhaustive":
            rows.append(RatioRow(rep.n, num, den, Fraction(num, den)))
        else:
            f = num / den
            nested = all(den_p(k) for k in rep.counts if num_p(k))
            if nested:
                se = math.sqrt(f * (1 - f) / den)
            else:
                se = f * math.sqrt(1 / num + 1 / den) if num else 0.0
            rows.append(RatioRow(rep.n, num, den, f, se))
    return rows
