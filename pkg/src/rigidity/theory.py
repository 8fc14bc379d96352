"""Closed-form predictions, S_n(A, H) membership and finite lemma checks.

The structural statements about typical automorphism groups are asymptotic;
what can be checked exactly is the arithmetic (beta and its gap identity)
and the purely group-theoretic sub-claims, which are finite statements about
subgroups of small symmetric groups.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .automorphism import profile
from .groups import (
    GroupClass,
    PermGroup,
    are_isomorphic,
    classify,
    has_fixed_point,
    orbit_stats,
    subgroups_of_sym,
)
from .structures import Structure, induced_substructure, is_isomorphism


@dataclass(frozen=True)
class BetaParams:
    k: int
    l: int  # noqa: E741
    r: int

    def __post_init__(self):
        if self.k < 1 or self.l < 0 or self.r < 2:
            raise ValueError(f"need k >= 1, l >= 0, r >= 2; got k={self.k}, l={self.l}, r={self.r}")

    @classmethod
    def from_vocabulary(cls, vocab) -> "BetaParams":
        return cls(vocab.k, vocab.l, vocab.r)


def beta(x: int, y: int, z: int, params: BetaParams) -> int:
    k, l, r = params.k, params.l, params.r
    return (k * comb(r, 2) * x * x
            - k * r * (r - 1) * x * y
            - l * (r - 1) * x
            + l * (r - 1) * y
            + k * comb(r, 2) * z)


def beta_gap(i: int, params: BetaParams) -> tuple[int, bool]:
    """beta at (2i+2, i+1, 2(i+1)^2) minus beta at (2i+1, i, 2i^2-2i+3).

    Returns the difference and whether it equals 2k C(r,2) (2i-1).
    """
    if i < 1:
        raise ValueError(f"i must be positive, got {i}")
    if params.r < 3:
        raise ValueError("the gap compares structures with maximal arity r >= 3")
    even = beta(2 * i + 2, i + 1, 2 * (i + 1) ** 2, params)
    odd = beta(2 * i + 1, i, 2 * i * i - 2 * i + 3, params)
    gap = even - odd
    return gap, gap == 2 * params.k * comb(params.r, 2) * (2 * i - 1)


@dataclass(frozen=True)
class Prediction:
    m: int
    m_prime: int
    classes: tuple[GroupClass, ...]

    def to_dict(self) -> dict:
        return {"m": self.m, "m_prime": self.m_prime,
                "classes": [c.label() for c in self.classes]}


def predict(m: int, r: int) -> Prediction:
    """Typical spt* and automorphism groups among structures with spt >= m."""
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    if r < 2:
        raise ValueError(f"maximal arity must be at least 2, got {r}")
    m_prime = m if m % 2 == 0 else m + 1
    if r == 2:
        classes = tuple(GroupClass.z2_power(i) for i in range(1, m_prime // 2 + 1))
    else:
        classes = (GroupClass.z2_power(1),)
    return Prediction(m, m_prime, classes)


# -- S_n(A, H) ----------------------------------------------------------------

class PreconditionError(ValueError):
    """The (A, H) pair does not satisfy the hypotheses of the membership test."""


def _check_pair(A: Structure, H: PermGroup) -> PermGroup:
    aut_a = profile(A).group
    if H.degree != A.n:
        raise PreconditionError(f"H has degree {H.degree} but A has {A.n} points")
    if has_fixed_point(aut_a):
        raise PreconditionError("Aut(A) has a fixed point")
    if not H.is_subgroup_of(aut_a):
        raise PreconditionError("H is not a subgroup of Aut(A)")
    if has_fixed_point(H):
        raise PreconditionError("H has a fixed point")
    return aut_a


def _conjugate_into(H: PermGroup, f: tuple[int, ...]) -> set[tuple[int, ...]]:
    """{f s f^-1 : s in H} for a bijection f of [p] onto the re-indexed support."""
    finv = [0] * len(f)
    for a, b in enumerate(f):
        finv[b] = a
    return {tuple(f[s[finv[x]]] for x in range(len(f))) for s in H.raw_elements}


def _qualifying_maps(A: Structure, H: PermGroup, M: Structure):
    """Yield (f, H_f, restricted) for isomorphisms A -> M|Spt*(M) with H_f <= restricted."""
    _check_pair(A, H)
    prof = profile(M)
    if prof.spt_star != A.n or A.vocab.arities != M.vocab.arities:
        return
    support_pts = sorted(prof.spt_star_set)
    sub = induced_substructure(M, support_pts)
    restricted = set(prof.restricted.raw_elements)
    for f in itertools.permutations(range(A.n)):
        if not is_isomorphism(f, A, sub):
            continue
        conj = _conjugate_into(H, f)
        if conj <= restricted:
            yield f, conj, restricted, support_pts


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: tuple[int, ...] | None = field(default=None)

    def witness_map(self) -> dict[int, int] | None:
        """The embedding as 1-based point -> 1-based point."""
        if self.witness is None:
            return None
        return {a + 1: b for a, b in enumerate(self.witness)}


def membership_S(A: Structure, H: PermGroup, M: Structure) -> Membership:
    """Is M in S_n(A, H)?  The witness lists, per point of A, its image in M (1-based)."""
    for f, _, _, support_pts in _qualifying_maps(A, H, M):
        return Membership(True, tuple(support_pts[b] for b in f))
    return Membership(False)


def is_full(A: Structure, H: PermGroup, M: Structure) -> bool:
    """Whether H is the full automorphism group of M (every qualifying H_f is everything)."""
    maps = list(_qualifying_maps(A, H, M))
    if not maps:
        raise ValueError("M is not in S_n(A, H)")
    return all(conj == restricted for _, conj, restricted, _ in maps)


# -- finite lemma checks ------------------------------------------------------

@dataclass
class CheckResult:
    check: str
    scope: str
    passed: bool
    inspected: int = 0
    counterexample: str | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"check": self.check, "scope": self.scope, "pass": self.passed,
                "inspected": self.inspected, "counterexample": self.counterexample,
                **({"detail": self.detail} if self.detail else {})}


def _describe(H: PermGroup) -> str:
    gens = ", ".join(str(g) for g in H.generators) or "()"
    return f"<{gens}> on {H.degree} points"


def check_three_point_groups() -> CheckResult:
    """Every fixed-point-free group on 3 points is Z3 or Sym3."""
    fpf = [H for H in subgroups_of_sym(3) if not has_fixed_point(H)]
    allowed = {GroupClass.z3(), GroupClass.sym3()}
    bad = [H for H in fpf if classify(H) not in allowed]
    return CheckResult("fixed-point-free-degree-3", "Sym3", not bad, len(fpf),
                       _describe(bad[0]) if bad else None)


def check_pair_orbits_of_size_two(degree: int) -> CheckResult:
    """Groups on 2i points whose point and pair orbits all have size 2 are Z2 with s = 2i^2."""
    if degree % 2:
        raise ValueError("degree must be even")
    i = degree // 2
    inspected = 0
    for H in subgroups_of_sym(degree):
        st = orbit_stats(H)
        if any(len(o) != 2 for o in st.point_orbits) or any(len(o) != 2 for o in st.pair_orbits):
            continue
        inspected += 1
        if classify(H) != GroupClass.z2_power(1) or st.s != 2 * i * i:
            return CheckResult("pair-orbits-size-2-is-Z2", f"Sym{degree}", False, inspected,
                               _describe(H))
    return CheckResult("pair-orbits-size-2-is-Z2", f"Sym{degree}", inspected > 0, inspected,
                       None if inspected else "no group satisfies the hypothesis")


def check_max_pair_orbits(degree: int = 5) -> CheckResult:
    """On 2i+1 points with i-1 orbits of size 2 and one of size 3, max s is 2i^2-2i+3
    and every maximizer is Z2 x Z3."""
    if degree % 2 == 0 or degree < 5:
        raise ValueError("degree must be odd and at least 5")
    i = (degree - 1) // 2
    target = 2 * i * i - 2 * i + 3
    candidates = []
    for H in subgroups_of_sym(degree):
        if has_fixed_point(H):
            continue
        st = orbit_stats(H)
        sizes = sorted(len(o) for o in st.point_orbits)
        if sizes == [2] * (i - 1) + [3]:
            candidates.append((H, st.s))
    if not candidates:
        return CheckResult("max-s-is-Z2xZ3", f"Sym{degree}", False, 0, "no candidate groups")
    best = max(s for _, s in candidates)
    maximizers = [H for H, s in candidates if s == best]
    want = GroupClass.z2_power_times_z3(1)
    bad = [H for H in maximizers if classify(H) != want]
    passed = best == target and not bad
    cex = None
    if bad:
        cex = _describe(bad[0])
    elif best != target:
        cex = f"max s = {best}, expected {target}"
    return CheckResult("max-s-is-Z2xZ3", f"Sym{degree}", passed, len(candidates), cex,
                       {"max_s": best, "maximizers": len(maximizers)})


def check_beta_gap(i_range=range(1, 21), k_range=range(1, 5), l_range=range(0, 5),
                   r_range=range(3, 7)) -> CheckResult:
    inspected = 0
    for i, k, l, r in itertools.product(i_range, k_range, l_range, r_range):  # noqa: E741
        inspected += 1
        gap, ok = beta_gap(i, BetaParams(k, l, r))
        if not ok:
            return CheckResult("beta-gap-identity", "grid", False, inspected,
                               f"i={i}, k={k}, l={l}, r={r}: gap {gap}")
    scope = (f"i in [{i_range[0]},{i_range[-1]}], k in [{k_range[0]},{k_range[-1]}], "
             f"l in [{l_range[0]},{l_range[-1]}], r in [{r_range[0]},{r_range[-1]}]")
    return CheckResult("beta-gap-identity", scope, True, inspected)


def verify_lemma_suite(max_degree: int = 6) -> list[CheckResult]:
    if not 1 <= max_degree <= 6:
        raise ValueError("max_degree must be between 1 and 6")
    results = []
    if max_degree >= 3:
        results.append(check_three_point_groups())
    for d in range(2, max_degree + 1, 2):
        results.append(check_pair_orbits_of_size_two(d))
    if max_degree >= 5:
        results.append(check_max_pair_orbits(5))
    results.append(check_beta_gap())
    return results


def restricted_matches_group(M: Structure) -> bool:
    """Aut(M) restricted to Spt*(M) is isomorphic to Aut(M)."""
    prof = profile(M)
    return are_isomorphic(prof.group, prof.restricted)

