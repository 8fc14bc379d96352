import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidity.groups import (
    GroupClass,
    Permutation,
    PermGroup,
    are_isomorphic,
    classify,
    close,
    fixed_points,
    has_fixed_point,
    orbit_stats,
    subgroups_of_sym,
    support,
    symmetric_group,
)


def P(text, n):
    return Permutation.from_cycles(text, n)


def G(n, *cycles):
    return close([P(c, n) for c in cycles], degree=n)


def subgroups_by_pairs(d):
    """Oracle: closures of all pairs of elements of Sym_d (every subgroup of Sym_d, d <= 4,
    is 2-generated)."""
    elems = [Permutation(p) for p in itertools.permutations(range(d))]
    seen = set()
    for a, b in itertools.combinations_with_replacement(elems, 2):
        seen.add(close([a, b]).raw_elements)
    return seen


class TestPermutation:
    def test_cycle_notation_round_trip(self):
        g = P("(1 3)(2 4 5)", 6)
        assert str(g) == "(1 3)(2 4 5)"
        assert P(str(g), 6) == g
        assert str(Permutation.identity(3)) == "()"

    @given(st.permutations(list(range(6))))
    def test_round_trip_any(self, imgs):
        g = Permutation(tuple(imgs))
        assert Permutation.from_cycles(str(g), 6) == g

    def test_composition_is_right_to_left(self):
        a, b = P("(1 2)", 3), P("(2 3)", 3)
        assert (a * b)(2) == a(b(2)) == 3
        assert (a * b)(1) == 2 and (b * a)(1) == 3

    def test_inverse_and_order(self):
        g = P("(1 2 3)(4 5)", 5)
        assert (g * g.inverse()).is_identity()
        assert g.order() == 6
        assert g.moved() == {1, 2, 3, 4, 5}

    @pytest.mark.parametrize("bad", ["(1 1)", "(1 7)", "(1 2", "1 2"])
    def test_bad_cycles(self, bad):
        with pytest.raises(ValueError):
            P(bad, 3)


class TestClose:
    def test_examples(self):
        assert G(2, "(1 2)").order() == 2
        assert G(3, "(1 2 3)", "(1 2)").order() == 6
        klein = G(4, "(1 2)(3 4)", "(1 3)(2 4)")
        assert klein.order() == 4
        assert all(g.order() == 2 for g in klein.elements if not g.is_identity())

    def test_mixed_degrees(self):
        with pytest.raises(ValueError):
            close([P("(1 2)", 2), P("(1 2)", 3)])

    @settings(max_examples=50)
    @given(st.lists(st.permutations(list(range(5))), min_size=1, max_size=3))
    def test_idempotent_and_order_independent(self, gens):
        perms = [Permutation(tuple(p)) for p in gens]
        H = close(perms)
        assert close(list(H.elements)) == H
        assert close(list(reversed(perms))) == H
        assert H.check_group()
        assert 120 % H.order() == 0


class TestSupportAndFixedPoints:
    def test_support_examples(self):
        assert support(PermGroup(5, [tuple(range(5))])) == (frozenset(), 0)
        assert support(G(4, "(1 2)")) == ({1, 2}, 2)
        assert support([P("(1 2)", 6), P("(4 5 6)", 6)]) == ({1, 2, 4, 5, 6}, 5)

    def test_fixed_points(self):
        assert fixed_points(G(3, "(1 2)")) == {3}
        assert fixed_points(symmetric_group(3)) == frozenset()
        assert fixed_points(PermGroup(2, [(0, 1)])) == {1, 2}
        assert has_fixed_point(G(3, "(1 2)")) and not has_fixed_point(symmetric_group(3))


class TestOrbitStats:
    @pytest.mark.parametrize("n,gens,pqs", [
        (4, ["(1 2)(3 4)"], (4, 2, 8)),
        (5, ["(1 2)", "(3 4 5)"], (5, 2, 7)),
        (3, ["(1 2 3)"], (3, 1, 3)),
    ])
    def test_examples(self, n, gens, pqs):
        st_ = orbit_stats(G(n, *gens))
        assert (st_.p, st_.q, st_.s) == pqs

    def brute(self, H):
        """Oracle: orbits by applying every element to every point or pair."""
        pts = {frozenset(g[a] for g in H.raw_elements) for a in range(H.degree)}
        pairs = {frozenset((g[a], g[b]) for g in H.raw_elements)
                 for a in range(H.degree) for b in range(H.degree)}
        return len(pts), len(pairs)

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_against_brute_force(self, d):
        for H in subgroups_of_sym(d):
            s = orbit_stats(H)
            assert (s.q, s.s) == self.brute(H)
            assert 1 <= s.q <= s.p and s.q <= s.s <= s.p**2
            assert sum(map(len, s.point_orbits)) == s.p
            assert sum(map(len, s.pair_orbits)) == s.p**2

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_fixed_point_free_bounds(self, d):
        for H in subgroups_of_sym(d):
            if not has_fixed_point(H):
                s = orbit_stats(H)
                assert 2 * s.q <= s.p and 2 * s.s <= s.p**2


class TestSubgroups:
    @pytest.mark.parametrize("d,count", [(1, 1), (2, 2), (3, 6), (4, 30)])
    def test_counts_against_pair_oracle(self, d, count):
        subs = subgroups_of_sym(d)
        assert len(subs) == count
        assert {H.raw_elements for H in subs} == subgroups_by_pairs(d)

    def test_sym5_count(self):
        assert len(subgroups_of_sym(5)) == 156

    @pytest.mark.slow
    def test_sym6_count(self):
        assert len(subgroups_of_sym(6)) == 1455

    def test_fixed_point_free_in_sym3(self):
        fpf = {H.order() for H in subgroups_of_sym(3) if not has_fixed_point(H)}
        assert fpf == {3, 6}

    def test_guard(self):
        with pytest.raises(ValueError):
            subgroups_of_sym(7)

    def test_all_valid(self):
        for H in subgroups_of_sym(4):
            assert H.check_group()


def fingerprint(H):
    return H.order(), tuple(sorted(Counter(g.order() for g in H.elements).items()))


class TestIsomorphismAndClassify:
    def test_classify_examples(self):
        assert classify(G(4, "(1 2)", "(3 4)")) == GroupClass.z2_power(2)
        assert classify(G(3, "(1 2 3)", "(1 2)")) == GroupClass.sym3()
        assert classify(G(6, "(1 2)", "(4 5 6)")) == GroupClass.z2_power_times_z3(1)
        assert classify(G(3, "(1 2 3)")) == GroupClass.z3()
        assert classify(symmetric_group(1)) == GroupClass.trivial()

    def test_z2_times_sym3(self):
        H = G(5, "(1 2)", "(3 4 5)", "(3 4)")
        assert classify(H) == GroupClass.z2_power_times_sym3(1)

    def test_other(self):
        c = classify(G(4, "(1 2 3 4)"))
        assert c.kind == "Other" and c.label() == "Other(order=4,abelian=true,exponent=4)"
        assert classify(symmetric_group(4)).label() == "Other(order=24,abelian=false,exponent=12)"

    @pytest.mark.parametrize("label", ["Trivial", "Z2^3", "Z3", "Sym3", "Z2^1 x Z3", "Z2^2 x Sym3",
                                       "Other(order=8,abelian=false,exponent=4)"])
    def test_label_round_trip(self, label):
        assert GroupClass.parse(label).label() == label

    def test_conjugation_invariance_sym4(self):
        for H in subgroups_of_sym(4):
            c = classify(H)
            for g in symmetric_group(4).elements:
                K = H.conjugate(g)
                assert K.check_group()
                assert classify(K) == c

    def test_isomorphism_against_fingerprint(self):
        subs = subgroups_of_sym(4)
        fps = [fingerprint(H) for H in subs]
        for (A, fa), (B, fb) in itertools.combinations(zip(subs, fps), 2):
            iso = are_isomorphic(A, B)
            if fa != fb:
                assert not iso
            else:
                # among subgroups of Sym4 the fingerprint separates all isomorphism types
                assert iso

    def test_isomorphism_is_equivalence(self):
        subs = subgroups_of_sym(4)
        rel = {(i, j): are_isomorphic(a, b) for (i, a), (j, b)
               in itertools.product(enumerate(subs), repeat=2)}
        n = len(subs)
        assert all(rel[i, i] for i in range(n))
        assert all(rel[i, j] == rel[j, i] for i in range(n) for j in range(n))
        for i, j, k in itertools.product(range(n), repeat=3):
            if rel[i, j] and rel[j, k]:
                assert rel[i, k]

    def test_isomorphism_across_degrees(self):
        assert are_isomorphic(G(2, "(1 2)"), G(4, "(1 2)(3 4)"))
        assert are_isomorphic(G(3, "(1 2 3)", "(1 2)"), G(6, "(1 2 3)(4 5 6)", "(1 4)(2 6)(3 5)"))
        assert not are_isomorphic(G(4, "(1 2 3 4)"), G(4, "(1 2)", "(3 4)"))


class TestFiniteGroupClaims:
    @pytest.mark.parametrize("d", [2, 4, pytest.param(6, marks=pytest.mark.slow)])
    def test_orbits_of_size_two_give_z2(self, d):
        i = d // 2
        found = 0
        for H in subgroups_of_sym(d):
            s = orbit_stats(H)
            if all(len(o) == 2 for o in s.point_orbits) and all(len(o) == 2 for o in s.pair_orbits):
                found += 1
                assert classify(H) == GroupClass.z2_power(1)
                assert s.s == 2 * i * i
        assert found >= 1

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_orbit_count_bound(self, d):
        i = d // 2
        best, shapes = 0, []
        for H in subgroups_of_sym(d):
            if has_fixed_point(H):
                continue
            s = orbit_stats(H)
            if s.q > best:
                best, shapes = s.q, []
            if s.q == best:
                shapes.append(sorted(len(o) for o in s.point_orbits))
        assert best == i
        if d % 2:
            assert [2] * (i - 1) + [3] in shapes


class TestSerialization:
    def test_json_round_trip(self):
        H = G(5, "(1 2)", "(3 4 5)")
        assert PermGroup.from_json(H.to_json()) == H

    def test_restrict(self):
        H = G(5, "(2 4)")
        R = H.restrict([2, 4])
        assert R.degree == 2 and R.order() == 2
