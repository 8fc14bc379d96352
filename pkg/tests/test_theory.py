import itertools
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidity.groups import GroupClass, Permutation, close, symmetric_group
from rigidity.structures import Structure, Vocabulary
from rigidity.theory import (
    BetaParams,
    PreconditionError,
    beta,
    beta_gap,
    check_beta_gap,
    check_max_pair_orbits,
    check_pair_orbits_of_size_two,
    check_three_point_groups,
    is_full,
    membership_S,
    predict,
    restricted_matches_group,
    verify_lemma_suite,
)

V2 = Vocabulary((2,))


def S(n, *tuples):
    return Structure.from_tuples(V2, n, [list(tuples)])


def beta_reference(x, y, z, k, l, r):  # noqa: E741
    """Second evaluator: each monomial written out separately with rationals."""
    from fractions import Fraction
    c = Fraction(r * (r - 1), 2)
    terms = [c * k * x**2, Fraction(-k * r * (r - 1)) * x * y, Fraction(-l * (r - 1)) * x,
             Fraction(l * (r - 1)) * y, c * k * z]
    total = sum(terms, Fraction(0))
    assert total.denominator == 1
    return int(total)


class TestBeta:
    def test_examples(self):
        p = BetaParams(1, 1, 3)
        assert beta(3, 1, 3, p) == 14
        assert beta(4, 2, 8, p) == 20
        assert beta(0, 0, 0, p) == 0

    @given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50),
           st.integers(1, 6), st.integers(0, 6), st.integers(2, 8))
    def test_against_reference(self, x, y, z, k, l, r):  # noqa: E741
        assert beta(x, y, z, BetaParams(k, l, r)) == beta_reference(x, y, z, k, l, r)

    def test_not_symmetric_in_x_y(self):
        p = BetaParams(1, 1, 3)
        assert beta(3, 1, 3, p) != beta(1, 3, 3, p)

    @pytest.mark.parametrize("i,k,l,r,gap", [(1, 1, 1, 3, 6), (2, 1, 0, 3, 18), (1, 2, 3, 4, 24)])
    def test_gap_examples(self, i, k, l, r, gap):  # noqa: E741
        assert beta_gap(i, BetaParams(k, l, r)) == (gap, True)

    @given(st.integers(1, 40), st.integers(1, 6), st.integers(0, 6), st.integers(3, 9))
    def test_gap_identity(self, i, k, l, r):  # noqa: E741
        even = beta_reference(2 * i + 2, i + 1, 2 * (i + 1) ** 2, k, l, r)
        odd = beta_reference(2 * i + 1, i, 2 * i * i - 2 * i + 3, k, l, r)
        gap, ok = beta_gap(i, BetaParams(k, l, r))
        assert gap == even - odd == 2 * k * comb(r, 2) * (2 * i - 1) and ok

    def test_gap_preconditions(self):
        with pytest.raises(ValueError):
            beta_gap(0, BetaParams(1, 1, 3))
        with pytest.raises(ValueError):
            beta_gap(1, BetaParams(1, 1, 2))

    def test_params(self):
        with pytest.raises(ValueError):
            BetaParams(0, 0, 3)
        assert BetaParams.from_vocabulary(Vocabulary((3, 3, 2))) == BetaParams(2, 1, 3)


class TestPredict:
    def test_examples(self):
        p = predict(3, 2)
        assert p.m_prime == 4 and p.classes == (GroupClass.z2_power(1), GroupClass.z2_power(2))
        assert predict(2, 3).classes == (GroupClass.z2_power(1),)
        assert predict(2, 2).m_prime == 2 and predict(2, 2).classes == (GroupClass.z2_power(1),)

    @given(st.integers(2, 1000), st.integers(2, 10))
    def test_m_prime(self, m, r):
        p = predict(m, r)
        assert p.m_prime % 2 == 0 and m <= p.m_prime <= m + 1

    def test_rejects_small_m(self):
        with pytest.raises(ValueError):
            predict(1, 2)


A = S(2, (1, 2), (2, 1))
SYM2 = symmetric_group(2)


class TestMembership:
    def test_true_with_witness(self):
        res = membership_S(A, SYM2, S(4, (1, 2), (2, 1), (3, 4)))
        assert res.member and res.witness_map() == {1: 1, 2: 2}

    def test_false_by_support_size(self):
        assert not membership_S(A, SYM2, S(4, (1, 2), (2, 1))).member

    def test_false_by_rigidity(self):
        res = membership_S(A, SYM2, S(4, (1, 2)))
        assert not res.member and res.witness_map() is None

    def test_fullness(self):
        assert is_full(A, SYM2, S(4, (1, 2), (2, 1), (3, 4)))
        assert is_full(S(2), SYM2, S(2))
        a3 = close([Permutation.from_cycles("(1 2 3)", 3)])
        assert membership_S(S(3), a3, S(3)).member
        assert not is_full(S(3), a3, S(3))

    def test_full_requires_membership(self):
        with pytest.raises(ValueError):
            is_full(A, SYM2, S(4, (1, 2)))

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            membership_S(S(2, (1, 2)), close([Permutation.identity(2)]), S(2))
        with pytest.raises(PreconditionError):
            # H has a fixed point
            membership_S(S(3), close([Permutation.from_cycles("(1 2)", 3)]), S(3))
        with pytest.raises(PreconditionError):
            # H not inside Aut(A)
            membership_S(S(3, (1, 2), (2, 1)), symmetric_group(3), S(3))

    def test_isomorphism_invariant_in_m(self):
        M = S(4, (1, 2), (2, 1), (3, 4))
        for sigma in itertools.permutations(range(4)):
            N = M.relabel(sigma)
            res = membership_S(A, SYM2, N)
            assert res.member
            assert sorted(res.witness_map().values()) == sorted(sigma[a] + 1 for a in (0, 1))

    def test_conjugation_invariant_in_pair(self):
        A3 = S(3, (1, 2), (2, 3), (3, 1))
        H = close([Permutation.from_cycles("(1 2 3)", 3)])
        M = S(5, (1, 2), (2, 3), (3, 1), (4, 5))
        assert membership_S(A3, H, M).member
        for sigma in itertools.permutations(range(3)):
            s = Permutation(sigma)
            assert membership_S(A3.relabel(sigma), H.conjugate(s), M).member
        assert membership_S(A3, H, S(5, (1, 2), (2, 3), (3, 1), (4, 4))).member
        assert not membership_S(A3, H, S(5, (1, 2), (2, 3), (3, 1))).member

    def test_restricted_matches_group(self):
        assert restricted_matches_group(S(4, (1, 2), (2, 1), (3, 4)))
        assert restricted_matches_group(S(4))


class TestLemmaSuite:
    def test_three_point(self):
        r = check_three_point_groups()
        assert r.passed and r.inspected == 2

    def test_pair_orbits(self):
        assert check_pair_orbits_of_size_two(2).passed
        assert check_pair_orbits_of_size_two(4).passed

    def test_max_pair_orbits(self):
        r = check_max_pair_orbits(5)
        assert r.passed and r.detail["max_s"] == 7 and r.detail["maximizers"] >= 1

    def test_beta_gap_sweep(self):
        r = check_beta_gap()
        assert r.passed and r.inspected == 20 * 4 * 5 * 4

    def test_suite_shape(self):
        results = verify_lemma_suite(5)
        assert [r.check for r in results] == [
            "fixed-point-free-degree-3", "pair-orbits-size-2-is-Z2", "pair-orbits-size-2-is-Z2",
            "max-s-is-Z2xZ3", "beta-gap-identity"]
        assert all(r.passed for r in results)
        assert set(results[0].to_dict()) >= {"check", "scope", "pass", "counterexample"}

    def test_suite_bounds(self):
        with pytest.raises(ValueError):
            verify_lemma_suite(7)
