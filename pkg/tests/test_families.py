from fractions import Fraction
from itertools import combinations

from hypothesis import given, settings, strategies as st
import pytest

from tsirelson.families import (
    BddCard,
    CapExceeded,
    Compose,
    ContainmentTracker,
    Explicit,
    FamilyError,
    Singletons,
    check_regular_on_ground,
    containment_violation,
    contains,
    enumerate_members,
    family_norm,
    finite_index_by_derivatives,
    finset,
    is_admissible,
    iterated_deriv_contains,
    parse_family,
    run,
    schreier,
    standard_fundamental,
)
from tsirelson.ordinal import OMEGA, Ordinal, parse_ordinal

from oracles import (
    compose_member,
    consecutive_splits,
    schreier_member,
    schreier_omega_member,
    schreier_ordinal_member,
)

W = OMEGA

finsets = st.sets(st.integers(1, 14), max_size=9).map(lambda s: tuple(sorted(s)))


def P(text):
    return parse_family(text)


class TestContains:
    def test_examples(self):
        assert contains(schreier(1), (2, 3))
        assert not contains(schreier(1), (1, 2))
        assert contains(Singletons(), (5,))
        assert not contains(Singletons(), (5, 6))
        assert contains(schreier(2), (2, 3, 4, 5, 6, 7))
        assert contains(schreier(W), (3, 4, 5))
        assert contains(schreier(3), ())

    @settings(max_examples=400)
    @given(st.integers(0, 4), finsets)
    def test_schreier_finite_matches_partition_search(self, n, G):
        assert contains(schreier(n), G) == schreier_member(n, G)

    @settings(max_examples=200)
    @given(finsets)
    def test_schreier_omega_matches_definition(self, G):
        assert contains(schreier(W), G) == schreier_omega_member(G)

    @settings(max_examples=300, deadline=None)
    @given(
        st.sampled_from(["w", "w+1", "w*2", "w^2", "w^2+w+1", "w^3", "w^w"]),
        st.sets(st.integers(1, 12), max_size=8).map(lambda s: tuple(sorted(s))),
    )
    def test_transfinite_matches_definition(self, text, G):
        alpha = parse_ordinal(text)
        expected = schreier_ordinal_member(alpha, G, standard_fundamental)
        fam = schreier(alpha)
        assert contains(fam, G) == expected
        state = run(fam, G)
        assert (not G or (state is not None and fam.accepts(state))) == expected

    @settings(max_examples=200)
    @given(st.integers(0, 3), finsets)
    def test_successor_is_composition(self, n, G):
        assert contains(schreier(n + 1), G) == contains(Compose(schreier(1), schreier(n)), G)

    @pytest.mark.parametrize(
        "outer,inner",
        [("S(1)", "S(1)"), ("S(2)", "S(1)"), ("S(1)", "S(2)"), ("bdd(3,2)", "S(1)"),
         ("S(1)", "bdd(2,3)"), ("S0", "S(2)")],
    )
    def test_compose_matches_partition_search(self, outer, inner):
        """The greedy block automaton is checked against every consecutive split."""
        O, I = P(outer), P(inner)
        fam = Compose(O, I)
        for size in range(0, 8):
            for G in combinations(range(1, 11), size):
                expected = compose_member(lambda s: contains(O, s), lambda s: contains(I, s), G)
                assert contains(fam, G) == expected, G

    def test_compose_nonhereditary_inner_uses_search(self):
        inner = Explicit(frozenset({(), (2, 3), (4,)}))
        fam = Compose(schreier(1), inner)
        for size in range(0, 5):
            for G in combinations(range(1, 7), size):
                expected = compose_member(lambda s: contains(schreier(1), s),
                                          lambda s: contains(inner, s), G)
                assert contains(fam, G) == expected, G

    @given(finsets)
    def test_bdd(self, G):
        assert contains(BddCard(3, 2), G) == (not G or (G[0] >= 3 and len(G) <= 2))

    @settings(max_examples=200)
    @given(finsets)
    def test_concat_definition(self, G):
        fam = P("cat(S(1),S0)")
        expected = any(
            contains(schreier(1), G[:i]) and len(G[i:]) <= 1 for i in range(len(G) + 1)
        )
        assert contains(fam, G) == expected

    @settings(max_examples=200)
    @given(finsets)
    def test_repeat_and_power(self, G):
        rep = P("rep(S(1),2)")
        assert contains(rep, G) == contains(P("cat(S(1),S(1))"), G)
        assert contains(P("pow(S(1),2)"), G) == schreier_member(2, G)

    @settings(max_examples=200)
    @given(finsets)
    def test_normalize(self, G):
        fam = P("norm(S(2),4)")
        expected = len(G) <= 1 or (G[0] >= 4 and schreier_member(2, G))
        assert contains(fam, G) == expected

    @settings(max_examples=200)
    @given(finsets)
    def test_union(self, G):
        fam = P("union(S(1),bdd(2,3))")
        assert contains(fam, G) == (contains(schreier(1), G) or contains(BddCard(2, 3), G))

    def test_ralpha_finite_and_omega_plus(self):
        assert contains(P("R(3)"), (1, 2, 3)) and not contains(P("R(3)"), (1, 2, 3, 4))
        # R(w+2) concatenates two singletons with a final S_1 set
        fam = P("R(w+2)")
        assert contains(fam, (1, 2, 3, 4))
        assert contains(fam, (5, 6, 7, 8, 9, 10, 11))
        assert not contains(fam, (1, 2, 3, 4, 5, 6))


class TestAdmissibleEnumerate:
    def test_admissible_examples(self):
        S1 = schreier(1)
        assert is_admissible(S1, [{2, 3}, {5, 7}])
        assert not is_admissible(S1, [{1}, {2}])
        assert not is_admissible(S1, [{5, 7}, {2, 3}])

    def test_enumerate_examples(self):
        assert set(enumerate_members(schreier(1), [1, 2, 3])) == {(), (1,), (2,), (3,), (2, 3)}
        assert set(enumerate_members(Singletons(), [4, 9])) == {(), (4,), (9,)}
        assert set(enumerate_members(BddCard(3, 2), [2, 3, 4])) == {(), (3,), (4,), (3, 4)}

    def test_enumerate_cap(self):
        with pytest.raises(CapExceeded):
            enumerate_members(schreier(1), range(1, 30), cap=20)

    @given(st.sets(st.integers(1, 12), max_size=8))
    def test_enumerate_is_hereditary(self, ground):
        members = set(enumerate_members(schreier(2), ground))
        for G in members:
            for i in range(len(G)):
                assert G[:i] + G[i + 1:] in members


class TestFamilyNorm:
    def test_examples(self):
        one = Fraction(1)
        assert family_norm([(2, one), (3, one), (4, one)], schreier(1)) == 2
        assert family_norm([(5, one)], Singletons()) == 1
        q = Fraction(1, 4)
        assert family_norm([(k, q) for k in (4, 5, 6, 7)], Singletons()) == q

    @settings(max_examples=100)
    @given(st.dictionaries(st.integers(1, 9), st.integers(-3, 3), max_size=6))
    def test_matches_enumeration(self, coords):
        items = sorted((k, Fraction(v)) for k, v in coords.items())
        fam = schreier(1)
        best = max(
            (sum(abs(v) for k, v in items if k in G) for G in enumerate_members(fam, coords)),
            default=0,
        )
        assert family_norm(items, fam) == best


class TestIndex:
    def test_examples(self):
        assert schreier(2).index() == (Ordinal.omega_power(2), True)
        assert P("cat(S(1),S(1))").index() == (W * 2, True)
        assert P("R(w+2)").index() == (W + 2, True)
        assert BddCard(7, 3).index() == (Ordinal.finite(3), True)

    def test_bdd_index_matches_derivatives(self):
        assert finite_index_by_derivatives(BddCard(7, 3)) == 3

    @pytest.mark.parametrize("text", ["1", "2", "w", "w+3", "w^2", "w^w"])
    def test_schreier_index(self, text):
        g = parse_ordinal(text)
        assert schreier(g).index() == (Ordinal.omega_power(g), True)


class TestDerivatives:
    def test_examples(self):
        r = iterated_deriv_contains(schreier(1), 2, (5,))
        assert r.member and r.certified and r.witness == (5, 6, 7)
        r = iterated_deriv_contains(schreier(1), 2, (2,))
        assert not r.member and r.certified
        r = iterated_deriv_contains(schreier(3), 0, ())
        assert r.member and r.certified

    def test_negative_order_rejected(self):
        with pytest.raises(FamilyError):
            iterated_deriv_contains(schreier(1), -1, ())


class TestFundamental:
    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_examples(self, n):
        assert standard_fundamental(W, n) == n
        assert standard_fundamental(Ordinal.omega_power(2), n) == W * n
        assert standard_fundamental(Ordinal.omega_power(W), n) == Ordinal.omega_power(n)

    @given(st.integers(1, 6))
    def test_increasing(self, n):
        beta = parse_ordinal("w^2*2+w^w")
        assert standard_fundamental(beta, n) < standard_fundamental(beta, n + 1) < beta


class TestRegularity:
    def test_examples(self):
        assert check_regular_on_ground(schreier(2), range(2, 11)).passed
        assert check_regular_on_ground(schreier(1), range(1, 9)).passed
        rep = check_regular_on_ground(Explicit(frozenset({(), (1,)})), [1, 2])
        assert not rep.passed and ((1,), (2,)) in rep.spreading_violations

    def test_explicit_nonhereditary_detected(self):
        rep = check_regular_on_ground(Explicit(frozenset({(), (2, 3)})), [1, 2, 3])
        assert not rep.passed and rep.hereditary_violations


class TestContainment:
    def test_tracker_matches_brute_force(self):
        A, B = schreier(2), Compose(schreier(1), P("bdd(1,3)"))
        ground = list(range(1, 12))
        members = [G for r in range(len(ground) + 1) for G in combinations(ground, r) if contains(A, G)]
        brute = next((G for G in members if not contains(B, G)), None)
        found = containment_violation(A, B, ground)
        assert (brute is None) == (found is None)
        assert found is None or (contains(A, found) and not contains(B, found))

    def test_subfamily_has_no_witness(self):
        assert containment_violation(schreier(1), schreier(2), range(1, 15)) is None

    def test_tracker_requires_increasing(self):
        t = ContainmentTracker(schreier(1), Singletons())
        t.add(3)
        with pytest.raises(FamilyError):
            t.add(2)


class TestDSL:
    @pytest.mark.parametrize(
        "text", ["S0", "S(2)", "S(w^2+1)", "comp(S(1),S(2))", "cat(S0,S(1))", "pow(S(1),3)",
                 "rep(S(1),4)", "R(w*2+1)", "bdd(3,4)", "union(S(1),bdd(2,2))", "norm(S(2),5)"],
    )
    def test_roundtrip(self, text):
        fam = P(text)
        assert P(fam.dsl()) == fam

    @pytest.mark.parametrize("bad", ["S(", "foo(1)", "bdd(0,2)", "pow(S(1),0)", "S(1) x", "R(0)"])
    def test_rejects(self, bad):
        with pytest.raises(FamilyError):
            P(bad)

    def test_finset(self):
        assert finset([3, 1, 2]) == (1, 2, 3)
        with pytest.raises(FamilyError):
            finset([0, 1])

    def test_splits_helper(self):
        assert len(list(consecutive_splits((1, 2, 3)))) == 4
