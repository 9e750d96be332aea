from itertools import permutations

from hypothesis import given, settings, strategies as st
import pytest

from tsirelson.ordinal import (
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    OrdinalError,
    add,
    compare,
    format_ordinal,
    leading_exponent,
    mul,
    max_order_sum,
    parse_ordinal,
    product_in_order,
    sum_in_order,
)

W = OMEGA


def w(e, c=1):
    return Ordinal.omega_power(e, c)


# Ordinals below w^w as descending lists of (int exponent, coefficient);
# arithmetic written from the textbook rules, independent of the package.
def ref_add(a, b):
    if not b:
        return list(a)
    e0, c0 = b[0]
    head = [(e, c) for e, c in a if e > e0]
    same = sum(c for e, c in a if e == e0)
    return head + [(e0, same + c0)] + list(b[1:])


def ref_mul(a, b):
    if not a or not b:
        return []
    lead, lead_c = a[0]
    out = []
    for e, c in b:
        if e > 0:
            term = [(lead + e, c)]
        else:
            term = [(lead, lead_c * c)] + list(a[1:])
        out = ref_add(out, term)
    return out


def to_ord(terms):
    return Ordinal([(e, c) for e, c in terms])


small_cnf = st.lists(
    st.tuples(st.integers(0, 4), st.integers(1, 3)), max_size=3
).map(lambda ts: sorted({e: c for e, c in ts}.items(), reverse=True))


@st.composite
def ordinals(draw, depth=2):
    """Ordinals below epsilon_0 with small transfinite exponents."""
    n = draw(st.integers(0, 3))
    terms = []
    for _ in range(n):
        if depth > 0 and draw(st.booleans()):
            e = draw(ordinals(depth=depth - 1))
        else:
            e = Ordinal.finite(draw(st.integers(0, 3)))
        terms.append((e, draw(st.integers(1, 3))))
    return Ordinal(terms)


class TestExamples:
    def test_compare(self):
        assert compare(W, W + 1) < 0
        assert compare(W * 2, W * 2) == 0
        assert compare(w(2), W * 5 + 3) > 0

    def test_add(self):
        assert W + 1 == Ordinal([(1, 1), (0, 1)])
        assert 1 + W == W
        assert (W * 2 + 3) + w(2) == w(2)

    def test_mul(self):
        assert (W + 1) * 2 == W * 2 + 1
        assert 2 * W == W
        assert w(2) * W == w(3)

    def test_leading_exponent(self):
        assert leading_exponent(w(3, 2) + W) == 3
        assert leading_exponent(5) == 0
        assert leading_exponent(W) == 1

    def test_parse(self):
        assert parse_ordinal("w^2*3 + w + 5") == w(2, 3) + W + 5
        assert parse_ordinal("w^(w)") == w(W)
        assert parse_ordinal("0") == ZERO
        assert parse_ordinal("ω^ω^2") == w(w(2))

    @pytest.mark.parametrize("bad", ["w^", "3*", "w+-1", "(w", "x", ""])
    def test_parse_rejects(self, bad):
        with pytest.raises(OrdinalError):
            parse_ordinal(bad)

    def test_predecessor(self):
        assert (W + 2).predecessor() == W + 1
        with pytest.raises(OrdinalError):
            W.predecessor()

    def test_in_order_helpers(self):
        assert sum_in_order([1, W]) == W
        assert sum_in_order([W, 1]) == W + 1
        assert max_order_sum([1, W]) == W + 1
        assert max_order_sum([w(3) + W, w(3) + 2]) == w(3, 2) + W
        assert product_in_order([W, W + 1]) == w(2) + W
        assert product_in_order([]) == ONE


class TestAgainstReference:
    @given(small_cnf, small_cnf)
    def test_add_matches(self, a, b):
        assert add(to_ord(a), to_ord(b)) == to_ord(ref_add(a, b))

    @given(small_cnf, small_cnf)
    def test_mul_matches(self, a, b):
        assert mul(to_ord(a), to_ord(b)) == to_ord(ref_mul(a, b))

    @given(small_cnf, small_cnf)
    def test_compare_matches_lexicographic(self, a, b):
        expected = (a > b) - (a < b)
        assert compare(to_ord(a), to_ord(b)) == expected


class TestLaws:
    @settings(max_examples=300)
    @given(ordinals(), ordinals(), ordinals())
    def test_add_associative(self, a, b, c):
        assert (a + b) + c == a + (b + c)

    @settings(max_examples=300)
    @given(ordinals(), ordinals(), ordinals())
    def test_mul_associative(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @settings(max_examples=300)
    @given(ordinals(), ordinals(), ordinals())
    def test_left_distributive(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @given(ordinals(), ordinals())
    def test_add_monotone_right(self, a, b):
        assert a + b >= b and a + b >= a

    @given(ordinals(), ordinals())
    def test_max_order_sum_symmetric(self, a, b):
        assert max_order_sum([a, b]) == max_order_sum([b, a]) == max(a + b, b + a)

    @settings(max_examples=200)
    @given(st.lists(small_cnf.map(to_ord), max_size=4))
    def test_max_order_sum_is_best_permutation(self, vals):
        best = max((sum_in_order(p) for p in permutations(vals)), default=ZERO)
        assert max_order_sum(vals) == best

    @given(ordinals())
    def test_format_roundtrip(self, a):
        assert parse_ordinal(format_ordinal(a)) == a

    @given(ordinals(), ordinals())
    def test_total_order(self, a, b):
        assert (compare(a, b) == 0) == (a == b)
        assert compare(a, b) == -compare(b, a)

    def test_not_right_distributive(self):
        assert (W + 1) * 2 != W * 2 + 2
