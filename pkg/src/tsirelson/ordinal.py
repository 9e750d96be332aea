"""Ordinals below epsilon_0 in Cantor normal form.

An :class:`Ordinal` is an immutable tuple of ``(exponent, coefficient)`` terms
with strictly decreasing exponents and positive integer coefficients.  Exponents
are themselves ordinals, so the representation is recursive and canonical:
two ordinals are equal iff their term tuples are equal.

Plain Python ints are accepted wherever an ordinal is expected.
"""

from __future__ import annotations

import re
from functools import lru_cache, total_ordering
from typing import Iterable, Tuple, Union

OrdinalLike = Union["Ordinal", int]


class OrdinalError(ValueError):
    pass


@total_ordering
class Ordinal:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Iterable[Tuple[OrdinalLike, int]] = ()):
        # Non-canonical term lists are normalized by summation.
        acc = ZERO_TERMS
        for exp, coef in terms:
            if not isinstance(coef, int) or coef < 0:
                raise OrdinalError(f"coefficient must be a non-negative int, got {coef!r}")
            if coef == 0:
                continue
            acc = _add_terms(acc, ((as_ordinal(exp), coef),))
        self.terms: Tuple[Tuple[Ordinal, int], ...] = acc
        self._hash = hash(self.terms)

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj.terms = tuple(terms)
        obj._hash = hash(obj.terms)
        return obj

    # ------------------------------------------------------------------
    @staticmethod
    def finite(n: int) -> "Ordinal":
        if n < 0:
            raise OrdinalError("negative ordinal")
        return Ordinal._raw(((ZERO, n),)) if n else ZERO

    @staticmethod
    def omega_power(exp: OrdinalLike, coef: int = 1) -> "Ordinal":
        if coef == 0:
            return ZERO
        return Ordinal._raw(((as_ordinal(exp), coef),))

    # ------------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            other = Ordinal.finite(other) if other >= 0 else None
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other):
        if isinstance(other, int):
            other = as_ordinal(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return compare(self, other) < 0

    def __hash__(self):
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: OrdinalLike) -> "Ordinal":
        return add(self, other)

    def __radd__(self, other: int) -> "Ordinal":
        return add(other, self)

    def __mul__(self, other: OrdinalLike) -> "Ordinal":
        return mul(self, other)

    def __rmul__(self, other: int) -> "Ordinal":
        return mul(other, self)

    def __repr__(self):
        return f"Ordinal({format_ordinal(self)!r})"

    def __str__(self):
        return format_ordinal(self)

    # ------------------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not self.terms[0][0])

    def __int__(self):
        if not self.is_finite:
            raise OrdinalError(f"{self} is not finite")
        return self.terms[0][1] if self.terms else 0

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and bool(self.terms[-1][0])

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0]

    def predecessor(self) -> "Ordinal":
        if not self.is_successor:
            raise OrdinalError(f"{self} is not a successor ordinal")
        *head, (exp, coef) = self.terms
        if coef > 1:
            head.append((exp, coef - 1))
        return Ordinal._raw(head)


ZERO_TERMS: Tuple = ()
ZERO = Ordinal._raw(())
ONE = Ordinal._raw(((ZERO, 1),))
OMEGA = Ordinal._raw(((ONE, 1),))


def as_ordinal(value: OrdinalLike) -> Ordinal:
    if isinstance(value, Ordinal):
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"cannot interpret {value!r} as an ordinal")
    return Ordinal.finite(value)


def compare(a: OrdinalLike, b: OrdinalLike) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to, or greater than ``b``."""
    a, b = as_ordinal(a), as_ordinal(b)
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


def _add_terms(a, b):
    if not b:
        return a
    lead = b[0][0]
    keep = []
    for exp, coef in a:
        c = compare(exp, lead)
        if c > 0:
            keep.append((exp, coef))
        elif c == 0:
            keep.append((exp, coef + b[0][1]))
            return tuple(keep) + tuple(b[1:])
        else:
            break
    return tuple(keep) + tuple(b)


def add(a: OrdinalLike, b: OrdinalLike) -> Ordinal:
    a, b = as_ordinal(a), as_ordinal(b)
    return Ordinal._raw(_add_terms(a.terms, b.terms))


def mul(a: OrdinalLike, b: OrdinalLike) -> Ordinal:
    a, b = as_ordinal(a), as_ordinal(b)
    if not a or not b:
        return ZERO
    lead_exp, lead_coef = a.terms[0]
    out = ZERO
    for exp, coef in b.terms:
        if exp:
            part = Ordinal._raw(((add(lead_exp, exp), coef),))
        else:
            part = Ordinal._raw(((lead_exp, lead_coef * coef),) + a.terms[1:])
        out = add(out, part)
    return out


def leading_exponent(a: OrdinalLike) -> Ordinal:
    """The exponent of the leading term of the normal form."""
    a = as_ordinal(a)
    if not a:
        raise OrdinalError("leading exponent of 0 is undefined")
    return a.terms[0][0]


def max_order_sum(values: Iterable[OrdinalLike]) -> Ordinal:
    """Largest ordinal sum of ``values`` over every order of summation.

    Non-increasing order is not always best: ``(w^3+w) + (w^3+2)`` is
    smaller than ``(w^3+2) + (w^3+w)``.  Addition is monotone in its left
    argument, so ``best(S) = max_x best(S - x) + x`` over sub-multisets.
    """
    vals = sorted((as_ordinal(v) for v in values), reverse=True)
    if len(vals) > 16:
        raise OrdinalError("max_order_sum is exponential in the number of values; at most 16 supported")

    @lru_cache(maxsize=None)
    def best(multiset: Tuple[Ordinal, ...]) -> Ordinal:
        if not multiset:
            return ZERO
        out = ZERO
        for i, x in enumerate(multiset):
            if i and multiset[i - 1] == x:
                continue
            cand = add(best(multiset[:i] + multiset[i + 1:]), x)
            if cand > out:
                out = cand
        return out

    return best(tuple(vals))


def sum_in_order(values: Iterable[OrdinalLike]) -> Ordinal:
    out = ZERO
    for v in values:
        out = add(out, v)
    return out


def product_in_order(values: Iterable[OrdinalLike]) -> Ordinal:
    out = ONE
    for v in values:
        out = mul(out, v)
    return out


# ----------------------------------------------------------------------
# text format:  w^2*3 + w + 5,  w^(w+1),  0
# ----------------------------------------------------------------------

def format_ordinal(a: OrdinalLike) -> str:
    a = as_ordinal(a)
    if not a:
        return "0"
    parts = []
    for exp, coef in a.terms:
        if not exp:
            parts.append(str(coef))
            continue
        if exp == ONE:
            base = "w"
        elif exp.is_finite:
            base = f"w^{int(exp)}"
        else:
            base = f"w^({format_ordinal(exp)})"
        parts.append(base if coef == 1 else f"{base}*{coef}")
    return " + ".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|(w|omega|ω)|(.))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                break
            if m.group(0).strip() == "":
                pos = m.end()
                continue
            if m.group(1):
                self.tokens.append(("int", int(m.group(1)), m.start(1)))
            elif m.group(2):
                self.tokens.append(("w", None, m.start(2)))
            else:
                self.tokens.append((m.group(3), None, m.start(3)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, kind):
        if self.peek() != kind:
            where = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
            raise OrdinalError(f"expected {kind!r} at position {where} in {self.text!r}")
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def sum(self) -> Ordinal:
        out = self.term()
        while self.peek() == "+":
            self.take("+")
            out = add(out, self.term())
        return out

    def term(self) -> Ordinal:
        kind = self.peek()
        if kind == "int":
            val = Ordinal.finite(self.take("int")[1])
            factor = None
        elif kind == "w":
            self.take("w")
            exp = ONE
            if self.peek() == "^":
                self.take("^")
                exp = self.atom()
            val = Ordinal.omega_power(exp)
        elif kind == "(":
            val = self.atom()
        else:
            self.take("term")
        while self.peek() == "*":
            self.take("*")
            factor = self.atom()
            val = mul(val, factor)
        return val

    def atom(self) -> Ordinal:
        kind = self.peek()
        if kind == "int":
            return Ordinal.finite(self.take("int")[1])
        if kind == "w":
            self.take("w")
            exp = ONE
            if self.peek() == "^":
                self.take("^")
                exp = self.atom()
            return Ordinal.omega_power(exp)
        self.take("(")
        val = self.sum()
        self.take(")")
        return val


def parse_ordinal(text: str) -> Ordinal:
    """Parse CNF text such as ``"w^2*3 + w + 5"`` or ``"w^(w)"``.

    Non-canonical input (``"1 + w"``) is normalized rather than rejected.
    """
    p = _Parser(str(text))
    if not p.tokens:
        raise OrdinalError("empty ordinal expression")
    val = p.sum()
    if p.peek() is not None:
        p.take("end of input")
    return val
