"""Regular families of finite subsets of N as composable expressions.

Every family is a frozen dataclass exposing a small left-to-right automaton:
``initial(e)`` is the state after reading the first element ``e`` of a set,
``advance(state, e)`` the state after appending a larger element.  ``None``
means no member of the family starts with the elements read so far.  Because
DSL families are hereditary, a finite set belongs to the family iff the run
never dies.  States of composite families are frozensets of the possible
partial decompositions (successive blocks), so the automaton *is* the
exhaustive successive-partition search, memoized by state.

Finite sets are plain strictly increasing tuples of positive ints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    OrdinalError,
    add,
    as_ordinal,
    format_ordinal,
    mul,
    parse_ordinal,
)

FinSet = Tuple[int, ...]

DEFAULT_ENUM_CAP = 20


class FamilyError(ValueError):
    pass


class CapExceeded(FamilyError):
    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what, self.size, self.cap = what, size, cap


def finset(elements: Iterable[int]) -> FinSet:
    out = tuple(sorted(set(int(e) for e in elements)))
    if out and out[0] < 1:
        raise FamilyError(f"finite sets live in N = {{1, 2, ...}}, got {out}")
    return out


# ----------------------------------------------------------------------
# fundamental sequences
# ----------------------------------------------------------------------

class FundamentalPolicy:
    """Chooses the sequence increasing to each limit ordinal.

    Subclass and override :meth:`fundamental` for a custom choice; instances
    must be hashable since they are part of family identity.
    """

    name = "custom"

    def fundamental(self, beta: Ordinal, n: int) -> Ordinal:
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.name} fundamental sequences>"


class StandardPolicy(FundamentalPolicy):
    name = "standard"

    def fundamental(self, beta: Ordinal, n: int) -> Ordinal:
        return standard_fundamental(beta, n)

    def __eq__(self, other):
        return isinstance(other, StandardPolicy)

    def __hash__(self):
        return hash("standard-policy")


STANDARD = StandardPolicy()


def standard_fundamental(beta, n: int) -> Ordinal:
    """n-th term of the standard sequence increasing to the limit ``beta``.

    For ``beta = w^b1*m1 + ... + w^bk*mk`` the prefix is
    ``w^b1*m1 + ... + w^bk*(mk - 1)`` followed by ``w^(bk - 1)*n`` when ``bk``
    is a successor and by ``w^(zeta_n)`` when ``bk`` is a limit, with
    ``zeta_n`` chosen by the same rule.
    """
    beta = as_ordinal(beta)
    if not beta.is_limit:
        raise OrdinalError(f"{beta} is not a limit ordinal")
    if n < 1:
        raise OrdinalError("fundamental sequences are indexed from 1")
    *head, (exp, coef) = beta.terms
    if coef > 1:
        head.append((exp, coef - 1))
    prefix = Ordinal._raw(head)
    if exp.is_successor:
        tail = Ordinal.omega_power(exp.predecessor(), n)
    else:
        tail = Ordinal.omega_power(standard_fundamental(exp, n))
    return add(prefix, tail)


# ----------------------------------------------------------------------
# family expressions
# ----------------------------------------------------------------------

class Family:
    """Base class; subclasses are frozen dataclasses."""

    hereditary = True
    # G in F and H a spread of G (same size, pointwise larger) imply H in F
    spreading = False

    def initial(self, e: int):
        raise NotImplementedError

    def advance(self, state, e: int):
        raise NotImplementedError

    def accepts(self, state) -> bool:
        return True

    def index(self) -> Tuple[Ordinal, bool]:
        raise NotImplementedError

    def dsl(self) -> str:
        raise NotImplementedError

    # cardinality bounds used to certify negative derivative checks
    def uniform_card(self) -> Optional[int]:
        return None

    def card_with_min(self, a: int) -> Optional[int]:
        return self.uniform_card()

    def __str__(self):
        return self.dsl()


@dataclass(frozen=True)
class Singletons(Family):
    spreading = True

    def initial(self, e):
        return 1

    def advance(self, state, e):
        return None

    def index(self):
        return ONE, True

    def dsl(self):
        return "S0"

    def uniform_card(self):
        return 1


@dataclass(frozen=True)
class Schreier(Family):
    alpha: Ordinal
    policy: FundamentalPolicy = field(default=STANDARD)
    spreading = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_ordinal(self.alpha))

    def _child(self) -> "Schreier":
        return _schreier(self.alpha.predecessor(), self.policy)

    def _approx(self, n: int) -> "Schreier":
        return _schreier(self.policy.fundamental(self.alpha, n), self.policy)

    def initial(self, e):
        a = self.alpha
        if not a:
            return ()
        if a == ONE:
            return (e, 1)
        if a.is_successor:
            return (e, 1, self._child().initial(e))
        # A limit keeps the prefix read so far; nesting one state set per
        # approximation grows like e^e at deep limits.
        return (e,)

    def advance(self, state, e):
        a = self.alpha
        if not a:
            return None
        if a == ONE:
            lo, count = state
            return (lo, count + 1) if count < lo else None
        if a.is_successor:
            # Greedy maximal blocks use the fewest blocks (the child family is
            # hereditary), so one deterministic state suffices.
            lo, blocks, cur = state
            child = self._child()
            nxt = _step(child, cur, e)
            if nxt is not None:
                return (lo, blocks, nxt)
            if blocks < lo:
                return (lo, blocks + 1, child.initial(e))
            return None
        prefix = state + (e,)
        return prefix if self.reach(prefix) == len(prefix) else None

    def reach(self, G: FinSet) -> int:
        """Length of the longest prefix of ``G`` in the family.

        Members starting at ``G[0]`` form an initial run of prefixes because
        the family is hereditary.  A successor index takes ``G[0]`` greedy
        maximal blocks, a limit index the best approximation ``n <= G[0]``.
        This avoids the nested state sets of the automaton at deep limits.
        """
        return _schreier_reach(self, tuple(G))

    def index(self):
        return Ordinal.omega_power(self.alpha), True

    def dsl(self):
        return "S0" if not self.alpha else f"S({format_ordinal(self.alpha)})"

    def uniform_card(self):
        return 1 if not self.alpha else None

    def card_with_min(self, a):
        if not self.alpha:
            return 1
        if self.alpha == ONE:
            return a
        if self.alpha.is_successor:
            blocks = a
            if blocks == 1:
                return self._child().card_with_min(a)
            return None
        bounds = [self._approx(n).card_with_min(a) for n in range(1, a + 1)]
        return None if any(b is None for b in bounds) else max(bounds)


@lru_cache(maxsize=None)
def _schreier(alpha: Ordinal, policy: FundamentalPolicy) -> Schreier:
    return Schreier(alpha, policy)


@lru_cache(maxsize=1 << 20)
def _schreier_reach(fam: Schreier, G: FinSet) -> int:
    if not G:
        return 0
    a = fam.alpha
    if not a:
        return 1
    if a.is_successor:
        child, used = fam._child(), 0
        for _ in range(G[0]):
            if used == len(G):
                break
            used += _schreier_reach(child, G[used:])
        return used
    best = 0
    for n in range(1, G[0] + 1):
        best = max(best, _schreier_reach(fam._approx(n), G))
        if best == len(G):
            break
    return best


@dataclass(frozen=True)
class Compose(Family):
    """``outer[inner]``: unions of successive inner-members whose minima form an outer-member."""

    outer: Family
    inner: Family

    @property
    def _greedy(self) -> bool:
        # Maximal inner blocks have the fewest blocks and the largest minima,
        # which is enough when the outer family is hereditary and spreading.
        return self.outer.hereditary and self.outer.spreading and self.inner.hereditary

    @property
    def spreading(self):
        return self.outer.spreading and self.inner.spreading

    def initial(self, e):
        o = self.outer.initial(e)
        i = self.inner.initial(e)
        if o is None or i is None:
            return None
        if self._greedy:
            return ("g", o, i)
        return frozenset({(o, i)})

    def advance(self, state, e):
        if self._greedy:
            _, o, i = state
            i2 = _step(self.inner, i, e)
            if i2 is not None and self.inner.accepts(i2):
                return ("g", o, i2)
            o2 = _step(self.outer, o, e)
            fresh = self.inner.initial(e)
            if o2 is None or fresh is None:
                return None
            return ("g", o2, fresh)
        out = set()
        fresh = None
        for o, i in state:
            i2 = _step(self.inner, i, e)
            if i2 is not None:
                out.add((o, i2))
            if not self.inner.accepts(i):
                continue  # the current block must be complete before a new one starts
            o2 = _step(self.outer, o, e)
            if o2 is not None:
                if fresh is None:
                    fresh = self.inner.initial(e)
                if fresh is not None:
                    out.add((o2, fresh))
        return frozenset(out) if out else None

    def accepts(self, state):
        if self._greedy:
            return self.outer.accepts(state[1]) and self.inner.accepts(state[2])
        return any(self.outer.accepts(o) and self.inner.accepts(i) for o, i in state)

    def index(self):
        io, _ = self.outer.index()
        ii, _ = self.inner.index()
        return mul(ii, io), False

    def dsl(self):
        return f"comp({self.outer.dsl()},{self.inner.dsl()})"

    def uniform_card(self):
        a, b = self.outer.uniform_card(), self.inner.uniform_card()
        return None if a is None or b is None else a * b

    def card_with_min(self, a):
        blocks = self.outer.card_with_min(a)
        if blocks == 1:
            return self.inner.card_with_min(a)
        u = self.inner.uniform_card()
        return None if blocks is None or u is None else blocks * u


@dataclass(frozen=True)
class Concat(Family):
    """``(M1, ..., Mk)``: unions M1 < ... < Mk with each Mi in the i-th family."""

    parts: Tuple[Family, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise FamilyError("cat() needs at least one family")

    def initial(self, e):
        out = []
        for idx, part in enumerate(self.parts):
            s = part.initial(e)
            if s is not None:
                out.append((idx, s))
        return frozenset(out) if out else None

    def advance(self, state, e):
        out = set()
        inits = {}
        for idx, s in state:
            s2 = _step(self.parts[idx], s, e)
            if s2 is not None:
                out.add((idx, s2))
            for j in range(idx + 1, len(self.parts)):
                if j not in inits:
                    inits[j] = self.parts[j].initial(e)
                if inits[j] is not None:
                    out.add((j, inits[j]))
        return frozenset(out) if out else None

    def accepts(self, state):
        return any(self.parts[i].accepts(s) for i, s in state)

    def index(self):
        total, exact = ZERO, True
        for part in reversed(self.parts):
            val, ex = part.index()
            total = add(total, val)
            exact = exact and ex
        return total, exact

    def dsl(self):
        return "cat(" + ",".join(p.dsl() for p in self.parts) + ")"

    def uniform_card(self):
        bounds = [p.uniform_card() for p in self.parts]
        return None if any(b is None for b in bounds) else sum(bounds)


class _Delegating(Family):
    """Family defined by an equivalent expanded expression."""

    def expanded(self) -> Family:
        raise NotImplementedError

    @property
    def spreading(self):
        return self.expanded().spreading

    def initial(self, e):
        return self.expanded().initial(e)

    def advance(self, state, e):
        return _step(self.expanded(), state, e)

    def accepts(self, state):
        return self.expanded().accepts(state)

    def uniform_card(self):
        return self.expanded().uniform_card()

    def card_with_min(self, a):
        return self.expanded().card_with_min(a)


@dataclass(frozen=True)
class Power(_Delegating):
    """``[M]^k = M[M]...[M]`` (k-fold)."""

    base: Family
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise FamilyError("pow() needs k >= 1")

    def expanded(self):
        return _power(self.base, self.k)

    def index(self):
        val, exact = self.base.index()
        out = val
        for _ in range(self.k - 1):
            out = mul(val, out)
        return out, exact and self.k == 1

    def dsl(self):
        return f"pow({self.base.dsl()},{self.k})"


@lru_cache(maxsize=None)
def _power(base: Family, k: int) -> Family:
    out = base
    for _ in range(k - 1):
        out = Compose(out, base)
    return out


@dataclass(frozen=True)
class Repeat(_Delegating):
    """``(M)^k = (M, ..., M)`` (k-fold)."""

    base: Family
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise FamilyError("rep() needs k >= 1")

    def expanded(self):
        return _concat((self.base,) * self.k)

    def index(self):
        val, exact = self.base.index()
        return mul(val, self.k), exact

    def dsl(self):
        return f"rep({self.base.dsl()},{self.k})"


@lru_cache(maxsize=None)
def _concat(parts) -> Concat:
    return Concat(parts)


@dataclass(frozen=True)
class RAlpha(_Delegating):
    """``R_alpha = ((S_bn)^mn, ..., (S_b1)^m1)`` for ``alpha = w^b1*m1 + ... + w^bn*mn``."""

    alpha: Ordinal
    policy: FundamentalPolicy = field(default=STANDARD)

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_ordinal(self.alpha))
        if not self.alpha:
            raise FamilyError("R(alpha) needs alpha > 0")

    def expanded(self):
        parts = []
        for exp, coef in reversed(self.alpha.terms):
            parts.extend([_schreier(exp, self.policy)] * coef)
        return _concat(tuple(parts))

    def index(self):
        return self.alpha, True

    def dsl(self):
        return f"R({format_ordinal(self.alpha)})"


@dataclass(frozen=True)
class BddCard(Family):
    """``{G : l <= min G, |G| <= m}`` together with the empty set."""

    lo: int
    m: int
    spreading = True

    def __post_init__(self):
        if self.lo < 1 or self.m < 1:
            raise FamilyError("bdd(l, m) needs positive l and m")

    def initial(self, e):
        return 1 if e >= self.lo else None

    def advance(self, state, e):
        return state + 1 if state < self.m else None

    def index(self):
        return Ordinal.finite(self.m), True

    def dsl(self):
        return f"bdd({self.lo},{self.m})"

    def uniform_card(self):
        return self.m

    def card_with_min(self, a):
        return self.m if a >= self.lo else 0


@dataclass(frozen=True)
class Union(Family):
    parts: Tuple[Family, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise FamilyError("union() needs at least one family")

    def initial(self, e):
        out = []
        for idx, part in enumerate(self.parts):
            s = part.initial(e)
            if s is not None:
                out.append((idx, s))
        return frozenset(out) if out else None

    def advance(self, state, e):
        out = []
        for idx, s in state:
            s2 = _step(self.parts[idx], s, e)
            if s2 is not None:
                out.append((idx, s2))
        return frozenset(out) if out else None

    def accepts(self, state):
        return any(self.parts[i].accepts(s) for i, s in state)

    def index(self):
        # (A u B)' = A' u B' for closed A, B, so the index of a finite union
        # is the maximum of the indices.
        best, exact = ZERO, True
        for part in self.parts:
            val, ex = part.index()
            exact = exact and ex
            if val > best:
                best = val
        return best, exact

    def dsl(self):
        return "union(" + ",".join(p.dsl() for p in self.parts) + ")"

    def uniform_card(self):
        bounds = [p.uniform_card() for p in self.parts]
        return None if any(b is None for b in bounds) else max(bounds)

    def card_with_min(self, a):
        bounds = [p.card_with_min(a) for p in self.parts]
        return None if any(b is None for b in bounds) else max(bounds)


@dataclass(frozen=True)
class Normalize(Family):
    """``(M n [N_l]^{<inf}) u S0``: M acts only on sets starting at or after ``l``."""

    base: Family
    lo: int

    def initial(self, e):
        if e >= self.lo:
            s = self.base.initial(e)
            if s is not None:
                return ("base", s)
        return ("single",)

    def advance(self, state, e):
        if state[0] != "base":
            return None
        s = _step(self.base, state[1], e)
        return None if s is None else ("base", s)

    def accepts(self, state):
        return state[0] == "single" or self.base.accepts(state[1])

    def index(self):
        return self.base.index()

    def dsl(self):
        return f"norm({self.base.dsl()},{self.lo})"

    def uniform_card(self):
        u = self.base.uniform_card()
        return None if u is None else max(u, 1)

    def card_with_min(self, a):
        if a < self.lo:
            return 1
        b = self.base.card_with_min(a)
        return None if b is None else max(b, 1)


@dataclass(frozen=True)
class Explicit(Family):
    """A finite family listed member by member (not necessarily regular)."""

    members: frozenset

    def __post_init__(self):
        mem = frozenset(finset(m) for m in self.members) | {()}
        object.__setattr__(self, "members", mem)
        object.__setattr__(
            self, "_prefixes", frozenset(m[:i] for m in mem for i in range(len(m) + 1))
        )

    @property
    def hereditary(self):
        return all(
            m[:i] + m[i + 1:] in self.members for m in self.members for i in range(len(m))
        )

    def initial(self, e):
        return (e,) if (e,) in self._prefixes else None

    def advance(self, state, e):
        nxt = state + (e,)
        return nxt if nxt in self._prefixes else None

    def accepts(self, state):
        return state in self.members

    def index(self):
        raise FamilyError("index of an explicit family is not computed symbolically")

    def dsl(self):
        return "{" + ";".join(",".join(map(str, m)) for m in sorted(self.members)) + "}"

    def uniform_card(self):
        return max(len(m) for m in self.members)


# ----------------------------------------------------------------------
# membership and admissibility
# ----------------------------------------------------------------------

@lru_cache(maxsize=1 << 20)
def _step(fam: Family, state, e: int):
    return fam.advance(state, e)


def run(fam: Family, elements: Sequence[int]):
    """Automaton state after reading ``elements`` (increasing), or None."""
    it = iter(elements)
    try:
        first = next(it)
    except StopIteration:
        return "empty"
    state = fam.initial(first)
    for e in it:
        if state is None:
            return None
        state = _step(fam, state, e)
    return state


@lru_cache(maxsize=1 << 18)
def contains(fam: Family, G: FinSet) -> bool:
    G = tuple(G)
    if not G:
        return True
    if any(b <= a for a, b in zip(G, G[1:])) or G[0] < 1:
        raise FamilyError(f"not a strictly increasing subset of N: {G}")
    if isinstance(fam, Schreier):
        return fam.reach(G) == len(G)
    state = run(fam, G)
    return state is not None and fam.accepts(state)


def is_successive(blocks: Sequence[FinSet]) -> bool:
    return all(a[-1] < b[0] for a, b in zip(blocks, blocks[1:]))


def is_admissible(fam: Family, blocks: Sequence[Iterable[int]]) -> bool:
    """True iff the blocks are successive and their minima form a member of ``fam``."""
    blocks = [finset(b) for b in blocks]
    if any(not b for b in blocks):
        raise FamilyError("admissible sequences consist of nonempty sets")
    if not is_successive(blocks):
        return False
    return contains(fam, tuple(b[0] for b in blocks))


# ----------------------------------------------------------------------
# enumeration and F-norms
# ----------------------------------------------------------------------

def enumerate_members(fam: Family, ground: Iterable[int], cap: int = DEFAULT_ENUM_CAP) -> List[FinSet]:
    """All members of ``fam`` contained in ``ground`` (including the empty set)."""
    ground = finset(ground)
    if len(ground) > cap:
        raise CapExceeded("enumerate ground", len(ground), cap)
    if not fam.hereditary:
        return [
            G
            for r in range(len(ground) + 1)
            for G in combinations(ground, r)
            if contains(fam, G)
        ]
    out: List[FinSet] = [()]

    def dfs(prefix: FinSet, state, start: int):
        for j in range(start, len(ground)):
            e = ground[j]
            s = fam.initial(e) if not prefix else _step(fam, state, e)
            if s is None:
                continue
            G = prefix + (e,)
            if fam.accepts(s):
                out.append(G)
            dfs(G, s, j + 1)

    dfs((), None, 0)
    out.sort(key=lambda g: (len(g), g))
    return out


def family_norm(coords: Sequence[Tuple[int, Fraction]], fam: Family, cap: int = 24) -> Fraction:
    """``sup_{G in fam} sum_{k in G} |x_k|`` over members inside the support."""
    pts = sorted((int(k), abs(Fraction(v))) for k, v in coords if v)
    if len(pts) > cap:
        raise CapExceeded("family norm support", len(pts), cap)
    idx = [k for k, _ in pts]
    val = [v for _, v in pts]
    memo: Dict = {}

    def best(state, j):
        # best additional mass from positions >= j given current state
        key = (state, j)
        if key in memo:
            return memo[key]
        out = Fraction(0)
        for t in range(j, len(idx)):
            s = fam.initial(idx[t]) if state is None else _step(fam, state, idx[t])
            if s is None:
                continue
            cand = val[t] + best(s, t + 1)
            if cand > out:
                out = cand
        memo[key] = out
        return out

    if not fam.hereditary:
        sub = enumerate_members(fam, idx, cap)
        lookup = dict(pts)
        return max((sum((lookup[k] for k in G), Fraction(0)) for G in sub), default=Fraction(0))
    return best(None, 0)


class ContainmentTracker:
    """Incremental check that ``A`` restricted to a growing ground lies in ``B``.

    Keeps one representative subset for every reachable pair of automaton
    states.  Subsets reaching the same pair accept exactly the same
    extensions, so adding an element only has to step each pair once.
    """

    _DEAD = "dead"

    def __init__(self, A: Family, B: Family):
        self.A, self.B = A, B
        self.ground: List[int] = []
        self.reach: Dict = {}

    def _extend(self, e: int):
        A, B, dead = self.A, self.B, self._DEAD
        fresh: Dict = {}
        items = [(None, ())] + list(self.reach.items())
        for pair, G in items:
            if pair is None:
                a2, b2 = A.initial(e), B.initial(e)
            else:
                sa, sb = pair
                a2 = _step(A, sa, e)
                b2 = dead if sb is dead else _step(B, sb, e)
            if a2 is None:
                continue
            if b2 is None:
                b2 = dead
            key = (a2, b2)
            if key not in self.reach and key not in fresh:
                fresh[key] = G + (e,)
        return fresh

    def probe(self, e: int) -> Optional[FinSet]:
        """Witness that adding ``e`` breaks the containment, or None (nothing is committed)."""
        if self.ground and e <= self.ground[-1]:
            raise FamilyError("ground elements must be added in increasing order")
        for (a2, b2), G in self._extend(e).items():
            if self.A.accepts(a2) and (b2 is self._DEAD or not self.B.accepts(b2)):
                return G
        return None

    def add(self, e: int) -> Optional[FinSet]:
        """Add ``e`` to the ground; returns a witness if the containment now fails."""
        if self.ground and e <= self.ground[-1]:
            raise FamilyError("ground elements must be added in increasing order")
        fresh = self._extend(e)
        self.ground.append(e)
        self.reach.update(fresh)
        for (a2, b2), G in fresh.items():
            if self.A.accepts(a2) and (b2 is self._DEAD or not self.B.accepts(b2)):
                return G
        return None


def containment_violation(A: Family, B: Family, ground: Iterable[int],
                          cap: int = DEFAULT_ENUM_CAP) -> Optional[FinSet]:
    """A member of ``A`` inside ``ground`` that is not in ``B``, or None.

    Exhaustive over all subsets of ``ground`` via :class:`ContainmentTracker`.
    """
    ground = finset(ground)
    if len(ground) > cap:
        raise CapExceeded("containment ground", len(ground), cap)
    if ground and B.hereditary and contains(B, ground):
        return None  # B hereditary and the whole ground is in B
    tracker = ContainmentTracker(A, B)
    for e in ground:
        w = tracker.add(e)
        if w is not None:
            return w
    return None


# ----------------------------------------------------------------------
# derivatives and regularity
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DerivResult:
    member: bool
    certified: bool
    witness: Optional[FinSet] = None


def iterated_deriv_contains(fam: Family, k: int, G: Iterable[int], search_cap: int = 100) -> DerivResult:
    """Decide ``G in fam^{(k)}`` for a spreading hereditary family.

    Uses the criterion ``G in F^(k)`` iff ``G u {m+1, ..., m+k}`` is in F for
    some ``m >= max G``; ``m`` is searched up to ``search_cap``.  A negative
    answer is certified only when a cardinality bound rules out every ``m``.
    """
    G = finset(G)
    if k < 0:
        raise FamilyError("derivative order must be >= 0")
    if k == 0:
        ok = contains(fam, G)
        return DerivResult(ok, True, G if ok else None)
    if fam.hereditary and not contains(fam, G):
        return DerivResult(False, True)  # derivatives of a hereditary family sit inside it
    lo = G[-1] if G else 0
    for m in range(lo, max(lo, search_cap) + 1):
        cand = G + tuple(range(m + 1, m + k + 1))
        if contains(fam, cand):
            return DerivResult(True, True, cand)
    if G:
        bound = fam.card_with_min(G[0])
    else:
        bound = fam.uniform_card()
    if bound is not None and len(G) + k > bound:
        return DerivResult(False, True)
    return DerivResult(False, False)


def finite_index_by_derivatives(fam: Family, max_k: int = 64, search_cap: int = 200) -> Optional[int]:
    """Least k with ``fam^(k) = {empty}``, found via the derivative shortcut.

    Returns None if the empty set still survives at ``max_k`` or a negative
    answer could not be certified.
    """
    for k in range(max_k + 1):
        res = iterated_deriv_contains(fam, k + 1, (), search_cap)
        if not res.member:
            return k if res.certified else None
    return None


@dataclass
class RegularityReport:
    passed: bool
    hereditary_violations: List[Tuple[FinSet, FinSet]]
    spreading_violations: List[Tuple[FinSet, FinSet]]
    members_checked: int

    def as_dict(self):
        return {
            "passed": self.passed,
            "members_checked": self.members_checked,
            "hereditary_violations": [[list(a), list(b)] for a, b in self.hereditary_violations],
            "spreading_violations": [[list(a), list(b)] for a, b in self.spreading_violations],
        }


def check_regular_on_ground(fam: Family, ground: Iterable[int], cap: int = DEFAULT_ENUM_CAP,
                            max_witnesses: int = 10) -> RegularityReport:
    """Check hereditary and spreading on every member inside ``ground``.

    Spreading is checked for every single-element move to the next ground
    element on its right that keeps the set strictly increasing.
    """
    ground = finset(ground)
    if len(ground) > cap:
        raise CapExceeded("regularity ground", len(ground), cap)
    members = [G for r in range(len(ground) + 1) for G in combinations(ground, r) if contains(fam, G)]
    pos = {g: i for i, g in enumerate(ground)}
    hered, spread = [], []
    for G in members:
        for i in range(len(G)):
            sub = G[:i] + G[i + 1:]
            if not contains(fam, sub) and len(hered) < max_witnesses:
                hered.append((G, sub))
            nxt = pos[G[i]] + 1
            if nxt < len(ground):
                e = ground[nxt]
                if i + 1 < len(G) and G[i + 1] <= e:
                    continue
                moved = G[:i] + (e,) + G[i + 1:]
                if not contains(fam, moved) and len(spread) < max_witnesses:
                    spread.append((G, moved))
    return RegularityReport(not hered and not spread, hered, spread, len(members))


# ----------------------------------------------------------------------
# DSL
# ----------------------------------------------------------------------

def _split_args(text: str, start: int) -> Tuple[List[str], int]:
    """Split the comma-separated arguments of a call whose '(' is at ``start``."""
    depth, args, cur = 0, [], start + 1
    for i in range(start, len(text)):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                args.append(text[cur:i])
                return args, i + 1
        elif ch == "," and depth == 1:
            args.append(text[cur:i])
            cur = i + 1
    raise FamilyError(f"unbalanced parentheses in {text!r} (opened at position {start})")


def _int_arg(s: str, what: str) -> int:
    try:
        return int(s.strip())
    except ValueError:
        raise FamilyError(f"{what} must be an integer, got {s.strip()!r}") from None


def parse_family(text: str, policy: FundamentalPolicy = STANDARD) -> Family:
    """Parse the family DSL: ``S0``, ``S(a)``, ``comp(M,N)``, ``cat(...)``,
    ``pow(M,k)``, ``rep(M,k)``, ``R(a)``, ``bdd(l,m)``, ``union(...)``, ``norm(M,l)``."""
    src = text.strip()
    if src == "S0":
        return Singletons()
    name_end = src.find("(")
    if name_end <= 0:
        raise FamilyError(f"cannot parse family expression {text!r}")
    name = src[:name_end].strip()
    args, end = _split_args(src, name_end)
    if src[end:].strip():
        raise FamilyError(f"trailing text {src[end:]!r} in family expression {text!r}")
    try:
        if name == "S":
            (a,) = args
            alpha = parse_ordinal(a)
            return Singletons() if not alpha else _schreier(alpha, policy)
        if name == "R":
            (a,) = args
            return RAlpha(parse_ordinal(a), policy)
        if name == "comp":
            m, n = args
            return Compose(parse_family(m, policy), parse_family(n, policy))
        if name == "cat":
            return Concat(tuple(parse_family(a, policy) for a in args))
        if name == "union":
            return Union(tuple(parse_family(a, policy) for a in args))
        if name == "pow":
            m, k = args
            return Power(parse_family(m, policy), _int_arg(k, "pow exponent"))
        if name == "rep":
            m, k = args
            return Repeat(parse_family(m, policy), _int_arg(k, "rep count"))
        if name == "bdd":
            lo, m = args
            return BddCard(_int_arg(lo, "bdd lower bound"), _int_arg(m, "bdd size"))
        if name == "norm":
            m, lo = args
            return Normalize(parse_family(m, policy), _int_arg(lo, "norm threshold"))
    except ValueError as exc:
        if isinstance(exc, FamilyError):
            raise
        raise FamilyError(f"{name}(...) in {text!r}: {exc}") from None
    raise FamilyError(f"unknown family constructor {name!r} in {text!r}")


def schreier(alpha, policy: FundamentalPolicy = STANDARD) -> Family:
    alpha = as_ordinal(alpha)
    return Singletons() if not alpha else _schreier(alpha, policy)


def bracket(families: Sequence[Family]) -> Family:
    """``[M1, ..., Mk] = (...(M1[M2])...)[Mk]``."""
    if not families:
        raise FamilyError("bracket of no families")
    out = families[0]
    for f in families[1:]:
        out = Compose(out, f)
    return out


def _cache_hashes():
    # Family objects key the automaton caches; recomputing dataclass hashes
    # of nested expressions on every lookup dominates run time otherwise.
    def wrap(cls):
        orig = cls.__dict__.get("__hash__")
        if orig is None:
            return

        def cached(self, _orig=orig):
            try:
                return self.__dict__["_hash_cache"]
            except KeyError:
                h = _orig(self)
                object.__setattr__(self, "_hash_cache", h)
                return h

        cls.__hash__ = cached

    todo = [Family]
    while todo:
        cls = todo.pop()
        for sub in cls.__subclasses__():
            wrap(sub)
            todo.append(sub)


_cache_hashes()
