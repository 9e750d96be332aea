"""Exact evaluation of the mixed Tsirelson norm with certifying trees.

The main route (:func:`norm`) is an interval-start dynamic program over the
support: for a segment of the support and a family ``F_n`` it chooses a start
set ``S`` in ``F_n``; blocks run from each start to the next and points before
the first start are dropped.  :func:`brute_force_norm` is an independent
oracle that maximizes over arbitrary admissible sequences of subsets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .families import CapExceeded, FinSet, _step, contains, is_successive
from .space import SpaceSpec, Vector

DEFAULT_MAX_SUPPORT = 24
BRUTE_FORCE_CAP = 8


@dataclass(frozen=True)
class TreeNode:
    """Node of an admissible tree: a finite set, its history and its tag."""

    set: FinSet
    history: Tuple[int, ...]
    tag: Fraction
    children: Tuple["TreeNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> Iterator["TreeNode"]:
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def nodes(self) -> Iterator["TreeNode"]:
        yield self
        for c in self.children:
            yield from c.nodes()

    def to_json(self) -> dict:
        out = {
            "set": list(self.set),
            "history": list(self.history),
            "tag": [self.tag.numerator, self.tag.denominator],
        }
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out

    @classmethod
    def from_json(cls, data) -> "TreeNode":
        num, den = data["tag"]
        return cls(
            tuple(int(k) for k in data["set"]),
            tuple(int(n) for n in data["history"]),
            Fraction(int(num), int(den)),
            tuple(cls.from_json(c) for c in data.get("children", ())),
        )


@dataclass(frozen=True)
class NormCert:
    value: Fraction
    root: TreeNode

    def to_json(self) -> dict:
        return {"value": [self.value.numerator, self.value.denominator], "tree": self.root.to_json()}

    @classmethod
    def from_json(cls, data) -> "NormCert":
        num, den = data["value"]
        return cls(Fraction(int(num), int(den)), TreeNode.from_json(data["tree"]))


def evaluate_tree(root: TreeNode, x: Vector) -> Fraction:
    """``T x = sum over leaves E of t(E) * ||E x||_c0``."""
    coords = dict(x.coords)
    total = Fraction(0)
    for leaf in root.leaves():
        m = max((abs(coords[k]) for k in leaf.set if k in coords), default=Fraction(0))
        total += leaf.tag * m
    return total


def tree_problems(root: TreeNode, space: SpaceSpec) -> List[str]:
    """Everything that stops ``root`` from being a valid tagged admissible tree."""
    problems: List[str] = []
    if root.history != (0,):
        problems.append(f"root history is {root.history}, expected (0,)")
    if root.tag != 1:
        problems.append(f"root tag is {root.tag}, expected 1")

    def visit(node: TreeNode):
        if list(node.set) != sorted(set(node.set)):
            problems.append(f"node set {node.set} is not strictly increasing")
        if node.history and node.history[0] != 0:
            problems.append(f"history {node.history} does not start with 0")
        expected = space.history_tag(node.history) if all(
            0 < n <= space.nmax for n in node.history[1:]
        ) else None
        if expected is None:
            problems.append(f"history {node.history} uses a family index outside 1..{space.nmax}")
        elif node.tag != expected:
            problems.append(f"node {node.set}: tag {node.tag} != product of thetas {expected}")
        if not node.children:
            return
        fams = {c.history[-1] if len(c.history) == len(node.history) + 1 else None for c in node.children}
        for c in node.children:
            if c.history[:-1] != node.history or len(c.history) != len(node.history) + 1:
                problems.append(f"child history {c.history} does not extend {node.history}")
            if not c.set:
                problems.append(f"empty child under {node.set}")
            elif not set(c.set) <= set(node.set):
                problems.append(f"child {c.set} is not contained in parent {node.set}")
        if len(fams) != 1 or None in fams:
            problems.append(f"children of {node.set} do not share one family index")
        else:
            (n,) = fams
            blocks = [c.set for c in node.children if c.set]
            if not is_successive(blocks):
                problems.append(f"children of {node.set} are not successive")
            elif 0 < n <= space.nmax and not contains(space.family(n), tuple(b[0] for b in blocks)):
                problems.append(f"children of {node.set} are not F_{n}-admissible")
        for c in node.children:
            visit(c)

    visit(root)
    return problems


def validate_tree(root: TreeNode, space: SpaceSpec) -> bool:
    return not tree_problems(root, space)


def family_cutoff(x: Vector, space: SpaceSpec) -> int:
    """Largest n with ``theta_n * ||x||_1 > ||x||_c0`` (0 if none)."""
    l1, c0 = x.l1(), x.c0()
    cut = 0
    for n in range(1, space.nmax + 1):
        if space.theta(n) * l1 > c0:
            cut = n
        else:
            break
    return cut


# ----------------------------------------------------------------------
# interval-start dynamic program
# ----------------------------------------------------------------------

class _Solver:
    def __init__(self, x: Vector, space: SpaceSpec):
        self.space = space
        self.idx = [k for k, _ in x.coords]
        self.val = [abs(v) for _, v in x.coords]
        self.pref = [Fraction(0)] + list(accumulate(self.val))
        self.seg: Dict[Tuple[int, int], Tuple[Fraction, Optional[Tuple[int, Tuple[int, ...]]]]] = {}
        self.tails: Dict = {}

    def l1(self, i, j):
        return self.pref[j] - self.pref[i]

    def norm(self, i: int, j: int) -> Fraction:
        key = (i, j)
        hit = self.seg.get(key)
        if hit is not None:
            return hit[0]
        best = max(self.val[i:j])
        choice = None
        if j - i > 1:
            l1 = self.l1(i, j)
            for n in range(1, self.space.nmax + 1):
                th = self.space.theta(n)
                if th * l1 <= best:
                    break  # thetas are nonincreasing, so no later family helps
                b, starts = self.partition(n, i, j, self.norm, ("N",), allow_full=False)
                if starts is None:
                    continue
                # ties with the c0 leaf go to the tree, which is the more informative certificate
                if th * b > best or (choice is None and th * b == best):
                    best, choice = th * b, (n, starts)
        self.seg[key] = (best, choice)
        return best

    def partition(self, n, i, j, block_value: Callable[[int, int], Fraction], tag,
                  allow_full: bool) -> Tuple[Fraction, Optional[Tuple[int, ...]]]:
        """Best sum of block values over start sets in ``F_n`` inside ``[i, j)``."""
        fam = self.space.family(n)
        idx = self.idx
        memo = self.tails

        def tail(state, p):
            key = (tag, n, j, state, p)
            hit = memo.get(key)
            if hit is not None:
                return hit
            if fam.accepts(state):
                best, starts = block_value(p, j), (p,)
            else:
                best, starts = Fraction(-1), None
            for q in range(p + 1, j):
                s2 = _step(fam, state, idx[q])
                if s2 is None:
                    continue
                v, st = tail(s2, q)
                if st is None:
                    continue
                v = v + block_value(p, q)
                if v > best:
                    best, starts = v, (p,) + st
            memo[key] = (best, starts)
            return best, starts

        best, starts = Fraction(-1), None
        for p in range(i, j):
            s = fam.initial(idx[p])
            if s is None:
                continue
            if p == i and not allow_full:
                for q in range(i + 1, j):
                    s2 = _step(fam, s, idx[q])
                    if s2 is None:
                        continue
                    v, st = tail(s2, q)
                    if st is None:
                        continue
                    v = v + block_value(i, q)
                    if v > best:
                        best, starts = v, (i,) + st
            else:
                v, st = tail(s, p)
                if st is not None and v > best:
                    best, starts = v, st
        return best, starts

    def tree(self, i: int, j: int, history: Tuple[int, ...], tag: Fraction) -> TreeNode:
        self.norm(i, j)
        _, choice = self.seg[(i, j)]
        node_set = tuple(self.idx[i:j])
        if choice is None:
            return TreeNode(node_set, history, tag)
        n, starts = choice
        bounds = list(starts) + [j]
        child_tag = tag * self.space.theta(n)
        kids = tuple(
            self.tree(a, b, history + (n,), child_tag) for a, b in zip(bounds, bounds[1:])
        )
        return TreeNode(node_set, history, tag, kids)


def _check_cap(x: Vector, cap: int, what: str):
    if len(x) > cap:
        raise CapExceeded(what, len(x), cap)


def norm(x: Vector, space: SpaceSpec, max_support: int = DEFAULT_MAX_SUPPORT) -> Tuple[Fraction, NormCert]:
    """Exact norm of ``x`` and an admissible tree attaining it."""
    _check_cap(x, max_support, "norm support")
    if not x:
        return Fraction(0), NormCert(Fraction(0), TreeNode((), (0,), Fraction(1)))
    solver = _Solver(x, space)
    L = len(x)
    value = solver.norm(0, L)
    root = solver.tree(0, L, (0,), Fraction(1))
    return value, NormCert(value, root)


def norm_value(x: Vector, space: SpaceSpec, max_support: int = DEFAULT_MAX_SUPPORT) -> Fraction:
    return norm(x, space, max_support)[0]


# ----------------------------------------------------------------------
# brute-force oracle
# ----------------------------------------------------------------------

def _sequences(points: Sequence[int]) -> Iterator[List[Tuple[int, ...]]]:
    """All sequences of successive nonempty subsets of ``points`` (each point is
    skipped, joins the current block, or opens a new block)."""

    def rec(pos, blocks):
        if pos == len(points):
            if blocks:
                yield [tuple(b) for b in blocks]
            return
        p = points[pos]
        yield from rec(pos + 1, blocks)
        if blocks:
            blocks[-1].append(p)
            yield from rec(pos + 1, blocks)
            blocks[-1].pop()
        blocks.append([p])
        yield from rec(pos + 1, blocks)
        blocks.pop()

    yield from rec(0, [])


def brute_force_norm(x: Vector, space: SpaceSpec, cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """Literal maximization over all ``F_n``-admissible sequences.

    Only ``E_i`` restricted to the support changes ``||E_i x||``, so blocks are
    subsets of the support.  A single block carrying the whole support would
    contribute ``theta_n * ||x|| < ||x||`` and is skipped, which makes the
    recursion well founded.
    """
    _check_cap(x, cap, "brute-force support")
    coords = dict(x.coords)
    memo: Dict[Tuple[int, ...], Fraction] = {}

    def nrm(pts: Tuple[int, ...]) -> Fraction:
        if not pts:
            return Fraction(0)
        if pts in memo:
            return memo[pts]
        best = max(abs(coords[k]) for k in pts)
        if len(pts) > 1:
            for n in range(1, space.nmax + 1):
                fam, th = space.family(n), space.theta(n)
                for blocks in _sequences(pts):
                    if len(blocks) == 1 and blocks[0] == pts:
                        continue
                    if not contains(fam, tuple(b[0] for b in blocks)):
                        continue
                    v = th * sum((nrm(b) for b in blocks), Fraction(0))
                    if v > best:
                        best = v
        memo[pts] = best
        return best

    return nrm(x.support)


# ----------------------------------------------------------------------
# restricted trees
# ----------------------------------------------------------------------

def in_N(space: SpaceSpec, tag: Fraction, r: int, epsilon: Fraction) -> bool:
    """History with theta-product ``tag`` lies in ``N_r`` iff ``epsilon * tag > theta_r``."""
    return epsilon * tag > space.theta(r)


def restricted_norm(x: Vector, space: SpaceSpec, restriction: Optional[Tuple[int, int]],
                    epsilon, max_support: int = DEFAULT_MAX_SUPPORT) -> Fraction:
    """Max of ``T x`` over ``(p, q)``-restricted admissible trees.

    A tree is ``(p, q)``-restricted when every leaf lies in a node whose
    history is in ``N_q \\ N_p``.  Membership in ``N_r`` only depends on the
    history's theta-product, so the DP state is (segment, tag).  Without a
    restriction the value is the norm.
    """
    _check_cap(x, max_support, "restricted norm support")
    epsilon = Fraction(epsilon)
    if not x:
        return Fraction(0)
    solver = _Solver(x, space)
    L = len(x)
    if restriction is None:
        return solver.norm(0, L)
    p, q = restriction
    th_p, th_q = space.theta(p), space.theta(q)
    memo: Dict[Tuple[int, int, Fraction], Fraction] = {}

    def R(i: int, j: int, tag: Fraction) -> Fraction:
        if th_q < epsilon * tag <= th_p:
            return tag * solver.norm(i, j)
        if epsilon * tag <= th_q:
            return Fraction(0)  # tags only shrink: no descendant can qualify
        key = (i, j, tag)
        if key in memo:
            return memo[key]
        best = Fraction(0)
        cap = tag * solver.norm(i, j)
        for n in range(1, space.nmax + 1):
            child = tag * space.theta(n)
            if epsilon * child <= th_q:
                break
            v, starts = solver.partition(
                n, i, j, lambda a, b, c=child: R(a, b, c), ("R", child), allow_full=True
            )
            if starts is not None and v > best:
                best = v
                if best >= cap:
                    break
        memo[key] = best
        return best

    return R(0, L, Fraction(1))
