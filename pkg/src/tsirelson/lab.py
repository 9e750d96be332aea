"""Finite, certified versions of the l1-spreading-model construction.

Everything here works inside a truncated :class:`SpaceSpec`.  History classes,
gamma values and parameter schedules are computed exactly; infinite-set
extractions are replaced by greedy growth of finite grounds on which the
needed family containments are checked exhaustively.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .families import (
    DEFAULT_ENUM_CAP,
    ContainmentTracker,
    Family,
    FamilyError,
    bracket,
    containment_violation,
    contains,
    enumerate_members,
    family_norm,
    finset,
    is_successive,
    schreier,
    standard_fundamental,
)
from .norm import DEFAULT_MAX_SUPPORT, TreeNode, evaluate_tree, norm, restricted_norm, tree_problems
from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    add,
    as_ordinal,
    format_ordinal,
    leading_exponent,
    mul,
    max_order_sum,
    parse_ordinal,
    sum_in_order,
)
from .space import SpaceSpec, Vector, as_fraction

History = Tuple[int, ...]

DEFAULT_GROUND_CAP = 16
DEFAULT_PATTERN_BUDGET = 500


class LabError(ValueError):
    pass


def product_lexp(space: SpaceSpec, seq: Sequence[int]) -> Ordinal:
    """``l(alpha_ns ... alpha_n1)`` for ``seq = (n1, ..., ns)``; 0 for the empty product."""
    prod = ONE
    for n in seq:
        prod = mul(space.alpha(n), prod)
    return leading_exponent(prod)


# ----------------------------------------------------------------------
# history classes
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class NClass:
    """``N_r = {(0, n1..ns) : eps * theta_n1 ... theta_ns > theta_r}``."""

    r: int
    epsilon: Fraction


@dataclass(frozen=True)
class KClass:
    """``K_{delta,p,eta}``: tag above ``delta * theta_p`` and leading exponent below ``eta``."""

    delta: Fraction
    p: int
    eta: Ordinal


def _largest_index_above(space: SpaceSpec, bound: Fraction) -> int:
    """Largest n with theta_n > bound (0 if none); thetas are nonincreasing."""
    lo, hi = 0, space.nmax
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if space.theta(mid) > bound:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _truncation_guard(space: SpaceSpec, bound: Fraction, what: str):
    if space.theta(space.nmax) > bound:
        raise LabError(
            f"{what}: theta_{space.nmax} = {space.theta(space.nmax)} still exceeds {bound}; "
            f"the class continues past nmax = {space.nmax}, enlarge the space"
        )


def histories_N(space: SpaceSpec, r: int, epsilon) -> List[History]:
    epsilon = as_fraction(epsilon)
    target = space.theta(r)
    if epsilon * 1 <= target:
        return []
    _truncation_guard(space, target / epsilon, f"N_{r}")
    out: List[History] = []

    def dfs(prefix, tag):
        out.append((0,) + prefix)
        top = _largest_index_above(space, target / (epsilon * tag))
        for n in range(1, top + 1):
            dfs(prefix + (n,), tag * space.theta(n))

    dfs((), Fraction(1))
    return out


def histories_K(space: SpaceSpec, delta, p: int, eta) -> List[History]:
    """The class without its root: only histories of length s >= 1 are listed."""
    delta, eta = as_fraction(delta), as_ordinal(eta)
    bound = delta * space.theta(p)
    if not eta:
        return []
    _truncation_guard(space, bound, f"K_({delta},{p},{format_ordinal(eta)})")
    out: List[History] = []

    def dfs(prefix, tag, prod):
        top = _largest_index_above(space, bound / tag)
        for n in range(1, top + 1):
            nprod = mul(space.alpha(n), prod)
            if leading_exponent(nprod) >= eta:
                continue  # left factors never lower the leading exponent
            h = prefix + (n,)
            out.append((0,) + h)
            dfs(h, tag * space.theta(n), nprod)

    dfs((), Fraction(1), ONE)
    return out


def enumerate_histories(space: SpaceSpec, kind) -> List[History]:
    if isinstance(kind, NClass):
        return histories_N(space, kind.r, kind.epsilon)
    if isinstance(kind, KClass):
        return histories_K(space, kind.delta, kind.p, kind.eta)
    raise TypeError(f"unknown history class {kind!r}")


# ----------------------------------------------------------------------
# gamma and the dagger probe
# ----------------------------------------------------------------------

def _best_order_lexp(space: SpaceSpec, multiset: Sequence[int]) -> Ordinal:
    # l of a product is the ordinal sum of the factors' leading exponents in
    # written order, so the best arrangement is the best order of summation.
    return max_order_sum(space.lexp(n) for n in multiset)


def gamma(space: SpaceSpec, epsilon, m: int) -> Ordinal:
    """``gamma(eps, m) = max{ l(alpha_ns ... alpha_n1) : eps * theta_n1 ... theta_ns > theta_m }``."""
    epsilon = as_fraction(epsilon)
    target = space.theta(m)
    if epsilon <= target:
        return ZERO  # not even the root qualifies: max of the empty set
    _truncation_guard(space, target / epsilon, f"gamma(eps, {m})")
    top = _largest_index_above(space, target / epsilon)
    lexps = [None] + [space.lexp(n) for n in range(1, top + 1)]
    if all(v.is_finite for v in lexps[1:]):
        return Ordinal.finite(_gamma_integer(space, epsilon, target, top, [int(v) for v in lexps[1:]]))
    best = ZERO

    def dfs(start, tag, chosen):
        nonlocal best
        if chosen:
            v = _best_order_lexp(space, chosen)
            if v > best:
                best = v
        hi = _largest_index_above(space, target / (epsilon * tag))
        for n in range(start, hi + 1):
            dfs(n, tag * space.theta(n), chosen + [n])

    dfs(1, Fraction(1), [])
    return best


def _gamma_integer(space, epsilon, target, top, vals) -> int:
    """Exact knapsack when every leading exponent is finite.

    ``best[V]`` is the largest theta-product of a multiset whose exponents sum
    to at least ``V``; gamma is the largest ``V`` with ``eps * best[V] > target``.
    """
    items = [(space.theta(n), v) for n, v in zip(range(1, top + 1), vals) if v > 0]
    best = [Fraction(1)]
    while True:
        V = len(best)
        cand = max((th * best[max(0, V - v)] for th, v in items), default=Fraction(0))
        if epsilon * cand <= target:
            return V - 1
        best.append(cand)


@dataclass
class DaggerRow:
    epsilon: Fraction
    beta: Ordinal
    witness: Optional[int]
    gamma_at_witness: Optional[Ordinal]
    searched_up_to: int

    def as_dict(self):
        return {
            "epsilon": str(self.epsilon),
            "beta": format_ordinal(self.beta),
            "witness_m": self.witness,
            "gamma_at_witness": None if self.gamma_at_witness is None else format_ordinal(self.gamma_at_witness),
            "searched_up_to": self.searched_up_to,
        }


def dagger_probe(space: SpaceSpec, epsilon_grid: Iterable, betas: Iterable, m_bound: int) -> List[DaggerRow]:
    """Smallest ``m <= m_bound`` with ``gamma(eps, m) + 2 + beta < l(alpha_m)``.

    This is finite-range evidence about the dagger condition, never a proof
    of it or of its failure.
    """
    limit = min(m_bound, space.nmax)
    rows = []
    betas = [as_ordinal(b) for b in betas]
    for eps in epsilon_grid:
        eps = as_fraction(eps)
        gammas: Dict[int, Ordinal] = {}
        for beta in betas:
            found = None
            for m in range(1, limit + 1):
                if m not in gammas:
                    gammas[m] = gamma(space, eps, m)
                if sum_in_order([gammas[m], 2, beta]) < space.lexp(m):
                    found = m
                    break
            rows.append(DaggerRow(eps, beta, found, gammas.get(found), limit))
    return rows


# ----------------------------------------------------------------------
# parameter schedules
# ----------------------------------------------------------------------

@dataclass
class Level:
    p: int
    q: int
    eta: Ordinal
    beta: Ordinal
    ground: Tuple[int, ...]
    budget: Fraction
    k_histories: Tuple[History, ...]

    @property
    def default_budget(self) -> Fraction:
        return Fraction(1, 4 ** self.n_index) / (len(self.k_histories) + 1)

    n_index: int = 0

    def as_dict(self):
        return {
            "n": self.n_index,
            "p": self.p,
            "q": self.q,
            "eta": format_ordinal(self.eta),
            "beta": format_ordinal(self.beta),
            "ground": list(self.ground),
            "budget": str(self.budget),
            "default_budget": str(self.default_budget),
            "k_size": len(self.k_histories),
        }


@dataclass
class ParamSchedule:
    space: SpaceSpec
    epsilon: Fraction
    levels: List[Level]
    reduced: bool = False
    relaxations: List[str] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, n: int) -> Level:
        if not 1 <= n <= len(self.levels):
            raise LabError(f"level {n} is outside the schedule (levels 1..{len(self.levels)})")
        return self.levels[n - 1]

    def theta_p(self, n: int) -> Fraction:
        return self.space.theta(self.level(n).p)

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "epsilon": str(self.epsilon),
            "reduced": self.reduced,
            "relaxations": list(self.relaxations),
            "levels": [lv.as_dict() for lv in self.levels],
        }

    @classmethod
    def from_json(cls, data) -> "ParamSchedule":
        """Rebuild and re-verify a schedule; eta and the history classes are recomputed."""
        space = SpaceSpec.from_json(data["space"])
        eps = Fraction(data["epsilon"])
        levels = [
            {"p": lv["p"], "q": lv["q"], "ground": lv["ground"], "budget": Fraction(lv["budget"])}
            for lv in data["levels"]
        ]
        cap = max([DEFAULT_GROUND_CAP] + [len(lv["ground"]) for lv in levels])
        sched = reduced_schedule(space, eps, levels, betas=[parse_ordinal(lv["beta"]) for lv in data["levels"]],
                                 ground_cap=cap)
        for lv, raw in zip(sched.levels, data["levels"]):
            if raw.get("eta") is not None and parse_ordinal(raw["eta"]) != lv.eta:
                raise LabError(f"level {lv.n_index}: stored eta {raw['eta']} disagrees with the recursion ({lv.eta})")
        sched.reduced = bool(data.get("reduced", True))
        if not sched.reduced and sched.relaxations:
            raise LabError("schedule is marked full but " + "; ".join(sched.relaxations))
        return sched


def default_betas(space: SpaceSpec, depth: int) -> List[Ordinal]:
    """``beta_n``: the standard sequence increasing to ``w^xi`` (xi defaults to 1)."""
    xi = space.xi if space.xi is not None else ONE
    target = Ordinal.omega_power(xi)
    return [standard_fundamental(target, n) for n in range(1, depth + 1)]


def _eta(space, eps, n, p, prev_q) -> Ordinal:
    if n == 1:
        return add(gamma(space, eps, p), 1)
    return sum_in_order([gamma(space, eps, p), gamma(space, eps, prev_q), 1])


def _dagger_lhs(space, eps, n, p, prev_q, etas, beta) -> Ordinal:
    parts = [gamma(space, eps, p), 2]
    if n > 1:
        parts += [gamma(space, eps, prev_q), 2]
        for eta in reversed(etas):
            parts += [eta, 1]
    parts.append(beta)
    return sum_in_order(parts)


def _containment_pairs(space, n, p, eta, etas, beta, khist) -> List[Tuple[str, Family, Family]]:
    """The two families of containments a level needs on its ground."""
    pairs = []
    upper = bracket([schreier(beta)] + [schreier(add(e, 1)) for e in list(etas) + [eta]])
    pairs.append((f"S_beta{n}[S_(eta1+1),...,S_(eta{n}+1)] in F_{p}", upper, space.family(p)))
    target = schreier(eta)
    for h in khist:
        fam = bracket([space.family(i) for i in h[1:]])
        pairs.append((f"[F_{','.join(map(str, h[1:]))}] in S_eta{n}", fam, target))
    return pairs


def _violations(pairs, ground, cap) -> List[str]:
    out = []
    for label, A, B in pairs:
        w = containment_violation(A, B, ground, cap)
        if w is not None:
            out.append(f"{label} fails on ground {list(ground)}: witness {list(w)}")
    return out


def select_params(space: SpaceSpec, M0: Iterable[int], epsilon, depth: int,
                  ground_cap: int = DEFAULT_GROUND_CAP, betas: Optional[Sequence] = None) -> ParamSchedule:
    """Least admissible ``p_n, q_n`` per level, ``eta_n``, and greedy grounds ``M_n``.

    ``M_n`` grows from ``M_{n-1}`` one element at a time (least first), keeping
    an element only if every required containment still holds on the enlarged
    ground, checked exhaustively.
    """
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise LabError("epsilon must lie in (0, 1)")
    betas = [as_ordinal(b) for b in betas] if betas is not None else default_betas(space, depth)
    if len(betas) < depth:
        raise LabError(f"need {depth} betas, got {len(betas)}")
    ground = finset(M0)
    levels: List[Level] = []
    etas: List[Ordinal] = []
    prev_q = 0
    for n in range(1, depth + 1):
        beta = betas[n - 1]
        bound = eps * eps / 4 ** n
        p = None
        theta_ok = False
        for cand in range(prev_q + 1, space.nmax + 1):
            if space.theta(cand) > bound:
                continue
            theta_ok = True
            if _dagger_lhs(space, eps, n, cand, prev_q, etas, beta) < space.lexp(cand):
                p = cand
                break
        if p is None:
            if not theta_ok:
                raise LabError(f"level {n}: no p in {prev_q + 1}..{space.nmax} with theta_p <= eps^2/4^{n} = {bound}")
            lhs = "gamma(eps,p)+2+beta_1" if n == 1 else \
                "gamma(eps,p)+2+gamma(eps,q_{n-1})+2+eta_{n-1}+1+...+eta_1+1+beta_n"
            raise LabError(f"level {n}: no p in {prev_q + 1}..{space.nmax} satisfies {lhs} < l(alpha_p)")
        eta = _eta(space, eps, n, p, prev_q)
        qbound = eps * space.theta(p) / 4 ** n
        q = next((c for c in range(p + 1, space.nmax + 1) if space.theta(c) <= qbound), None)
        if q is None:
            raise LabError(f"level {n}: no q in {p + 1}..{space.nmax} with theta_q <= eps*theta_p/4^{n} = {qbound}")
        khist = tuple(histories_K(space, Fraction(1, 4 ** n), p, eta))
        pairs = _containment_pairs(space, n, p, eta, etas, beta, khist)
        trackers = [ContainmentTracker(A, B) for _, A, B in pairs]
        chosen: List[int] = []
        for e in ground:
            if len(chosen) >= ground_cap:
                break
            if all(t.probe(e) is None for t in trackers):
                for t in trackers:
                    t.add(e)
                chosen.append(e)
        if not chosen:
            raise LabError(f"level {n}: no ground M_{n} inside M_{n - 1} satisfies the containments")
        lv = Level(p, q, eta, beta, tuple(chosen), Fraction(1, 4 ** n) / (len(khist) + 1), khist, n)
        levels.append(lv)
        etas.append(eta)
        prev_q = q
        ground = tuple(chosen)
    return ParamSchedule(space, eps, levels)


def reduced_schedule(space: SpaceSpec, epsilon, levels: Sequence[dict],
                     betas: Optional[Sequence] = None, ground_cap: int = DEFAULT_GROUND_CAP) -> ParamSchedule:
    """A schedule with explicitly chosen indices, grounds and smallness budgets.

    ``eta_n`` still follows the recursion, grounds must be nested and the
    containments are verified exhaustively.  The theta inequalities, the
    index inequality and the smallness budget of the full construction are
    reported in ``relaxations`` when they do not hold instead of being enforced.
    """
    eps = as_fraction(epsilon)
    depth = len(levels)
    betas = [as_ordinal(b) for b in betas] if betas is not None else default_betas(space, depth)
    out: List[Level] = []
    etas: List[Ordinal] = []
    relax: List[str] = []
    prev_q, prev_ground = 0, None
    for n, spec in enumerate(levels, 1):
        p, q = int(spec["p"]), int(spec["q"])
        if not prev_q < p < q <= space.nmax:
            raise LabError(f"level {n}: need q_(n-1) < p_n < q_n <= nmax, got {prev_q}, {p}, {q}")
        ground = finset(spec["ground"])
        if prev_ground is not None and not set(ground) <= set(prev_ground):
            raise LabError(f"level {n}: M_{n} is not contained in M_{n - 1}")
        beta = betas[n - 1]
        eta = _eta(space, eps, n, p, prev_q)
        khist = tuple(histories_K(space, Fraction(1, 4 ** n), p, eta))
        bad = _violations(_containment_pairs(space, n, p, eta, etas, beta, khist), ground, ground_cap)
        if bad:
            raise LabError(f"level {n}: " + "; ".join(bad))
        default_budget = Fraction(1, 4 ** n) / (len(khist) + 1)
        budget = as_fraction(spec.get("budget", default_budget))
        th_p, th_q = space.theta(p), space.theta(q)
        if th_p > eps * eps / 4 ** n:
            relax.append(f"level {n}: theta_p{n} = {th_p} > eps^2/4^{n} = {eps * eps / 4 ** n}")
        if th_q > eps * th_p / 4 ** n:
            relax.append(f"level {n}: theta_q{n} = {th_q} > eps*theta_p{n}/4^{n} = {eps * th_p / 4 ** n}")
        if not _dagger_lhs(space, eps, n, p, prev_q, etas, beta) < space.lexp(p):
            relax.append(f"level {n}: index inequality for p{n} = {p} does not hold")
        if budget > default_budget:
            relax.append(f"level {n}: smallness budget {budget} exceeds 4^-{n}/(|K|+1) = {default_budget}")
        out.append(Level(p, q, eta, beta, ground, budget, khist, n))
        etas.append(eta)
        prev_q, prev_ground = q, ground
    return ParamSchedule(space, eps, out, reduced=True, relaxations=relax)


# ----------------------------------------------------------------------
# repeated averages
# ----------------------------------------------------------------------

class GroundExhausted(LabError):
    def __init__(self, needed: int, available: int, what: str = "ground"):
        super().__init__(f"{what} too short: needs at least {needed} elements, has {available}")
        self.needed, self.available = needed, available


def _eta_average(eta: Ordinal, seq: Sequence[int], pos: int, weight: Fraction,
                 out: Dict[int, Fraction], limit: int) -> int:
    """Write the eta-average starting at ``seq[pos]`` into ``out``; return the next position."""
    if pos >= len(seq):
        raise GroundExhausted(pos + 1, len(seq))
    if len(out) > limit:
        raise GroundExhausted(limit + 1, limit, "support budget")
    if not eta:
        out[seq[pos]] = out.get(seq[pos], Fraction(0)) + weight
        return pos + 1
    if eta.is_limit:
        return _eta_average(standard_fundamental(eta, seq[pos]), seq, pos, weight, out, limit)
    m = seq[pos]
    lower = eta.predecessor()
    for _ in range(m):
        pos = _eta_average(lower, seq, pos, weight / m, out, limit)
    return pos


def eta_average(eta, seq: Sequence[int], pos: int = 0, limit: int = DEFAULT_MAX_SUPPORT) -> Tuple[Vector, int]:
    out: Dict[int, Fraction] = {}
    nxt = _eta_average(as_ordinal(eta), list(seq), pos, Fraction(1), out, limit)
    return Vector.from_dict(out), nxt


def repeated_average(eta, M: Sequence[int], mass, budget, max_support: int = DEFAULT_MAX_SUPPORT) -> Vector:
    """``x`` on ``M`` with ``supp x in S_(eta+1)``, ``||x||_1 = mass`` and ``||x||_(S_eta) <= budget``.

    ``x`` is ``mass/k`` times the sum of ``k`` successive eta-averages, for the
    least ``k >= mass/budget`` whose smallness checks out exactly.  When the
    budget is at least the mass a single coordinate suffices.
    """
    eta = as_ordinal(eta)
    mass, budget = as_fraction(mass), as_fraction(budget)
    M = list(finset(M))
    if mass <= 0 or budget <= 0:
        raise LabError("mass and budget must be positive")
    if not M:
        raise GroundExhausted(1, 0)
    S_next, S_eta = schreier(add(eta, 1)), schreier(eta)
    if budget >= mass:
        return Vector.unit(M[0], mass)
    k = -(-mass.numerator * budget.denominator // (budget.numerator * mass.denominator))
    while True:
        if k > M[0]:
            raise LabError(
                f"no {k}-fold average of eta-averages fits S_(eta+1) starting at {M[0]}; "
                f"budget {budget} is too small for this ground"
            )
        acc: Dict[int, Fraction] = {}
        pos = 0
        try:
            for _ in range(k):
                pos = _eta_average(eta, M, pos, mass / k, acc, max_support)
        except GroundExhausted as exc:
            if len(acc) > max_support:
                raise LabError(
                    f"average with k = {k} needs more than {max_support} coordinates; raise the support cap"
                ) from None
            raise GroundExhausted(exc.needed, len(M), "ground M") from None
        x = Vector.from_dict(acc)
        if len(x) > max_support:
            raise LabError(f"average with k = {k} needs {len(x)} > {max_support} coordinates")
        if contains(S_next, x.support) and family_norm(x.coords, S_eta, max_support) <= budget:
            return x
        k += 1


# ----------------------------------------------------------------------
# Z vectors
# ----------------------------------------------------------------------

@dataclass
class ZVector:
    vector: Vector
    levels: Tuple[Vector, ...]
    n: int
    k: int
    points: Tuple[int, ...] = ()
    coefficients: Tuple[Fraction, ...] = ()
    children: Tuple["ZVector", ...] = ()
    schedule: Optional[ParamSchedule] = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "vector": self.vector.to_json(),
            "levels": [y.to_json() for y in self.levels],
        }

    @classmethod
    def from_json(cls, data, schedule: Optional[ParamSchedule] = None) -> "ZVector":
        """Vector and levels only; the chain structure is not stored."""
        levels = tuple(Vector.from_json(y) for y in data["levels"])
        return cls(Vector.from_json(data["vector"]), levels, int(data["n"]), int(data["k"]), schedule=schedule)


def _next_in(ground: Sequence[int], after: int) -> Optional[int]:
    for g in ground:
        if g > after:
            return g
    return None


def build_z(schedule: ParamSchedule, n: int, k: int, after: int = 0,
            max_support: int = DEFAULT_MAX_SUPPORT) -> ZVector:
    """One member of ``Z(p_n, ..., p_(n+k))`` supported after ``after``, fully verified."""
    if n < 1 or k < 0 or n + k > schedule.depth:
        raise LabError(f"Z(p_{n}..p_{n + k}) needs levels {n}..{n + k}; schedule has 1..{schedule.depth}")
    z = _build(schedule, n, k, after, max_support)
    problems = z_problems(z, schedule, max_support)
    if problems:
        raise LabError("Z-vector verification failed: " + "; ".join(problems))
    return z


def _build(schedule: ParamSchedule, n: int, k: int, after: int, cap: int) -> ZVector:
    lv = schedule.level(n)
    mass = 1 / schedule.theta_p(n)
    if k == 0:
        ground = [g for g in lv.ground if g > after]
        x = repeated_average(lv.eta, ground, mass, lv.budget, cap)
        return ZVector(x, (x,), n, 0, points=x.support, schedule=schedule)
    # Grow the interlaced chain m_1 < z_1 < m_2 < z_2 < ... one link at a time
    # until the level-0 average fits inside it.
    chain: List[int] = []
    subs: List[ZVector] = []
    cursor = after
    while True:
        m = _next_in(lv.ground, cursor)
        if m is None:
            raise GroundExhausted(len(chain) + 1, len(chain), f"ground M_{n} for the level-0 chain")
        chain.append(m)
        sub = _build(schedule, n + 1, k - 1, m, cap)
        subs.append(sub)
        cursor = sub.vector.support[-1]
        try:
            x0 = repeated_average(lv.eta, chain, mass, lv.budget, cap)
        except GroundExhausted:
            if sum(len(s.vector) for s in subs) + len(chain) > cap:
                raise LabError(f"Z(p_{n}..p_{n + k}) needs more than {cap} coordinates") from None
            continue
        break
    r = len(x0)
    points = x0.support
    assert points == tuple(chain[:r])
    theta = schedule.theta_p(n)
    coeffs = tuple(theta * x0[m] for m in points)
    children = tuple(subs[:r])
    vec = x0
    for a, child in zip(coeffs, children):
        vec = vec + child.vector.scaled(a)
    levels = [x0]
    for j in range(k):
        y = Vector()
        for a, child in zip(coeffs, children):
            y = y + child.levels[j].scaled(a)
        levels.append(y)
    return ZVector(vec, tuple(levels), n, k, points, coeffs, children, schedule)


def _level_family(schedule: ParamSchedule, n: int, j: int) -> Family:
    return bracket([schreier(add(schedule.level(i).eta, 1)) for i in range(n, n + j + 1)])


def z_problems(z: ZVector, schedule: ParamSchedule, cap: int = DEFAULT_MAX_SUPPORT) -> List[str]:
    """Every defining condition of ``Z(p_n..p_(n+k))`` that ``z`` violates."""
    out: List[str] = []
    n, k = z.n, z.k
    lv = schedule.level(n)
    theta = schedule.theta_p(n)
    x0 = z.levels[0]
    tag = f"Z(p_{n}..p_{n + k})"
    if x0.l1() != 1 / theta:
        out.append(f"{tag}: level-0 l1 mass {x0.l1()} != 1/theta_p{n} = {1 / theta}")
    if not set(x0.support) <= set(lv.ground):
        out.append(f"{tag}: level-0 support leaves M_{n}")
    if not contains(schreier(add(lv.eta, 1)), x0.support):
        out.append(f"{tag}: level-0 support {list(x0.support)} is not in S_(eta{n}+1)")
    small = family_norm(x0.coords, schreier(lv.eta), cap)
    if small > lv.budget:
        out.append(f"{tag}: ||level 0||_(S_eta{n}) = {small} exceeds budget {lv.budget}")
    if k == 0:
        if z.vector != x0:
            out.append(f"{tag}: vector differs from its single level")
        return out
    if x0.support != z.points:
        out.append(f"{tag}: level-0 support does not match the chain points")
    if tuple(theta * x0[m] for m in z.points) != z.coefficients:
        out.append(f"{tag}: coefficients a_i do not match theta_p * x0")
    # interlacing m_1 < z_1 < m_2 < ...
    prev = 0
    for m, child in zip(z.points, z.children):
        sup = child.vector.support
        if not (prev < m < sup[0]):
            out.append(f"{tag}: interlacing broken at m = {m}")
        prev = sup[-1]
        out.extend(z_problems(child, schedule, cap))
    total = x0
    for a, child in zip(z.coefficients, z.children):
        total = total + child.vector.scaled(a)
    if total != z.vector:
        out.append(f"{tag}: vector != theta^-1 sum a_i e_mi + sum a_i z_i")
    out.extend(_decomposition_problems(z, schedule))
    return out


def _decomposition_problems(z: ZVector, schedule: ParamSchedule) -> List[str]:
    out = []
    tag = f"Z(p_{z.n}..p_{z.n + z.k})"
    seen: set = set()
    total = Vector()
    for j, y in enumerate(z.levels):
        sup = set(y.support)
        if sup & seen:
            out.append(f"{tag}: level {j} overlaps an earlier level")
        seen |= sup
        total = total + y
        want = 1 / schedule.theta_p(z.n + j)
        if y.l1() != want:
            out.append(f"{tag}: ||y_{j}||_1 = {y.l1()} != {want}")
        if not sup <= set(schedule.level(z.n + j).ground):
            out.append(f"{tag}: supp y_{j} leaves M_{z.n + j}")
        if not contains(_level_family(schedule, z.n, j), y.support):
            out.append(f"{tag}: supp y_{j} is not in [S_(eta{z.n}+1),...,S_(eta{z.n + j}+1)]")
    if total != z.vector:
        out.append(f"{tag}: levels do not sum to the vector")
    return out


def decompose_z(z: ZVector) -> List[Vector]:
    """The disjoint levels ``y_0..y_k`` of ``z``, re-verified."""
    if z.schedule is None:
        raise LabError("Z-vector carries no schedule to verify against")
    problems = _decomposition_problems(z, z.schedule)
    if problems:
        raise LabError("decomposition check failed: " + "; ".join(problems))
    return list(z.levels)


def build_z_sequence(schedule: ParamSchedule, count: int, after: int = 0,
                     max_support: int = DEFAULT_MAX_SUPPORT) -> List[ZVector]:
    """Successive ``z_k in Z(p_1..p_k)``, ``k = 1..count``."""
    out = []
    for kk in range(1, count + 1):
        z = build_z(schedule, 1, kk - 1, after, max_support)
        out.append(z)
        after = z.vector.support[-1]
    return out


# ----------------------------------------------------------------------
# spreading constants
# ----------------------------------------------------------------------

@dataclass
class SpreadingReport:
    empirical_min: Fraction
    certified_lower: Fraction
    argmin: Tuple[Tuple[int, ...], Tuple[Fraction, ...]]
    patterns_tested: int
    members: int
    rows: List[Tuple[Tuple[int, ...], Tuple[Fraction, ...], Fraction]] = field(default_factory=list, repr=False)
    certificates: Dict[Tuple[int, ...], str] = field(default_factory=dict, repr=False)

    @property
    def constant(self) -> Optional[Fraction]:
        """``K`` in ``||sum a_n x_n|| >= K^-1 sum |a_n|`` as certified."""
        return None if not self.certified_lower else 1 / self.certified_lower

    def as_dict(self):
        F, a = self.argmin
        return {
            "empirical_min": str(self.empirical_min),
            "certified_lower": str(self.certified_lower),
            "certified_constant": None if self.constant is None else str(self.constant),
            "argmin": {"F": list(F), "a": [str(v) for v in a]},
            "patterns_tested": self.patterns_tested,
            "members": self.members,
            "note": "certified_lower is theta_n^i from the lower estimate; a constant written "
                    "as 1/theta^i without the index n would differ whenever theta_n varies with n",
        }


def _patterns(size: int, quota: int, rng: random.Random) -> List[Tuple[Fraction, ...]]:
    base: List[Tuple[Fraction, ...]] = []
    for j in range(size):
        base.append(tuple(Fraction(int(i == j)) for i in range(size)))
    base.append(tuple(Fraction(1) for _ in range(size)))
    if size > 1:
        base.append(tuple(Fraction((-1) ** i) for i in range(size)))
    seen = set(base)
    out = list(base)
    tries = 0
    while len(out) < max(quota, len(base)) and tries < 20 * quota:
        tries += 1
        a = tuple(Fraction(rng.randint(0, 8), 8) * rng.choice((1, -1)) for _ in range(size))
        if any(a) and a not in seen:
            seen.add(a)
            out.append(a)
    return out


def t2_tree(schedule: ParamSchedule, zs: Sequence[ZVector], F: Sequence[int],
            coeffs: Sequence) -> Optional[TreeNode]:
    """The admissible tree behind ``||sum_F a_k z_k|| >= sum_F |a_k|``.

    With ``j0`` the least index with ``F in S_beta_j0`` and ``j0 <= min F``,
    ``y_k`` is level ``j0 - 1`` of ``z_k`` and the tree puts the singletons of
    the union of their supports under one node with history ``(0, p_j0)``.
    Returns None when no such ``j0`` is available in the schedule.
    """
    F = tuple(F)
    j0 = next(
        (j for j in range(1, min(F[0], schedule.depth) + 1) if contains(schreier(schedule.level(j).beta), F)),
        None,
    )
    if j0 is None:
        return None
    leaves: List[int] = []
    for k in F:
        z = zs[k - 1]
        if z.k < j0 - 1:
            return None
        leaves.extend(z.levels[j0 - 1].support)
    leaves.sort()
    x = Vector()
    for k, a in zip(F, coeffs):
        x = x + zs[k - 1].vector.scaled(a)
    p = schedule.level(j0).p
    tag = schedule.space.theta(p)
    kids = tuple(TreeNode((i,), (0, p), tag) for i in leaves)
    # zero coefficients leave leaves outside supp x; the root must still cover them
    return TreeNode(tuple(sorted(set(x.support) | set(leaves))), (0,), Fraction(1), kids)


def spreading_constant(blocks: Sequence[Vector], F: Family, space: SpaceSpec,
                       pattern_budget: int = DEFAULT_PATTERN_BUDGET, seed: int = 0,
                       zinfo: Optional[Tuple[ParamSchedule, Sequence[ZVector]]] = None,
                       max_support: int = DEFAULT_MAX_SUPPORT, enum_cap: int = DEFAULT_ENUM_CAP,
                       threads: int = 1) -> SpreadingReport:
    """Empirical minimum and certified lower bound of ``||sum_F a_k x_k|| / sum_F |a_k|``.

    Blocks are indexed from 1.  The certified bound per member ``F`` is the
    best of: homogeneity (one block), unconditional projection
    (``max_k |a_k| ||x_k||``), admissibility of the blocks under some ``F_n``
    (``theta_n min_k ||x_k||``), and the Z-vector tree when ``zinfo`` is given.
    """
    supports = [b.support for b in blocks]
    if any(not s for s in supports):
        raise LabError("blocks must be nonzero")
    if not is_successive(supports):
        raise LabError("blocks are not successive")
    members = [G for G in enumerate_members(F, range(1, len(blocks) + 1), enum_cap) if G]
    if not members:
        raise LabError("the family has no nonempty member on the block indices")
    norms = [norm(b, space, max_support)[0] for b in blocks]
    rng = random.Random(seed)
    quota = max(1, pattern_budget // len(members))
    jobs = []
    certs: Dict[Tuple[int, ...], str] = {}
    certified = None
    for G in members:
        bound, how = _certified_for(G, blocks, supports, norms, space, zinfo)
        certs[G] = how
        certified = bound if certified is None else min(certified, bound)
        for a in _patterns(len(G), quota, rng):
            jobs.append((G, a))

    def ratio(job):
        G, a = job
        x = Vector()
        for k, c in zip(G, a):
            x = x + blocks[k - 1].scaled(c)
        return norm(x, space, max_support)[0] / sum((abs(c) for c in a), Fraction(0))

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as pool:
            values = list(pool.map(ratio, jobs))
    else:
        values = [ratio(j) for j in jobs]
    rows = [(G, a, v) for (G, a), v in zip(jobs, values)]
    best = min(rows, key=lambda r: r[2])
    return SpreadingReport(best[2], certified, (best[0], best[1]), len(rows), len(members), rows, certs)


def _certified_for(G, blocks, supports, norms, space, zinfo) -> Tuple[Fraction, str]:
    sub = [norms[k - 1] for k in G]
    if len(G) == 1:
        return sub[0], "homogeneity"
    best, how = min(sub) / len(G), "projection"
    sets = [supports[k - 1] for k in G]
    minima = tuple(s[0] for s in sets)
    for n in range(1, space.nmax + 1):
        if contains(space.family(n), minima):
            v = space.theta(n) * min(sub)
            if v > best:
                best, how = v, f"F_{n}-admissible blocks"
            break  # thetas are nonincreasing: the first admissible family is the best
    if zinfo is not None:
        schedule, zs = zinfo
        tree = t2_tree(schedule, zs, G, [1] * len(G))
        if tree is not None and not tree_problems(tree, space) and Fraction(1) > best:
            best, how = Fraction(1), "Z-vector tree"
    return best, how


# ----------------------------------------------------------------------
# closed-form bounds
# ----------------------------------------------------------------------

def l6_bound(n: int, k: int, m: int, epsilon) -> Fraction:
    eps = as_fraction(epsilon)
    head = Fraction(1, 4 ** (n - 1)) * sum(Fraction(1, 2 ** j) for j in range(k + 1))
    if m == 0:
        return head + 1 / eps - Fraction(3, 4 ** (n + k))
    return head + Fraction(1, 4 ** m)


def c7_bound(n: int, epsilon) -> Fraction:
    return Fraction(2, 4 ** (n - 1)) + 1 / as_fraction(epsilon)


def verify_l6_bound(schedule: ParamSchedule, z: ZVector, m: int = 0,
                    max_support: int = DEFAULT_MAX_SUPPORT) -> dict:
    """Compare ``z`` against the restricted-tree and norm bounds.

    ``m = 0`` means no restriction; otherwise trees are ``(p_m, q_m)``-restricted
    and ``0 < m < n`` is required.
    """
    if m < 0 or (m > 0 and m >= z.n):
        raise LabError(f"restriction level must satisfy 0 <= m < n = {z.n}")
    eps = schedule.epsilon
    value, _ = norm(z.vector, schedule.space, max_support)
    if m == 0:
        restricted = value
    else:
        lv = schedule.level(m)
        restricted = restricted_norm(z.vector, schedule.space, (lv.p, lv.q), eps, max_support)
    l6 = l6_bound(z.n, z.k, m, eps)
    c7 = c7_bound(z.n, eps)
    return {
        "n": z.n,
        "k": z.k,
        "m": m,
        "norm": value,
        "restricted": restricted,
        "l6_bound": l6,
        "l6_margin": l6 - restricted,
        "l6_holds": restricted <= l6,
        "c7_bound": c7,
        "c7_margin": c7 - value,
        "c7_holds": value <= c7,
    }


# ----------------------------------------------------------------------
# submultiplicative thetas
# ----------------------------------------------------------------------

def theta_rule(name: str) -> Callable[[int], Fraction]:
    """``harmonic`` (1/(n+1)), ``geometric:r`` (r^n) or ``power:s`` (1/(n+1)^s)."""
    kind, _, arg = name.partition(":")
    if kind == "harmonic":
        return lambda n: Fraction(1, n + 1)
    if kind == "geometric":
        r = Fraction(arg or "1/2")
        if not 0 < r < 1:
            raise LabError("geometric ratio must lie in (0, 1)")
        return lambda n: r ** n
    if kind == "power":
        s = int(arg or 2)
        return lambda n: Fraction(1, (n + 1) ** s)
    raise LabError(f"unknown theta rule {name!r}")


def submultiplicative_probe(rule: Callable[[int], Fraction], m_range: Sequence[int],
                            n_range: Sequence[int]) -> dict:
    """Exact grid check of ``theta_(m+n) >= theta_m theta_n`` plus a limsup proxy.

    The proxy is ``theta_(m+N)/theta_N`` at the right edge ``N`` of the n-range;
    it is finite-range evidence, not a limit.
    """
    m_range, n_range = list(m_range), list(n_range)
    top = max(m_range) + max(n_range)
    thetas = [rule(i) for i in range(1, top + 1)]
    for i in range(1, len(thetas)):
        if thetas[i] > thetas[i - 1]:
            raise LabError(f"theta is not nonincreasing: theta_{i + 1} > theta_{i}")
        if not 0 < thetas[i] < 1:
            raise LabError(f"theta_{i + 1} = {thetas[i]} is not in (0, 1)")
    th = lambda i: thetas[i - 1]
    failures = [(m, n) for m in m_range for n in n_range if th(m + n) < th(m) * th(n)]
    edge = max(n_range)
    ratios = [(m, th(m + edge) / th(edge)) for m in m_range]
    return {
        "submultiplicative": not failures,
        "failures": failures[:20],
        "edge_n": edge,
        "ratio_proxy": ratios,
        "note": "ratio_proxy is theta_(m+N)/theta_N at the largest tested N; heuristic evidence for the limsup only",
    }
