"""Acceptance suite: one recorded verdict per criterion.

Every comparison is exact rational or ordinal equality; the only numeric
tolerance is the five-minute runtime budget of criterion 1.  The verdict
lines are printed in the ``acceptance criteria`` section of the pytest
summary (see ``conftest.py``).
"""

from fractions import Fraction
from itertools import combinations
import random
import time

import pytest

from tsirelson.families import (
    BddCard,
    check_regular_on_ground,
    contains,
    finite_index_by_derivatives,
    is_admissible,
    iterated_deriv_contains,
    parse_family,
    schreier,
)
from tsirelson.lab import (
    _containment_pairs,
    _level_family,
    build_z,
    build_z_sequence,
    dagger_probe,
    decompose_z,
    gamma,
    spreading_constant,
    t2_tree,
    verify_l6_bound,
)
from tsirelson.norm import brute_force_norm, evaluate_tree, norm, norm_value, tree_problems
from tsirelson.ordinal import Ordinal
from tsirelson.presets import desk_schedule, geometric_space, harmonic_space, tsirelson_space
from tsirelson.space import Vector

from acceptance_log import record
from oracles import deriv_oracle, gamma_by_tuples

SEED = 20241016
RUNTIME_BUDGET_S = 300.0
SPACES = [tsirelson_space(), geometric_space(3), harmonic_space(3)]
HALF = Fraction(1, 2)


def random_vector(rng, max_size, top):
    size = rng.randint(1, max_size)
    keys = sorted(rng.sample(range(1, top + 1), size))
    coords = []
    for k in keys:
        c = Fraction(0)
        while not c:
            c = Fraction(rng.randint(-2 * 12, 2 * 12), 12)  # [-2, 2] on a 1/12 grid
        coords.append((k, c))
    return Vector(tuple(coords))


# ---------------------------------------------------------------------------

def test_criterion_1_norm_equals_brute_force():
    rng = random.Random(SEED)
    per_space = 70
    start = time.perf_counter()
    mismatches = []
    total = 0
    for space in SPACES:
        for _ in range(per_space):
            x = random_vector(rng, 8, 14)
            total += 1
            if norm(x, space)[0] != brute_force_norm(x, space):
                mismatches.append((space.name, str(x)))
    elapsed = time.perf_counter() - start
    ok = not mismatches and total >= 200 and elapsed <= RUNTIME_BUDGET_S
    record(1, ok, f"norm == brute force on {total - len(mismatches)}/{total} vectors "
                  f"(|supp| <= 8, 3 spaces) in {elapsed:.1f}s (budget {RUNTIME_BUDGET_S:.0f}s)")
    assert ok, mismatches[:5]


def random_admissible(rng, space, x):
    """A random F_n-admissible sequence of subsets of supp x, with its n."""
    sup = x.support
    for _ in range(500):
        n = rng.randint(1, space.nmax)
        blocks, cur = [], []
        for k in sup:
            r = rng.random()
            if r < 0.15:
                continue
            if r < 0.45 and cur:
                blocks.append(tuple(cur))
                cur = []
            cur.append(k)
        if cur:
            blocks.append(tuple(cur))
        if len(blocks) >= 2 and is_admissible(space.family(n), blocks):
            return n, blocks
    raise RuntimeError("no admissible sequence found")


def test_criterion_2_lower_bound_law():
    rng = random.Random(SEED + 2)
    failures, checked = [], 0
    for space in SPACES:
        for _ in range(100):
            x = random_vector(rng, 10, 16)
            while len(x) < 3:
                x = random_vector(rng, 10, 16)
            n, blocks = random_admissible(rng, space, x)
            lhs = norm_value(x, space)
            rhs = space.theta(n) * sum(norm_value(x.restrict(E), space) for E in blocks)
            checked += 1
            if lhs < rhs:
                failures.append((space.name, str(x), n, blocks))
    ok = not failures
    record(2, ok, f"norm(x) >= theta_n * sum norm(E_i x) on {checked - len(failures)}/{checked} "
                  f"admissible sequences (100 per space)")
    assert ok, failures[:3]


def random_cnf(rng, max_exp):
    terms = {}
    for _ in range(rng.randint(1, 3)):
        terms[rng.randint(0, max_exp)] = rng.randint(1, 3)
    return Ordinal(sorted(terms.items(), reverse=True))


def random_ordinal(rng, depth=2):
    terms = []
    for _ in range(rng.randint(0, 3)):
        e = random_ordinal(rng, depth - 1) if depth and rng.random() < 0.4 else Ordinal.finite(rng.randint(0, 3))
        terms.append((e, rng.randint(1, 3)))
    return Ordinal(terms)


def test_criterion_3_ordinal_laws_and_index_rules():
    rng = random.Random(SEED + 3)
    law_failures = 0
    for _ in range(1000):
        a, b, c = (random_ordinal(rng) for _ in range(3))
        if (a + b) + c != a + (b + c) or (a * b) * c != a * (b * c) or a * (b + c) != a * b + a * c:
            law_failures += 1
    samples = [random_cnf(rng, 4) for _ in range(20)]
    index_failures = []
    for alpha in samples:
        if schreier(alpha).index() != (Ordinal.omega_power(alpha), True):
            index_failures.append(("S", alpha))
        if alpha and parse_family(f"R({alpha})").index() != (alpha, True):
            index_failures.append(("R", alpha))
    # second route for finite alpha: count Cantor-Bendixson derivatives directly
    deriv_failures = [n for n in (1, 2, 3, 5) if finite_index_by_derivatives(parse_family(f"R({n})")) != n]
    ok = not law_failures and not index_failures and not deriv_failures
    record(3, ok, f"1000 triples: {1000 - law_failures} satisfy assoc(+), assoc(*), left distributivity; "
                  f"index rules hold for {20 - len({a for _, a in index_failures})}/20 alphas < w^5; "
                  f"finite R(n) derivative counts agree")
    assert ok, (law_failures, index_failures, deriv_failures)


def test_criterion_4_derivative_shortcut():
    families = {"S(1)": schreier(1), "S(2)": schreier(2), "bdd(3,4)": BddCard(3, 4), "bdd(1,2)": BddCard(1, 2)}
    ground = range(1, 13)
    discrepancies, checked, uncertified = [], 0, 0
    for name, fam in families.items():
        truth_of = deriv_oracle(lambda H, f=fam: contains(f, H), window=14)
        for size in range(0, 6):
            for G in combinations(ground, size):
                for k in range(1, 5):
                    res = iterated_deriv_contains(fam, k, G)
                    truth = truth_of(k, G)
                    checked += 1
                    uncertified += not res.certified
                    if res.member != truth or (res.member and not contains(fam, res.witness)):
                        discrepancies.append((name, k, G, res.member, truth))
    ok = not discrepancies
    record(4, ok, f"derivative shortcut vs explicit witnesses: {len(discrepancies)} discrepancies over "
                  f"{checked} (family, k <= 4, G in [1,12]) cases; {uncertified} negatives uncertified")
    assert ok, discrepancies[:5]


def test_criterion_5_gamma_and_dagger():
    geo, har = geometric_space(60), harmonic_space(60)
    g1, g1_oracle = gamma(geo, 1, 3), gamma_by_tuples(geometric_space(8), 1, 3)
    g2, g2_oracle = gamma(har, HALF, 20), gamma_by_tuples(harmonic_space(40), HALF, 20)
    dag = dagger_probe(har, [HALF], [1], 50)[0]
    grid = [Fraction(1, 4), HALF, Fraction(3, 4), Fraction(9, 10)]
    geo_rows = dagger_probe(geo, grid, [1], 50)
    ok = (g1 == g1_oracle == 2 and g2 == g2_oracle == 9 and dag.witness == 5
          and all(r.witness is None and r.searched_up_to == 50 for r in geo_rows))
    record(5, ok, f"gamma(1,3) = {g1} (tuples {g1_oracle}) on 2^-n; gamma(1/2,20) = {g2} (tuples {g2_oracle}) "
                  f"on 1/(n+1); dagger witness m = {dag.witness}; 2^-n grid witnesses "
                  f"{[r.witness for r in geo_rows]} up to m = 50")
    assert ok


def test_criterion_6_z_vectors():
    sched = desk_schedule()
    details, ok = [], True
    for n, k in [(1, 0), (1, 1)]:
        z = build_z(sched, n, k)  # raises unless every postcondition holds
        levels = decompose_z(z)
        masses_ok = all(y.l1() == 1 / sched.space.theta(sched.level(n + j).p) for j, y in enumerate(levels))
        disjoint = len({i for y in levels for i in y.support}) == sum(len(y) for y in levels)
        rep = verify_l6_bound(sched, z)
        good = masses_ok and disjoint and rep["c7_margin"] > 0
        ok &= good
        details.append(f"Z(p{n}..p{n + k}): masses {[str(y.l1()) for y in levels]} norm {rep['norm']} "
                       f"C7 margin {rep['c7_margin']}")
    # second schedule level, reported for information (see the notes on the reduced schedule)
    info = verify_l6_bound(sched, build_z(sched, 2, 0))
    details.append(f"[info, not gated] Z(p2): norm {info['norm']} C7 margin {info['c7_margin']}")
    record(6, ok, "; ".join(details))
    assert ok


def test_criterion_7_spreading_inequality():
    sched = desk_schedule(smallness=False)
    zs = build_z_sequence(sched, 3)
    target = schreier(Ordinal.omega_power(sched.space.xi))
    rep = spreading_constant([z.vector for z in zs], target, sched.space, pattern_budget=500, seed=SEED,
                             zinfo=(sched, zs))
    tree_failures = []
    for F, a, value in rep.rows:
        tree = t2_tree(sched, zs, F, a)
        x = Vector()
        for kk, c in zip(F, a):
            x = x + zs[kk - 1].vector.scaled(c)
        total = sum(abs(c) for c in a)
        if tree is None or tree_problems(tree, sched.space) or evaluate_tree(tree, x) < total:
            tree_failures.append((F, a))
    units = [Vector.unit(i) for i in range(1, 9)]
    prop1 = spreading_constant(units, schreier(1), tsirelson_space(), pattern_budget=500, seed=SEED)
    ok = (rep.empirical_min >= 1 and rep.certified_lower >= 1 and not tree_failures
          and prop1.certified_lower == HALF and prop1.empirical_min == HALF)
    record(7, ok, f"z_1..z_3 over {rep.members} members of S_w, {rep.patterns_tested} patterns: "
                  f"min ratio {rep.empirical_min}, certified {rep.certified_lower}, "
                  f"{len(rep.rows) - len(tree_failures)}/{len(rep.rows)} explicit trees valid; "
                  f"unit blocks in T: certified {prop1.certified_lower}, empirical {prop1.empirical_min}")
    assert ok, tree_failures[:3]


def families_used():
    fams = {}
    for space in SPACES + [harmonic_space(60), geometric_space(8), desk_schedule().space]:
        for f in space.families[:8]:
            fams[f.dsl()] = f
    for text in ["S(w)", "S(1)", "S(2)", "bdd(3,4)", "bdd(1,2)", "R(1)", "R(2)", "R(3)", "R(5)"]:
        f = parse_family(text)
        fams[f.dsl()] = f
    rng = random.Random(SEED + 3)
    for _ in range(1000):  # replay criterion 3's draws to reach the same samples
        for _ in range(3):
            random_ordinal(rng)
    for alpha in [random_cnf(rng, 4) for _ in range(20)]:
        for f in (schreier(alpha), parse_family(f"R({alpha})") if alpha else None):
            if f is not None:
                fams[f.dsl()] = f
    for sched in (desk_schedule(), desk_schedule(smallness=False)):
        etas = []
        for n in range(1, sched.depth + 1):
            lv = sched.level(n)
            for _, A, B in _containment_pairs(sched.space, n, lv.p, lv.eta, etas, lv.beta, lv.k_histories[:20]):
                fams[A.dsl()] = A
                fams[B.dsl()] = B
            etas.append(lv.eta)
            for j in range(0, sched.depth - n + 1):
                f = _level_family(sched, n, j)
                fams[f.dsl()] = f
    return fams


def test_criterion_8_regularity():
    fams = families_used()
    failed = [name for name, f in fams.items() if not check_regular_on_ground(f, range(1, 13)).passed]
    ok = not failed
    record(8, ok, f"{len(fams) - len(failed)}/{len(fams)} families used above are hereditary and spreading "
                  f"on ground {{1..12}}")
    assert ok, failed


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
