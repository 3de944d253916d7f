import math
from itertools import permutations

import numpy as np
import pytest

from conftest import EPS, Oracle, m_natural_instances, random_instances, to_mask
from submodkit import bounds
from submodkit.core import (
    FAMILIES,
    CapExceededError,
    ConcaveOverModular,
    GraphCut,
    MatroidRank,
    Modular,
    PermutationError,
    PreconditionError,
    SquaredCardinality,
    SubmodError,
    dual,
    elements,
    modular_value,
    random_function,
)
from submodkit.polyhedra import (
    Kind,
    Polyhedron,
    base_polytope,
    crossing_sets,
    greedy_vertex,
    inner_box,
    inner_box_bounds,
    inner_conv,
    lower_polyhedron,
    membership,
    positive_max_exists,
    sub_outer11,
    subdiff_subsets,
    subdiff_supersets,
    subdiff_vertex,
    subdifferential,
    super_outer,
    superdiff_subsets,
    superdiff_supersets,
    superdifferential,
    upper_polyhedron,
)
from submodkit.sweep import sample_points

SQRT2 = ConcaveOverModular("sqrt", (1.0, 1.0))
SQRT3 = ConcaveOverModular("sqrt", (1.0, 1.0, 1.0))
R2, R3 = math.sqrt(2), math.sqrt(3)


# -- extreme points ----------------------------------------------------------


def test_greedy_vertex_examples():
    w = (2.0, -1.0, 0.5, 3.0)
    for order in [(0, 1, 2, 3), (3, 1, 0, 2)]:
        assert np.allclose(greedy_vertex(Modular(w), order), w, atol=EPS)
    assert np.allclose(greedy_vertex(SQRT3, (0, 1, 2)), [1.0, R2 - 1, R3 - R2], atol=1e-12)


def test_greedy_vertex_rejects_non_normalized_and_bad_perms():
    with pytest.raises(PreconditionError):
        greedy_vertex(Modular((1.0, 1.0), offset=1.0), (0, 1))
    with pytest.raises(PermutationError):
        greedy_vertex(SQRT3, (0, 1, 1))
    with pytest.raises(PermutationError):
        greedy_vertex(SQRT3, (0, 1))


def test_greedy_vertex_in_base_polytope_coverage():
    rng = np.random.default_rng(2)
    for _ in range(5):
        f = random_function("coverage", 8, rng)
        o = Oracle(f)
        for _ in range(10):
            x = greedy_vertex(f, rng.permutation(8))
            assert membership(f, base_polytope(), x).member
            assert o.in_lower(x) and abs(x.sum() - f(f.full)) <= EPS


@pytest.mark.parametrize("family", FAMILIES)
def test_greedy_tightness_all_permutations(family):
    rng = np.random.default_rng(31)
    for n in (3, 5, 7):
        f = random_function(family, n, rng)
        o = Oracle(f)
        for order in permutations(range(n)):
            x = greedy_vertex(f, order)
            S = 0
            for j in order:
                S |= 1 << j
                assert modular_value(x, S) == pytest.approx(f(S), abs=EPS)
            assert o.in_lower(x)


def test_subdiff_vertex_examples():
    rng = np.random.default_rng(0)
    f = random_function("coverage", 5, rng)
    for order in [(0, 1, 2, 3, 4), (4, 2, 0, 1, 3)]:
        assert np.array_equal(subdiff_vertex(f, 0, order), greedy_vertex(f, order))
    assert np.allclose(subdiff_vertex(SQRT3, [1], (1, 0, 2)), [R2 - 1, 1.0, R3 - R2], atol=1e-12)
    w = (1.0, -2.0, 3.0)
    assert np.allclose(subdiff_vertex(Modular(w), 0b111, (2, 0, 1)), w, atol=EPS)


def test_subdiff_vertex_prefix_violation_names_element():
    with pytest.raises(PermutationError, match="element 0"):
        subdiff_vertex(SQRT3, [1], (0, 1, 2))


def test_subdiff_vertices_are_subgradients():
    rng = np.random.default_rng(12)
    for f in random_instances(10, 3, 7, seed=12):
        o = Oracle(f)
        for X in range(1 << f.n):
            inside = [j for j in range(f.n) if X >> j & 1]
            rest = [j for j in range(f.n) if not X >> j & 1]
            order = list(rng.permutation(inside)) + list(rng.permutation(rest))
            x = subdiff_vertex(f, X, order)
            assert membership(f, subdifferential(X), x).member
            assert o.in_subdiff(X, x)


# -- membership examples ---------------------------------------------------------


def test_singletons_in_superdiff_of_empty():
    for f in random_instances(10, 2, 6, seed=1):
        x = [f([j]) for j in range(f.n)]
        assert membership(f, superdifferential(0), x).member


def test_modular_weight_vector_in_everything():
    w = (1.0, -2.0, 0.5, 3.0)
    f = Modular(w)
    assert membership(f, lower_polyhedron(), w).member
    assert membership(f, base_polytope(), w).member
    assert membership(f, upper_polyhedron(), w).member
    for X in range(16):
        assert membership(f, subdifferential(X), w).member
        assert membership(f, superdifferential(X), w).member


def test_upper_polyhedron_boundary():
    v = membership(SQRT2, upper_polyhedron(), [1.0, 1.0])
    assert v.member and v.method == "closed_form"
    v = membership(SQRT2, upper_polyhedron(), [1.0, 0.5])
    assert not v.member and elements(v.witness.subset) == [1]


def test_grow_point_in_superdiff():
    # f(Y) - x(Y) over Y = {}, {0}, {1}, {0,1}: 0, 0, 0, sqrt2 - 2; at X={0}: 0
    v = membership(SQRT2, superdifferential([0]), [1.0, 1.0])
    assert v.member and v.method == "enumeration"


def test_nesting_witness_on_random_cut():
    rng = np.random.default_rng(2024)
    found = None
    for _ in range(50):
        f = random_function("graph_cut", 6, rng)
        X = int(rng.integers(1, 63))
        for x in sample_points(f, X, rng, 40):
            outer = membership(f, super_outer(X, 1, 1), x)
            exact = membership(f, superdifferential(X), x)
            if outer.member and not exact.member:
                found = (f, X, x, exact)
                break
        if found:
            break
    assert found is not None
    f, X, x, exact = found
    Y = exact.witness.subset
    lhs = f(Y) - modular_value(x, Y)
    rhs = f(X) - modular_value(x, X)
    assert lhs > rhs + EPS
    assert exact.witness.lhs == pytest.approx(lhs) and exact.witness.rhs == pytest.approx(rhs)


def test_base_polytope_witness_is_full_set():
    x = greedy_vertex(SQRT3, (0, 1, 2)) - 0.1
    assert membership(SQRT3, lower_polyhedron(), x).member
    v = membership(SQRT3, base_polytope(), x)
    assert not v.member and v.witness.subset == 0b111


def test_lower_polyhedron_witness_is_minimiser():
    v = membership(SQRT3, lower_polyhedron(), [1.0, 1.0, 1.0])
    assert not v.member
    # f(Y) - |Y| is smallest at Y = V
    assert v.witness.subset == 0b111
    assert v.witness.lhs == 3.0 and v.witness.rhs == pytest.approx(R3)


def test_descriptor_validation():
    with pytest.raises(SubmodError):
        super_outer(1, 0, 1)
    with pytest.raises(SubmodError):
        inner_box(1, "wide")
    with pytest.raises(SubmodError):
        membership(SQRT3, superdifferential(0), [1.0, 2.0])
    assert Polyhedron("superdiff", 3).kind is Kind.SUPERDIFF


def test_enumeration_respects_cap():
    f = Modular((1.0,) * 6)
    with pytest.raises(CapExceededError):
        membership(f, superdifferential(1), np.ones(6), cap=5)
    with pytest.raises(CapExceededError):
        membership(f, lower_polyhedron(), np.ones(6), cap=5)
    # closed-form checks need no enumeration
    assert membership(f, upper_polyhedron(), np.ones(6), cap=5).member


# -- positive maximum ------------------------------------------------------------


def test_positive_max_examples():
    assert positive_max_exists(GraphCut(2, ((0, 1),)))
    assert not positive_max_exists(Modular((-1.0, -1.0, -1.0)))
    with pytest.raises(PreconditionError):
        positive_max_exists(Modular((1.0,), offset=1.0))


def test_positive_max_agrees_with_brute_force():
    fs = random_instances(60, 1, 10, seed=9) + random_instances(60, 1, 10, seed=10, signed=True)
    negatives = 0
    for f in fs:
        brute = Oracle(f).maximum() > EPS
        assert positive_max_exists(f) == brute
        negatives += not brute
    assert negatives > 0


# -- reduced inequality families --------------------------------------------------


def _random_points(f, X, rng, count):
    pts = sample_points(f, X, rng, count)
    order = [j for j in range(f.n) if X >> j & 1] + [j for j in range(f.n) if not X >> j & 1]
    v = subdiff_vertex(f, X, order)
    pts += [v, v + rng.normal(0, 0.05, f.n), v + np.abs(rng.normal(0, 0.05, f.n))]
    return pts


def test_subdifferential_reduction_matches_naive():
    rng = np.random.default_rng(40)
    seen = [0, 0]
    for f in random_instances(8, 2, 6, seed=40, signed=True):
        o = Oracle(f)
        for X in range(1 << f.n):
            for x in _random_points(f, X, rng, 5):
                got = membership(f, subdifferential(X), x).member
                assert got == o.in_subdiff(X, x)
                assert subdiff_subsets(f, X, x).member == o.in_subdiff(X, x, "sub")
                assert subdiff_supersets(f, X, x).member == o.in_subdiff(X, x, "super")
                seen[got] += 1
    assert min(seen) > 0


def test_upper_polyhedron_reduction_matches_naive():
    rng = np.random.default_rng(41)
    for f in random_instances(20, 1, 8, seed=41):
        o = Oracle(f)
        singles = np.array([f([j]) for j in range(f.n)])
        for _ in range(20):
            x = singles + rng.normal(0, 0.1, f.n) * (rng.random(f.n) < 0.5)
            assert membership(f, upper_polyhedron(), x).member == o.in_upper(x)
        assert membership(f, upper_polyhedron(), singles).member


def test_superdiff_part_reductions_match_naive():
    rng = np.random.default_rng(42)
    for f in random_instances(8, 2, 6, seed=42, signed=True):
        o = Oracle(f)
        for X in range(1 << f.n):
            for x in sample_points(f, X, rng, 5):
                assert superdiff_subsets(f, X, x).member == o.in_superdiff(X, x, "sub")
                assert superdiff_supersets(f, X, x).member == o.in_superdiff(X, x, "super")


def test_non_submodular_falls_back_to_enumeration():
    f = SquaredCardinality(4)
    o = Oracle(f)
    rng = np.random.default_rng(3)
    for _ in range(30):
        x = rng.uniform(0, 8, 4)
        v = membership(f, upper_polyhedron(), x)
        assert v.method == "enumeration" and v.member == o.in_upper(x)
        X = int(rng.integers(16))
        assert membership(f, subdifferential(X), x).member == o.in_subdiff(X, x)
        assert superdiff_subsets(f, X, x).member == o.in_superdiff(X, x, "sub")


# -- outer bounds -------------------------------------------------------------------


def test_crossing_sets_layers():
    n, X = 6, 0b000111
    for k in range(1, 7):
        for l in range(1, 7):
            got = set(crossing_sets(X, n, k, l).tolist())
            want = {
                Y
                for Y in range(64)
                if 1 <= bin(Y & ~X).count("1") <= k - 1 and 1 <= bin(X & ~Y).count("1") <= l - 1
            }
            assert got == want


def test_super_outer_matches_naive_definition():
    rng = np.random.default_rng(43)
    for f in random_instances(5, 3, 6, seed=43):
        o = Oracle(f)
        for X in rng.integers(0, 1 << f.n, 4):
            X = int(X)
            for x in sample_points(f, X, rng, 8):
                for k in (1, 2, 3):
                    for l in (1, 2, 3):
                        assert membership(f, super_outer(X, k, l), x).member == o.in_super_outer(X, x, k, l)


def test_outer_hierarchy_and_exactness():
    rng = np.random.default_rng(44)
    for f in random_instances(10, 2, 6, seed=44):
        n = f.n
        for X in range(1 << n):
            for x in sample_points(f, X, rng, 3):
                exact = membership(f, superdifferential(X), x).member
                grid = np.array(
                    [[membership(f, super_outer(X, k, l), x).member for l in range(1, n + 1)] for k in range(1, n + 1)]
                )
                assert grid[n - 1, n - 1] == exact
                if exact:
                    assert grid.all()
                for k in range(n):
                    for l in range(n):
                        if grid[k, l]:
                            assert grid[: k + 1, : l + 1].all()


# -- superdifferential at the ends, duality --------------------------------------


def test_superdiff_at_empty_and_full():
    rng = np.random.default_rng(45)
    for f in random_instances(15, 1, 8, seed=45):
        n = f.n
        singles = np.array([f([j]) for j in range(n)])
        tops = np.array([f.gain(j, f.full & ~(1 << j)) for j in range(n)])
        for base in (singles, tops):
            for _ in range(10):
                x = base + rng.normal(0, 0.1, n) * (rng.random(n) < 0.4)
                assert membership(f, superdifferential(0), x).member == bool(np.all(x >= singles - EPS))
                assert membership(f, superdifferential(f.full), x).member == bool(np.all(x <= tops + EPS))


def test_subdiff_at_full_is_dual_upper_polyhedron():
    rng = np.random.default_rng(46)
    for f in random_instances(15, 1, 8, seed=46):
        g = dual(f)
        order = list(rng.permutation(f.n))
        v = subdiff_vertex(f, f.full, order)
        for _ in range(10):
            x = v + rng.normal(0, 0.1, f.n) * (rng.random(f.n) < 0.5)
            a = membership(f, subdifferential(f.full), x).member
            b = membership(g, upper_polyhedron(), x)
            assert a == b.member


# -- inner bounds -------------------------------------------------------------------


def _box_sample(f, X, which, rng):
    corner = inner_box_bounds(f, X, which)
    inside = np.array([bool(X >> j & 1) for j in range(f.n)])
    push = rng.exponential(0.5, f.n) * (rng.random(f.n) < 0.5)
    return corner + np.where(inside, -push, push)


def test_inner_boxes_and_hull_inside_superdiff():
    rng = np.random.default_rng(47)
    for f in random_instances(10, 2, 7, seed=47):
        o = Oracle(f)
        for X in range(1 << f.n):
            for which in ("grow", "shrink", "bar"):
                corner = inner_box_bounds(f, X, which)
                assert membership(f, inner_box(X, which), corner).member
                assert o.in_superdiff(X, corner)
                x = _box_sample(f, X, which, rng)
                assert membership(f, inner_box(X, which), x).member
                assert o.in_superdiff(X, x)
            lam = rng.random()
            x = lam * _box_sample(f, X, "grow", rng) + (1 - lam) * _box_sample(f, X, "shrink", rng)
            v = membership(f, inner_conv(X), x)
            assert v.member and v.method == "lambda_interval"
            assert v.interval[0] <= lam + 1e-6 or v.interval[1] >= lam - 1e-6
            assert o.in_superdiff(X, x)


def test_inner_box_corners_are_named_supergradients():
    for f in random_instances(10, 1, 7, seed=48):
        for X in range(1 << f.n):
            for which in ("grow", "shrink", "bar"):
                assert np.array_equal(inner_box_bounds(f, X, which), bounds.supergradient(f, X, which))


def test_inner_conv_rejects_with_valid_witness():
    rng = np.random.default_rng(49)
    rejected = 0
    for f in random_instances(10, 2, 6, seed=49):
        for X in range(1 << f.n):
            for x in sample_points(f, X, rng, 4):
                v = membership(f, inner_conv(X), x)
                if v.member:
                    # some lam in the interval certifies membership directly
                    lam = 0.5 * (v.interval[0] + v.interval[1])
                    c = lam * inner_box_bounds(f, X, "grow") + (1 - lam) * inner_box_bounds(f, X, "shrink")
                    inside = np.array([bool(X >> j & 1) for j in range(f.n)])
                    assert np.all(np.where(inside, x <= c + 1e-8, x >= c - 1e-8))
                else:
                    rejected += 1
                    assert v.witness.lhs > v.witness.rhs
    assert rejected > 0


def test_inner_conv_contains_boxes_and_is_inside_superdiff_on_samples():
    rng = np.random.default_rng(50)
    for f in random_instances(10, 2, 6, seed=50):
        o = Oracle(f)
        for X in range(1 << f.n):
            for x in sample_points(f, X, rng, 5):
                in_hull = membership(f, inner_conv(X), x).member
                if membership(f, inner_box(X, "grow"), x).member or membership(f, inner_box(X, "shrink"), x).member:
                    assert in_hull
                if membership(f, inner_box(X, "bar"), x).member:
                    assert membership(f, inner_box(X, "grow"), x).member
                    assert membership(f, inner_box(X, "shrink"), x).member
                if in_hull:
                    assert o.in_superdiff(X, x)


# -- M-natural collapse -----------------------------------------------------------


def test_m_natural_superdiff_is_outer22():
    rng = np.random.default_rng(51)
    strict = 0
    for f in m_natural_instances(12, 2, 7, seed=51):
        for X in range(1 << f.n):
            for x in sample_points(f, X, rng, 4):
                exact = membership(f, superdifferential(X), x).member
                assert membership(f, super_outer(X, 2, 2), x).member == exact
                strict += membership(f, super_outer(X, 1, 1), x).member and not exact
    # the (1,1) bound alone is not enough on these families
    assert strict > 0


def test_outer22_not_exact_beyond_m_natural():
    rng = np.random.default_rng(52)
    gap = 0
    for f in random_instances(20, 4, 6, seed=52, families=("coverage", "concave_over_modular")):
        for X in rng.integers(0, 1 << f.n, 6):
            X = int(X)
            for x in sample_points(f, X, rng, 10):
                gap += membership(f, super_outer(X, 2, 2), x).member and not membership(f, superdifferential(X), x).member
    assert gap > 0


# -- the tilde point ------------------------------------------------------------------


@pytest.mark.parametrize("family", ["coverage", "graph_cut", "concave_over_modular"])
def test_tilde_in_outer_bounds_but_not_semidifferentials(family):
    rng = np.random.default_rng(53)
    for _ in range(5):
        f = random_function(family, 5, rng)
        sub_fail = super_fail = False
        for X in range(1 << f.n):
            g = bounds.supergradient(f, X, "tilde")
            assert membership(f, sub_outer11(X), g).member
            assert membership(f, super_outer(X, 1, 1), g).member
            sub_fail |= not membership(f, subdifferential(X), g).member
            super_fail |= not membership(f, superdifferential(X), g).member
        assert sub_fail and super_fail


def test_tilde_is_corner_of_both_outer11():
    for f in random_instances(10, 1, 6, seed=54):
        for X in range(1 << f.n):
            g = bounds.supergradient(f, X, "tilde")
            for j in range(f.n):
                e = np.zeros(f.n)
                e[j] = 1e-6
                inward = -e if X >> j & 1 else e
                # moving coordinate j across its bound leaves one outer set and not the other
                assert membership(f, super_outer(X, 1, 1), g + inward).member
                assert not membership(f, super_outer(X, 1, 1), g - inward).member
                assert membership(f, sub_outer11(X), g - inward).member
                assert not membership(f, sub_outer11(X), g + inward).member


# -- witnesses -------------------------------------------------------------------------


def _recompute(f, poly, x, w):
    """Recompute the witness inequality independently; returns (lhs, rhs)."""
    Y, X = w.subset, poly.X
    xv = lambda S: sum(x[j] for j in elements(S))
    if poly.kind in (Kind.SUBDIFF, Kind.SUB_OUTER11):
        return f(X) - xv(X), f(Y) - xv(Y)
    if poly.kind in (Kind.SUPERDIFF, Kind.SUPER_OUTER):
        return f(Y) - xv(Y), f(X) - xv(X)
    if poly.kind is Kind.UPPER:
        return f(Y), xv(Y)
    if poly.kind is Kind.LOWER:
        return xv(Y), f(Y)
    return w.lhs, w.rhs


def test_witnesses_recompute_to_violations():
    rng = np.random.default_rng(55)
    negatives = 0
    for f in random_instances(10, 2, 6, seed=55, signed=True):
        for X in rng.integers(0, 1 << f.n, 4):
            X = int(X)
            polys = [
                lower_polyhedron(), base_polytope(), upper_polyhedron(), subdifferential(X), superdifferential(X),
                sub_outer11(X), super_outer(X, 2, 3), inner_box(X, "grow"), inner_box(X, "shrink"),
                inner_box(X, "bar"), inner_conv(X),
            ]
            for x in sample_points(f, X, rng, 5):
                for poly in polys:
                    v = membership(f, poly, x)
                    if v.member:
                        assert v.witness is None
                        continue
                    negatives += 1
                    lhs, rhs = _recompute(f, poly, x, v.witness)
                    assert lhs > rhs + EPS
                    assert lhs == pytest.approx(v.witness.lhs, abs=1e-9)
                    assert rhs == pytest.approx(v.witness.rhs, abs=1e-9)
    assert negatives > 100


def test_exhaustive_witness_is_first_in_mask_order():
    f = SQRT3
    x = np.zeros(3)
    v = membership(f, superdifferential(0), x)
    # every nonempty Y violates; the first in mask order is {0}
    assert v.witness.subset == 1
