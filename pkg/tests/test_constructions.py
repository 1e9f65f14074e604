import math
import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import collinear3, equilateral
from freeiso.constructions import (
    ConstructionRecipe,
    ConstructionWarning,
    is_uniformly_concave,
    lp_sum,
    predicted_sum_pairs,
    preserved_extreme_in_sum,
    three_clique_graph,
    union_basepoint,
    union_bounded,
)
from freeiso.errors import InvalidP, PreconditionViolated, SamePoint
from freeiso.extgraph import classify_prague, ext_graph
from freeiso.graphkit import is_2_connected, is_3_connected
from freeiso.isogroup import decide_rigidity
from freeiso.metric import validate_metric
from oracles import random_metric

TWO = validate_metric([[0, 1], [1, 0]])
MULT = [[0, 3, 4], [5, 0, 6], [7, 8, 0]]


def test_two_point_square_in_l2():
    S = lp_sum(TWO, TWO, 2)
    assert len(S) == 4
    assert math.isclose(S.dist((0, 0), (1, 1)), math.sqrt(2), rel_tol=1e-12)
    assert S.dist((0, 0), (0, 1)) == 1
    # every pair of the square is extreme once the diagonal is strictly shorter than 2
    assert len(ext_graph(S).edges) == 12


def test_pythagorean_sums_stay_exact():
    three = validate_metric([[0, 3], [3, 0]])
    four = validate_metric([[0, 4], [4, 0]])
    S = lp_sum(three, four, 2)
    assert S.exact and S.dist((0, 0), (1, 1)) == 5


def test_l1_square_has_eight_extreme_edges():
    with pytest.warns(ConstructionWarning):
        S = lp_sum(TWO, TWO, 1)
    assert S.exact and S.dist((0, 0), (1, 1)) == 2
    assert len(ext_graph(S).edges) == 8
    assert classify_prague(S).klass == "Prague"


def test_recipe_collects_warnings():
    recipe = ConstructionRecipe("lpsum", {"p": 1})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lp_sum(TWO, TWO, 1, recipe=recipe)
    assert len(recipe.warnings) == 1
    assert recipe.to_json()["kind"] == "lpsum"


def test_bad_p_rejected():
    with pytest.raises(InvalidP):
        lp_sum(TWO, TWO, Fraction(1, 2))
    with pytest.raises(InvalidP):
        union_basepoint(TWO, equilateral(4), 0, 0, p=1)
    with pytest.raises(InvalidP):
        preserved_extreme_in_sum(TWO, TWO, 1, ((0, 0), (1, 1)))


def test_slices_embed_isometrically():
    rng = random.Random(21)
    for _ in range(100):
        M = random_metric(rng, rng.randint(2, 3), denom=1)
        N = random_metric(rng, rng.randint(2, 3), denom=1)
        p = rng.choice([2, 3])
        S = lp_sum(M, N, p)
        y = rng.choice(N.points)
        for a in M.points:
            for b in M.points:
                assert math.isclose(float(S.dist((a, y), (b, y))), float(M.dist(a, b)), abs_tol=1e-9)
        x = rng.choice(M.points)
        for a in N.points:
            for b in N.points:
                assert math.isclose(float(S.dist((x, a), (x, b))), float(N.dist(a, b)), abs_tol=1e-9)


def test_sum_pairs_over_extreme_pairs_of_the_second_factor():
    M, N = collinear3(), equilateral(3)
    S = lp_sum(M, N, 2)
    ext = ext_graph(S).edges
    predicted = predicted_sum_pairs(M, N)
    assert len(predicted) == 9 * 6
    assert all(pair in ext for pair in predicted)
    assert preserved_extreme_in_sum(M, N, 2, ((0, 0), (2, 1)))
    assert is_3_connected(ext_graph(S).graph())


def test_sum_pair_needs_distinct_points():
    with pytest.raises(SamePoint):
        preserved_extreme_in_sum(TWO, TWO, 2, ((0, 1), (0, 1)))


def test_sum_of_collinear_and_triangle_is_rigid():
    verdict = decide_rigidity(lp_sum(collinear3(), equilateral(3), 2))
    assert verdict.rigid


def test_bounded_union():
    U = union_bounded(collinear3(), equilateral(3))
    # shared labels get side suffixes
    assert "0#L" in U and "0#R" in U
    assert U.dist("0#L", "1#R") == 3
    assert U.dist("0#L", "2#L") == 2
    assert decide_rigidity(U).rigid


def test_bounded_union_with_single_point():
    one = validate_metric([[0]], ["z"])
    U = union_bounded(TWO, one)
    assert len(U) == 3 and U.dist(0, "z") == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 4))
def test_constructions_produce_valid_metrics(seed, m, n):
    rng = random.Random(seed)
    M = random_metric(rng, m, denom=2)
    N = random_metric(rng, n, denom=2)
    # validate_metric is run inside each construction; re-run it on the output
    for S in (union_bounded(M, N), lp_sum(M, N, 2)):
        validate_metric([list(r) for r in S.d], S.points, tol=None if S.exact else 1e-9)
    if n >= 2:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            S = union_basepoint(M, N, M.points[0], N.points[0], p=2)
        assert len(S) == m + n - 1


def test_basepoint_union_rigid():
    M = validate_metric([[abs(i - j) for j in range(5)] for i in range(5)], list("abcde"))
    N = equilateral(4)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        U = union_basepoint(M, N, "a", 0)
    assert len(U) == 8
    assert math.isclose(float(U.dist("e", 1)), math.sqrt(17), rel_tol=1e-12)
    assert decide_rigidity(U).rigid


def test_basepoint_union_flags_small_or_flat_second_space():
    recipe = ConstructionRecipe("union-basepoint")
    with pytest.warns(ConstructionWarning):
        union_basepoint(TWO, equilateral(3), 0, 0, recipe=recipe)
    assert any("4" in w for w in recipe.warnings)
    flat = validate_metric([[abs(i - j) for j in range(4)] for i in range(4)])
    assert not is_uniformly_concave(flat)
    with pytest.warns(ConstructionWarning, match="uniformly concave"):
        union_basepoint(TWO, flat, 0, 0)


def test_clique_family_structure():
    fam = three_clique_graph(11, 12, 13, MULT)
    G = fam.graph
    assert len(G.vertices) == 11 + 12 + 13 + 3
    assert is_2_connected(G) and not is_3_connected(G)
    for j in range(3):
        assert is_3_connected(fam.part(j))
    assert fam.attachments[(0, 1)] == fam.cliques[1][:3]


@pytest.mark.parametrize("sizes,mult", [
    ((11, 12, 13), [[1, 3, 4], [5, 0, 6], [7, 8, 0]]),   # nonzero diagonal
    ((11, 12, 13), [[0, 2, 4], [5, 0, 6], [7, 8, 0]]),   # multiplicity below 3
    ((11, 12, 13), [[0, 3, 3], [5, 0, 6], [7, 8, 0]]),   # repeated multiplicity
    ((10, 12, 13), MULT),                                 # clique too small
])
def test_clique_family_preconditions(sizes, mult):
    with pytest.raises(PreconditionViolated):
        three_clique_graph(*sizes, mult)
