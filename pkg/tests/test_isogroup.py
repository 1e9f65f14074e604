import random
import time
from fractions import Fraction

import pytest

from conftest import (
    BOWTIE,
    GOLDEN,
    THETA,
    collinear3,
    complete_graph,
    cycle_graph,
    equilateral,
    path_graph,
    und,
)
from freeiso.errors import ConditionsNotVerified, NotConnected, PreconditionViolated, SingleComponent, SupportOutsideVext
from freeiso.extgraph import ext_graph
from freeiso.graphkit import graph_metric, neg, simple_cycles
from freeiso.groups import closure
from freeiso.isogroup import (
    MODE_SASB,
    MODE_SASBSC,
    apply_sigma,
    check_conditions,
    decide_rigidity,
    enumerate_sigma,
    factor_sigma,
    graph_liso,
    l1_decomposition_check,
    path_image,
    pieces,
    sc_holds,
    simple_paths,
    split_along_blocks,
)
from freeiso.metric import Molecule, compute_isometries, validate_metric
from freeiso.transport import free_norm
from freeiso.whitney import SignedEdgeBijection
from oracles import brute_isometry_maps, random_metric, random_molecule

SMALL = ["edge", "P2", "P3", "C3", "C4"]


def sigma_key(G):
    edges = G.sorted_edges()
    return lambda s: tuple(s.mapping[e] for e in edges)


def test_identity_passes_everything():
    for M in (collinear3(), equilateral(4), graph_metric(BOWTIE)):
        ident = SignedEdgeBijection.identity(ext_graph(M).edges)
        rep = check_conditions(ident, M, mode=MODE_SASBSC)
        assert rep.Sa and rep.Sb and rep.Sc and rep.passed


def test_c4_orientation_preserving_edge_permutations_pass():
    import itertools

    C4 = cycle_graph(4)
    M = graph_metric(C4)
    ring = [(0, 1), (1, 2), (2, 3), (3, 0)]
    for perm in itertools.permutations(ring):
        s = SignedEdgeBijection.from_pairs(zip(ring, perm))
        rep = check_conditions(s, M, mode=MODE_SASB)
        assert rep.Sa and rep.Sb


def test_tree_metric_sigmas_all_pass_path_condition():
    # F of a three-point tree metric is l1^2, so all 8 signed edge maps are isometries
    M = collinear3()
    e1, e2 = (0, 1), (1, 2)
    count = 0
    for a, b in ((e1, e2), (e2, e1)):
        for sa in (1, -1):
            for sb in (1, -1):
                s = SignedEdgeBijection.from_pairs([(e1, a if sa == 1 else neg(a)), (e2, b if sb == 1 else neg(b))])
                count += check_conditions(s, M).passed
    assert count == 8
    assert len(enumerate_sigma(M, MODE_SASBSC)) == 8


def test_path_condition_failure_is_reported():
    K4 = complete_graph(4)
    M = graph_metric(K4)
    swap = {(0, 1): (2, 3), (2, 3): (0, 1)}
    bad = SignedEdgeBijection.from_pairs([(e, swap.get(e, e)) for e in K4.undirected()])
    rep = check_conditions(bad, M)
    assert not rep.Sa and rep.Sb is None and rep.Sc is None
    # a path mapped onto a triangle: the three edge molecules sum to zero
    P3, C3 = graph_metric(path_graph(3)), graph_metric(cycle_graph(3))
    s = SignedEdgeBijection.from_pairs([((0, 1), (0, 1)), ((1, 2), (1, 2)), ((2, 3), (2, 0))])
    ok, info = sc_holds(s, P3, C3)
    assert not ok and info["norm"] < info["distance"]


def test_weighted_ratio_failure():
    C4 = cycle_graph(4)
    w = [[0, 1, 3, 2], [1, 0, 2, 3], [3, 2, 0, 1], [2, 3, 1, 0]]
    M = validate_metric(w)
    assert ext_graph(M).edges == C4.edges
    ring = [(0, 1), (1, 2), (2, 3), (3, 0)]
    rot = SignedEdgeBijection.from_pairs(zip(ring, ring[1:] + ring[:1]))
    rep = check_conditions(rot, M)
    assert rep.Sa and rep.Sb is False and rep.Sc is None
    assert "Sb_failing_cycle" in rep.details


def test_sc_holds_whenever_cycle_conditions_hold():
    rng = random.Random(21)
    for _ in range(15):
        M = random_metric(rng, rng.randint(3, 5), denom=1)
        for s in enumerate_sigma(M, MODE_SASB):
            assert sc_holds(s, M, M)[0]


def test_apply_sigma_examples():
    M = graph_metric(cycle_graph(3))
    G = ext_graph(M).graph()
    x = Molecule({0: Fraction(2), 1: Fraction(-1, 2), 2: Fraction(-3, 2)})
    ident = SignedEdgeBijection.identity(G.edges)
    assert apply_sigma(ident, x, M) == x
    assert apply_sigma(ident.negate(), x, M) == -x
    rot = {0: 1, 1: 2, 2: 0}
    s = SignedEdgeBijection.from_vertex_map(G.edges, rot)
    assert apply_sigma(s, x, M) == Molecule({rot[p]: c for p, c in x.coeffs.items()})
    with pytest.raises(SupportOutsideVext):
        apply_sigma(ident, Molecule({0: 1, 9: -1}), M)
    K4 = complete_graph(4)
    MK = graph_metric(K4)
    swap = {(0, 1): (2, 3), (2, 3): (0, 1)}
    bad = SignedEdgeBijection.from_pairs([(e, swap.get(e, e)) for e in K4.undirected()])
    with pytest.raises(ConditionsNotVerified):
        apply_sigma(bad, Molecule({0: 1, 1: -1}), MK)


def test_enumerate_examples():
    assert len(enumerate_sigma(graph_metric(path_graph(1)))) == 2
    assert len(enumerate_sigma(graph_metric(path_graph(2)))) == 8
    assert len(enumerate_sigma(graph_metric(cycle_graph(3)))) == 12


@pytest.mark.parametrize("name", SMALL)
def test_enumeration_matches_brute_force(name):
    G, order = GOLDEN[name]
    M = graph_metric(G)
    found = {s for s in enumerate_sigma(M)}
    brute = {SignedEdgeBijection(m) for m in brute_isometry_maps(G, M)}
    assert found == brute and len(found) == order


def test_enumeration_matches_brute_force_on_weighted_spaces():
    rng = random.Random(30)
    checked = 0
    while checked < 12:
        M = random_metric(rng, rng.randint(3, 5), denom=1)
        G = ext_graph(M).graph()
        if len(G.undirected()) > 5:
            continue
        found = {s for s in enumerate_sigma(M, MODE_SASBSC)}
        brute = {SignedEdgeBijection(m) for m in brute_isometry_maps(G, M)}
        assert found == brute
        checked += 1


@pytest.mark.parametrize("name", list(GOLDEN))
def test_enumerate_is_a_group_of_isometries(name):
    G, order = GOLDEN[name]
    M = graph_metric(G)
    sigmas = enumerate_sigma(M)
    assert len(sigmas) == order
    key = sigma_key(G)
    keys = {key(s) for s in sigmas}
    assert key(SignedEdgeBijection.identity(G.edges)) in keys
    assert all(key(s.inverse()) in keys for s in sigmas)
    rng = random.Random(1)
    for _ in range(200):
        a, b = rng.choice(sigmas), rng.choice(sigmas)
        assert key(a.compose(b)) in keys
    for s in rng.sample(sigmas, min(6, len(sigmas))):
        for _ in range(50 if len(G.vertices) <= 4 else 15):
            x = random_molecule(rng, G.vertices)
            assert free_norm(M, apply_sigma(s, x, M, verified=True)) == free_norm(M, x)


def test_path_sums_do_not_depend_on_the_path():
    rng = random.Random(5)
    for G in (cycle_graph(4), THETA, BOWTIE, complete_graph(4)):
        M = graph_metric(G)
        sigmas = enumerate_sigma(M)
        for s in rng.sample(sigmas, min(8, len(sigmas))):
            for _ in range(20):
                x, y = rng.sample(list(G.vertices), 2)
                images = {path_image(s, p, M, M) for p in simple_paths(G, x, y, limit=5)}
                assert len(images) == 1


def test_rigidity_examples():
    K4 = graph_metric(complete_graph(4))
    v = decide_rigidity(K4)
    assert v.rigid and v.route == "three_connected"
    assert v.sigma_count == 2 * len(compute_isometries(K4)) == 48
    assert decide_rigidity(equilateral(4)).rigid
    C4 = graph_metric(cycle_graph(4))
    v = decide_rigidity(C4)
    assert not v.rigid and v.sigma_count > 16
    assert factor_sigma(C4, ext_graph(C4).graph(), v.counterexample) is None
    assert check_conditions(v.counterexample, C4, mode=MODE_SASB).passed


def test_rigidity_witnesses_factor_correctly():
    for M in (graph_metric(complete_graph(4)), equilateral(4), graph_metric(complete_graph(5))):
        G = ext_graph(M).graph()
        v = decide_rigidity(M)
        assert v.rigid
        for w in v.witnesses:
            assert all(w.sigma.mapping[(a, b)] == ((w.vertex_map[a], w.vertex_map[b]) if w.sign == 1
                                                   else (w.vertex_map[b], w.vertex_map[a])) for a, b in G.edges)


def test_enumeration_route_agrees_with_fast_route_and_signs_cohere():
    for M in (graph_metric(complete_graph(4)), equilateral(4)):
        fast = decide_rigidity(M)
        slow = decide_rigidity(M, enumerate_all=True)
        assert slow.rigid and slow.sign_coherent
        assert {w.sigma for w in fast.witnesses} == {w.sigma for w in slow.witnesses}


def test_rigid_spaces_have_twice_as_many_isometries():
    rng = random.Random(8)
    seen = 0
    for _ in range(40):
        M = random_metric(rng, rng.randint(3, 6), denom=1)
        v = decide_rigidity(M, enumerate_all=True)
        if v.rigid:
            seen += 1
            assert v.sigma_count == 2 * len(compute_isometries(M))
    assert seen > 0
    # two points: +-id only, and the flip gives the same sigma as -id
    two = validate_metric([[0, 1], [1, 0]])
    assert decide_rigidity(two).sigma_count == 2


def test_pieces_examples():
    P = pieces(cycle_graph(4))
    assert len(P.pieces) == 2 and P.labels == [4, 4]
    P = pieces(THETA)
    assert len(P.pieces) == 6 and set(P.labels) == {2}
    P = pieces(complete_graph(4))
    assert len(P.pieces) == 12 and set(P.labels) == {1}
    with pytest.raises(PreconditionViolated):
        pieces(path_graph(3))


def test_orientation_split_only_on_cycles():
    from freeiso.isogroup import piece_cycle_components

    # a lone cycle keeps its two orientations apart; K4 and theta join e and -e
    assert piece_cycle_components(pieces(cycle_graph(4))) == 2
    assert piece_cycle_components(pieces(complete_graph(4))) == 1
    assert piece_cycle_components(pieces(THETA)) == 1


@pytest.mark.parametrize("G", [cycle_graph(5), THETA, complete_graph(4), complete_graph(5),
                               und(range(5), [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 2)])])
def test_pieces_partition_and_negation(G):
    P = pieces(G)
    flat = [e for p in P.pieces for e in p]
    assert sorted(flat) == sorted(G.edges) and len(flat) == len(set(flat))
    for k in range(0, len(P.pieces), 2):
        assert [neg(e) for e in P.pieces[k]] == list(P.pieces[k + 1])
        assert P.labels[k] == P.labels[k + 1]
    for c in simple_cycles(G, min_len=3):
        hit = {P.piece_of[e][0] for e in c}
        assert sum(P.labels[i] for i in hit) == len(c)


@pytest.mark.parametrize("name", list(GOLDEN))
def test_graph_liso_golden(name):
    G, order = GOLDEN[name]
    desc = graph_liso(G)
    assert desc.order == order == desc.structure.order()
    assert desc.closure_order == order


def test_graph_liso_families():
    from math import factorial

    for n in (3, 4, 5, 6):
        d = graph_liso(cycle_graph(n))
        assert d.order == 2 * factorial(n) and d.structure.render() == f"S_{n} x Z2"
    for n in (1, 2, 3, 4):
        assert graph_liso(path_graph(n)).order == 2**n * factorial(n)
    assert graph_liso(GOLDEN["edge"][0]).structure.render() == "Z2"


def test_graph_liso_against_enumeration_on_random_graphs():
    from oracles import random_connected_graph

    rng = random.Random(17)
    for _ in range(10):
        G = random_connected_graph(rng, rng.randint(3, 6), 0.45)
        assert graph_liso(G).order == len(enumerate_sigma(graph_metric(G)))


def test_quotient_search_stays_fast_on_dense_blocks():
    # this block once sent the quotient automorphism search into a long backtrack
    G = und(range(7), [(0, 3), (0, 5), (0, 6), (1, 2), (1, 3), (1, 4), (1, 5), (2, 4), (2, 5),
                       (2, 6), (3, 5), (3, 6), (4, 5), (4, 6)])
    start = time.perf_counter()
    order = graph_liso(G).order
    assert time.perf_counter() - start < 5
    assert order == len(enumerate_sigma(graph_metric(G)))


def test_graph_liso_needs_connected_graph():
    with pytest.raises(NotConnected):
        graph_liso(und(range(4), [(0, 1), (2, 3)]))


def test_l1_decomposition():
    assert l1_decomposition_check(BOWTIE, samples=100)
    assert l1_decomposition_check(path_graph(3), samples=100)
    with pytest.raises(SingleComponent):
        l1_decomposition_check(cycle_graph(3))
    P2 = path_graph(2)
    x = Molecule({0: 1, 2: -1})
    parts = split_along_blocks(P2, x, [[(0, 1)], [(1, 2)]])
    M = graph_metric(P2)
    assert free_norm(M, x) == 2 == sum(free_norm(M, p) for p in parts)


def test_group_closure_of_enumeration_matches_size():
    G = THETA
    sigmas = enumerate_sigma(graph_metric(G))
    elems = closure(sigmas[:10], lambda a, b: a.compose(b), SignedEdgeBijection.identity(G.edges), sigma_key(G))
    assert len(elems) <= len(sigmas)
