"""Acceptance checks, one per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line per
criterion.  Every check compares against an independent oracle from
tests/oracles.py or a frozen golden value.
"""

import itertools
import random
import time
import warnings

import networkx as nx

from conftest import BOWTIE, GOLDEN, complete_graph, cycle_graph, equilateral, path_graph, prism, wheel
from freeiso.constructions import lp_sum, predicted_sum_pairs, three_clique_graph, union_basepoint, union_bounded
from freeiso.errors import NotCyclePreserving
from freeiso.extgraph import PRAGUE, classify_prague, ext_graph
from freeiso.graphkit import (
    edge_components,
    graph_metric,
    has_unoriented_cycle,
    is_2_connected,
    is_3_connected,
    molecule_rank,
    neg,
)
from freeiso.isogroup import (
    check_conditions,
    decide_rigidity,
    enumerate_sigma,
    factor_sigma,
    graph_liso,
    random_molecule as package_molecule,
    split_along_blocks,
)
from freeiso.metric import compute_isometries, validate_metric
from freeiso.transport import lipschitz_dual_norm, transport_norm
from freeiso.whitney import SignedEdgeBijection, graph_automorphisms, is_cycle_preserving, reconstruct_vertex_map
from oracles import (
    brute_isometry_maps,
    brute_preserved_extreme,
    nx_transport_norm,
    random_connected_graph,
    random_metric,
    random_molecule,
)


def verdict(n, ok, what):
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {what}")
    assert ok, what


def test_criterion_01_norm_duality():
    rng = random.Random(101)
    cases = []
    for _ in range(500):
        M = random_metric(rng, rng.randint(2, 8), denom=rng.choice([1, 2, 3]))
        cases.append((M, random_molecule(rng, M.points)))
    start = time.perf_counter()
    bad = sum(transport_norm(M, x).value != lipschitz_dual_norm(M, x)[0] for M, x in cases)
    took = time.perf_counter() - start
    verdict(1, bad == 0 and took < 2.0,
            f"flow value == dual LP value on 500 molecules, {bad} mismatches, {took:.2f}s (limit 2s)")


def test_criterion_02_extreme_pairs_match_brute_force():
    rng = random.Random(102)
    bad = 0
    for _ in range(200):
        M = random_metric(rng, rng.randint(2, 8), denom=rng.choice([1, 2]))
        ext = ext_graph(M).edges
        bad += sum((((a, b) in ext) != brute_preserved_extreme(M, a, b)) for a, b in itertools.permutations(M.points, 2))
    verdict(2, bad == 0, f"extreme-pair graph vs epsilon-delta brute force on 200 spaces, {bad} mismatches")


def test_criterion_03_graph_metrics():
    rng = random.Random(103)
    bad = 0
    for _ in range(20):
        G = random_connected_graph(rng, rng.randint(2, 10), rng.choice([0.3, 0.5]))
        M = graph_metric(G)
        bad += ext_graph(M).edges != G.edges or classify_prague(M).klass != PRAGUE
    verdict(3, bad == 0, f"graph metric: extreme graph == edge set and Prague on 20 graphs, {bad} failures")


def test_criterion_04_rank_deficiency_iff_cycle():
    rng = random.Random(104)
    bad = 0
    for _ in range(500):
        G = random_connected_graph(rng, rng.randint(3, 8), 0.6)
        E = G.undirected()
        chosen = [e if rng.random() < 0.5 else neg(e) for e in rng.sample(E, rng.randint(0, min(10, len(E))))]
        H = nx.Graph([tuple(e) for e in chosen])
        truth = bool(chosen) and bool(nx.cycle_basis(H))
        deficient = molecule_rank(graph_metric(G), chosen) < len(chosen)
        bad += (deficient != truth) or (has_unoriented_cycle(chosen) != truth)
    verdict(4, bad == 0, f"rank deficiency <=> unoriented cycle on 500 edge subsets, {bad} mismatches")


def test_criterion_05_whitney_round_trip():
    rng = random.Random(105)
    failures = []
    for name, G in (("K4", complete_graph(4)), ("K5", complete_graph(5)), ("W6", wheel(5)), ("prism", prism())):
        auts = graph_automorphisms(G)
        if len(auts) != sum(1 for _ in nx.vf2pp_all_isomorphisms(nx.Graph(G.undirected()), nx.Graph(G.undirected()))):
            failures.append(f"{name} automorphism count")
        for _ in range(100):
            f = rng.choice(auts)
            sigma = SignedEdgeBijection.from_vertex_map(G.edges, f, rng.choice((1, -1)))
            if reconstruct_vertex_map(G, sigma) != f:
                failures.append(f"{name} round trip")
        # compare on undirected edges: that is all the vertex map can see
        shadow = lambda s: frozenset((G.canon(e), G.canon(s(e))) for e in G.undirected())  # noqa: E731
        induced = {shadow(SignedEdgeBijection.from_vertex_map(G.edges, f)) for f in auts}
        E = G.undirected()
        rejected = 0
        while rejected < 20:
            s = SignedEdgeBijection.from_pairs(list(zip(E, rng.sample(E, len(E)))))
            if shadow(s) in induced:
                continue
            try:
                reconstruct_vertex_map(G, s)
                failures.append(f"{name} accepted a non-induced map")
            except NotCyclePreserving:
                pass
            if is_cycle_preserving(G, s):
                failures.append(f"{name} non-induced map preserves directed cycles")
            rejected += 1
    verdict(5, not failures, f"vertex map recovered on K4, K5, W6, prism (100 each), non-induced maps rejected; "
                             f"{len(failures)} failures" + (f" {sorted(set(failures))}" if failures else ""))


def test_criterion_06_golden_orders():
    rows = []
    ok = True
    for name, (G, order) in GOLDEN.items():
        M = graph_metric(G)
        brute = len(brute_isometry_maps(G, M))
        liso = graph_liso(G).order
        enum = len(enumerate_sigma(M))
        rows.append(f"{name}={liso}")
        ok = ok and brute == liso == enum == order
    verdict(6, ok, "golden orders agree with brute force and enumeration: " + ", ".join(rows))


def _non_factorable(M, G, sigma):
    for sign in (1, -1):
        for perm in itertools.permutations(G.vertices):
            f = dict(zip(G.vertices, perm))
            if all(sigma((a, b)) == ((f[a], f[b]) if sign == 1 else (f[b], f[a])) for a, b in G.edges):
                return False
    return True


def test_criterion_07_rigidity_verdicts():
    notes = []
    ok = True
    for name, M in (("K4", graph_metric(complete_graph(4))), ("equilateral-4", equilateral(4))):
        v = decide_rigidity(M)
        twice = v.sigma_count == 2 * len(compute_isometries(M))
        ok = ok and v.rigid and twice
        notes.append(f"{name} rigid={v.rigid} |LIso|={v.sigma_count}")
    for name, G in (("C4", cycle_graph(4)), ("C5", cycle_graph(5))):
        M = graph_metric(G)
        v = decide_rigidity(M)
        w = v.counterexample
        isometries = {SignedEdgeBijection.from_pairs([(e, m[e]) for e in G.undirected()])
                      for m in brute_isometry_maps(G, M)}
        good = (not v.rigid and w is not None and w in isometries and _non_factorable(M, G, w)
                and factor_sigma(M, G, w) is None and check_conditions(w, M).passed)
        ok = ok and good
        notes.append(f"{name} rigid={v.rigid} witness verified={good}")
    verdict(7, ok, "; ".join(notes))


def test_criterion_08_l1_split():
    rng = random.Random(108)
    bad = 0
    for G in (BOWTIE, path_graph(3)):
        M = graph_metric(G)
        blocks = [sorted(b) for b in edge_components(G)]
        subs = [M.subspace({v for e in b for v in e}) for b in blocks]
        for _ in range(100):
            x = package_molecule(list(G.vertices), rng)
            parts = split_along_blocks(G, x, blocks)
            whole = nx_transport_norm(M, x)
            split = sum(nx_transport_norm(S, p) for S, p in zip(subs, parts))
            bad += whole != split or sum(parts[1:], parts[0]) != x
    verdict(8, bad == 0, f"norm splits exactly over blocks on bowtie and P3 (100 molecules each), {bad} failures")


def test_criterion_09_constructions():
    notes = []
    tri = equilateral(3)
    collinear = validate_metric([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    S = lp_sum(collinear, tri, 2)
    ext = ext_graph(S)
    predicted = all(p in ext.edges for p in predicted_sum_pairs(collinear, tri))
    conn = is_3_connected(ext.graph())
    rigid_sum = decide_rigidity(S).rigid
    notes.append(f"l2-sum predicted={predicted} 3-connected={conn} rigid={rigid_sum}")
    rigid_union = decide_rigidity(union_bounded(tri, tri)).rigid
    notes.append(f"bounded union rigid={rigid_union}")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        U = union_basepoint(collinear, equilateral(4), 0, 0)
    rigid_base = decide_rigidity(U).rigid
    notes.append(f"basepoint union rigid={rigid_base}")
    verdict(9, predicted and conn and rigid_sum and rigid_union and rigid_base, "; ".join(notes))


def test_criterion_10_clique_family():
    fam = three_clique_graph(11, 12, 13, [[0, 3, 4], [5, 0, 6], [7, 8, 0]])
    G = fam.graph
    two, three = is_2_connected(G), is_3_connected(G)
    parts = [is_3_connected(fam.part(j)) for j in range(3)]
    verdict(10, two and not three and all(parts),
            f"39-vertex family: 2-connected={two} 3-connected={three} parts 3-connected={parts}")
