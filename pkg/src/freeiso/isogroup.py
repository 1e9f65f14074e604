"""Isometry-inducing edge bijections, rigidity and isometry groups of graphs.

A symmetric bijection sigma of the extreme-molecule edges induces a linear
isometry m_e -> m_sigma(e) exactly when it maps simple cycles to simple
cycles with a constant weight ratio on each cycle (plus a path-norm
condition when distances are not realised by edge paths).  Everything
here is organised around that certificate.
"""

from __future__ import annotations

import random
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial, prod

from .errors import (
    ConditionsNotVerified,
    CycleCapExceeded,
    NoConsistentVertexMap,
    NotConnected,
    NotWeakPrague,
    PreconditionViolated,
    SearchCapExceeded,
    SingleComponent,
    SupportOutsideVext,
)
from .extgraph import PRAGUE, ExtGraph, classify_prague, ext_graph, shortest_path_tree, tree_path
from .graphkit import (
    DEFAULT_MAX_CYCLES,
    DirectedSymGraph,
    edge_components,
    graph_metric,
    is_3_connected,
    neg,
    reverse_cycle,
    simple_cycles,
)
from .groups import (
    AbstractGroup,
    CyclicGroup,
    DirectProduct,
    GroupDescription,
    SymmetricGroup,
    WreathProduct,
    closure,
    greedy_generators,
    perm_compose,
    simplify,
)
from .metric import FiniteMetricSpace, Molecule, compute_isometries, elementary_molecule
from .transport import free_norm
from .whitney import (
    SignedEdgeBijection,
    edge_signs,
    is_cycle_preserving,
    reconstruct_vertex_map,
)

MODE_SASB = "SaSb"
MODE_SASBSC = "SaSbSc"
DEFAULT_SEARCH_CAP = 5 * 10**6


# --------------------------------------------------------------------------
# helpers on spaces


def _space_parts(M: FiniteMetricSpace):
    ext = ext_graph(M)
    return ext, ext.graph(), ext.weight


def _cycles(G: DirectedSymGraph, max_cycles: int) -> list:
    return simple_cycles(G, min_len=3, max_count=max_cycles)


def _require_weak_prague(M: FiniteMetricSpace):
    verdict = classify_prague(M)
    if not verdict.weak_prague:
        raise NotWeakPrague("the space is not weak Prague", **verdict.diagnostics)
    return verdict


def path_image(sigma: SignedEdgeBijection, path, M1: FiniteMetricSpace, M2: FiniteMetricSpace) -> Molecule:
    """sum of d1(e) m_sigma(e) over the edges of a path."""
    out = Molecule()
    for e in path:
        out = out + elementary_molecule(M2, *sigma.mapping[e]) * M1.dist(*e)
    return out


def simple_paths(G: DirectedSymGraph, x, y, limit: int = 5) -> list:
    """Up to ``limit`` simple edge paths from x to y (depth-first, deterministic)."""
    out: list = []
    path: list = []
    seen = {x}

    def rec(v):
        if len(out) >= limit:
            return
        if v == y:
            out.append(list(path))
            return
        for w in G.neighbors(v):
            if w not in seen:
                seen.add(w)
                path.append((v, w))
                rec(w)
                path.pop()
                seen.discard(w)

    rec(x)
    return out


# --------------------------------------------------------------------------
# conditions


@dataclass
class ConditionReport:
    Sa: bool
    Sb: bool | None
    Sc: bool | None
    mode: str
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if self.mode == MODE_SASB:
            return bool(self.Sa and self.Sb)
        return bool(self.Sa and self.Sb and self.Sc)

    def to_json(self) -> dict:
        return {"Sa": self.Sa, "Sb": self.Sb, "Sc": self.Sc, "mode": self.mode,
                "passed": self.passed, **self.details}


def ratio_constant_on_cycles(sigma, cycles, w1: dict, w2: dict, eq) -> tuple[bool, tuple | None]:
    for c in cycles:
        r = None
        for e in c:
            q = w1[e] / w2[sigma.mapping[e]]
            if r is None:
                r = q
            elif not eq(r, q):
                return False, tuple(c)
    return True, None


def sc_holds(
    sigma: SignedEdgeBijection,
    M1: FiniteMetricSpace,
    M2: FiniteMetricSpace,
    exhaustive_paths: bool = False,
) -> tuple[bool, dict | None]:
    """Path-sum norms equal distances, for sigma and for its inverse.

    After the cycle conditions the path sum does not depend on the path, so
    one shortest path per ordered pair suffices; ``exhaustive_paths`` also
    tries up to five simple paths per pair as a backstop.
    """
    for A, B, s in ((M1, M2, sigma), (M2, M1, sigma.inverse())):
        ext = ext_graph(A)
        G = ext.graph()
        for x in G.vertices:
            pred = shortest_path_tree(G, ext.weight, x)
            for y in G.vertices:
                if y == x:
                    continue
                paths = [tree_path(pred, y)]
                if exhaustive_paths:
                    paths += simple_paths(G, x, y, limit=5)
                for path in paths:
                    val = free_norm(B, path_image(s, path, A, B))
                    if not A.eq(val, A.dist(x, y)):
                        return False, {"pair": [x, y], "norm": val, "distance": A.dist(x, y)}
    return True, None


def check_conditions(
    sigma: SignedEdgeBijection,
    M1: FiniteMetricSpace,
    M2: FiniteMetricSpace | None = None,
    mode: str = MODE_SASBSC,
    *,
    cycles1: list | None = None,
    cycles2: list | None = None,
    max_cycles: int = DEFAULT_MAX_CYCLES,
    exhaustive_paths: bool = False,
) -> ConditionReport:
    """Evaluate the cycle, ratio and path-norm conditions for sigma: E_ext(M1) -> E_ext(M2)."""
    M2 = M1 if M2 is None else M2
    ext1, G1, w1 = _space_parts(M1)
    ext2, G2, w2 = _space_parts(M2) if M2 is not M1 else (ext1, G1, w1)
    if cycles1 is None:
        cycles1 = _cycles(G1, max_cycles)
    if cycles2 is None:
        cycles2 = cycles1 if G2 is G1 else _cycles(G2, max_cycles)
    sa = is_cycle_preserving(G1, sigma, cycles1, target=G2, target_cycles=cycles2)
    details: dict = {}
    if not sa:
        return ConditionReport(False, None, None, mode, details)
    eq = M1.eq if not M1.exact else M2.eq
    sb, bad = ratio_constant_on_cycles(sigma, cycles1, w1, w2, eq)
    if not sb:
        details["Sb_failing_cycle"] = [list(e) for e in bad]
        return ConditionReport(True, False, None, mode, details)
    sc = None
    if mode == MODE_SASBSC:
        sc, info = sc_holds(sigma, M1, M2, exhaustive_paths)
        if info:
            details["Sc_failure"] = info
    return ConditionReport(True, True, sc, mode, details)


def apply_sigma(
    sigma: SignedEdgeBijection,
    x: Molecule,
    M1: FiniteMetricSpace,
    M2: FiniteMetricSpace | None = None,
    *,
    verified: bool = False,
    base=None,
) -> Molecule:
    """T_sigma(x): write x through edge paths to a base point and map every m_e to m_sigma(e)."""
    M2 = M1 if M2 is None else M2
    ext1, G1, w1 = _space_parts(M1)
    outside = [p for p in x.coeffs if p not in set(G1.vertices)]
    if outside:
        raise SupportOutsideVext("molecule support leaves the extreme-graph vertices", points=outside)
    if not verified:
        verdict = classify_prague(M1)
        mode = MODE_SASB if verdict.klass == PRAGUE and classify_prague(M2).klass == PRAGUE else MODE_SASBSC
        report = check_conditions(sigma, M1, M2, mode)
        if not report.passed:
            raise ConditionsNotVerified("sigma fails the isometry conditions", **report.to_json())
    if not x:
        return Molecule()
    base = G1.vertices[0] if base is None else base
    pred = shortest_path_tree(G1, w1, base)
    out = Molecule()
    for p, c in x.coeffs.items():
        if p == base:
            continue
        # delta_p - delta_base is the sum of d(e) m_e along the reversed tree path
        path = [neg(e) for e in reversed(tree_path(pred, p))]
        out = out + path_image(sigma, path, M1, M2) * c
    return out


# --------------------------------------------------------------------------
# search over signed edge maps


def _edge_order(G: DirectedSymGraph) -> list:
    """Undirected edges ordered so that cycles close as early as possible."""
    remaining = G.undirected()
    order: list = []
    covered: set = set()
    while remaining:
        best, best_score = None, -1
        for e in remaining:
            score = (e[0] in covered) + (e[1] in covered)
            if score > best_score:
                best, best_score = e, score
                if score == 2:
                    break
        order.append(best)
        remaining.remove(best)
        covered.update(best)
    return order


def search_bijections(
    G1: DirectedSymGraph,
    w1: dict,
    G2: DirectedSymGraph,
    w2: dict,
    cycles1: list,
    cycles2: list,
    *,
    eq=lambda a, b: a == b,
    first_only: bool = False,
    node_cap: int | None = DEFAULT_SEARCH_CAP,
    accept=None,
) -> list:
    """All symmetric sigma: E1 -> E2 preserving simple cycles with constant weight ratio.

    Backtracking over undirected edges of G1 with an image and a sign each.
    Candidates must share the cycle-length census of the source edge; every
    source cycle keeps a bitmask of the target cycles of equal length that
    still contain all images assigned so far, and a branch dies when a mask
    empties or a cycle ratio changes.  With equal cycle counts an injective
    cycle map is onto, which gives the inverse direction.
    """
    C1 = [tuple(c) for c in cycles1 if len(c) >= 3]
    C2 = [tuple(c) for c in cycles2 if len(c) >= 3]
    if len(G1.edges) != len(G2.edges) or len(C1) != len(C2):
        return []
    if sorted(map(len, C1)) != sorted(map(len, C2)):
        return []
    cyc_of1: dict = {e: [] for e in G1.edges}
    for i, c in enumerate(C1):
        for e in c:
            cyc_of1[e].append(i)
    mask2: dict = {f: 0 for f in G2.edges}
    lenmask: dict = {}
    for i, c in enumerate(C2):
        for f in c:
            mask2[f] |= 1 << i
        lenmask[len(c)] = lenmask.get(len(c), 0) | (1 << i)
    sig1 = {e: tuple(sorted(len(C1[i]) for i in cyc_of1[e])) for e in G1.edges}
    cyc_of2: dict = {f: [] for f in G2.edges}
    for i, c in enumerate(C2):
        for f in c:
            cyc_of2[f].append(len(c))
    sig2 = {f: tuple(sorted(v)) for f, v in cyc_of2.items()}
    if Counter(sig1.values()) != Counter(sig2.values()):
        return []
    order = _edge_order(G1)
    targets = G2.sorted_edges()
    cands = {u: [f for f in targets if sig2[f] == sig1[u]] for u in order}
    mask = [lenmask[len(c)] for c in C1]
    ratio: list = [None] * len(C1)
    assign: dict = {}
    used: set = set()
    results: list = []
    nodes = 0

    def rec(k: int) -> bool:
        nonlocal nodes
        nodes += 1
        if node_cap is not None and nodes > node_cap:
            raise SearchCapExceeded(f"search exceeded {node_cap} nodes", partial=list(results))
        if k == len(order):
            sigma = SignedEdgeBijection(dict(assign))
            if accept is None or accept(sigma):
                results.append(sigma)
                return first_only
            return False
        u = order[k]
        nu = neg(u)
        for f in cands[u]:
            cf = G2.canon(f)
            if cf in used:
                continue
            r = w1[u] / w2[f]
            undo = []
            ok = True
            for e, img in ((u, f), (nu, neg(f))):
                m = mask2[img]
                for c in cyc_of1[e]:
                    undo.append((c, mask[c], ratio[c]))
                    mask[c] &= m
                    if ratio[c] is None:
                        ratio[c] = r
                    elif not eq(ratio[c], r):
                        ok = False
                    if not mask[c]:
                        ok = False
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                assign[u], assign[nu] = f, neg(f)
                used.add(cf)
                if rec(k + 1):
                    return True
                del assign[u], assign[nu]
                used.discard(cf)
            for c, old, rold in reversed(undo):
                mask[c] = old
                ratio[c] = rold
        return False

    rec(0)
    results.sort(key=lambda s: s.sort_key(G1, G2))
    return results


def enumerate_sigma(
    M: FiniteMetricSpace,
    mode: str | None = None,
    *,
    node_cap: int | None = DEFAULT_SEARCH_CAP,
    max_cycles: int = DEFAULT_MAX_CYCLES,
) -> list:
    """Every sigma on E_ext(M) that induces a linear isometry of the free space."""
    verdict = _require_weak_prague(M)
    if mode is None:
        mode = MODE_SASB if verdict.klass == PRAGUE else MODE_SASBSC
    if mode == MODE_SASB and verdict.klass != PRAGUE:
        raise PreconditionViolated("cycle conditions alone suffice only on Prague spaces", mode=mode)
    ext, G, w = _space_parts(M)
    cycles = _cycles(G, max_cycles)
    accept = None
    if mode == MODE_SASBSC:
        def accept(s):
            return sc_holds(s, M, M)[0]
    return search_bijections(G, w, G, w, cycles, cycles, eq=M.eq, node_cap=node_cap, accept=accept)


# --------------------------------------------------------------------------
# rigidity


@dataclass
class RigidityWitness:
    sigma: SignedEdgeBijection
    sign: int
    vertex_map: dict


@dataclass
class RigidityVerdict:
    rigid: bool
    route: str
    witnesses: list
    counterexample: SignedEdgeBijection | None
    sigma_count: int
    isometry_count: int
    sign_coherent: bool = True

    def to_json(self, G: DirectedSymGraph) -> dict:
        out = {
            "rigid": self.rigid,
            "route": self.route,
            "sigma_count": self.sigma_count,
            "isometry_count": self.isometry_count,
            "sign_coherent": self.sign_coherent,
            "witness": None,
        }
        if self.counterexample is not None:
            out["witness"] = self.counterexample.to_json(G)["sigma"]
        else:
            out["witness"] = [
                {"sigma": w.sigma.to_json(G)["sigma"], "sign": w.sign,
                 "vertex_map": [[v, w.vertex_map[v]] for v in G.vertices]}
                for w in self.witnesses
            ]
        return out


def factor_sigma(M: FiniteMetricSpace, G: DirectedSymGraph, sigma: SignedEdgeBijection):
    """(sign, f) with sigma(x,y) = sign * (f x, f y), f a graph automorphism and isometry; else None."""
    for sign in (1, -1):
        f: dict = {}
        ok = True
        for v, w in G.sorted_edges():
            img = sigma.mapping[(v, w)]
            fv = img[0] if sign == 1 else img[1]
            if f.setdefault(v, fv) != fv:
                ok = False
                break
        if not ok or len(set(f.values())) != len(f) or len(f) != len(G.vertices):
            continue
        if any(sigma.mapping[(v, w)] != ((f[v], f[w]) if sign == 1 else (f[w], f[v])) for v, w in G.edges):
            continue
        if not all((f[v], f[w]) in G.edges for v, w in G.edges):
            continue
        vs = G.vertices
        if all(M.eq(M.dist(f[a], f[b]), M.dist(a, b)) for i, a in enumerate(vs) for b in vs[i + 1:]):
            return sign, f
    return None


def factor_via_whitney(G: DirectedSymGraph, sigma: SignedEdgeBijection, cycles=None, check_cycles=True):
    """On a 3-connected graph: recover f from star complements, then read off the global sign."""
    f = reconstruct_vertex_map(G, sigma, cycles, check_cycles=check_cycles)
    signs = set(edge_signs(sigma, f).values())
    if len(signs) != 1 or 0 in signs:
        raise NoConsistentVertexMap("edge signs are not globally constant", signs=sorted(signs))
    return signs.pop(), f


def decide_rigidity(
    M: FiniteMetricSpace,
    *,
    enumerate_all: bool = False,
    node_cap: int | None = DEFAULT_SEARCH_CAP,
    max_cycles: int = DEFAULT_MAX_CYCLES,
    whitney_cycle_cap: int = 20_000,
) -> RigidityVerdict:
    """Decide whether every isometry of the free space comes from a sign and an isometry of M.

    When E_ext is 3-connected the answer is yes and witnesses come from the
    isometries of M pushed through the star-complement reconstruction.
    ``enumerate_all`` (or a graph that is not 3-connected) enumerates all
    sigma and tries to factor each one.
    """
    _require_weak_prague(M)
    ext, G, w = _space_parts(M)
    isos = compute_isometries(M)
    if is_3_connected(G) and not enumerate_all:
        try:
            cycles = _cycles(G, whitney_cycle_cap)
            check = True
        except CycleCapExceeded:
            cycles, check = None, False
        seen, witnesses = set(), []
        for g in isos:
            for eps in (1, -1):
                sigma = SignedEdgeBijection.from_vertex_map(G.edges, g, eps)
                if sigma in seen:
                    continue
                seen.add(sigma)
                sign, f = factor_via_whitney(G, sigma, cycles, check)
                witnesses.append(RigidityWitness(sigma, sign, f))
        return RigidityVerdict(True, "three_connected", witnesses, None, len(witnesses), len(isos))
    sigmas = enumerate_sigma(M, node_cap=node_cap, max_cycles=max_cycles)
    witnesses, counter = [], None
    coherent = True
    three = is_3_connected(G)
    for sigma in sigmas:
        fac = factor_sigma(M, G, sigma)
        if fac is None:
            counter = sigma
            break
        if three:
            sign, f = factor_via_whitney(G, sigma)
            coherent = coherent and (sign, f) == fac
        witnesses.append(RigidityWitness(sigma, fac[0], fac[1]))
    return RigidityVerdict(
        counter is None, "enumeration", witnesses if counter is None else [], counter,
        len(sigmas), len(isos), coherent,
    )


# --------------------------------------------------------------------------
# pieces and the quotient incidence graph


@dataclass
class PieceDecomposition:
    graph: DirectedSymGraph
    cycles: list
    pieces: list            # pieces[2k] and pieces[2k+1] are opposite; edges enumerated in parallel
    piece_of: dict          # directed edge -> (piece index, position)
    cycle_neg: list         # index of the reversed cycle
    incidence: set          # (piece index, cycle index) with piece inside cycle
    labels: list
    quotient_nodes: list    # ("p", class) and ("c", class)
    quotient_edges: dict    # (piece class, cycle class) -> +1 / -1 (piece rep inside cycle rep or its reverse)

    @property
    def piece_classes(self) -> int:
        return len(self.pieces) // 2

    @property
    def cycle_classes(self) -> list:
        return sorted({min(i, j) for i, j in enumerate(self.cycle_neg)})

    def to_json(self) -> dict:
        G = self.graph
        return {
            "pieces": [[list(e) for e in p] for p in self.pieces],
            "labels": self.labels,
            "cycles": len(self.cycles),
            "quotient": {
                "piece_classes": self.piece_classes,
                "cycle_classes": len(self.cycle_classes),
                "edges": len(self.quotient_edges),
            },
        }


def pieces(G: DirectedSymGraph, max_cycles: int = DEFAULT_MAX_CYCLES) -> PieceDecomposition:
    """Atoms of the Boolean algebra generated by simple directed cycles of length >= 3.

    Two edges share an atom exactly when they lie on the same cycles.
    """
    cycles = _cycles(G, max_cycles)
    if not cycles:
        raise PreconditionViolated("pieces need a 2-connected graph with at least one cycle")
    member: dict = {e: [] for e in G.edges}
    for i, c in enumerate(cycles):
        for e in c:
            member[e].append(i)
    if any(not v for v in member.values()):
        raise PreconditionViolated("some edge lies on no cycle; the graph is not 2-connected")
    groups: dict = {}
    for e in G.sorted_edges():
        groups.setdefault(tuple(member[e]), []).append(e)
    by_edge = {e: tuple(member[e]) for e in G.edges}
    done: set = set()
    plist: list = []
    for sig, edges in sorted(groups.items(), key=lambda kv: G.key(kv[1][0])):
        if sig in done:
            continue
        rep = sorted(edges, key=G.key)
        opp = [neg(e) for e in rep]
        osig = by_edge[opp[0]]
        assert sorted(groups[osig], key=G.key) == sorted(opp, key=G.key)
        plist.append(tuple(rep))
        plist.append(tuple(opp))
        done.add(sig)
        done.add(osig)
    piece_of = {}
    for i, p in enumerate(plist):
        for k, e in enumerate(p):
            piece_of[e] = (i, k)
    index_of = {frozenset(c): i for i, c in enumerate(cycles)}
    cycle_neg = [index_of[frozenset(reverse_cycle(c))] for c in cycles]
    incidence = set()
    for ci, c in enumerate(cycles):
        for e in c:
            incidence.add((piece_of[e][0], ci))
        # every cycle is a disjoint union of whole pieces
        assert sum(len(plist[pi]) for pi in {piece_of[e][0] for e in c}) == len(c)
    cycle_class = {}
    for ci in range(len(cycles)):
        cycle_class[ci] = min(ci, cycle_neg[ci])
    cclasses = sorted(set(cycle_class.values()))
    cpos = {c: k for k, c in enumerate(cclasses)}
    qedges = {}
    for pi, ci in incidence:
        if pi % 2:
            continue
        qedges[(pi // 2, cpos[cycle_class[ci]])] = 1 if ci == cycle_class[ci] else -1
    nodes = [("p", k) for k in range(len(plist) // 2)] + [("c", k) for k in range(len(cclasses))]
    return PieceDecomposition(G, cycles, plist, piece_of, cycle_neg, incidence,
                              [len(p) for p in plist], nodes, qedges)


def _refine(nodes: list, adj: dict, color: dict) -> dict:
    """Stable colour refinement (1-dimensional Weisfeiler-Leman)."""
    while True:
        sigs = {v: (color[v], tuple(sorted(color[w] for w in adj[v]))) for v in nodes}
        palette = {s: i for i, s in enumerate(sorted(set(sigs.values())))}
        new = {v: palette[sigs[v]] for v in nodes}
        if len(set(new.values())) == len(set(color.values())):
            return new
        color = new


def _quotient_graph(P: PieceDecomposition):
    nodes = list(P.quotient_nodes)
    adj = {v: set() for v in nodes}
    for (pc, cc) in P.quotient_edges:
        adj[("p", pc)].add(("c", cc))
        adj[("c", cc)].add(("p", pc))
    color = {v: (0, P.labels[2 * v[1]]) if v[0] == "p" else (1, 0) for v in nodes}
    return nodes, adj, color


def quotient_automorphisms(P: PieceDecomposition, cap: int | None = 10**6) -> list:
    """Label-preserving automorphisms of the quotient graph ([V], [F]).

    A cycle class is determined by its set of piece classes, so the search
    runs over piece classes only and reads the cycle images off at the end.
    Partial maps are pruned by colour refinement and by the multiset of
    cycle sizes shared by every pair of pieces.
    """
    nodes, adj, color = _quotient_graph(P)
    color = _refine(nodes, adj, color)
    npc = P.piece_classes
    members: dict = {}
    for (pc, cc) in P.quotient_edges:
        members.setdefault(cc, set()).add(pc)
    by_set = {frozenset(ps): cc for cc, ps in members.items()}
    shared: dict = {}
    for ps in members.values():
        for a in ps:
            for b in ps:
                shared.setdefault((a, b), []).append(len(ps))
    shared = {k: tuple(sorted(v)) for k, v in shared.items()}
    # most constrained first: few candidates, then many shared cycles with earlier choices
    order: list = []
    left = set(range(npc))
    while left:
        nxt = max(left, key=lambda a: (sum(1 for b in order if (a, b) in shared),
                                       -sum(1 for b in range(npc) if color[("p", b)] == color[("p", a)]), -a))
        order.append(nxt)
        left.discard(nxt)
    cands = {a: [b for b in range(npc) if color[("p", b)] == color[("p", a)]] for a in range(npc)}
    out: list = []
    f: dict = {}
    used: set = set()

    def finish():
        alpha = {("p", a): ("p", b) for a, b in f.items()}
        for cc, ps in members.items():
            img = by_set.get(frozenset(f[a] for a in ps))
            if img is None or color[("c", img)] != color[("c", cc)]:
                return
            alpha[("c", cc)] = ("c", img)
        out.append(alpha)
        if cap is not None and len(out) > cap:
            raise SearchCapExceeded(f"more than {cap} automorphisms", partial=None)

    def rec(i):
        if i == len(order):
            finish()
            return
        a = order[i]
        for b in cands[a]:
            if b in used or shared.get((a, a)) != shared.get((b, b)):
                continue
            if all(shared.get((a, u)) == shared.get((b, f[u])) for u in f):
                f[a] = b
                used.add(b)
                rec(i + 1)
                del f[a]
                used.discard(b)

    rec(0)
    return out


def lift_signs(P: PieceDecomposition, alpha: dict) -> dict | None:
    """Signs s on quotient nodes making alpha a symmetric automorphism of the piece-cycle graph.

    A lift sends the representative x to s(x) times the representative of
    alpha(x); incidences force s(p) s(c) = t t' on every edge.  Returns the
    lift with s = +1 at the first node of every component, or None.
    """
    nodes, adj, _ = _quotient_graph(P)
    t = {}
    for (pc, cc), sgn in P.quotient_edges.items():
        t[(("p", pc), ("c", cc))] = sgn
    s: dict = {}
    for start in nodes:
        if start in s:
            continue
        s[start] = 1
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                p, c = (v, w) if v[0] == "p" else (w, v)
                need = t[(p, c)] * t[(alpha[p], alpha[c])]
                val = s[v] * need
                if w in s:
                    if s[w] != val:
                        return None
                else:
                    s[w] = val
                    queue.append(w)
    return s


def piece_cycle_components(P: PieceDecomposition) -> int:
    """Connected components of the directed piece-cycle incidence graph."""
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for pi, ci in P.incidence:
        a, b = find(("p", pi)), find(("c", ci))
        if a != b:
            parent[a] = b
    roots = {find(("p", i)) for i in range(len(P.pieces))} | {find(("c", j)) for j in range(len(P.cycles))}
    return len(roots)


def _quotient_components(P: PieceDecomposition) -> int:
    nodes, adj, _ = _quotient_graph(P)
    seen, comps = set(), 0
    for s in nodes:
        if s in seen:
            continue
        comps += 1
        stack = [s]
        seen.add(s)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return comps


def sigma_from_lift(P: PieceDecomposition, alpha: dict, signs: dict, perms: dict | None = None,
                    eps: int = 1) -> SignedEdgeBijection:
    """sigma(e_i^p) = e_{s(i)}^{q} where q is the lifted image of p (times eps)."""
    m = {}
    for k in range(P.piece_classes):
        node = ("p", k)
        img = alpha[node][1]
        sgn = signs[node] * eps
        rep, opp = P.pieces[2 * img], P.pieces[2 * img + 1]
        tgt, tgt_opp = (rep, opp) if sgn == 1 else (opp, rep)
        perm = perms.get(img) if perms else None
        for i, e in enumerate(P.pieces[2 * k]):
            j = perm[i] if perm else i
            m[e] = tgt[j]
            m[neg(e)] = tgt_opp[j]
    return SignedEdgeBijection(m)


@dataclass
class BlockGroup:
    order: int
    structure: object
    generators: list
    notes: dict


def _sigma_key(edges: list):
    return lambda s: tuple(s.mapping[e] for e in edges)


def block_liso(G: DirectedSymGraph, max_cycles: int = DEFAULT_MAX_CYCLES,
               aut_cap: int | None = 10**6) -> BlockGroup:
    """Isometry group of the free space over a 2-connected graph with a cycle."""
    P = pieces(G, max_cycles)
    auts = quotient_automorphisms(P, aut_cap)
    nodes = P.quotient_nodes
    liftable = []
    for a in auts:
        s = lift_signs(P, a)
        if s is not None:
            liftable.append((a, s))
    qcomp = _quotient_components(P)
    lifts_each = 2 ** qcomp
    sym_prod = prod(factorial(P.labels[2 * k]) for k in range(P.piece_classes))
    order = sym_prod * len(liftable) * lifts_each
    formula_order = sym_prod * len(auts) * 2
    # generators: piece-internal permutations, lifted automorphisms, global sign
    identity_alpha = {v: v for v in nodes}
    id_signs = lift_signs(P, identity_alpha)
    gens = [SignedEdgeBijection({e: neg(e) for e in G.edges})]
    for k in range(P.piece_classes):
        n = P.labels[2 * k]
        if n >= 2:
            swap = tuple([1, 0] + list(range(2, n)))
            rot = tuple(list(range(1, n)) + [0])
            for perm in (swap, rot) if n > 2 else (swap,):
                gens.append(sigma_from_lift(P, identity_alpha, id_signs, {k: perm}))
    index = {v: i for i, v in enumerate(nodes)}
    as_perm = {tuple(index[a[v]] for v in nodes): (a, s) for a, s in liftable}
    ident = tuple(range(len(nodes)))
    for key in greedy_generators(list(as_perm), perm_compose, ident):
        a, s = as_perm[key]
        gens.append(sigma_from_lift(P, a, s))
    inner = tuple(SymmetricGroup(P.labels[2 * k]) for k in range(P.piece_classes))
    inner = tuple(f for f in inner if f.order() > 1)
    acting = AbstractGroup("Aut", len(liftable))
    core = WreathProduct(inner, acting) if inner else acting
    extra = [CyclicGroup(2)] * qcomp
    structure = simplify(DirectProduct((core, *extra)))
    notes = {
        "pieces": len(P.pieces),
        "piece_labels": sorted(P.labels[0::2]),
        "cycles": len(P.cycles),
        "quotient_automorphisms": len(auts),
        "liftable_automorphisms": len(liftable),
        "piece_cycle_components": piece_cycle_components(P),
        "quotient_formula_order": formula_order,
    }
    return BlockGroup(order, structure, gens, notes)


def _cycle_census(G: DirectedSymGraph, max_cycles: int) -> tuple:
    return tuple(sorted(Counter(len(c) for c in _cycles(G, max_cycles)).items()))


def _unit_weights(G: DirectedSymGraph) -> dict:
    return {e: 1 for e in G.edges}


def _extend(sigma_parts: list, all_edges) -> SignedEdgeBijection:
    m = {e: e for e in all_edges}
    for part in sigma_parts:
        m.update(part)
    return SignedEdgeBijection(m)


def graph_liso(
    G: DirectedSymGraph,
    *,
    max_cycles: int = DEFAULT_MAX_CYCLES,
    closure_cap: int = 10**6,
    node_cap: int | None = DEFAULT_SEARCH_CAP,
) -> GroupDescription:
    """Linear isometry group of the free space over a connected unweighted graph.

    Blocks (edge components) contribute their own groups; blocks whose free
    spaces are isometric may additionally be permuted among themselves.
    """
    if not G.is_connected():
        raise NotConnected("isometry group computation needs a connected graph")
    if not G.edges:
        return GroupDescription(1, [], DirectProduct(()), 1)
    blocks = [sorted(b, key=G.key) for b in edge_components(G)]
    subs = [G.edge_subgraph(b) for b in blocks]
    groups, block_notes = [], []
    for H in subs:
        if len(H.edges) == 2:
            groups.append(BlockGroup(2, CyclicGroup(2), [SignedEdgeBijection({e: neg(e) for e in H.edges})],
                                     {"bridge": True}))
        else:
            groups.append(block_liso(H, max_cycles))
        block_notes.append(groups[-1].notes)
    # classes of blocks with isometric free spaces, with fixed identifications
    cycles = [_cycles(H, max_cycles) for H in subs]
    census = [(len(H.vertices), len(H.edges), tuple(sorted(Counter(map(len, c)).items())))
              for H, c in zip(subs, cycles)]
    classes: list = []      # list of lists of block indices
    ident: dict = {}        # block index -> sigma from class representative onto it
    for i, H in enumerate(subs):
        placed = False
        for cl in classes:
            r = cl[0]
            if census[r] != census[i]:
                continue
            found = search_bijections(subs[r], _unit_weights(subs[r]), H, _unit_weights(H),
                                      cycles[r], cycles[i], first_only=True, node_cap=node_cap)
            if found:
                cl.append(i)
                ident[i] = found[0]
                placed = True
                break
        if not placed:
            classes.append([i])
            ident[i] = SignedEdgeBijection({e: e for e in H.edges})
    order = prod(g.order for g in groups) * prod(factorial(len(cl)) for cl in classes)
    all_edges = G.sorted_edges()
    gens = []
    for g in groups:
        for s in g.generators:
            gens.append(_extend([s.mapping], all_edges))
    for cl in classes:
        for a, b in zip(cl, cl[1:]):
            # phi_b o phi_a^-1 on block a, and its inverse on block b
            to_b = ident[b].compose(ident[a].inverse())
            gens.append(_extend([to_b.mapping, to_b.inverse().mapping], all_edges))
    factors = []
    for cl in classes:
        inner = tuple(groups[i].structure for i in cl)
        factors.append(WreathProduct(inner, SymmetricGroup(len(cl))) if len(cl) > 1 else inner[0])
    structure = simplify(DirectProduct(tuple(factors)))
    closure_n = None
    if order <= closure_cap:
        ident_sigma = SignedEdgeBijection({e: e for e in all_edges})
        elems = closure(gens, lambda a, b: a.compose(b), ident_sigma, _sigma_key(all_edges), closure_cap)
        closure_n = None if elems is None else len(elems)
    notes = {
        "blocks": len(blocks),
        "block_orders": [str(g.order) for g in groups],
        "block_classes": [len(cl) for cl in classes],
        "block_details": block_notes,
    }
    desc = GroupDescription(order, gens, structure, closure_n, notes)
    assert structure.order() == order, (structure.render(), order)
    return desc


# --------------------------------------------------------------------------
# l1 decomposition across edge components


def random_molecule(points: list, rng: random.Random, max_support: int | None = None) -> Molecule:
    """Random nonzero rational molecule on a random subset of ``points``."""
    k = rng.randint(2, min(len(points), max_support or len(points)))
    supp = rng.sample(list(points), k)
    coeffs = {p: Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for p in supp[:-1]}
    coeffs[supp[-1]] = -sum(coeffs.values(), Fraction(0))
    m = Molecule(coeffs)
    if not m:
        coeffs = {supp[0]: Fraction(1), supp[1]: Fraction(-1)}
        m = Molecule(coeffs)
    return m


def split_along_blocks(G: DirectedSymGraph, x: Molecule, blocks: list) -> list:
    """Component molecules x_i with x = sum x_i, x_i supported on block i.

    Each delta_p - delta_base is routed along a tree path; every edge of the
    path contributes delta_s - delta_r to the block containing it.
    """
    block_of = {}
    for i, b in enumerate(blocks):
        for e in b:
            block_of[e] = i
            block_of[neg(e)] = i
    base = G.vertices[0]
    pred = shortest_path_tree(G, _unit_weights(G), base)
    parts = [dict() for _ in blocks]
    for p, c in x.coeffs.items():
        if p == base:
            continue
        for s, r in reversed(tree_path(pred, p)):
            # path runs base -> p; walking it backwards moves mass from p towards base
            part = parts[block_of[(s, r)]]
            part[r] = part.get(r, 0) + c
            part[s] = part.get(s, 0) - c
    return [Molecule(p) for p in parts]


def l1_decomposition_check(
    G: DirectedSymGraph, samples: int = 100, seed: int = 0, *, detail: bool = False
):
    """Norm of a random molecule equals the sum of the norms of its block parts (exactly)."""
    if not G.is_connected():
        raise NotConnected("needs a connected graph")
    blocks = [sorted(b, key=G.key) for b in edge_components(G)]
    if len(blocks) < 2:
        raise SingleComponent("only one edge component; the decomposition is vacuous")
    M = graph_metric(G)
    subspaces = [M.subspace({v for e in b for v in e}) for b in blocks]
    rng = random.Random(seed)
    records = []
    ok = True
    for _ in range(samples):
        x = random_molecule(list(G.vertices), rng)
        parts = split_along_blocks(G, x, blocks)
        total = free_norm(M, x)
        split = sum((free_norm(S, xi) for S, xi in zip(subspaces, parts)), Fraction(0))
        same = total == split and sum(parts, Molecule()) == x
        ok = ok and same
        records.append({"norm": total, "sum_of_parts": split, "equal": same})
    return (ok, records) if detail else ok
