"""Graph of preserved extreme molecules and the Prague classification.

On a finite space the minimum of d(x,z) + d(z,y) - d(x,y) over the finitely
many third points z is either zero or a fixed positive gap, so a pair is a
preserved extreme point exactly when every triangle through it is strict.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable

from .errors import SamePoint
from .graphkit import DirectedSymGraph
from .metric import FiniteMetricSpace

PRAGUE = "Prague"
WEAK_PRAGUE_ONLY = "WeakPragueOnly"
NOT_WEAK_PRAGUE = "NotWeakPrague"


@dataclass(frozen=True)
class ExtGraph:
    vertices: tuple
    edges: frozenset
    weight: dict = field(compare=False)

    def graph(self) -> DirectedSymGraph:
        return DirectedSymGraph(self.vertices, self.edges)

    def undirected(self) -> list:
        return self.graph().undirected()

    def to_json(self) -> dict:
        from .metric import format_number

        g = self.graph()
        return {
            "vertices": list(self.vertices),
            "edges": [list(e) for e in g.undirected()],
            "weights": [format_number(self.weight[e]) for e in g.undirected()],
        }


@dataclass(frozen=True)
class PragueVerdict:
    klass: str
    diagnostics: dict

    @property
    def weak_prague(self) -> bool:
        return self.klass != NOT_WEAK_PRAGUE

    def to_json(self) -> dict:
        return {"class": self.klass, "diagnostics": self.diagnostics}


def is_preserved_extreme(M: FiniteMetricSpace, x, y) -> bool:
    i, j = M.index(x), M.index(y)
    if i == j:
        raise SamePoint(f"pair needs two distinct points, got {x!r} twice")
    return all(M.triangle_sign(i, k, j) > 0 for k in range(len(M)) if k != i and k != j)


def ext_graph(M: FiniteMetricSpace) -> ExtGraph:
    pts = M.points
    edges = set()
    for i, j in M.pairs():
        if is_preserved_extreme(M, pts[i], pts[j]):
            edges.add((pts[i], pts[j]))
            edges.add((pts[j], pts[i]))
    verts = {v for e in edges for v in e}
    weight = {e: M.dist(*e) for e in edges}
    return ExtGraph(tuple(p for p in pts if p in verts), frozenset(edges), weight)


def _dijkstra(G: DirectedSymGraph, weight: dict, source) -> dict:
    dist = {source: 0}
    heap = [(0, G.idx(source), source)]
    done = set()
    while heap:
        dv, _, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for w in G.neighbors(v):
            nd = dv + weight[(v, w)]
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, G.idx(w), w))
    return dist


def path_metric(G: DirectedSymGraph, weight: dict) -> dict:
    """All-pairs weighted shortest-path lengths (source -> target -> length)."""
    return {v: _dijkstra(G, weight, v) for v in G.vertices}


def classify_edge_set(M: FiniteMetricSpace, edges: Iterable) -> PragueVerdict:
    """Admissibility of an arbitrary symmetric edge set on M.

    Weakly admissible: incident vertices are all of M and the graph is
    connected.  Admissible: additionally every distance is realised as a
    shortest weighted path.
    """
    edges = frozenset(tuple(e) for e in edges)
    pts = M.points
    verts = {v for e in edges for v in e}
    missing = [p for p in pts if p not in verts]
    if missing:
        return PragueVerdict(NOT_WEAK_PRAGUE, {"reason": "vertices_missing", "missing": missing})
    G = DirectedSymGraph(pts, edges)
    comps = G.components()
    if len(comps) > 1:
        return PragueVerdict(
            NOT_WEAK_PRAGUE,
            {"reason": "disconnected", "components": comps, "pair": [comps[0][0], comps[1][0]]},
        )
    weight = {e: M.dist(*e) for e in edges}
    for x in pts:
        dist = _dijkstra(G, weight, x)
        for y in pts:
            if y != x and not M.eq(dist[y], M.dist(x, y)):
                return PragueVerdict(
                    WEAK_PRAGUE_ONLY,
                    {"reason": "path_longer_than_distance", "pair": [x, y], "path_length": dist[y],
                     "distance": M.dist(x, y)},
                )
    return PragueVerdict(PRAGUE, {})


def classify_prague(M: FiniteMetricSpace) -> PragueVerdict:
    return classify_edge_set(M, ext_graph(M).edges)


def shortest_path_tree(G: DirectedSymGraph, weight: dict, source) -> dict:
    """Predecessor edge of every vertex on a fixed shortest-path tree rooted at source."""
    dist = {source: 0}
    pred = {source: None}
    heap = [(0, G.idx(source), source)]
    done = set()
    while heap:
        dv, _, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for w in G.neighbors(v):
            nd = dv + weight[(v, w)]
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                pred[w] = (v, w)
                heapq.heappush(heap, (nd, G.idx(w), w))
    return pred


def tree_path(pred: dict, target) -> list:
    """Edges from the tree root to ``target``."""
    path = []
    while pred[target] is not None:
        e = pred[target]
        path.append(e)
        target = e[0]
    path.reverse()
    return path
