"""Symmetric directed graphs and the combinatorics the isometry machinery needs.

Directed edges are ordered pairs ``(u, v)``; every graph stores both
orientations.  Undirected edges are represented by their canonical
orientation (source before range in vertex order).
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .errors import CycleCapExceeded, NotConnected, OppositePairPresent, UnknownLabel
from .metric import FiniteMetricSpace, elementary_molecule, validate_metric

Edge = tuple
DEFAULT_MAX_CYCLES = 10**6


def neg(e: Edge) -> Edge:
    return (e[1], e[0])


@dataclass(frozen=True)
class DirectedSymGraph:
    vertices: tuple
    edges: frozenset
    _index: dict = field(default=None, init=False, repr=False, compare=False)
    _adj: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {v: i for i, v in enumerate(self.vertices)}
        if len(index) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        adj = {v: [] for v in self.vertices}
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at {u!r}")
            if u not in index or v not in index:
                raise UnknownLabel(f"edge {(u, v)!r} leaves the vertex set")
            if (v, u) not in self.edges:
                raise ValueError(f"edge {(u, v)!r} has no opposite")
            adj[u].append(v)
        for v in adj:
            adj[v].sort(key=index.__getitem__)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_adj", adj)

    @classmethod
    def from_undirected(cls, vertices: Iterable, pairs: Iterable) -> "DirectedSymGraph":
        edges = set()
        for u, v in pairs:
            edges.add((u, v))
            edges.add((v, u))
        return cls(tuple(vertices), frozenset(edges))

    @classmethod
    def from_edges(cls, pairs: Iterable, order: Sequence | None = None) -> "DirectedSymGraph":
        """Graph on exactly the vertices incident to ``pairs``."""
        pairs = list(pairs)
        verts = {x for e in pairs for x in e}
        if order is not None:
            vs = tuple(v for v in order if v in verts)
        else:
            vs = tuple(sorted(verts, key=repr))
        return cls.from_undirected(vs, pairs)

    def idx(self, v) -> int:
        return self._index[v]

    def key(self, e: Edge) -> tuple:
        return (self._index[e[0]], self._index[e[1]])

    def neighbors(self, v) -> list:
        return self._adj[v]

    def degree(self, v) -> int:
        return len(self._adj[v])

    def canon(self, e: Edge) -> Edge:
        return e if self._index[e[0]] < self._index[e[1]] else (e[1], e[0])

    def sorted_edges(self) -> list:
        return sorted(self.edges, key=self.key)

    def undirected(self) -> list:
        return [e for e in self.sorted_edges() if self._index[e[0]] < self._index[e[1]]]

    def has_edge(self, u, v) -> bool:
        return (u, v) in self.edges

    def edge_subgraph(self, und_edges: Iterable) -> "DirectedSymGraph":
        """Subgraph spanned by undirected edges (incident vertices only)."""
        und = [tuple(e) for e in und_edges]
        verts = {x for e in und for x in e}
        return DirectedSymGraph.from_undirected(
            tuple(v for v in self.vertices if v in verts), und
        )

    def induced(self, verts: Iterable) -> "DirectedSymGraph":
        vs = set(verts)
        return DirectedSymGraph(
            tuple(v for v in self.vertices if v in vs),
            frozenset(e for e in self.edges if e[0] in vs and e[1] in vs),
        )

    def components(self) -> list[list]:
        seen, out = set(), []
        for s in self.vertices:
            if s in seen:
                continue
            comp, queue = [], deque([s])
            seen.add(s)
            while queue:
                v = queue.popleft()
                comp.append(v)
                for w in self._adj[v]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            out.append(sorted(comp, key=self._index.__getitem__))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


# --------------------------------------------------------------------------
# metrics induced by graphs


def graph_metric(G: DirectedSymGraph) -> FiniteMetricSpace:
    """Shortest-path metric with unit edge lengths."""
    if not G.is_connected():
        raise NotConnected("graph metric needs a connected graph")
    n = len(G.vertices)
    d = [[0] * n for _ in range(n)]
    for s in G.vertices:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in G.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        i = G.idx(s)
        for v, dv in dist.items():
            d[i][G.idx(v)] = dv
    return validate_metric(d, G.vertices)


def weighted_graph_metric(G: DirectedSymGraph, weights: dict) -> FiniteMetricSpace:
    """Shortest-path metric for positive rational edge weights (Floyd-Warshall)."""
    if not G.is_connected():
        raise NotConnected("graph metric needs a connected graph")
    n = len(G.vertices)
    INF = None
    d = [[INF] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = Fraction(0)
    for (u, v) in G.edges:
        w = weights.get((u, v), weights.get((v, u)))
        w = Fraction(w)
        i, j = G.idx(u), G.idx(v)
        if d[i][j] is None or w < d[i][j]:
            d[i][j] = d[j][i] = w
    for k in range(n):
        for i in range(n):
            if d[i][k] is None:
                continue
            for j in range(n):
                if d[k][j] is None:
                    continue
                t = d[i][k] + d[k][j]
                if d[i][j] is None or t < d[i][j]:
                    d[i][j] = t
    return validate_metric(d, G.vertices)


# --------------------------------------------------------------------------
# simple cycles


def simple_cycles(
    G: DirectedSymGraph,
    min_len: int = 2,
    max_len: int | None = None,
    max_count: int = DEFAULT_MAX_CYCLES,
) -> list[tuple]:
    """All simple directed cycles with ``min_len <= length <= max_len``.

    Each cycle is a tuple of directed edges rotated so that its smallest edge
    (in vertex-index order) comes first; the list is sorted.  Every cycle of
    length >= 3 is found once, from its smallest vertex, by backtracking over
    larger vertices only.  Raises ``CycleCapExceeded`` (carrying the partial,
    unsorted list) when more than ``max_count`` cycles exist.
    """
    if min_len < 2:
        raise ValueError("min_len must be at least 2")
    n = len(G.vertices)
    if max_len is None:
        max_len = n
    out: list[tuple] = []

    def emit(cyc):
        out.append(cyc)
        if len(out) > max_count:
            raise CycleCapExceeded(
                f"more than {max_count} simple cycles", partial=out[:max_count], max_count=max_count
            )

    if min_len <= 2 <= max_len:
        for e in G.undirected():
            emit((e, neg(e)))
    if max_len >= 3:
        idx = G.idx
        for s in G.vertices:
            si = idx(s)
            path = [s]
            on_path = {s}

            def dfs(v):
                for w in G.neighbors(v):
                    if w == s:
                        if len(path) >= max(3, min_len):
                            emit(tuple(zip(path, path[1:] + [s])))
                        continue
                    if idx(w) <= si or w in on_path or len(path) >= max_len:
                        continue
                    path.append(w)
                    on_path.add(w)
                    dfs(w)
                    path.pop()
                    on_path.discard(w)

            dfs(s)
    out.sort(key=lambda c: [G.key(e) for e in c])
    return out


def cycle_edges(c: Sequence) -> frozenset:
    return frozenset(c)


def reverse_cycle(c: Sequence) -> tuple:
    return tuple(neg(e) for e in reversed(c))


# --------------------------------------------------------------------------
# connectivity


def _local_vertex_connectivity(G: DirectedSymGraph, s, t) -> tuple[int, set]:
    """Max number of internally disjoint s-t paths and a minimum separator.

    Unit-capacity max-flow on the split graph (v_in -> v_out capacity 1).
    """
    INFC = len(G.vertices) + 1
    cap: dict = {}

    def add(a, b, c):
        cap[(a, b)] = cap.get((a, b), 0) + c
        cap.setdefault((b, a), 0)

    for v in G.vertices:
        add((v, 0), (v, 1), INFC if v in (s, t) else 1)
    for u, v in G.edges:
        add((u, 1), (v, 0), INFC)
    nbrs: dict = {}
    for a, b in cap:
        nbrs.setdefault(a, []).append(b)
    src, dst = (s, 1), (t, 0)
    flow = 0
    while True:
        pred = {src: None}
        queue = deque([src])
        while queue and dst not in pred:
            a = queue.popleft()
            for b in nbrs.get(a, ()):
                if b not in pred and cap[(a, b)] > 0:
                    pred[b] = a
                    queue.append(b)
        if dst not in pred:
            break
        b = dst
        while pred[b] is not None:
            a = pred[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
    # reachable set in the residual graph gives the cut
    cut = {v for v in G.vertices if (v, 0) in pred and (v, 1) not in pred}
    return flow, cut


def vertex_connectivity(G: DirectedSymGraph) -> tuple[int, list]:
    """Vertex connectivity kappa and a minimum separating set.

    For complete graphs kappa = |V| - 1 and the separator is empty.
    """
    n = len(G.vertices)
    if n <= 1:
        return 0, []
    if not G.is_connected():
        return 0, []
    best, best_cut = n - 1, []
    for u, v in combinations(G.vertices, 2):
        if G.has_edge(u, v):
            continue
        k, cut = _local_vertex_connectivity(G, u, v)
        if k < best:
            best, best_cut = k, sorted(cut, key=G.idx)
    return best, best_cut


def is_k_connected(G: DirectedSymGraph, k: int) -> bool:
    """Connected after deleting any k-1 vertices (leaving at least one).

    This follows the convention that a one-vertex graph is connected, so
    complete graphs are k-connected for every k.
    """
    n = len(G.vertices)
    if n == 0:
        return False
    if not G.is_connected():
        return False
    kappa, _ = vertex_connectivity(G)
    complete = len(G.edges) == n * (n - 1)
    return complete or kappa >= k


def is_2_connected(G: DirectedSymGraph) -> bool:
    return is_k_connected(G, 2)


def is_3_connected(G: DirectedSymGraph) -> bool:
    return is_k_connected(G, 3)


def connectivity_report(G: DirectedSymGraph) -> dict:
    kappa, cut = vertex_connectivity(G)
    return {
        "connected": G.is_connected(),
        "2_connected": is_2_connected(G),
        "3_connected": is_3_connected(G),
        "vertex_connectivity": kappa,
        "min_vertex_cut": cut,
    }


# --------------------------------------------------------------------------
# edge components (blocks)


def biconnected_blocks(G: DirectedSymGraph) -> list[list]:
    """Blocks as lists of canonical undirected edges (Hopcroft-Tarjan)."""
    disc: dict = {}
    low: dict = {}
    blocks: list[list] = []
    stack: list = []
    counter = 0
    for root in G.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        it_stack = [(root, None, iter(G.neighbors(root)))]
        while it_stack:
            v, parent, it = it_stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w not in disc:
                    stack.append((v, w))
                    disc[w] = low[w] = counter
                    counter += 1
                    it_stack.append((w, v, iter(G.neighbors(w))))
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    stack.append((v, w))
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            it_stack.pop()
            if parent is not None:
                low[parent] = min(low[parent], low[v])
                if low[v] >= disc[parent]:
                    block = []
                    while True:
                        e = stack.pop()
                        block.append(G.canon(e))
                        if e == (parent, v):
                            break
                    blocks.append(sorted(set(block), key=G.key))
    blocks.sort(key=lambda b: G.key(b[0]))
    return blocks


def edge_components(G: DirectedSymGraph) -> list[frozenset]:
    """Classes of 'lie on a common simple cycle'; bridges are singletons."""
    return [frozenset(b) for b in biconnected_blocks(G)]


def articulation_points(G: DirectedSymGraph) -> list:
    count: dict = {}
    for b in biconnected_blocks(G):
        for v in {x for e in b for x in e}:
            count[v] = count.get(v, 0) + 1
    return [v for v in G.vertices if count.get(v, 0) > 1]


# --------------------------------------------------------------------------
# bases (spanning forests)


class _DSU:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        while p != self.parent.setdefault(p, p):
            self.parent[x] = self.parent[p]
            x = p = self.parent[p]
        return p

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _undirected_set(edges: Iterable) -> set:
    return {frozenset(e) for e in edges}


def is_acyclic(edges: Iterable) -> bool:
    dsu = _DSU()
    return all(dsu.union(*tuple(e)) for e in _undirected_set(edges))


def rank(edges: Iterable) -> int:
    """Size of a spanning forest of the graph spanned by ``edges``."""
    dsu = _DSU()
    return sum(1 for e in _undirected_set(edges) if dsu.union(*tuple(e)))


def is_basis_of(E0: Iterable, E: Iterable) -> bool:
    """E0 is a maximal cycle-free subset of E (a spanning forest of E)."""
    E0s, Es = _undirected_set(E0), _undirected_set(E)
    return E0s <= Es and is_acyclic(E0s) and len(E0s) == rank(Es)


def is_basis(G: DirectedSymGraph, E0: Iterable) -> bool:
    return is_basis_of(E0, G.undirected())


def extend_to_basis(G: DirectedSymGraph, E_prime: Iterable, within: Iterable | None = None) -> list:
    """Grow the independent set E' greedily to a basis of ``within`` (default: all of G).

    The seed must be cycle-free; raises ValueError otherwise.
    """
    seed = [G.canon(tuple(e)) for e in E_prime]
    pool = G.undirected() if within is None else [G.canon(tuple(e)) for e in within]
    dsu = _DSU()
    out = []
    for e in seed:
        if not dsu.union(*e):
            raise ValueError("seed edge set contains a cycle")
        out.append(e)
    for e in sorted(pool, key=G.key):
        if dsu.union(*e):
            out.append(e)
    return sorted(set(out), key=G.key)


def random_basis(edges: Sequence, rng: random.Random) -> list:
    """Kruskal on a random edge order: a random spanning forest of ``edges``."""
    order = list(edges)
    rng.shuffle(order)
    dsu = _DSU()
    return [e for e in order if dsu.union(*tuple(e))]


def all_bases(edges: Sequence) -> list[list]:
    """Every spanning forest of ``edges`` (exponential; small inputs only)."""
    edges = list(edges)
    r = rank(edges)
    return [list(c) for c in combinations(edges, r) if is_acyclic(c)]


def basis_swap_neighbors(edges: Sequence, basis: Sequence) -> list[list]:
    """Bases obtained from ``basis`` by one exchange within ``edges``."""
    base = list(basis)
    out = []
    others = [e for e in edges if frozenset(e) not in _undirected_set(base)]
    for f in others:
        for i in range(len(base)):
            cand = base[:i] + base[i + 1:] + [f]
            if is_acyclic(cand):
                out.append(cand)
    return out


# --------------------------------------------------------------------------
# unoriented cycles and linear dependence of molecules


def _check_opposite_free(E_prime: Sequence) -> list:
    es = list(dict.fromkeys(tuple(e) for e in E_prime))
    s = set(es)
    for e in es:
        if neg(e) in s:
            raise OppositePairPresent(f"both {e!r} and its opposite are present", edge=e)
    return es


def has_unoriented_cycle(E_prime: Sequence) -> bool:
    """True iff the edges contain a cycle once orientations are forgotten."""
    es = _check_opposite_free(E_prime)
    return not is_acyclic(es)


def molecule_rank(M: FiniteMetricSpace, E_prime: Sequence) -> int:
    """Rank of {m_e : e in E'} by exact Gaussian elimination."""
    es = _check_opposite_free(E_prime)
    cols = {p: i for i, p in enumerate(M.points)}
    rows = []
    for u, v in es:
        m = elementary_molecule(M, u, v)
        row = [0] * len(cols)
        for k, c in m.coeffs.items():
            row[cols[k]] = c
        rows.append(row)
    r = 0
    ncol = len(cols)
    for c in range(ncol):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0 and not _tiny(rows[i][c], M)), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / pr[c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        r += 1
    return r


def _tiny(x, M: FiniteMetricSpace) -> bool:
    return M.tol is not None and abs(x) <= M.tol


# --------------------------------------------------------------------------
# cycle-based oracles used for cross-checks


def edges_share_cycle_matrix(G: DirectedSymGraph, cycles: Sequence | None = None) -> dict:
    """For undirected edges e, f: do they lie on a common simple cycle (length >= 3)?"""
    if cycles is None:
        cycles = simple_cycles(G, min_len=3)
    together: set = set()
    for c in cycles:
        und = sorted({G.canon(e) for e in c}, key=G.key)
        for a, b in combinations(und, 2):
            together.add((a, b))
            together.add((b, a))
    return together


def every_two_edges_on_cycle(G: DirectedSymGraph, cycles: Sequence | None = None) -> bool:
    und = G.undirected()
    if len(und) <= 1:
        return True
    together = edges_share_cycle_matrix(G, cycles)
    return all((a, b) in together for a, b in combinations(und, 2))
