"""Slow, obviously-correct reference implementations used only by the tests.

None of these share code paths with the package beyond the data types.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from math import lcm

import networkx as nx

from freeiso.graphkit import DirectedSymGraph
from freeiso.metric import Molecule, validate_metric


# --------------------------------------------------------------------------
# random inputs


def random_metric(rng: random.Random, n: int, denom: int = 4):
    """Random rational metric: shortest paths over random positive weights."""
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = Fraction(rng.randint(1, 4 * denom), denom)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if w[i][k] + w[k][j] < w[i][j]:
                    w[i][j] = w[i][k] + w[k][j]
    return validate_metric(w, [f"p{i}" for i in range(n)])


def random_molecule(rng: random.Random, points, max_coeff: int = 5):
    k = rng.randint(2, len(points))
    supp = rng.sample(list(points), k)
    c = {p: Fraction(rng.randint(-max_coeff, max_coeff), rng.randint(1, 3)) for p in supp[:-1]}
    c[supp[-1]] = -sum(c.values(), Fraction(0))
    return Molecule(c)


def random_connected_graph(rng: random.Random, n: int, p: float = 0.4) -> DirectedSymGraph:
    while True:
        H = nx.gnp_random_graph(n, p, seed=rng.randint(0, 10**9))
        if nx.is_connected(H):
            return DirectedSymGraph.from_undirected(list(range(n)), list(H.edges()))


def to_nx(G: DirectedSymGraph) -> nx.Graph:
    H = nx.Graph()
    H.add_nodes_from(G.vertices)
    H.add_edges_from(G.undirected())
    return H


# --------------------------------------------------------------------------
# norm via networkx min-cost flow on the complete bipartite transport graph


def nx_transport_norm(M, x: Molecule) -> Fraction:
    pts = [p for p in M.points if x.coeffs.get(p, 0) != 0]
    if not pts:
        return Fraction(0)
    md = lcm(*(Fraction(x.coeffs[p]).denominator for p in pts))
    dd = lcm(*(M.dist(a, b).denominator for a in pts for b in pts if a != b), 1)
    F = nx.DiGraph()
    for p in pts:
        F.add_node(("s", p), demand=-int(x.coeffs[p] * md) if x.coeffs[p] > 0 else 0)
        F.add_node(("t", p), demand=int(-x.coeffs[p] * md) if x.coeffs[p] < 0 else 0)
    for a in pts:
        for b in pts:
            if x.coeffs[a] > 0 and x.coeffs[b] < 0:
                F.add_edge(("s", a), ("t", b), weight=int(M.dist(a, b) * dd))
    cost = nx.min_cost_flow_cost(F)
    return Fraction(cost, md * dd)


# --------------------------------------------------------------------------
# extreme pairs via the epsilon-delta definition


def brute_preserved_extreme(M, x, y) -> bool:
    """For every eps > 0 some delta > 0 works: d(x,z)+d(z,y) < d(x,y)+delta forces min(d(x,z), d(y,z)) < eps.

    Only finitely many eps and delta values matter on a finite space: the
    thresholds are the distances themselves and the positive slacks.
    """
    others = [z for z in M.points if z not in (x, y)]
    dists = sorted({M.dist(a, b) for a in M.points for b in M.points if a != b})
    slack = {z: M.dist(x, z) + M.dist(z, y) - M.dist(x, y) for z in others}
    near = {z: min(M.dist(x, z), M.dist(y, z)) for z in others}
    eps_values = [dists[0] / 2] + dists
    delta_values = sorted({s / 2 for s in slack.values() if s > 0} | {Fraction(1)})
    for eps in eps_values:
        if not any(all(not (slack[z] < delta) or near[z] < eps for z in others) for delta in delta_values):
            return False
    return True


# --------------------------------------------------------------------------
# brute-force isometry oracle over all signed edge maps of a graph


def _tree_paths(G: DirectedSymGraph, root):
    """BFS tree; path[v] = list of directed edges root -> v."""
    path = {root: []}
    queue = [root]
    for v in queue:
        for w in G.neighbors(v):
            if w not in path:
                path[w] = path[v] + [(v, w)]
                queue.append(w)
    return path


def brute_isometry_maps(G: DirectedSymGraph, M, norm=None) -> list:
    """Every signed permutation of edge molecules that extends to a linear isometry.

    T is pinned down by T(m_e) = m_s(e); it is well defined iff, for every
    edge, d(e) m_s(e) equals the image of the tree path between its ends.
    It is an isometry iff T and its inverse send every delta_a - delta_b into
    the ball of radius d(a, b), since those molecules span the unit ball's
    extreme points.  ``norm`` defaults to the networkx transport oracle.
    """
    if norm is None:
        norm = lambda x: nx_transport_norm(M, x)  # noqa: E731
    und = G.undirected()
    root = G.vertices[0]
    paths = _tree_paths(G, root)

    def between(a, b):
        return [(s, r) for (r, s) in reversed(paths[a])] + paths[b]

    pairs = [(a, b, between(a, b)) for a, b in itertools.combinations(G.vertices, 2)]
    found = []
    for perm in itertools.permutations(range(len(und))):
        for signs in itertools.product((1, -1), repeat=len(und)):
            m = {}
            for i, e in enumerate(und):
                f = und[perm[i]]
                img = f if signs[i] == 1 else (f[1], f[0])
                m[e], m[(e[1], e[0])] = img, (img[1], img[0])

            def image(path, m=m):
                out = Molecule()
                for e in path:
                    f = m[e]
                    w = M.dist(*e) / M.dist(*f)
                    out = out + Molecule({f[0]: w, f[1]: -w})
                return out

            if any(image([e]) != image(between(*e)) for e in und):
                continue
            inv = {v: k for k, v in m.items()}
            if all(norm(image(p, mp)) <= M.dist(a, b) for mp in (m, inv) for a, b, p in pairs):
                found.append(dict(m))
    return found


def brute_isometries(M) -> list:
    out = []
    for perm in itertools.permutations(M.points):
        g = dict(zip(M.points, perm))
        if all(M.dist(g[a], g[b]) == M.dist(a, b) for a in M.points for b in M.points):
            out.append(g)
    return out


def brute_simple_cycles(G: DirectedSymGraph, min_len: int = 3) -> int:
    """Number of simple directed cycles (length >= min_len) via networkx."""
    D = nx.DiGraph()
    D.add_edges_from(G.edges)
    return sum(1 for c in nx.simple_cycles(D) if len(c) >= min_len)
