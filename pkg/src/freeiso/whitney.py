"""Signed edge bijections and vertex-map reconstruction from cycle data.

A vertex v of a 2-connected graph is recognised purely from the edge set
E_v of edges avoiding it: E_v is connected, and any basis of E_v plus one
edge at v is a basis of the whole graph.  On 3-connected graphs this makes
vertices visible to any cycle-preserving edge bijection, which is how the
vertex map is recovered.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    CycleCapExceeded,
    GraphNot2Connected,
    IncompleteCycleList,
    InvalidSigma,
    NoConsistentVertexMap,
    Not3Connected,
    NotCyclePreserving,
    NotProperSubset,
)
from .graphkit import (
    DEFAULT_MAX_CYCLES,
    DirectedSymGraph,
    all_bases,
    basis_swap_neighbors,
    every_two_edges_on_cycle,
    extend_to_basis,
    is_2_connected,
    is_3_connected,
    is_basis_of,
    neg,
    random_basis,
    simple_cycles,
)


@dataclass(frozen=True)
class SignedEdgeBijection:
    """Symmetric bijection of directed edges: sigma(-e) = -sigma(e)."""

    mapping: Mapping

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "SignedEdgeBijection":
        """Build from (edge, image) pairs; the opposite orientations are filled in."""
        m = {}
        for e, f in pairs:
            e, f = tuple(e), tuple(f)
            for a, b in ((e, f), (neg(e), neg(f))):
                if a in m and m[a] != b:
                    raise InvalidSigma(f"edge {a!r} given two images", edge=a)
                m[a] = b
        return cls(m)

    @classmethod
    def identity(cls, edges: Iterable) -> "SignedEdgeBijection":
        return cls({e: e for e in edges})

    @classmethod
    def from_vertex_map(cls, edges: Iterable, f: Mapping, sign: int = 1) -> "SignedEdgeBijection":
        """sigma(x, y) = sign * (f(x), f(y))."""
        m = {}
        for x, y in edges:
            img = (f[x], f[y])
            m[(x, y)] = img if sign == 1 else neg(img)
        return cls(m)

    def __call__(self, e):
        return self.mapping[e]

    def __eq__(self, other) -> bool:
        return isinstance(other, SignedEdgeBijection) and dict(self.mapping) == dict(other.mapping)

    def __hash__(self):
        return hash(frozenset(self.mapping.items()))

    def __len__(self):
        return len(self.mapping)

    def compose(self, other: "SignedEdgeBijection") -> "SignedEdgeBijection":
        """(self o other)(e) = self(other(e))."""
        return SignedEdgeBijection({e: self.mapping[f] for e, f in other.mapping.items()})

    def inverse(self) -> "SignedEdgeBijection":
        return SignedEdgeBijection({f: e for e, f in self.mapping.items()})

    def negate(self) -> "SignedEdgeBijection":
        return SignedEdgeBijection({e: neg(f) for e, f in self.mapping.items()})

    def is_identity(self) -> bool:
        return all(e == f for e, f in self.mapping.items())

    def validate(self, src_edges: Iterable, dst_edges: Iterable | None = None) -> None:
        src = set(src_edges)
        dst = src if dst_edges is None else set(dst_edges)
        if set(self.mapping) != src:
            raise InvalidSigma("domain differs from the edge set")
        images = set(self.mapping.values())
        if images != dst or len(images) != len(src):
            raise InvalidSigma("not a bijection onto the target edge set")
        for e, f in self.mapping.items():
            if self.mapping.get(neg(e)) != neg(f):
                raise InvalidSigma(f"not symmetric at {e!r}", edge=e)

    def undirected_pairs(self, G: DirectedSymGraph) -> list:
        """(canonical edge, image) for every undirected edge of G, in G's order."""
        return [(e, self.mapping[e]) for e in G.undirected()]

    def to_json(self, G: DirectedSymGraph) -> dict:
        return {"sigma": [[list(e), list(f)] for e, f in self.undirected_pairs(G)]}

    def sort_key(self, G: DirectedSymGraph, H: DirectedSymGraph | None = None) -> tuple:
        H = G if H is None else H
        return tuple(H.key(f) for _, f in self.undirected_pairs(G))


def _all_cycles(G: DirectedSymGraph, max_count: int) -> list:
    try:
        return simple_cycles(G, min_len=3, max_count=max_count)
    except CycleCapExceeded as exc:
        raise IncompleteCycleList(
            "simple cycle list is incomplete; raise the cycle cap", partial=exc.partial
        ) from None


def cycle_edge_sets(cycles: Iterable) -> set:
    return {frozenset(c) for c in cycles}


def undirected_cycle_sets(G: DirectedSymGraph, cycles: Iterable) -> set:
    return {frozenset(G.canon(e) for e in c) for c in cycles}


def is_cycle_preserving(
    G: DirectedSymGraph,
    sigma: SignedEdgeBijection,
    cycles: list | None = None,
    *,
    target: DirectedSymGraph | None = None,
    target_cycles: list | None = None,
    complete: bool = True,
    max_count: int = DEFAULT_MAX_CYCLES,
) -> bool:
    """Simple directed cycles map onto simple directed cycles, both ways.

    ``cycles`` must be the complete list of cycles of length >= 3 (2-cycles
    {e, -e} are preserved by symmetry alone).  Pass ``complete=False`` for a
    list truncated by a cap; that is refused.
    """
    if not complete:
        raise IncompleteCycleList("cycle list was truncated upstream")
    H = G if target is None else target
    sigma.validate(G.edges, H.edges)
    if cycles is None:
        cycles = _all_cycles(G, max_count)
    if target_cycles is None:
        target_cycles = cycles if H is G else _all_cycles(H, max_count)
    src = cycle_edge_sets(c for c in cycles if len(c) >= 3)
    dst = cycle_edge_sets(c for c in target_cycles if len(c) >= 3)
    if len(src) != len(dst):
        return False
    m = sigma.mapping
    forward = all(frozenset(m[e] for e in c) in dst for c in src)
    inv = sigma.inverse().mapping
    backward = all(frozenset(inv[e] for e in c) in src for c in dst)
    return forward and backward


def is_undirected_cycle_preserving(
    G: DirectedSymGraph, sigma: SignedEdgeBijection, cycles: list | None = None,
    max_count: int = DEFAULT_MAX_CYCLES,
) -> bool:
    """The induced map on undirected edges sends simple cycles to simple cycles."""
    sigma.validate(G.edges)
    if cycles is None:
        cycles = _all_cycles(G, max_count)
    und = undirected_cycle_sets(G, (c for c in cycles if len(c) >= 3))
    m = {G.canon(e): G.canon(f) for e, f in sigma.mapping.items()}
    return all(frozenset(m[e] for e in c) in und for c in und)


def vertex_star_complements(G: DirectedSymGraph) -> dict:
    """E_v = undirected edges avoiding v, for every vertex v."""
    und = G.undirected()
    return {v: frozenset(e for e in und if v not in e) for v in G.vertices}


def _connected_edge_set(edges: list) -> bool:
    if not edges:
        return True
    return DirectedSymGraph.from_edges(edges).is_connected()


def is_vertex_star_complement(
    G: DirectedSymGraph,
    E_prime: Iterable,
    *,
    exhaustive: bool = False,
    require_2_connected_star: bool = False,
    samples: int = 20,
    seed: int = 0,
) -> bool:
    """Decide whether E' = E_v for some vertex v, without looking at vertices.

    Condition (i): E' spans a connected subgraph.  Condition (ii): every basis
    of E' plus any single outside edge is a basis of E.  The sampled mode
    checks (ii) on one spanning forest, all of its single-exchange
    neighbours and ``samples`` random forests; ``exhaustive`` enumerates
    every basis of E'.  With ``require_2_connected_star`` condition (i) is
    replaced by: any two edges of E' lie on a common simple cycle inside E',
    which characterises the 2-connected stars.
    """
    if not is_2_connected(G):
        raise GraphNot2Connected("vertex-star test needs a 2-connected graph")
    E = G.undirected()
    sub = sorted({G.canon(tuple(e)) for e in E_prime}, key=G.key)
    if not set(sub) < set(E):
        raise NotProperSubset("E' must be a proper subset of the edge set")
    if require_2_connected_star:
        if sub and not every_two_edges_on_cycle(DirectedSymGraph.from_edges(sub, G.vertices)):
            return False
    elif not _connected_edge_set(sub):
        return False
    outside = [e for e in E if e not in set(sub)]
    if exhaustive:
        bases = all_bases(sub)
    else:
        first = extend_to_basis(G, [], within=sub)
        bases = [first] + basis_swap_neighbors(sub, first)
        rng = random.Random(seed)
        bases += [random_basis(sub, rng) for _ in range(samples)]
    for B in bases:
        for e in outside:
            if not is_basis_of(list(B) + [e], E):
                return False
    return True


def reconstruct_vertex_map(
    G: DirectedSymGraph, sigma: SignedEdgeBijection, cycles: list | None = None,
    max_count: int = DEFAULT_MAX_CYCLES, check_cycles: bool = True,
) -> dict:
    """Vertex bijection f with sigma({v, w}) = {f(v), f(w)} on a 3-connected graph.

    Each star complement E_v is pushed through sigma and matched by set
    equality against the star complements; the resulting f is checked to
    be a graph isomorphism inducing sigma on undirected edges.  With
    ``check_cycles=False`` the cycle test is skipped; the final check still
    certifies the answer, since a map induced by an isomorphism preserves cycles.
    """
    if not is_3_connected(G):
        raise Not3Connected("vertex map reconstruction needs a 3-connected graph")
    sigma.validate(G.edges)
    if check_cycles and not is_undirected_cycle_preserving(G, sigma, cycles, max_count):
        raise NotCyclePreserving("sigma does not preserve simple cycles")
    stars = vertex_star_complements(G)
    by_star: dict = {}
    for v, s in stars.items():
        by_star.setdefault(s, []).append(v)
    m = {G.canon(e): G.canon(f) for e, f in sigma.mapping.items()}
    f, used = {}, set()
    for v in G.vertices:
        image = frozenset(m[e] for e in stars[v])
        cands = [w for w in by_star.get(image, []) if w not in used]
        if not cands:
            raise NoConsistentVertexMap(f"image of the star complement of {v!r} is not a star complement")
        f[v] = cands[0]
        used.add(cands[0])
    for e in G.undirected():
        if G.canon((f[e[0]], f[e[1]])) != m[e]:
            raise NoConsistentVertexMap(f"vertex map does not induce sigma on {e!r}", edge=e)
    return f


def edge_signs(sigma: SignedEdgeBijection, f: Mapping) -> dict:
    """+1 where sigma(x,y) = (f x, f y), -1 where it is the reverse, 0 otherwise."""
    out = {}
    for (x, y), img in sigma.mapping.items():
        if img == (f[x], f[y]):
            out[(x, y)] = 1
        elif img == (f[y], f[x]):
            out[(x, y)] = -1
        else:
            out[(x, y)] = 0
    return out


def is_graph_isomorphism(G: DirectedSymGraph, H: DirectedSymGraph, f: Mapping) -> bool:
    if sorted(map(repr, f)) != sorted(map(repr, G.vertices)):
        return False
    if len(set(f.values())) != len(f) or set(f.values()) != set(H.vertices):
        return False
    if len(G.edges) != len(H.edges):
        return False
    return all((f[x], f[y]) in H.edges for x, y in G.edges)


def graph_automorphisms(G: DirectedSymGraph, limit: int | None = None) -> list[dict]:
    """All adjacency-preserving vertex permutations (degree-pruned backtracking)."""
    vs = list(G.vertices)
    # order vertices so each is adjacent to an earlier one when possible
    order, seen = [], set()
    for s in vs:
        if s in seen:
            continue
        stack = [s]
        seen.add(s)
        while stack:
            v = stack.pop(0)
            order.append(v)
            for w in G.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    out: list[dict] = []
    f: dict = {}
    used: set = set()

    def rec(i):
        if i == len(order):
            out.append(dict(f))
            return limit is not None and len(out) >= limit
        v = order[i]
        for w in vs:
            if w in used or G.degree(w) != G.degree(v):
                continue
            ok = True
            for u, fu in f.items():
                if G.has_edge(u, v) != G.has_edge(fu, w):
                    ok = False
                    break
            if ok:
                f[v] = w
                used.add(w)
                if rec(i + 1):
                    return True
                del f[v]
                used.discard(w)
        return False

    rec(0)
    return out
