"""New spaces from old: p-sums, rigid disjoint unions, and a 2-connected graph family."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import isqrt

import mpmath

from .errors import InvalidP, PreconditionViolated, SamePoint
from .extgraph import ext_graph, is_preserved_extreme
from .graphkit import DirectedSymGraph
from .metric import DEFAULT_TOL, ROOT_DPS, FiniteMetricSpace, to_number, validate_metric


class ConstructionWarning(UserWarning):
    pass


@dataclass
class ConstructionRecipe:
    kind: str
    parameters: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"kind": self.kind, "parameters": self.parameters, "warnings": self.warnings}


def _check_p(p, strict: bool = False) -> Fraction:
    p = to_number(p)
    if p < 1 or (strict and p == 1):
        raise InvalidP(f"p must be {'> 1' if strict else '>= 1'}, got {p}", p=str(p))
    return p


def _exact_root(q: Fraction, p: Fraction) -> Fraction | None:
    """q**(1/p) when it is rational and p is an integer, else None."""
    if p.denominator != 1:
        return None
    k = int(p)

    def iroot(n: int) -> int | None:
        r = round(n ** (1.0 / k)) if n else 0
        for c in (r - 1, r, r + 1):
            if c >= 0 and c**k == n:
                return c
        return None

    if k == 2:
        a, b = isqrt(q.numerator), isqrt(q.denominator)
        return Fraction(a, b) if a * a == q.numerator and b * b == q.denominator else None
    a, b = iroot(q.numerator), iroot(q.denominator)
    return None if a is None or b is None else Fraction(a, b)


def _root(q: Fraction, p: Fraction) -> float:
    with mpmath.workdps(ROOT_DPS):
        x = mpmath.mpf(q.numerator) / q.denominator
        return float(x ** (mpmath.mpf(p.denominator) / p.numerator))


def _pow(x: Fraction, p: Fraction) -> Fraction:
    if p.denominator != 1:
        raise InvalidP("exact p-th powers need an integer p", p=str(p))
    return x ** int(p)


def space_from_powers(labels: list, powers: list, p: Fraction) -> FiniteMetricSpace:
    """Space whose distances are the p-th roots of an exact matrix.

    If every root is rational the space is exact; otherwise distances are
    floats and triangle tests use the exact powers.
    """
    n = len(labels)
    roots = [[_exact_root(powers[i][j], p) for j in range(n)] for i in range(n)]
    if all(r is not None for row in roots for r in row):
        return validate_metric(roots, labels)
    d = [[_root(powers[i][j], p) for j in range(n)] for i in range(n)]
    frozen = tuple(tuple(Fraction(v) for v in row) for row in powers)
    return validate_metric(d, labels, tol=DEFAULT_TOL, power=(p, frozen))


def _exact_distances(M: FiniteMetricSpace) -> list:
    if not M.exact:
        raise PreconditionViolated("constructions need exact (rational) input spaces")
    return [list(r) for r in M.d]


def lp_sum(M: FiniteMetricSpace, N: FiniteMetricSpace, p=2, recipe: ConstructionRecipe | None = None
           ) -> FiniteMetricSpace:
    """M x N with d((x,y),(u,v)) = ||(d_M(x,u), d_N(y,v))||_p; points are label pairs."""
    p = _check_p(p)
    if p == 1:
        msg = "p = 1: the extreme-pair transfer for sums needs p > 1"
        warnings.warn(msg, ConstructionWarning, stacklevel=2)
        if recipe is not None:
            recipe.warnings.append(msg)
    dM, dN = _exact_distances(M), _exact_distances(N)
    labels = [(x, y) for x in M.points for y in N.points]
    idx = [(i, j) for i in range(len(M)) for j in range(len(N))]
    if p == 1:
        d = [[dM[a][c] + dN[b][e] for c, e in idx] for a, b in idx]
        return validate_metric(d, labels)
    powers = [[_pow(dM[a][c], p) + _pow(dN[b][e], p) for c, e in idx] for a, b in idx]
    return space_from_powers(labels, powers, p)


def preserved_extreme_in_sum(M: FiniteMetricSpace, N: FiniteMetricSpace, p, pair) -> bool:
    p = _check_p(p, strict=True)
    a, b = pair
    if a == b:
        raise SamePoint("pair needs two distinct product points", pair=[list(a), list(b)])
    S = lp_sum(M, N, p)
    return is_preserved_extreme(S, tuple(a), tuple(b))


def predicted_sum_pairs(M: FiniteMetricSpace, N: FiniteMetricSpace) -> list:
    """Product pairs ((x1,y1),(x2,y2)) whose N-coordinates form an extreme pair of N."""
    extN = ext_graph(N)
    out = []
    for y1, y2 in sorted(extN.edges, key=lambda e: (N.index(e[0]), N.index(e[1]))):
        for x1 in M.points:
            for x2 in M.points:
                out.append(((x1, y1), (x2, y2)))
    return out


def _disjoint_labels(M: FiniteMetricSpace, N: FiniteMetricSpace) -> tuple[list, list]:
    left, right = list(M.points), list(N.points)
    if set(left) & set(right):
        left = [f"{x}#L" for x in left]
        right = [f"{y}#R" for y in right]
    return left, right


def union_bounded(M: FiniteMetricSpace, N: FiniteMetricSpace) -> FiniteMetricSpace:
    """Disjoint union; points from different parts are 1 + max diameter apart."""
    dM, dN = _exact_distances(M), _exact_distances(N)
    gap = 1 + max(M.diameter(), N.diameter())
    left, right = _disjoint_labels(M, N)
    m, n = len(M), len(N)
    d = [[Fraction(0)] * (m + n) for _ in range(m + n)]
    for i in range(m + n):
        for j in range(m + n):
            if i < m and j < m:
                d[i][j] = dM[i][j]
            elif i >= m and j >= m:
                d[i][j] = dN[i - m][j - m]
            else:
                d[i][j] = gap
    return validate_metric(d, left + right)


def is_uniformly_concave(M: FiniteMetricSpace) -> bool:
    """Every pair is an extreme pair (all triangle inequalities strict)."""
    n = len(M)
    return len(ext_graph(M).edges) == n * (n - 1)


def union_basepoint(
    M: FiniteMetricSpace,
    N: FiniteMetricSpace,
    base_m,
    base_n,
    p=2,
    recipe: ConstructionRecipe | None = None,
) -> FiniteMetricSpace:
    """M together with N minus base_n; cross distance (d_M(x,base_m)^p + d_N(base_n,y)^p)^(1/p)."""
    p = _check_p(p, strict=True)
    M.index(base_m)
    N.index(base_n)
    notes = []
    if len(N) < 4:
        notes.append(f"N has {len(N)} points; the rigidity guarantee needs at least 4")
    if not is_uniformly_concave(N):
        notes.append("N is not uniformly concave; the rigidity guarantee does not apply")
    for msg in notes:
        warnings.warn(msg, ConstructionWarning, stacklevel=2)
        if recipe is not None:
            recipe.warnings.append(msg)
    dM, dN = _exact_distances(M), _exact_distances(N)
    keep = [y for y in N.points if y != base_n]
    sub = N.subspace(keep)
    left, right = _disjoint_labels(M, sub)
    m, n = len(M), len(keep)
    bm, bn = M.index(base_m), N.index(base_n)
    jn = [N.index(y) for y in keep]
    powers = [[Fraction(0)] * (m + n) for _ in range(m + n)]
    for i in range(m + n):
        for j in range(m + n):
            if i < m and j < m:
                powers[i][j] = _pow(dM[i][j], p)
            elif i >= m and j >= m:
                powers[i][j] = _pow(dN[jn[i - m]][jn[j - m]], p)
            else:
                x, y = (i, j - m) if i < m else (j, i - m)
                powers[i][j] = _pow(dM[x][bm], p) + _pow(dN[bn][jn[y]], p)
    return space_from_powers(left + right, powers, p)


def equilateral(n: int, side=1, prefix: str = "") -> FiniteMetricSpace:
    labels = [f"{prefix}{i}" for i in range(n)]
    side = to_number(side)
    return validate_metric([[0 if i == j else side for j in range(n)] for i in range(n)], labels)


# --------------------------------------------------------------------------
# 2-connected, not 3-connected graph family with rigid free space


@dataclass
class ThreeCliqueGraph:
    graph: DirectedSymGraph
    cliques: list           # vertex lists of the three cliques
    hubs: list              # the three extra vertices
    attachments: dict       # (j, k) -> clique-k vertices joined to hub j

    def part(self, j: int) -> DirectedSymGraph:
        """Clique j plus every hub edge landing in it."""
        pairs = list(combinations(self.cliques[j], 2))
        for (a, k), verts in self.attachments.items():
            if k == j:
                pairs += [(self.hubs[a], v) for v in verts]
        verts = {v for e in pairs for v in e}
        order = [v for v in self.graph.vertices if v in verts]
        return DirectedSymGraph.from_undirected(order, pairs)


def three_clique_graph(i1: int, i2: int, i3: int, e) -> ThreeCliqueGraph:
    """Three cliques K_i1, K_i2, K_i3 and hubs a0, a1, a2; hub j meets e[j][k] vertices of clique k."""
    sizes = [i1, i2, i3]
    mult = [[int(e[j][k]) for k in range(3)] for j in range(3)]
    off = [mult[j][k] for j in range(3) for k in range(3) if j != k]
    if any(mult[j][j] for j in range(3)):
        raise PreconditionViolated("diagonal multiplicities must be zero", diagonal=[mult[j][j] for j in range(3)])
    if min(off) < 3:
        raise PreconditionViolated("every off-diagonal multiplicity must be at least 3", multiplicities=off)
    if len(set(off)) != len(off):
        raise PreconditionViolated("off-diagonal multiplicities must be pairwise distinct", multiplicities=off)
    if min(sizes) <= 2 + max(off):
        raise PreconditionViolated(
            "every clique size must exceed 2 + the largest multiplicity",
            clique_sizes=sizes, largest_multiplicity=max(off),
        )
    cliques = [[f"k{j}_{t}" for t in range(sizes[j])] for j in range(3)]
    hubs = [f"a{j}" for j in range(3)]
    pairs = []
    for c in cliques:
        pairs += list(combinations(c, 2))
    attachments = {}
    for j in range(3):
        for k in range(3):
            if j != k:
                verts = cliques[k][: mult[j][k]]
                attachments[(j, k)] = verts
                pairs += [(hubs[j], v) for v in verts]
    vertices = [v for c in cliques for v in c] + hubs
    return ThreeCliqueGraph(DirectedSymGraph.from_undirected(vertices, pairs), cliques, hubs, attachments)


# name used by the operation contract
gen_prop72 = three_clique_graph
