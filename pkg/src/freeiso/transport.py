"""Exact Lipschitz-free norm of a molecule.

Two independent routes compute the same number:

* :func:`transport_norm` -- minimum-cost transport of the positive part onto
  the negative part (successive shortest paths on the bipartite support
  graph).  Node potentials of the final residual graph give an optimal
  1-Lipschitz witness.
* :func:`lipschitz_dual_norm` -- the linear program maximising f(x) over
  1-Lipschitz f on the support, solved by a dense simplex with Bland's rule.

In exact mode both scale all data to integers first.  The dual constraint
matrix is a difference-constraint matrix, hence totally unimodular, so every
pivot element is +-1 and the whole computation stays in Python ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import NotAMolecule, UnknownLabel
from .metric import FiniteMetricSpace, LipschitzWitness, Molecule, Number

INF = float("inf")


@dataclass(frozen=True)
class NormResult:
    value: Number
    witness: LipschitzWitness
    # transport plan: (source label, target label) -> mass
    plan: dict


def _check_molecule(M: FiniteMetricSpace, x: Molecule) -> None:
    for k in x.coeffs:
        if k not in M:
            raise UnknownLabel(f"molecule mentions unknown point {k!r}", label=k)
    total = x.total()
    if not M.eq(total, 0):
        raise NotAMolecule(f"coefficients sum to {total}, not 0")


def _integer_data(M: FiniteMetricSpace, x: Molecule, pts: list):
    """Scale masses and distances of the support to ints; return scale factors."""
    idx = [M.index(p) for p in pts]
    mass_den = lcm(*(Fraction(x.coeffs[p]).denominator for p in pts))
    dist_den = 1
    for a in idx:
        for b in idx:
            dist_den = lcm(dist_den, M.d[a][b].denominator)
    mass = [int(x.coeffs[p] * mass_den) for p in pts]
    dist = [[int(M.d[a][b] * dist_den) for b in idx] for a in idx]
    return mass, dist, mass_den, dist_den


def _float_data(M: FiniteMetricSpace, x: Molecule, pts: list):
    idx = [M.index(p) for p in pts]
    mass = [float(x.coeffs[p]) for p in pts]
    dist = [[float(M.d[a][b]) for b in idx] for a in idx]
    return mass, dist, 1, 1


def _min_cost_flow(supply: list, demand: list, cost: list, eps: float):
    """Successive shortest paths for an uncapacitated transportation problem.

    ``cost[i][j]`` is the cost from supply node i to demand node j.  Returns the
    flow matrix and node potentials (pi_src, pi_dst) with
    pi_dst[j] - pi_src[i] <= cost[i][j], tight wherever flow is positive.
    """
    ns, nd = len(supply), len(demand)
    flow = [[0] * nd for _ in range(ns)]
    rem_s = list(supply)
    rem_d = list(demand)
    nodes = ns + nd

    def shortest(from_all: bool):
        # Bellman-Ford on the residual graph; sources start at 0.
        dist = [INF] * nodes
        pred = [None] * nodes
        for i in range(ns):
            if from_all or rem_s[i] > eps:
                dist[i] = 0
        if from_all:
            for j in range(nd):
                dist[ns + j] = 0
        for _ in range(nodes):
            changed = False
            for i in range(ns):
                di = dist[i]
                if di == INF:
                    continue
                row = cost[i]
                for j in range(nd):
                    nd_ = di + row[j]
                    if nd_ < dist[ns + j] and not _close(nd_, dist[ns + j], eps):
                        dist[ns + j] = nd_
                        pred[ns + j] = i
                        changed = True
            for j in range(nd):
                dj = dist[ns + j]
                if dj == INF:
                    continue
                for i in range(ns):
                    if flow[i][j] > eps:
                        nd_ = dj - cost[i][j]
                        if nd_ < dist[i] and not _close(nd_, dist[i], eps):
                            dist[i] = nd_
                            pred[i] = ns + j
                            changed = True
            if not changed:
                break
        return dist, pred

    while any(r > eps for r in rem_s):
        dist, pred = shortest(False)
        best = None
        for j in range(nd):
            if rem_d[j] > eps and dist[ns + j] < INF:
                if best is None or dist[ns + j] < dist[ns + best]:
                    best = j
        if best is None:  # pragma: no cover - balanced data always has a path
            raise RuntimeError("transport problem infeasible")
        # walk back to a source with remaining supply
        path = []
        v = ns + best
        while pred[v] is not None:
            path.append((pred[v], v))
            v = pred[v]
        start = v
        amount = min(rem_s[start], rem_d[best])
        for a, b in path:
            if a >= ns:  # residual reverse arc: demand a-ns -> supply b
                amount = min(amount, flow[b][a - ns])
        for a, b in path:
            if a < ns:
                flow[a][b - ns] += amount
            else:
                flow[b][a - ns] -= amount
        rem_s[start] -= amount
        rem_d[best] -= amount
    dist, _ = shortest(True)
    return flow, dist[:ns], dist[ns:]


def _close(a, b, eps) -> bool:
    return eps > 0 and abs(a - b) <= eps


def transport_norm(M: FiniteMetricSpace, x: Molecule) -> NormResult:
    """Norm of x as the optimal transport cost between x+ and x-, with witness."""
    _check_molecule(M, x)
    zero = Fraction(0) if M.exact else 0.0
    if not x:
        return NormResult(zero, LipschitzWitness({p: zero for p in M.points}), {})
    pts = sorted(x.coeffs, key=M.index)
    if M.exact:
        mass, dist, mass_den, dist_den = _integer_data(M, x, pts)
        eps = 0
    else:
        mass, dist, mass_den, dist_den = _float_data(M, x, pts)
        eps = M.tol
    pos = [i for i, m in enumerate(mass) if m > 0]
    neg = [i for i, m in enumerate(mass) if m < 0]
    supply = [mass[i] for i in pos]
    demand = [-mass[j] for j in neg]
    cost = [[dist[i][j] for j in neg] for i in pos]
    flow, pi_s, pi_d = _min_cost_flow(supply, demand, cost, eps)
    total = sum(flow[a][b] * cost[a][b] for a in range(len(pos)) for b in range(len(neg)))
    scale = mass_den * dist_den
    value = Fraction(total, scale) if M.exact else total
    # f = -pi on the support (f(p) - f(q) <= d(p,q) on every residual arc),
    # extended to the whole space by the 1-Lipschitz inf-convolution over x-.
    fneg = [-v for v in pi_d]
    if M.exact:
        fneg = [Fraction(v, dist_den) for v in fneg]
    neg_labels = [pts[j] for j in neg]
    values = {}
    for p in M.points:
        i = M.index(p)
        values[p] = min(M.d[i][M.index(q)] + fq for q, fq in zip(neg_labels, fneg))
    plan = {}
    for a in range(len(pos)):
        for b in range(len(neg)):
            if flow[a][b] > eps:
                amt = Fraction(flow[a][b], mass_den) if M.exact else flow[a][b]
                plan[(pts[pos[a]], pts[neg[b]])] = amt
    return NormResult(value, LipschitzWitness(values), plan)


def free_norm(M: FiniteMetricSpace, x: Molecule) -> Number:
    """Lipschitz-free norm of a molecule (transport route)."""
    return transport_norm(M, x).value


def _simplex_max(A: list, b: list, c: list, eps: float):
    """max c.x s.t. A x <= b, x >= 0, with b >= 0 (origin feasible).

    Dense tableau, Bland's rule.  Exact when given ints/Fractions (division
    only by the pivot element; +-1 pivots keep ints as ints).
    """
    m, n = len(A), len(c)
    # tableau rows: [A | I | b]; objective row: [-c | 0 | 0]
    T = [list(A[i]) + [1 if k == i else 0 for k in range(m)] + [b[i]] for i in range(m)]
    z = [-v for v in c] + [0] * m + [0]
    basis = [n + i for i in range(m)]
    width = n + m
    while True:
        enter = next((j for j in range(width) if z[j] < -eps), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > eps:
                rhs = T[i][-1]
                if a == 1:
                    ratio = rhs
                elif isinstance(a, float) or isinstance(rhs, float):
                    ratio = rhs / a
                else:
                    ratio = Fraction(rhs) / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:  # pragma: no cover - the Lipschitz LP is bounded
            raise RuntimeError("unbounded linear program")
        r = best[1]
        piv = T[r][enter]
        if piv == 1:
            row = T[r]
        elif piv == -1:
            row = [-v for v in T[r]]
        elif isinstance(piv, float):
            row = [v / piv for v in T[r]]
        else:
            row = [Fraction(v) / piv for v in T[r]]
        T[r] = row
        for i in range(m):
            if i != r:
                f = T[i][enter]
                if f:
                    Ti = T[i]
                    T[i] = [u - f * w for u, w in zip(Ti, row)]
        f = z[enter]
        z = [u - f * w for u, w in zip(z, row)]
        basis[r] = enter
    x = [0] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i][-1]
    return z[-1], x


def lipschitz_dual_norm(M: FiniteMetricSpace, x: Molecule) -> tuple[Number, dict]:
    """Norm of x as max f(x) over 1-Lipschitz f, by linear programming.

    Only the support matters (a 1-Lipschitz function on a subset extends to the
    whole space without raising its constant).  With base point b and
    g(p) = f(p) - f(b) + d(p, b) >= 0 the constraints become
    g(p) - g(q) <= d(p,q) + d(p,b) - d(q,b) and g(p) <= 2 d(p,b); every
    right-hand side is nonnegative by the triangle inequality.
    Returns the value and the optimal f on the support (f(b) = 0).
    """
    _check_molecule(M, x)
    zero = Fraction(0) if M.exact else 0.0
    if not x:
        return zero, {}
    pts = sorted(x.coeffs, key=M.index)
    if M.exact:
        mass, dist, mass_den, dist_den = _integer_data(M, x, pts)
        eps = 0
    else:
        mass, dist, mass_den, dist_den = _float_data(M, x, pts)
        eps = M.tol
    k = len(pts)
    var = list(range(1, k))  # base point is pts[0]
    A, b = [], []
    for p in var:
        row = [0] * len(var)
        row[p - 1] = 1
        A.append(row)
        b.append(2 * dist[p][0])
        for q in var:
            if q == p:
                continue
            row = [0] * len(var)
            row[p - 1] = 1
            row[q - 1] = -1
            A.append(row)
            rhs = dist[p][q] + dist[p][0] - dist[q][0]
            b.append(max(rhs, 0) if not M.exact else rhs)
    c = [mass[p] for p in var]
    opt, g = _simplex_max(A, b, c, eps)
    # f(x) = sum mass_p (g_p - d(p,b)) since sum of masses is zero
    shift = sum(mass[p] * dist[p][0] for p in var)
    total = opt - shift
    f = {pts[0]: zero}
    for p in var:
        v = g[p - 1] - dist[p][0]
        f[pts[p]] = Fraction(v, dist_den) if M.exact else v
    value = Fraction(total, mass_den * dist_den) if M.exact else total
    return value, f
