"""Finite metric spaces, molecules and metric (iso)morphisms.

Distances are exact ``Fraction`` values by default.  A space built with a
float tolerance (``tol``) stores floats and compares within that tolerance;
spaces produced by p-sums additionally carry the exact p-th powers of their
distances so that segment membership can still be decided exactly for p = 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

import mpmath

from .errors import (
    AsymmetricMatrix,
    InvalidMetric,
    NegativeDistance,
    SamePoint,
    TriangleViolation,
    UnknownLabel,
    ZeroOffDiagonal,
)

Label = Hashable
Number = Fraction | float

DEFAULT_TOL = 1e-9
# Working precision for certified comparisons of p-th roots (decimal digits).
ROOT_DPS = 60


def to_number(value, tol: float | None = None) -> Number:
    """Parse an int, Fraction, float or ``"p/q"``/decimal string."""
    if tol is None:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, float):
            return Fraction(str(value))
        if isinstance(value, (int, str)):
            return Fraction(value)
        raise InvalidMetric(f"cannot read number {value!r}")
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def format_number(x: Number) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _root_sum_sign(a: Fraction, b: Fraction, c: Fraction, p: Fraction) -> int:
    """Sign of b^(1/p) + c^(1/p) - a^(1/p) for nonnegative rationals."""
    if p == 1:
        t = b + c - a
        return (t > 0) - (t < 0)
    if p == 2:
        t = b + c - a
        if t >= 0:
            return 1 if (t > 0 or b * c > 0) else 0
        s = 4 * b * c - t * t
        return (s > 0) - (s < 0)
    with mpmath.workdps(ROOT_DPS):
        q = mpmath.mpf(p.denominator) / p.numerator
        val = (mpmath.mpf(b.numerator) / b.denominator) ** q + (
            mpmath.mpf(c.numerator) / c.denominator
        ) ** q - (mpmath.mpf(a.numerator) / a.denominator) ** q
        if abs(val) < mpmath.mpf(10) ** (-(ROOT_DPS - 15)):
            return 0
        return 1 if val > 0 else -1


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Labelled finite metric space.  Use :func:`validate_metric` to build one."""

    points: tuple
    d: tuple
    tol: float | None = None
    # (p, matrix of exact d**p) for spaces whose distances are p-th roots
    power: tuple | None = None
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.points)})

    def __len__(self) -> int:
        return len(self.points)

    @property
    def exact(self) -> bool:
        return self.tol is None

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(f"unknown point {label!r}", label=label) from None

    def __contains__(self, label) -> bool:
        return label in self._index

    def dist(self, x: Label, y: Label) -> Number:
        return self.d[self.index(x)][self.index(y)]

    # comparisons honouring the arithmetic mode
    def eq(self, a: Number, b: Number) -> bool:
        if self.tol is None:
            return a == b
        return abs(a - b) <= self.tol * max(1.0, abs(a), abs(b))

    def lt(self, a: Number, b: Number) -> bool:
        return a < b and not self.eq(a, b)

    def le(self, a: Number, b: Number) -> bool:
        return a <= b or self.eq(a, b)

    def triangle_sign(self, i: int, k: int, j: int) -> int:
        """Sign of d(i,k) + d(k,j) - d(i,j), certified where possible."""
        if self.power is not None:
            p, pw = self.power
            return _root_sum_sign(pw[i][j], pw[i][k], pw[k][j], p)
        t = self.d[i][k] + self.d[k][j]
        a = self.d[i][j]
        if self.eq(t, a):
            return 0
        return 1 if t > a else -1

    def pairs(self) -> Iterator[tuple[int, int]]:
        n = len(self.points)
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j

    def diameter(self) -> Number:
        return max((self.d[i][j] for i, j in self.pairs()), default=Fraction(0) if self.exact else 0.0)

    def subspace(self, labels: Iterable[Label]) -> "FiniteMetricSpace":
        idx = sorted(self.index(x) for x in set(labels))
        pts = tuple(self.points[i] for i in idx)
        d = tuple(tuple(self.d[i][j] for j in idx) for i in idx)
        power = None
        if self.power is not None:
            p, pw = self.power
            power = (p, tuple(tuple(pw[i][j] for j in idx) for i in idx))
        return FiniteMetricSpace(pts, d, self.tol, power)

    def relabel(self, mapping: Mapping) -> "FiniteMetricSpace":
        return FiniteMetricSpace(tuple(mapping[p] for p in self.points), self.d, self.tol, self.power)


def validate_metric(
    raw_matrix: Sequence[Sequence],
    labels: Sequence[Label] | None = None,
    tol: float | None = None,
    power: tuple | None = None,
) -> FiniteMetricSpace:
    """Check a distance matrix and wrap it as a :class:`FiniteMetricSpace`.

    Entries may be ints, Fractions, floats or rational strings.  With
    ``tol=None`` everything is converted to exact rationals.
    """
    n = len(raw_matrix)
    if n == 0:
        raise InvalidMetric("a metric space needs at least one point")
    if labels is None:
        labels = list(range(n))
    labels = tuple(labels)
    if len(labels) != n:
        raise InvalidMetric(f"{len(labels)} labels for a {n}x{n} matrix")
    if len(set(labels)) != n:
        raise InvalidMetric("labels must be pairwise distinct")
    if any(len(row) != n for row in raw_matrix):
        raise InvalidMetric("distance matrix is not square")
    d = [[to_number(v, tol) for v in row] for row in raw_matrix]
    space = FiniteMetricSpace(labels, tuple(tuple(r) for r in d), tol, power)
    eq = space.eq
    for i in range(n):
        if not eq(d[i][i], 0):
            raise InvalidMetric(f"nonzero diagonal entry at {i}", index=i)
    for i in range(n):
        for j in range(i + 1, n):
            if not eq(d[i][j], d[j][i]):
                raise AsymmetricMatrix(f"d[{i}][{j}] != d[{j}][{i}]", pair=(i, j))
            if d[i][j] < 0 and not eq(d[i][j], 0):
                raise NegativeDistance(f"negative distance at ({i},{j})", pair=(i, j))
            if eq(d[i][j], 0):
                raise ZeroOffDiagonal(f"zero distance between distinct points {i},{j}", pair=(i, j))
    for i in range(n):
        for k in range(i + 1, n):
            for j in range(n):
                if j == i or j == k:
                    continue
                if space.triangle_sign(i, j, k) < 0:
                    raise TriangleViolation(
                        f"d({i},{k}) > d({i},{j}) + d({j},{k})", triple=(i, j, k)
                    )
    return space


class Molecule:
    """Finitely supported function on points; an element of F0 when it sums to 0."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping | None = None):
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v != 0}

    def __repr__(self) -> str:
        inner = ", ".join(f"{k!r}: {format_number(v)}" for k, v in self.coeffs.items())
        return f"Molecule({{{inner}}})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Molecule) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other: "Molecule") -> "Molecule":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return Molecule(out)

    def __neg__(self) -> "Molecule":
        return Molecule({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "Molecule") -> "Molecule":
        return self + (-other)

    def __mul__(self, c) -> "Molecule":
        return Molecule({k: c * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def support(self) -> list:
        return list(self.coeffs)

    def total(self):
        return sum(self.coeffs.values(), Fraction(0))

    def evaluate(self, f: Mapping) -> Number:
        """f(x) = sum of x(p) f(p)."""
        return sum((v * f[k] for k, v in self.coeffs.items()), Fraction(0))

    def is_close(self, other: "Molecule", tol: float | None) -> bool:
        if tol is None:
            return self == other
        diff = (self - other).coeffs
        return all(abs(v) <= tol for v in diff.values())


@dataclass(frozen=True)
class LipschitzWitness:
    """A 1-Lipschitz function given by its values on every point."""

    values: dict

    def check(self, M: FiniteMetricSpace) -> bool:
        for i, j in M.pairs():
            a, b = M.points[i], M.points[j]
            if not M.le(abs(self.values[a] - self.values[b]), M.d[i][j]):
                return False
        return True


def elementary_molecule(M: FiniteMetricSpace, x: Label, y: Label) -> Molecule:
    """Normalised elementary molecule (chi_x - chi_y) / d(x, y)."""
    i, j = M.index(x), M.index(y)
    if i == j:
        raise SamePoint(f"m_{{x,y}} needs two distinct points, got {x!r} twice")
    dxy = M.d[i][j]
    one = Fraction(1) if M.exact else 1.0
    return Molecule({x: one / dxy, y: -one / dxy})


def delta_difference(x: Label, y: Label, exact: bool = True) -> Molecule:
    one = Fraction(1) if exact else 1.0
    return Molecule({x: one, y: -one})


# --------------------------------------------------------------------------
# isometries and dilations


def _scaled_isomorphisms(M: FiniteMetricSpace, scale: Number, limit: int | None = None) -> list[tuple]:
    """All bijections g with d(g x, g y) = d(x, y) / scale, by backtracking."""
    n = len(M)
    d = M.d
    eq = M.eq
    profiles = [sorted(row) for row in d]
    cand = []
    for i in range(n):
        target = [v / scale for v in profiles[i]]
        cand.append([j for j in range(n) if all(eq(a, b) for a, b in zip(profiles[j], target))])
    img = [-1] * n
    used = [False] * n
    out: list[tuple] = []

    def rec(i: int) -> bool:
        if i == n:
            out.append(tuple(img))
            return limit is not None and len(out) >= limit
        for j in cand[i]:
            if used[j]:
                continue
            if all(eq(d[img[k]][j], d[k][i] / scale) for k in range(i)):
                img[i] = j
                used[j] = True
                if rec(i + 1):
                    return True
                used[j] = False
        img[i] = -1
        return False

    rec(0)
    return out


def compute_isometries(M: FiniteMetricSpace) -> list[dict]:
    """All distance-preserving permutations, as label -> label dicts."""
    one = Fraction(1) if M.exact else 1.0
    perms = _scaled_isomorphisms(M, one)
    return [{M.points[i]: M.points[j] for i, j in enumerate(g)} for g in sorted(perms)]


def compute_dilations(M: FiniteMetricSpace) -> list[tuple[Number, dict]]:
    """All surjective a-dilations of M as (a, map) pairs.

    Every candidate scale a = d(p0, p1) / d(u, v) is searched, so the collapse
    to a = 1 is observed rather than assumed; a bijection permutes the finite
    multiset of distances, hence scaling it by 1/a forces a = 1.
    """
    n = len(M)
    one = Fraction(1) if M.exact else 1.0
    if n == 1:
        return [(one, {M.points[0]: M.points[0]})]
    scales = []
    for i, j in M.pairs():
        a = M.d[0][1] / M.d[i][j]
        if not any(M.eq(a, s) for s in scales):
            scales.append(a)
    total = sum(M.d[i][j] for i, j in M.pairs())
    out = []
    for a in scales:
        for g in _scaled_isomorphisms(M, a):
            image_total = sum(M.d[g[i]][g[j]] for i, j in M.pairs())
            # the multiset argument: sum over pairs is permutation invariant
            assert M.eq(image_total, total) and M.eq(a, one), "dilation with scale != 1"
            out.append((one, {M.points[i]: M.points[k] for i, k in enumerate(g)}))
    out.sort(key=lambda t: tuple(M.index(t[1][p]) for p in M.points))
    return out


def compose_maps(f: Mapping, g: Mapping) -> dict:
    """(f o g)(x) = f(g(x))."""
    return {x: f[g[x]] for x in g}


def invert_map(f: Mapping) -> dict:
    return {v: k for k, v in f.items()}
