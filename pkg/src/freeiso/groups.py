"""Finite group bookkeeping: structure terms and closure of generator sets."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import factorial, prod
from typing import Callable, Hashable, Iterable


class Structure:
    def order(self) -> int:
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError

    def needs_parens(self) -> bool:
        return False

    def _wrapped(self) -> str:
        s = self.render()
        return f"({s})" if self.needs_parens() else s

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class CyclicGroup(Structure):
    n: int = 2

    def order(self) -> int:
        return self.n

    def render(self) -> str:
        return f"Z{self.n}"

    def to_json(self) -> dict:
        return {"type": "CyclicGroup", "n": self.n}


@dataclass(frozen=True)
class SymmetricGroup(Structure):
    n: int

    def order(self) -> int:
        return factorial(self.n)

    def render(self) -> str:
        return f"S_{self.n}"

    def to_json(self) -> dict:
        return {"type": "SymmetricGroup", "n": self.n}


@dataclass(frozen=True)
class AbstractGroup(Structure):
    """A group known only by name and order (e.g. an automorphism group)."""

    name: str
    size: int

    def order(self) -> int:
        return self.size

    def render(self) -> str:
        return f"{self.name}[{self.size}]"

    def to_json(self) -> dict:
        return {"type": "AbstractGroup", "name": self.name, "order": str(self.size)}


@dataclass(frozen=True)
class DirectProduct(Structure):
    factors: tuple

    def order(self) -> int:
        return prod(f.order() for f in self.factors)

    def needs_parens(self) -> bool:
        return len(self.factors) > 1

    def render(self) -> str:
        if not self.factors:
            return "1"
        return " x ".join(f._wrapped() if isinstance(f, (DirectProduct, WreathProduct)) else f.render()
                          for f in self.factors)

    def to_json(self) -> dict:
        return {"type": "DirectProduct", "factors": [f.to_json() for f in self.factors]}


@dataclass(frozen=True)
class WreathProduct(Structure):
    """(prod of inner) extended by ``acting``, which permutes the inner factors."""

    inner: tuple
    acting: Structure

    def order(self) -> int:
        return prod(f.order() for f in self.inner) * self.acting.order()

    def needs_parens(self) -> bool:
        return True

    def render(self) -> str:
        inner = " x ".join(f._wrapped() for f in self.inner) if self.inner else "1"
        if len(self.inner) > 1:
            inner = f"({inner})"
        return f"{inner} wr {self.acting._wrapped()}"

    def to_json(self) -> dict:
        return {
            "type": "WreathProduct",
            "inner": [f.to_json() for f in self.inner],
            "acting": self.acting.to_json(),
        }


def trivial() -> Structure:
    return DirectProduct(())


def simplify(s: Structure) -> Structure:
    """Drop trivial factors and flatten nested direct products."""
    if isinstance(s, DirectProduct):
        flat = []
        for f in s.factors:
            f = simplify(f)
            if isinstance(f, DirectProduct):
                flat.extend(f.factors)
            elif f.order() != 1 or isinstance(f, WreathProduct):
                flat.append(f)
        flat = [f for f in flat if f.order() != 1]
        if len(flat) == 1:
            return flat[0]
        return DirectProduct(tuple(flat))
    if isinstance(s, WreathProduct):
        inner = tuple(simplify(f) for f in s.inner)
        acting = simplify(s.acting)
        if acting.order() == 1:
            return simplify(DirectProduct(inner))
        return WreathProduct(inner, acting)
    return s


def closure(
    generators: Iterable,
    compose: Callable,
    identity,
    key: Callable[[object], Hashable] = lambda g: g,
    cap: int = 10**6,
) -> list | None:
    """All products of the generators (BFS); None if more than ``cap`` elements."""
    gens = list(generators)
    seen = {key(identity): identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = compose(s, g)
            k = key(h)
            if k not in seen:
                seen[k] = h
                if len(seen) > cap:
                    return None
                queue.append(h)
    return list(seen.values())


def closure_order(generators, compose, identity, key=lambda g: g, cap: int = 10**6) -> int | None:
    elems = closure(generators, compose, identity, key, cap)
    return None if elems is None else len(elems)


def greedy_generators(elements: Iterable, compose: Callable, identity, key=lambda g: g) -> list:
    """A small generating set for the group formed by ``elements``."""
    gens: list = []
    span = {key(identity)}
    for g in elements:
        if key(g) in span:
            continue
        gens.append(g)
        span = {key(h) for h in closure(gens, compose, identity, key)}
    return gens


def perm_compose(a: tuple, b: tuple) -> tuple:
    """(a o b)[i] = a[b[i]] for permutations as tuples."""
    return tuple(a[i] for i in b)


@dataclass
class GroupDescription:
    order: int
    generators: list
    structure: Structure
    closure_order: int | None = None
    notes: dict = field(default_factory=dict)

    def to_json(self, edge_graph=None) -> dict:
        out = {
            "order": str(self.order),
            "structure": self.structure.render(),
            "structure_tree": self.structure.to_json(),
            "closure_order": None if self.closure_order is None else str(self.closure_order),
        }
        if edge_graph is not None:
            out["generators"] = [g.to_json(edge_graph)["sigma"] for g in self.generators]
        out.update(self.notes)
        return out
