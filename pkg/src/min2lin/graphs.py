"""Small weighted multigraph and abelian-group utilities.

Shared by the biased-graph machinery and the cut solvers.  Edges carry
stable integer ids; parallel edges are first-class citizens because
parallel equations appear naturally in equation systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

Vertex = Hashable


@dataclass(frozen=True)
class Edge:
    eid: int
    u: Vertex
    v: Vertex
    weight: int = 1

    def other(self, x: Vertex) -> Vertex:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise ValueError(f"{x} not an endpoint of edge {self.eid}")


class MultiGraph:
    """Undirected weighted multigraph with stable edge ids."""

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Edge]):
        self.vertices: Tuple[Vertex, ...] = tuple(dict.fromkeys(vertices))
        self.edges: Dict[int, Edge] = {}
        adj: Dict[Vertex, List[int]] = {v: [] for v in self.vertices}
        for e in edges:
            if e.eid in self.edges:
                raise ValueError(f"duplicate edge id {e.eid}")
            if e.u not in adj or e.v not in adj:
                raise ValueError(f"edge {e.eid} uses unknown vertex")
            if e.u == e.v:
                raise ValueError(f"self-loop edge {e.eid} not supported")
            self.edges[e.eid] = e
            adj[e.u].append(e.eid)
            adj[e.v].append(e.eid)
        self.adj: Dict[Vertex, Tuple[int, ...]] = {v: tuple(ids) for v, ids in adj.items()}

    def weight(self, eids: Iterable[int]) -> int:
        return sum(self.edges[i].weight for i in eids)

    def component_of(self, start: Vertex, removed: FrozenSet[int] = frozenset()) -> Set[Vertex]:
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for eid in self.adj[x]:
                if eid in removed:
                    continue
                y = self.edges[eid].other(x)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def induced_edge_ids(self, verts: Set[Vertex]) -> List[int]:
        return sorted(eid for eid, e in self.edges.items()
                      if e.u in verts and e.v in verts)

    def boundary_edge_ids(self, verts: Set[Vertex]) -> List[int]:
        return sorted(eid for eid, e in self.edges.items()
                      if (e.u in verts) != (e.v in verts))

    def connected_on(self, verts: Sequence[Vertex], removed: FrozenSet[int] = frozenset()) -> bool:
        """Is the subgraph induced by `verts` (minus removed edges) connected?"""
        vs = set(verts)
        if not vs:
            return True
        start = next(iter(vs))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for eid in self.adj[x]:
                if eid in removed:
                    continue
                e = self.edges[eid]
                y = e.other(x)
                if y in vs and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen == vs


class AbelianGroup:
    """Abstract abelian group used for edge labels."""

    def identity(self):
        raise NotImplementedError

    def op(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError


class MultiplicativeRationals(AbelianGroup):
    """Nonzero rationals under multiplication (labels for Z and Q systems)."""

    def identity(self):
        return Fraction(1)

    def op(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / a


class MultiplicativeFp(AbelianGroup):
    """Nonzero residues mod a prime, under multiplication."""

    def __init__(self, p: int):
        self.p = p

    def identity(self):
        return 1

    def op(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        return pow(a, self.p - 2, self.p)


class AdditiveIntegersMod(AbelianGroup):
    """Z_n under addition; n=2 yields the even-cycle bias."""

    def __init__(self, n: int):
        self.n = n

    def identity(self):
        return 0

    def op(self, a, b):
        return (a + b) % self.n

    def inv(self, a):
        return (-a) % self.n
