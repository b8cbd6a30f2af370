"""Important balanced subgraphs: domination, enumeration, edge cleaning.

A rooted connected balanced subgraph ``H`` is carved out of the host
graph at cost ``w(E(G[V(H)]) \\ E(H)) + w(delta(V(H)))`` -- the weight
of its *deleted edges*.  ``H'`` dominates ``H`` when ``V(H)`` is a
subset of ``V(H')`` at no larger cost.  ``dominating_family`` computes,
for a budget ``k``, at most ``4^k`` subgraphs that dominate every
rooted connected balanced subgraph of cost at most ``k``, by branching
on the half-integral edges of the extremal relaxation optimum.

``rbgce_solve`` answers the rooted cleaning question itself: a
minimum-weight edge set (within budget) whose removal makes the root's
component balanced.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .biased import (
    BiasedGraphView, HalfIntegralSolution, component_is_balanced,
    extremal_lp_optimum, find_unbalanced_cycle,
)
from .graphs import Vertex
from .stats import SolveStats


@dataclass(frozen=True)
class BalancedSubgraph:
    vertices: FrozenSet[Vertex]
    edges: FrozenSet[int]
    deleted: FrozenSet[int]
    cost: int


@dataclass(frozen=True)
class DominatingFamily:
    members: Tuple[BalancedSubgraph, ...]
    budget: int


def subgraph_cost(view: BiasedGraphView, vertices: FrozenSet[Vertex],
                  edges: FrozenSet[int]) -> int:
    """Carving cost: induced edges left out of H plus the boundary."""
    graph = view.graph
    vs = set(vertices)
    induced = set(graph.induced_edge_ids(vs))
    if not set(edges) <= induced:
        raise ValueError("subgraph edges must be spanned by its vertices")
    deleted = (induced - set(edges)) | set(graph.boundary_edge_ids(vs))
    return graph.weight(deleted)


def deleted_edges(view: BiasedGraphView, vertices: FrozenSet[Vertex],
                  edges: FrozenSet[int]) -> FrozenSet[int]:
    graph = view.graph
    vs = set(vertices)
    induced = set(graph.induced_edge_ids(vs))
    return frozenset((induced - set(edges)) | set(graph.boundary_edge_ids(vs)))


def make_subgraph(view: BiasedGraphView, vertices, edges) -> BalancedSubgraph:
    vertices = frozenset(vertices)
    edges = frozenset(edges)
    dele = deleted_edges(view, vertices, edges)
    return BalancedSubgraph(vertices, edges, dele, view.graph.weight(dele))


def dominates(view: BiasedGraphView, h1: BalancedSubgraph,
              h2: BalancedSubgraph) -> bool:
    """True iff h1 dominates h2: V(h2) within V(h1) at no larger cost."""
    return h2.vertices <= h1.vertices and h2.cost >= h1.cost


def strictly_dominates(view: BiasedGraphView, h1: BalancedSubgraph,
                       h2: BalancedSubgraph) -> bool:
    return dominates(view, h1, h2) and (
        h2.vertices < h1.vertices or h2.cost > h1.cost)


def dominating_family(view: BiasedGraphView, root: Vertex, k: int,
                      stats: Optional[SolveStats] = None) -> DominatingFamily:
    """Family of at most 4^k important balanced subgraphs rooted at `root`.

    Every connected balanced subgraph containing the root of cost at
    most ``k`` is dominated by some member.  Branching states carry a
    committed-undeletable edge set (whose weight is raised beyond any
    optimum) and a committed-deleted edge set; each node solves the
    relaxation, aborts over-budget branches, emits the surviving root
    component when the optimum is integral, and otherwise branches on
    the smallest half-integral edge.
    """
    graph = view.graph
    members: List[BalancedSubgraph] = []
    seen: Set[Tuple[FrozenSet[Vertex], FrozenSet[int]]] = set()

    def emit(vr: FrozenSet[Vertex], e1: FrozenSet[int], x1: FrozenSet[int]):
        induced_full = set(graph.induced_edge_ids(set(vr)))
        gb_edges = frozenset(induced_full - set(e1) - set(x1))
        dele = frozenset((induced_full - gb_edges) |
                         set(graph.boundary_edge_ids(set(vr))))
        cost = graph.weight(dele)
        if cost > k:
            raise AssertionError("emitted subgraph exceeds the budget")
        key = (vr, dele)
        if key not in seen:
            seen.add(key)
            members.append(BalancedSubgraph(vr, gb_edges, dele, cost))

    def branch(e0: FrozenSet[int], e1: FrozenSet[int]):
        if stats is not None:
            stats.family_nodes += 1
        w_e1 = graph.weight(e1)
        cap = Fraction(k - w_e1)
        if cap < 0:
            return
        override = {eid: 2 * k + 1 for eid in e0}
        lp = extremal_lp_optimum(view, root, removed=e1,
                                 weight_override=override, cap=cap,
                                 stats=stats)
        if lp is None:
            return
        if not lp.Xhalf:
            emit(lp.VR, e1, lp.X1)
            return
        gb_edges = frozenset(
            eid for eid in graph.induced_edge_ids(set(lp.VR))
            if eid not in e1 and eid not in lp.support)
        e0_next = e0 | gb_edges
        e1_next = e1 | lp.X1
        e = min(lp.Xhalf)
        branch(e0_next | {e}, e1_next)
        branch(e0_next, e1_next | {e})

    branch(frozenset(), frozenset())
    if len(members) > 4 ** k:
        raise AssertionError("family exceeds the 4^k bound")
    if stats is not None:
        stats.family_size = len(members)
    return DominatingFamily(tuple(members), k)


def rbgce_solve(view: BiasedGraphView, root: Vertex, k: int,
                stats: Optional[SolveStats] = None) -> Optional[FrozenSet[int]]:
    """Minimum-weight edge set of weight <= k cleaning the root component.

    Branch and bound over the relaxation: the optimum value lower-bounds
    the remaining integral cost, so branches whose committed weight plus
    relaxation value exceed the incumbent (or the budget) are pruned.
    """
    graph = view.graph
    best: List[Optional[Tuple[int, FrozenSet[int]]]] = [None]

    def rec(deleted: FrozenSet[int], protected: FrozenSet[int]):
        if stats is not None:
            stats.cut_nodes += 1
        w_del = graph.weight(deleted)
        limit = Fraction(k - w_del)
        if best[0] is not None:
            limit = min(limit, Fraction(best[0][0] - w_del))
        if limit < 0:
            return
        override = {eid: 2 * k + 1 for eid in protected}
        lp = extremal_lp_optimum(view, root, removed=deleted,
                                 weight_override=override, cap=limit,
                                 stats=stats)
        if lp is None:
            return
        if best[0] is not None and w_del + lp.value >= best[0][0]:
            return
        if not lp.Xhalf:
            sol = frozenset(deleted | lp.X1)
            weight = graph.weight(sol)
            if weight <= k and (best[0] is None or weight < best[0][0]):
                if find_unbalanced_cycle(view, root, sol) is not None:
                    raise AssertionError("integral optimum fails to clean")
                best[0] = (weight, sol)
            return
        e = min(lp.Xhalf)
        rec(deleted, protected | {e})
        rec(deleted | {e}, protected)

    rec(frozenset(), frozenset())
    return best[0][1] if best[0] is not None else None


def brute_dominating_check(view: BiasedGraphView, root: Vertex, k: int,
                           family: DominatingFamily
                           ) -> Optional[BalancedSubgraph]:
    """Exhaustively search for a rooted balanced subgraph of cost <= k
    not dominated by any family member; None certifies domination.

    Desk-scale only: enumerates connected vertex sets around the root
    and, per set, all deletion subsets of the induced edges.
    """
    graph = view.graph
    comp = graph.component_of(root)

    def min_cost_on(verts: FrozenSet[Vertex]) -> Optional[Tuple[int, FrozenSet[int]]]:
        vs = set(verts)
        induced = graph.induced_edge_ids(vs)
        boundary = frozenset(graph.boundary_edge_ids(vs))
        base = graph.weight(boundary)
        best: Optional[Tuple[int, FrozenSet[int]]] = None
        start = min(vs, key=repr)
        n = len(induced)
        for mask in range(1 << n):
            removal = frozenset(induced[i] for i in range(n) if mask >> i & 1)
            cost = base + graph.weight(removal)
            if best is not None and cost >= best[0]:
                continue
            if not graph.connected_on(vs, removal | boundary):
                continue
            if find_unbalanced_cycle(view, start, removal | boundary) is not None:
                continue
            best = (cost, frozenset(set(induced) - removal))
        return best

    # enumerate connected subsets containing the root
    stack = [(frozenset({root}), tuple(sorted(
        {graph.edges[e].other(root) for e in graph.adj[root]}, key=repr)),
        frozenset())]
    while stack:
        included, frontier, banned = stack.pop()
        if not frontier:
            got = min_cost_on(included)
            if got is None:
                continue
            cost, edges = got
            if cost > k:
                continue
            dominated = any(included <= m.vertices and cost >= m.cost
                            for m in family.members)
            if not dominated:
                return BalancedSubgraph(included, edges,
                                        deleted_edges(view, included, edges),
                                        cost)
            continue
        v, rest = frontier[0], frontier[1:]
        stack.append((included, rest, banned | {v}))
        new_front = list(rest)
        seen_front = set(rest)
        for eid in graph.adj[v]:
            w = graph.edges[eid].other(v)
            if w not in included and w != v and w not in banned and w not in seen_front:
                seen_front.add(w)
                new_front.append(w)
        stack.append((included | {v}, tuple(new_front), banned))
    return None
