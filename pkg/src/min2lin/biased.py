"""Biased graphs and the half-integral relaxation of rooted cleaning.

A biased graph is a weighted multigraph plus a *linear* class of
balanced cycles: in every theta subgraph the number of balanced cycles
among the three is never exactly two.  Three balance mechanisms are
supported and may be combined:

* an abelian group labelling (a cycle is balanced iff its oriented
  label product is the identity);
* a flagged vertex whose cycles are all unbalanced (used for rooted
  constructions where a fresh root is attached by spoke edges);
* a raw membership oracle on cycle edge sets (fallback for custom
  classes).

``extremal_lp_optimum`` computes an exact optimum of the edge-deletion
relaxation whose constraints say every unbalanced cycle reachable from
the root, together with its connecting path, carries total value at
least one.  Optima are half-integral with a rigid shape: value-1 edges
are deleted inside the root's surviving vertex set ``V_R``, value-1/2
edges are exactly the boundary of ``V_R``.  The solver searches that
structured space directly (connected vertex sets around the root, with
a minimum balanced-deletion branching inside, memoized), contracting
chains of degree-2 vertices first so that subdivided instances stay
small.  Among optima it returns one whose ``V_R`` has maximum
cardinality, breaking remaining ties lexicographically, so results are
deterministic and the returned optimum is extremal (no optimum has a
strictly larger reachable set).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .graphs import AbelianGroup, MultiGraph, Vertex


@dataclass
class BiasedGraphView:
    """Weighted multigraph together with its balanced-cycle class."""

    graph: MultiGraph
    group: Optional[AbelianGroup] = None
    labels: Optional[Dict[int, object]] = None  # eid -> label oriented u->v
    flagged_vertex: Optional[Vertex] = None
    oracle: Optional[Callable[[FrozenSet[int]], bool]] = None

    def __post_init__(self):
        if (self.group is None) != (self.labels is None):
            raise ValueError("group and labels must be given together")
        if self.labels is not None:
            missing = set(self.graph.edges) - set(self.labels)
            if missing:
                raise ValueError(f"edges without labels: {sorted(missing)}")

    def _cycle_order(self, eids: Sequence[int]) -> List[Tuple[int, Vertex, Vertex]]:
        """Arrange cycle edges into a closed walk [(eid, from, to), ...]."""
        edges = [self.graph.edges[i] for i in eids]
        if len(edges) < 2:
            raise ValueError("a cycle needs at least two edges")
        incident: Dict[Vertex, List[int]] = {}
        for idx, e in enumerate(edges):
            incident.setdefault(e.u, []).append(idx)
            incident.setdefault(e.v, []).append(idx)
        if any(len(ids) != 2 for ids in incident.values()):
            raise ValueError("edge set is not a simple cycle")
        walk = []
        start = edges[0].u
        cur, prev_idx = start, None
        while True:
            nxt_idx = next(i for i in incident[cur] if i != prev_idx)
            e = edges[nxt_idx]
            nxt = e.other(cur)
            walk.append((e.eid, cur, nxt))
            cur, prev_idx = nxt, nxt_idx
            if cur == start:
                break
        if len(walk) != len(edges):
            raise ValueError("edge set is not a single simple cycle")
        return walk

    def is_balanced_cycle(self, eids: Sequence[int]) -> bool:
        walk = self._cycle_order(list(eids))
        if self.flagged_vertex is not None:
            if any(frm == self.flagged_vertex for _, frm, _ in walk):
                return False
        if self.labels is not None:
            acc = self.group.identity()
            for eid, frm, _to in walk:
                lab = self.labels[eid]
                if frm == self.graph.edges[eid].v:
                    lab = self.group.inv(lab)
                acc = self.group.op(acc, lab)
            return acc == self.group.identity()
        if self.oracle is not None:
            return bool(self.oracle(frozenset(eids)))
        return True


@dataclass(frozen=True)
class HalfIntegralSolution:
    """Extremal half-integral optimum of the rooted edge-deletion LP."""

    X1: FrozenSet[int]
    Xhalf: FrozenSet[int]
    VR: FrozenSet[Vertex]
    value: Fraction

    @property
    def support(self) -> FrozenSet[int]:
        return self.X1 | self.Xhalf


# ---------------------------------------------------------------------------
# unbalanced-cycle detection

def _tree_path_edges(parent, x: Vertex, y: Vertex) -> List[int]:
    def chain(v):
        out = [v]
        while out[-1] in parent:
            out.append(parent[out[-1]][0])
        return out

    cx = chain(x)
    cy = set(chain(y))
    meet = next(v for v in cx if v in cy)
    left = []
    v = x
    while v != meet:
        p, eid = parent[v]
        left.append(eid)
        v = p
    right = []
    v = y
    while v != meet:
        p, eid = parent[v]
        right.append(eid)
        v = p
    return left + list(reversed(right))


def find_unbalanced_cycle(view: BiasedGraphView, vertex: Vertex,
                          removed: FrozenSet[int] = frozenset()) -> Optional[List[int]]:
    """A simple unbalanced cycle in the component of `vertex`, or None.

    Fundamental cycles of a spanning tree are checked one at a time;
    for a linear balanced-cycle class the component is balanced exactly
    when all fundamental cycles are balanced, so a ``None`` answer
    certifies balance.
    """
    graph = view.graph
    parent: Dict[Vertex, Tuple[Vertex, int]] = {}
    seen = {vertex}
    order = [vertex]
    nontree: List[int] = []
    used: Set[int] = set()
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for eid in sorted(graph.adj[x]):
            if eid in removed or eid in used:
                continue
            e = graph.edges[eid]
            y = e.other(x)
            used.add(eid)
            if y in seen:
                nontree.append(eid)
            else:
                seen.add(y)
                parent[y] = (x, eid)
                order.append(y)
    for eid in sorted(nontree):
        e = graph.edges[eid]
        cyc = _tree_path_edges(parent, e.u, e.v) + [eid]
        if not view.is_balanced_cycle(cyc):
            return cyc
    return None


def component_is_balanced(view: BiasedGraphView, vertex: Vertex,
                          removed: FrozenSet[int] = frozenset()) -> bool:
    return find_unbalanced_cycle(view, vertex, removed) is None


# ---------------------------------------------------------------------------
# degree-2 chain contraction

@dataclass
class _PEdge:
    pid: int
    u: Vertex
    v: Vertex
    weight: int  # min effective weight over members
    members: Tuple[Tuple[int, bool], ...]  # (eid, reversed?) ordered u -> v

    def other(self, x):
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise ValueError(f"{x} not an endpoint")


class _Work:
    """Contracted working graph for the relaxation search."""

    def __init__(self, view: BiasedGraphView, root: Vertex,
                 removed: FrozenSet[int], weight_override: Dict[int, int]):
        self.view = view
        self.root = root
        graph = view.graph
        comp = graph.component_of(root, removed)
        self.full_component = frozenset(comp)
        self.member_weight: Dict[int, int] = {}

        pedges: Dict[int, _PEdge] = {}
        for eid in sorted(graph.edges):
            e = graph.edges[eid]
            if eid in removed or e.u not in comp:
                continue
            w = weight_override.get(eid, e.weight)
            self.member_weight[eid] = w
            pedges[eid] = _PEdge(eid, e.u, e.v, w, ((eid, False),))

        protected = {root}
        if view.flagged_vertex is not None:
            protected.add(view.flagged_vertex)

        adj: Dict[Vertex, List[int]] = {v: [] for v in comp}
        for p in pedges.values():
            adj[p.u].append(p.pid)
            adj[p.v].append(p.pid)

        changed = True
        while changed:
            changed = False
            for v in sorted(adj, key=repr):
                ids = adj[v]
                if v in protected or len(ids) != 2 or ids[0] == ids[1]:
                    continue
                p1, p2 = pedges[min(ids)], pedges[max(ids)]
                a, b = p1.other(v), p2.other(v)
                if a == b:
                    continue  # contraction would create a self-loop
                m1 = p1.members if p1.v == v else tuple(
                    (eid, not r) for eid, r in reversed(p1.members))
                m2 = p2.members if p2.u == v else tuple(
                    (eid, not r) for eid, r in reversed(p2.members))
                new = _PEdge(min(p1.pid, p2.pid), a, b,
                             min(p1.weight, p2.weight), m1 + m2)
                del pedges[p1.pid]
                del pedges[p2.pid]
                pedges[new.pid] = new
                adj[a] = [i for i in adj[a] if i not in (p1.pid, p2.pid)] + [new.pid]
                adj[b] = [i for i in adj[b] if i not in (p1.pid, p2.pid)] + [new.pid]
                del adj[v]
                changed = True
                break

        self.pedges = pedges
        self.vertices: Tuple[Vertex, ...] = tuple(sorted(adj.keys(), key=repr))
        self.adj: Dict[Vertex, Tuple[int, ...]] = {
            v: tuple(sorted(adj[v])) for v in self.vertices}
        self.interior: Dict[int, Tuple[Vertex, ...]] = {}
        for p in pedges.values():
            verts = []
            cur = p.u
            for eid, _rev in p.members[:-1]:
                cur = view.graph.edges[eid].other(cur)
                verts.append(cur)
            self.interior[p.pid] = tuple(verts)

    def induced_pids(self, verts: FrozenSet[Vertex]) -> List[int]:
        return sorted(pid for pid, p in self.pedges.items()
                      if p.u in verts and p.v in verts)

    def boundary_pids(self, verts: FrozenSet[Vertex]) -> List[int]:
        return sorted(pid for pid, p in self.pedges.items()
                      if (p.u in verts) != (p.v in verts))

    def connected_spanning(self, verts: FrozenSet[Vertex],
                           removed_pids: FrozenSet[int]) -> bool:
        if not verts:
            return True
        start = min(verts, key=repr)
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for pid in self.adj[x]:
                if pid in removed_pids:
                    continue
                y = self.pedges[pid].other(x)
                if y in verts and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen == verts

    def expand_cycle(self, pids: Sequence[int]) -> List[int]:
        out: List[int] = []
        for pid in pids:
            out.extend(eid for eid, _ in self.pedges[pid].members)
        return out

    def find_unbalanced(self, verts: FrozenSet[Vertex],
                        removed_pids: FrozenSet[int]) -> Optional[List[int]]:
        """Unbalanced cycle (as contracted edge ids) inside `verts`."""
        parent: Dict[Vertex, Tuple[Vertex, int]] = {}
        seen: Set[Vertex] = set()
        nontree: List[int] = []
        used: Set[int] = set()
        for start in sorted(verts, key=repr):
            if start in seen:
                continue
            seen.add(start)
            order = [start]
            i = 0
            while i < len(order):
                x = order[i]
                i += 1
                for pid in self.adj[x]:
                    if pid in removed_pids or pid in used:
                        continue
                    p = self.pedges[pid]
                    y = p.other(x)
                    if y not in verts:
                        continue
                    used.add(pid)
                    if y in seen:
                        nontree.append(pid)
                    else:
                        seen.add(y)
                        parent[y] = (x, pid)
                        order.append(y)
        for pid in sorted(nontree):
            p = self.pedges[pid]
            cyc_pids = _tree_path_edges(parent, p.u, p.v) + [pid]
            if not self.view.is_balanced_cycle(self.expand_cycle(cyc_pids)):
                return cyc_pids
        return None


# ---------------------------------------------------------------------------
# the relaxation solver

def extremal_lp_optimum(view: BiasedGraphView, root: Vertex,
                        removed: FrozenSet[int] = frozenset(),
                        weight_override: Optional[Dict[int, int]] = None,
                        cap: Optional[Fraction] = None,
                        stats=None) -> Optional[HalfIntegralSolution]:
    """Exact extremal optimum of the rooted edge-deletion relaxation.

    When `cap` is given and the optimum value exceeds it, None is
    returned (callers abort such branches and never need the value).
    """
    if root not in view.graph.adj:
        raise KeyError(f"root {root!r} not in graph")
    work = _Work(view, root, removed, dict(weight_override or {}))
    if stats is not None:
        stats.lp_calls += 1

    all_work_verts = frozenset(work.vertices)
    if work.find_unbalanced(all_work_verts, frozenset()) is None:
        return HalfIntegralSolution(frozenset(), frozenset(),
                                    work.full_component, Fraction(0))

    minbal_memo: Dict[FrozenSet[Vertex], Optional[Tuple[int, FrozenSet[int]]]] = {}

    def minbal(verts: FrozenSet[Vertex]) -> Optional[Tuple[int, FrozenSet[int]]]:
        """Cheapest contracted-edge deletion that leaves the subgraph on
        `verts` connected, spanning and balanced; None when impossible."""
        if verts in minbal_memo:
            return minbal_memo[verts]
        result: List[Optional[Tuple[int, FrozenSet[int]]]] = [None]
        if work.connected_spanning(verts, frozenset()):
            visited: Set[FrozenSet[int]] = set()

            def rec(removed_pids: FrozenSet[int], acc: int):
                if result[0] is not None and acc >= result[0][0]:
                    return
                if removed_pids in visited:
                    return
                visited.add(removed_pids)
                cyc = work.find_unbalanced(verts, removed_pids)
                if cyc is None:
                    result[0] = (acc, removed_pids)
                    return
                for pid in sorted(set(cyc)):
                    if work.connected_spanning(verts, removed_pids | {pid}):
                        rec(removed_pids | {pid}, acc + work.pedges[pid].weight)

            rec(frozenset(), 0)
        minbal_memo[verts] = result[0]
        return result[0]

    Best = Tuple[Fraction, FrozenSet[Vertex], FrozenSet[int], FrozenSet[int]]
    best: List[Optional[Best]] = [None]

    def bound(lb: Fraction) -> bool:
        if cap is not None and lb > cap:
            return False
        if best[0] is not None and lb > best[0][0]:
            return False
        return True

    def consider(included: FrozenSet[Vertex]):
        bd = work.boundary_pids(included)
        half = Fraction(sum(work.pedges[p].weight for p in bd), 2)
        if not bound(half):
            return
        inner = minbal(included)
        if inner is None:
            return
        value = half + inner[0]
        if not bound(value):
            return
        expanded = _expand_solution(work, included, inner[1], frozenset(bd))
        cand = (value, expanded.VR, expanded.X1, expanded.Xhalf)
        cur = best[0]
        if cur is None or cand[0] < cur[0] or (
                cand[0] == cur[0] and (
                    len(cand[1]) > len(cur[1]) or
                    (len(cand[1]) == len(cur[1]) and
                     sorted(map(repr, cand[1])) < sorted(map(repr, cur[1]))))):
            best[0] = cand

    def rec(included: FrozenSet[Vertex], frontier: Tuple[Vertex, ...],
            banned: FrozenSet[Vertex], cut_lb: Fraction):
        if not bound(cut_lb):
            return
        if stats is not None:
            stats.lp_nodes += 1
        if not frontier:
            consider(included)
            return
        v, rest = frontier[0], frontier[1:]
        extra = Fraction(sum(
            work.pedges[p].weight for p in work.adj[v]
            if work.pedges[p].other(v) in included), 2)
        rec(included, rest, banned | {v}, cut_lb + extra)
        new_front = list(rest)
        seen_front = set(rest)
        for pid in work.adj[v]:
            w = work.pedges[pid].other(v)
            if w not in included and w != v and w not in banned and w not in seen_front:
                seen_front.add(w)
                new_front.append(w)
        rec(included | {v}, tuple(new_front), banned, cut_lb)

    init_frontier = tuple(sorted(
        {work.pedges[p].other(root) for p in work.adj[root]}, key=repr))
    rec(frozenset({root}), init_frontier, frozenset(), Fraction(0))

    if best[0] is None:
        return None
    value, vr, x1, xhalf = best[0]
    if cap is not None and value > cap:
        return None
    return HalfIntegralSolution(x1, xhalf, vr, value)


def _expand_solution(work: _Work, included: FrozenSet[Vertex],
                     deleted_inside: FrozenSet[int],
                     boundary: FrozenSet[int]) -> HalfIntegralSolution:
    """Translate a contracted structure back to real edges and vertices.

    Cutting a contracted chain picks a member of minimum effective
    weight; ties go to the member farthest from the surviving side so
    that the expanded ``V_R`` is as large as possible (extremality).
    """
    vr: Set[Vertex] = set(included)
    x1: Set[int] = set()
    xhalf: Set[int] = set()
    for pid in sorted(work.pedges):
        p = work.pedges[pid]
        inside = p.u in included and p.v in included
        weights = [work.member_weight[eid] for eid, _ in p.members]
        wmin = min(weights)
        if pid in deleted_inside:
            idx = min(i for i, w in enumerate(weights) if w == wmin)
            x1.add(p.members[idx][0])
            vr.update(work.interior[pid])
        elif pid in boundary:
            if p.u in included:
                idx = max(i for i, w in enumerate(weights) if w == wmin)
                vr.update(work.interior[pid][:idx])
            else:
                idx = min(i for i, w in enumerate(weights) if w == wmin)
                vr.update(work.interior[pid][idx:])
            xhalf.add(p.members[idx][0])
        elif inside:
            vr.update(work.interior[pid])
    value = Fraction(sum(work.member_weight[e] for e in x1)) + \
        Fraction(sum(work.member_weight[e] for e in xhalf), 2)
    return HalfIntegralSolution(frozenset(x1), frozenset(xhalf),
                                frozenset(vr), value)


# ---------------------------------------------------------------------------
# feasibility checking (validation harness)

def lp_value_lower_bound_check(view: BiasedGraphView, root: Vertex,
                               candidate: HalfIntegralSolution,
                               removed: FrozenSet[int] = frozenset()) -> bool:
    """Validate a half-integral solution: canonical shape + feasibility.

    Shape: ``Xhalf`` is exactly the boundary of ``V_R``, ``X1`` lies
    inside ``V_R``, and the root's component after removing the support
    is balanced, connected and spans ``V_R``.  Feasibility: no
    unbalanced cycle reachable from the root can be decomposed into two
    root-paths of total value below one; checked by exhaustive simple
    cycle enumeration, so intended for desk-scale graphs only.
    """
    graph = view.graph
    if root not in candidate.VR:
        return False
    vr = set(candidate.VR)
    if set(candidate.Xhalf) != set(graph.boundary_edge_ids(vr)) - set(removed):
        return False
    inside = set(graph.induced_edge_ids(vr)) - set(removed)
    if not set(candidate.X1) <= inside:
        return False
    supp = set(candidate.support) | set(removed)
    comp = graph.component_of(root, frozenset(supp))
    if comp != vr:
        return False
    if find_unbalanced_cycle(view, root, frozenset(supp)) is not None:
        return False
    if candidate.value != Fraction(graph.weight(candidate.X1)) + \
            Fraction(graph.weight(candidate.Xhalf), 2):
        return False

    xval: Dict[int, Fraction] = {}
    for eid in graph.edges:
        if eid in candidate.X1:
            xval[eid] = Fraction(1)
        elif eid in candidate.Xhalf:
            xval[eid] = Fraction(1, 2)
        else:
            xval[eid] = Fraction(0)
    comp_all = graph.component_of(root, frozenset(removed))
    for cyc in _enumerate_simple_cycles(graph, comp_all, frozenset(removed)):
        if view.is_balanced_cycle(cyc):
            continue
        c_val = sum(xval[e] for e in cyc)
        cyc_verts: Set[Vertex] = set()
        for e in cyc:
            cyc_verts.add(graph.edges[e].u)
            cyc_verts.add(graph.edges[e].v)
        for v in sorted(cyc_verts, key=repr):
            d = _dijkstra_avoiding(graph, root, v, cyc_verts - {v}, xval,
                                   frozenset(removed))
            if d is not None and 2 * d + c_val < 1:
                return False
    return True


def _enumerate_simple_cycles(graph: MultiGraph, verts: Set[Vertex],
                             removed: FrozenSet[int]) -> Iterable[List[int]]:
    """All simple cycles (edge-id lists) in the induced subgraph."""
    order = {v: i for i, v in enumerate(sorted(verts, key=repr))}
    found: List[List[int]] = []

    def dfs(start, cur, path_edges, path_verts):
        for eid in sorted(graph.adj[cur]):
            if eid in removed or (path_edges and eid in path_edges):
                continue
            e = graph.edges[eid]
            y = e.other(cur)
            if y not in verts:
                continue
            if y == start and path_edges:
                found.append(path_edges + [eid])
                continue
            if y in path_verts or order[y] < order[start]:
                continue
            dfs(start, y, path_edges + [eid], path_verts | {y})

    for start in sorted(verts, key=lambda v: order[v]):
        dfs(start, start, [], {start})
    seen = set()
    for cyc in found:
        key = frozenset(cyc)
        if key not in seen and len(key) == len(cyc) and len(cyc) >= 2:
            seen.add(key)
            yield cyc


def _dijkstra_avoiding(graph: MultiGraph, src: Vertex, dst: Vertex,
                       avoid: Set[Vertex], xval: Dict[int, Fraction],
                       removed: FrozenSet[int]) -> Optional[Fraction]:
    if src in avoid:
        return None
    dist: Dict[Vertex, Fraction] = {src: Fraction(0)}
    heap: List[Tuple[Fraction, int, Vertex]] = [(Fraction(0), 0, src)]
    tie = 1
    while heap:
        d, _, x = heapq.heappop(heap)
        if x == dst:
            return d
        if d > dist[x]:
            continue
        for eid in graph.adj[x]:
            if eid in removed:
                continue
            y = graph.edges[eid].other(x)
            if y in avoid:
                continue
            nd = d + xval[eid]
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, tie, y))
                tie += 1
    return dist.get(dst)
