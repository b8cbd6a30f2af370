"""Parameterized graph separation: multiway cut, partition cut, and
partition cut with disjunctive pair requests.

``multiway_cut`` is an exact branch-and-bound guided by an
isolating-cut lower bound.  ``partition_cut`` reduces to multiway cut
through superterminals joined by undeletable spokes.  The pair-request
variant travels through two constraint-language encodings -- a
finite-domain one whose values are component indices, then a Boolean
one with indicator variables -- and is finished off by an exact
minimum-deletion CSP solver that branches on minimal unsatisfiable
cores.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .graphs import Edge, MultiGraph, Vertex
from .stats import SolveStats


@dataclass(frozen=True)
class PairCutRequest:
    """Disjunctive requirement: disconnect s from u, or t from v."""

    s: Vertex
    u: Vertex
    t: Vertex
    v: Vertex

    def canonical(self) -> FrozenSet[Tuple[Vertex, Vertex]]:
        return frozenset({(self.s, self.u), (self.t, self.v)})


@dataclass(frozen=True)
class CutInstance:
    graph: MultiGraph
    terminals: Tuple[Vertex, ...]
    partition: Tuple[Tuple[Vertex, ...], ...]
    requests: Tuple[PairCutRequest, ...]
    k: int

    def __post_init__(self):
        seen: Set[Vertex] = set()
        for block in self.partition:
            for t in block:
                if t in seen:
                    raise ValueError(f"terminal {t!r} in two blocks")
                seen.add(t)
        if seen != set(self.terminals):
            raise ValueError("partition must cover exactly the terminals")
        for r in self.requests:
            if r.s not in seen or r.t not in seen:
                raise ValueError("request anchors must be terminals")


def is_partition_cut(graph: MultiGraph, partition, removed: FrozenSet[int]) -> bool:
    block_of = {}
    for i, block in enumerate(partition):
        for t in block:
            block_of[t] = i
    for block in partition:
        for t in block:
            comp = graph.component_of(t, removed)
            blocks_met = {block_of[x] for x in comp if x in block_of}
            if len(blocks_met) > 1:
                return False
    return True


def fulfills(graph: MultiGraph, request: PairCutRequest,
             removed: FrozenSet[int]) -> bool:
    if request.u not in graph.component_of(request.s, removed):
        return True
    return request.v not in graph.component_of(request.t, removed)


# ---------------------------------------------------------------------------
# multiway cut

def _flow_graph(graph: MultiGraph, removed: FrozenSet[int]) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(graph.vertices)
    for eid, e in graph.edges.items():
        if eid in removed:
            continue
        if g.has_edge(e.u, e.v):
            g[e.u][e.v]["capacity"] += e.weight
        else:
            g.add_edge(e.u, e.v, capacity=e.weight)
    return g


def min_st_cut_value(graph: MultiGraph, s: Vertex, t: Vertex,
                     removed: FrozenSet[int] = frozenset()) -> int:
    if t in graph.component_of(s, removed):
        g = _flow_graph(graph, removed)
        return int(nx.minimum_cut_value(g, s, t))
    return 0


def _isolating_bound(graph: MultiGraph, terminals, removed: FrozenSet[int]) -> int:
    """Half the sum of minimum isolating cuts, a valid lower bound."""
    g = _flow_graph(graph, removed)
    sink = ("_mwc_sink",)
    total = 0
    for t in terminals:
        g.add_node(sink)
        for o in terminals:
            if o != t:
                g.add_edge(sink, o, capacity=10 ** 12)
        if nx.has_path(g, t, sink):
            total += int(nx.minimum_cut_value(g, t, sink))
        g.remove_node(sink)
    return (total + 1) // 2


def _connected_terminal_pair(graph: MultiGraph, terminals,
                             removed: FrozenSet[int]):
    for i, a in enumerate(terminals):
        comp = graph.component_of(a, removed)
        for b in terminals[i + 1:]:
            if b in comp:
                return a, b
    return None


def _shortest_path_edges(graph: MultiGraph, a: Vertex, b: Vertex,
                         removed: FrozenSet[int]) -> List[int]:
    prev: Dict[Vertex, Tuple[Vertex, int]] = {}
    seen = {a}
    queue = [a]
    i = 0
    while i < len(queue):
        x = queue[i]
        i += 1
        if x == b:
            break
        for eid in sorted(graph.adj[x]):
            if eid in removed:
                continue
            y = graph.edges[eid].other(x)
            if y not in seen:
                seen.add(y)
                prev[y] = (x, eid)
                queue.append(y)
    path = []
    cur = b
    while cur != a:
        p, eid = prev[cur]
        path.append(eid)
        cur = p
    return list(reversed(path))


def multiway_cut(graph: MultiGraph, terminals: Sequence[Vertex], k: int,
                 stats: Optional[SolveStats] = None
                 ) -> Optional[FrozenSet[int]]:
    """Minimum-weight edge set of weight <= k separating all terminals.

    Exact branch and bound: branches delete one edge of a shortest path
    between two connected terminals; subtrees are pruned against the
    isolating-cut bound and the incumbent.
    """
    terminals = list(dict.fromkeys(terminals))
    if len(terminals) <= 1:
        return frozenset()
    best: List[Optional[Tuple[int, FrozenSet[int]]]] = [None]

    def rec(removed: FrozenSet[int]):
        if stats is not None:
            stats.cut_nodes += 1
        w = graph.weight(removed)
        pair = _connected_terminal_pair(graph, terminals, removed)
        if pair is None:
            if best[0] is None or w < best[0][0]:
                best[0] = (w, removed)
            return
        bound = w + _isolating_bound(graph, terminals, removed)
        if bound > k or (best[0] is not None and bound >= best[0][0]):
            return
        for eid in _shortest_path_edges(graph, pair[0], pair[1], removed):
            rec(removed | {eid})

    rec(frozenset())
    return best[0][1] if best[0] is not None else None


def partition_cut(graph: MultiGraph, terminals: Sequence[Vertex],
                  partition: Sequence[Sequence[Vertex]], k: int,
                  stats: Optional[SolveStats] = None
                  ) -> Optional[FrozenSet[int]]:
    """Minimum-weight cut leaving no component with two partition blocks.

    Adds one superterminal per block, joined to the block's terminals
    by weight-(k+1) spokes, and calls multiway cut on the superterminals.
    """
    blocks = [tuple(b) for b in partition if b]
    if len(blocks) <= 1:
        return frozenset()
    next_eid = max(graph.edges, default=-1) + 1
    supers = []
    edges = list(graph.edges.values())
    for i, block in enumerate(blocks):
        s = ("_super", i)
        supers.append(s)
        for t in block:
            edges.append(Edge(next_eid, s, t, k + 1))
            next_eid += 1
    g2 = MultiGraph(list(graph.vertices) + supers, edges)
    sol = multiway_cut(g2, supers, k, stats=stats)
    if sol is None:
        return None
    if any(eid not in graph.edges for eid in sol):
        raise AssertionError("superterminal spoke in a partition cut")
    return sol


# ---------------------------------------------------------------------------
# constraint-language instances

PIN = "pin"            # var == value
EQ = "eq"              # var == var
NEQ_DISJ = "neq-disj"  # (x != i) or (y != j)
NAND = "nand"          # Boolean: not x or not y
RK = "rk"              # Boolean: pairwise equal indicator blocks, at most one set


@dataclass(frozen=True)
class Constraint:
    cid: int
    kind: str
    payload: tuple
    weight: int
    origin: Optional[int] = None  # upstream object (edge id / constraint id)


@dataclass(frozen=True)
class CspInstance:
    domain_size: int
    variables: Tuple[Vertex, ...]
    constraints: Tuple[Constraint, ...]
    k: int

    def crisp_weight(self) -> int:
        return self.k + 1


def _check_constraint(c: Constraint, phi: Dict[Vertex, int]) -> Optional[bool]:
    """True/False when decidable under the partial assignment, else None."""
    if c.kind == PIN:
        x, val = c.payload
        if x in phi:
            return phi[x] == val
        return None
    if c.kind == EQ:
        x, y = c.payload
        if x in phi and y in phi:
            return phi[x] == phi[y]
        return None
    if c.kind == NEQ_DISJ:
        x, i, y, j = c.payload
        known_x = x in phi
        known_y = y in phi
        if known_x and phi[x] != i:
            return True
        if known_y and phi[y] != j:
            return True
        if known_x and known_y:
            return False
        return None
    if c.kind == NAND:
        x, y = c.payload
        if x in phi and phi[x] == 0:
            return True
        if y in phi and phi[y] == 0:
            return True
        if x in phi and y in phi:
            return not (phi[x] == 1 and phi[y] == 1)
        return None
    if c.kind == RK:
        xs, ys = c.payload
        decided = True
        ones = 0
        for xi, yi in zip(xs, ys):
            if xi in phi and yi in phi and phi[xi] != phi[yi]:
                return False
            if xi not in phi or yi not in phi:
                decided = False
            if xi in phi and phi[xi] == 1:
                ones += 1
                if ones > 1:
                    return False
        return True if decided else None
    raise ValueError(f"unknown constraint kind {c.kind}")


def csp_satisfiable(domain_size: int, variables: Sequence[Vertex],
                    constraints: Sequence[Constraint]
                    ) -> Optional[Dict[Vertex, int]]:
    """Backtracking satisfiability check; returns a model or None."""
    watch: Dict[Vertex, List[Constraint]] = {v: [] for v in variables}
    for c in constraints:
        if c.kind == PIN:
            watch[c.payload[0]].append(c)
        elif c.kind in (EQ, NAND):
            watch[c.payload[0]].append(c)
            watch[c.payload[1]].append(c)
        elif c.kind == NEQ_DISJ:
            watch[c.payload[0]].append(c)
            watch[c.payload[2]].append(c)
        else:
            for x in c.payload[0] + c.payload[1]:
                watch[x].append(c)

    order = sorted(variables, key=lambda v: -len(watch[v]))
    phi: Dict[Vertex, int] = {}

    def ok_after(v) -> bool:
        return all(_check_constraint(c, phi) is not False for c in watch[v])

    def assign(idx: int) -> bool:
        if idx == len(order):
            return True
        v = order[idx]
        for val in range(domain_size):
            phi[v] = val
            if ok_after(v) and assign(idx + 1):
                return True
            del phi[v]
        return False

    if assign(0):
        return dict(phi)
    return None


def _minimal_core(domain_size, variables, constraints: List[Constraint]
                  ) -> List[Constraint]:
    """Shrink an unsatisfiable constraint list to a minimal core."""
    core = list(constraints)
    i = 0
    while i < len(core):
        trial = core[:i] + core[i + 1:]
        if csp_satisfiable(domain_size, variables, trial) is None:
            core = trial
        else:
            i += 1
    return core


def mincsp_solve_exact(csp: CspInstance, stats: Optional[SolveStats] = None
                       ) -> Optional[Tuple[FrozenSet[int], Dict[Vertex, int]]]:
    """Minimum-weight constraint deletion making the instance satisfiable.

    Branch and bound on minimal unsatisfiable cores: every solution must
    delete a soft constraint of any core, and a packing of disjoint
    cores lower-bounds the remaining cost.  Exact; returns the deleted
    constraint ids with a witness model, or None when no deletion of
    weight <= k suffices.
    """
    crisp = csp.crisp_weight()
    by_id = {c.cid: c for c in csp.constraints}
    best: List[Optional[Tuple[int, FrozenSet[int], Dict[Vertex, int]]]] = [None]
    visited: Set[FrozenSet[int]] = set()

    def disjoint_core_bound(active: List[Constraint]) -> int:
        remaining = list(active)
        bound = 0
        while csp_satisfiable(csp.domain_size, csp.variables, remaining) is None:
            core = _minimal_core(csp.domain_size, csp.variables, remaining)
            soft = [c for c in core if c.weight < crisp]
            if not soft:
                return 10 ** 9
            bound += min(c.weight for c in soft)
            drop = set(c.cid for c in core)
            remaining = [c for c in remaining if c.cid not in drop]
        return bound

    def rec(deleted: FrozenSet[int], acc: int):
        if stats is not None:
            stats.mincsp_nodes += 1
        if deleted in visited:
            return
        visited.add(deleted)
        if acc > csp.k or (best[0] is not None and acc >= best[0][0]):
            return
        active = [c for c in csp.constraints if c.cid not in deleted]
        model = csp_satisfiable(csp.domain_size, csp.variables, active)
        if model is not None:
            if best[0] is None or acc < best[0][0]:
                best[0] = (acc, deleted, model)
            return
        core = _minimal_core(csp.domain_size, csp.variables, active)
        soft = sorted((c for c in core if c.weight < crisp),
                      key=lambda c: c.cid)
        if not soft:
            return
        lb = disjoint_core_bound(active)
        if acc + lb > csp.k or (best[0] is not None and acc + lb >= best[0][0]):
            return
        for c in soft:
            rec(deleted | {c.cid}, acc + c.weight)

    rec(frozenset(), 0)
    if best[0] is None:
        return None
    _, deleted, model = best[0]
    return deleted, model


# ---------------------------------------------------------------------------
# encodings

def encode_gamma_k(inst: CutInstance) -> CspInstance:
    """Component-index encoding of a pair-partition-cut instance.

    Values 1..m name the blocks' components (block indices are global
    across graph components), value 0 means a terminal-free part.
    Terminal pins and request constraints are crisp (weight k+1); each
    edge becomes an equality at the edge's weight.
    """
    blocks = [tuple(b) for b in inst.partition if b]
    m = len(blocks)
    block_of = {}
    for i, b in enumerate(blocks, start=1):
        for t in b:
            block_of[t] = i
    constraints: List[Constraint] = []
    cid = 0
    crisp = inst.k + 1
    for i, b in enumerate(blocks, start=1):
        for t in b:
            constraints.append(Constraint(cid, PIN, (t, i), crisp))
            cid += 1
    for eid in sorted(inst.graph.edges):
        e = inst.graph.edges[eid]
        constraints.append(Constraint(cid, EQ, (e.u, e.v), e.weight, origin=eid))
        cid += 1
    for r in inst.requests:
        i, j = block_of[r.s], block_of[r.t]
        constraints.append(Constraint(cid, NEQ_DISJ, (r.u, i, r.v, j), crisp))
        cid += 1
    return CspInstance(m + 1, tuple(inst.graph.vertices), tuple(constraints), inst.k)


def encode_gamma_prime(csp: CspInstance) -> CspInstance:
    """Boolean indicator encoding of a component-index instance.

    Variable (v, i) means "v takes value i"; at-most-one constraints are
    crisp.  Every original constraint maps to Boolean constraints of the
    same weight, preserving per-assignment unsatisfied weight, and each
    Boolean constraint records the originating constraint id.
    """
    m = csp.domain_size - 1
    crisp = csp.crisp_weight()
    variables = [(v, i) for v in csp.variables for i in range(1, m + 1)]
    out: List[Constraint] = []
    cid = 0
    for v in csp.variables:
        for i in range(1, m + 1):
            for j in range(i + 1, m + 1):
                out.append(Constraint(cid, NAND, ((v, i), (v, j)), crisp))
                cid += 1
    for c in csp.constraints:
        origin = c.cid
        if c.kind == PIN:
            x, val = c.payload
            if val >= 1:
                out.append(Constraint(cid, PIN, ((x, val), 1), c.weight,
                                      origin=origin))
                cid += 1
            else:
                for i in range(1, m + 1):
                    out.append(Constraint(cid, PIN, ((x, i), 0), c.weight,
                                          origin=origin))
                    cid += 1
        elif c.kind == EQ:
            x, y = c.payload
            xs = tuple((x, i) for i in range(1, m + 1))
            ys = tuple((y, i) for i in range(1, m + 1))
            out.append(Constraint(cid, RK, (xs, ys), c.weight, origin=origin))
            cid += 1
        elif c.kind == NEQ_DISJ:
            x, i, y, j = c.payload
            out.append(Constraint(cid, NAND, ((x, i), (y, j)), c.weight,
                                  origin=origin))
            cid += 1
        else:
            raise ValueError(f"cannot re-encode constraint kind {c.kind}")
    return CspInstance(2, tuple(variables), tuple(out), csp.k)


def boolean_image(csp: CspInstance, phi: Dict[Vertex, int]) -> Dict[Vertex, int]:
    """Indicator image of a component-index assignment."""
    m = csp.domain_size - 1
    out = {}
    for v in csp.variables:
        for i in range(1, m + 1):
            out[(v, i)] = 1 if phi[v] == i else 0
    return out


def unsat_weight(csp: CspInstance, phi: Dict[Vertex, int]) -> int:
    total = 0
    for c in csp.constraints:
        if _check_constraint(c, phi) is False:
            total += c.weight
    return total


def pair_partition_cut(inst: CutInstance, stats: Optional[SolveStats] = None
                       ) -> Optional[FrozenSet[int]]:
    """Minimum-weight partition cut fulfilling every pair request.

    Pipeline: component-index encoding, Boolean indicator encoding,
    exact minimum-deletion CSP, then decoding the deleted equalities
    back to edges via the witness model.  The decoded cut is verified
    against the original instance before it is returned.
    """
    gamma = encode_gamma_k(inst)
    boolean = encode_gamma_prime(gamma)
    got = mincsp_solve_exact(boolean, stats=stats)
    if got is None:
        return None
    deleted_bool, model = got
    # pull the Boolean model back to component indices
    m = gamma.domain_size - 1
    phi: Dict[Vertex, int] = {}
    for v in gamma.variables:
        val = 0
        for i in range(1, m + 1):
            if model.get((v, i), 0) == 1:
                val = i
                break
        phi[v] = val
    # the cut consists of the edges whose equality the model violates
    cut: Set[int] = set()
    for c in gamma.constraints:
        if c.kind == EQ and _check_constraint(c, phi) is False:
            cut.add(c.origin)
        elif c.kind != EQ and _check_constraint(c, phi) is False:
            return None  # crisp constraint violated: encoding infeasible
    cut_f = frozenset(cut)
    if inst.graph.weight(cut_f) > inst.k:
        return None
    if not is_partition_cut(inst.graph, inst.partition, cut_f):
        raise AssertionError("decoded cut is not a partition cut")
    for r in inst.requests:
        if not fulfills(inst.graph, r, cut_f):
            raise AssertionError("decoded cut misses a pair request")
    return cut_f


# ---------------------------------------------------------------------------
# partition refinements

def _partitions_of(items: Tuple[Vertex, ...]) -> Iterator[Tuple[Tuple[Vertex, ...], ...]]:
    """All set partitions of `items`, deterministic order."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in _partitions_of(rest):
        for i in range(len(sub)):
            yield sub[:i] + ((first,) + sub[i],) + sub[i + 1:]
        yield ((first,),) + sub


def enumerate_refinements(partition: Sequence[Sequence[Vertex]]
                          ) -> Iterator[Tuple[Tuple[Vertex, ...], ...]]:
    """Every partition refining the given one, each exactly once."""
    blocks = [tuple(b) for b in partition]
    pools = [list(_partitions_of(b)) for b in blocks]
    for combo in itertools.product(*pools):
        out = []
        for sub in combo:
            out.extend(sub)
        yield tuple(out)
