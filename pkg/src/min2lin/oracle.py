"""Brute-force ground truth, instance generators and classic reductions.

Everything here is deliberately simple and independent of the
parameterized solvers: subset enumeration over deletion candidates,
checked by the polynomial consistency solver.  The generators are
deterministic under their seed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .graphs import Edge, MultiGraph, Vertex
from .ring import Domain, DomainSpec, Integers, PrimeField, Rationals
from .system import Assignment, Equation, LinSystem, normalize, satisfies, solve


@dataclass(frozen=True)
class GeneratorConfig:
    domain: DomainSpec
    n_vars: int
    n_eqs: int
    weight_max: int = 1
    seed: int = 0
    planted_budget: Optional[int] = None


def _subsets_by_weight(eqs: Sequence[Equation]):
    """All equation-id subsets ordered by nondecreasing total weight."""
    items = sorted(eqs, key=lambda e: e.eid)
    subsets = []
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            subsets.append((sum(e.weight for e in combo),
                            tuple(e.eid for e in combo)))
    subsets.sort(key=lambda t: (t[0], t[1]))
    return subsets


def brute_min2lin(sys: LinSystem, k: int) -> Optional[Tuple[int, FrozenSet[int]]]:
    """Exact minimum-weight deletion set of weight <= k, or None.

    Enumerates deletion subsets in nondecreasing weight and checks
    consistency of the remainder, so the first hit is optimal.
    """
    for weight, ids in _subsets_by_weight(sys.equations):
        if weight > k:
            return None
        if solve(sys.without(ids)) is not None:
            return weight, frozenset(ids)
    return None


# ---------------------------------------------------------------------------
# reductions from classic graph separation problems

def reduce_bipartization(graph: MultiGraph) -> LinSystem:
    """Edge-deletion bipartization as a two-element-field system.

    Each edge becomes x - y = 1 at the edge's weight: a two-coloring
    satisfies the system exactly when the kept edges are bipartite.
    """
    F2 = PrimeField(2)
    eqs = [Equation(f"v{e.u}", f"v{e.v}", 1, 1, 1, weight=e.weight, eid=e.eid)
           for e in sorted(graph.edges.values(), key=lambda e: e.eid)]
    names = [f"v{v}" for v in graph.vertices]
    return LinSystem.build(F2, eqs, names)


def reduce_multiway_cut(graph: MultiGraph, terminals: Sequence[Vertex],
                        k: int) -> LinSystem:
    """Multiway cut as a rational system.

    Edges become equalities at their weight; each terminal is pinned to
    a distinct nonzero rational at weight k+1 so pins are undeletable.
    """
    Q = Rationals()
    eqs = [Equation(f"v{e.u}", f"v{e.v}", Fraction(1), Fraction(-1), Fraction(0),
                    weight=e.weight, eid=e.eid)
           for e in sorted(graph.edges.values(), key=lambda e: e.eid)]
    next_id = max((e.eid for e in eqs), default=-1) + 1
    for i, t in enumerate(terminals, start=1):
        # t = i, a single-variable pin; normalization anchors it through
        # the zero gadget so the emitted system has no degenerate edges
        eqs.append(Equation(f"v{t}", f"v{t}", Fraction(1), Fraction(0),
                            Fraction(i), weight=k + 1, eid=next_id))
        next_id += 1
    names = [f"v{v}" for v in graph.vertices]
    raw = LinSystem.build(Q, eqs, names)
    normalized, removed = normalize(raw, k)
    if removed:
        raise AssertionError("multiway pins must be individually satisfiable")
    return normalized


def _odd_primes():
    n = 3
    while True:
        if all(n % d for d in range(2, int(n ** 0.5) + 1)):
            yield n
        n += 2


def reduce_multicut(graph: MultiGraph, requests: Sequence[Tuple[Vertex, Vertex]],
                    k: int) -> LinSystem:
    """Multicut as an integer system.

    Edges become equalities; the i-th request (s, t) adds s = p*s' and
    t = p*t' + 1 for the i-th odd prime p at weight k+1, so any
    surviving s-t path forces incompatible residues modulo p.
    """
    Z = Integers()
    eqs = [Equation(f"v{e.u}", f"v{e.v}", 1, -1, 0, weight=e.weight, eid=e.eid)
           for e in sorted(graph.edges.values(), key=lambda e: e.eid)]
    next_id = max((e.eid for e in eqs), default=-1) + 1
    names = [f"v{v}" for v in graph.vertices]
    primes = _odd_primes()
    for i, (s, t) in enumerate(requests):
        p = next(primes)
        eqs.append(Equation(f"v{s}", f"_s{i}", 1, -p, 0, weight=k + 1, eid=next_id))
        eqs.append(Equation(f"v{t}", f"_t{i}", 1, -p, 1, weight=k + 1, eid=next_id + 1))
        next_id += 2
        names.extend([f"_s{i}", f"_t{i}"])
    return LinSystem.build(Z, eqs, names)


# ---------------------------------------------------------------------------
# brute-force graph optima (for reduction fidelity checks)

def brute_edge_deletion(graph: MultiGraph, predicate, k: int
                        ) -> Optional[Tuple[int, FrozenSet[int]]]:
    """Minimum-weight edge set (<= k) whose removal satisfies `predicate`."""
    eids = sorted(graph.edges)
    subsets = []
    for r in range(len(eids) + 1):
        for combo in itertools.combinations(eids, r):
            subsets.append((graph.weight(combo), combo))
    subsets.sort(key=lambda t: (t[0], t[1]))
    for weight, combo in subsets:
        if weight > k:
            return None
        if predicate(frozenset(combo)):
            return weight, frozenset(combo)
    return None


def is_bipartite_after(graph: MultiGraph, removed: FrozenSet[int]) -> bool:
    color: Dict[Vertex, int] = {}
    for start in graph.vertices:
        if start in color:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            x = stack.pop()
            for eid in graph.adj[x]:
                if eid in removed:
                    continue
                y = graph.edges[eid].other(x)
                if y not in color:
                    color[y] = 1 - color[x]
                    stack.append(y)
                elif color[y] == color[x]:
                    return False
    return True


def separates_terminals(graph: MultiGraph, terminals: Sequence[Vertex],
                        removed: FrozenSet[int]) -> bool:
    for a, b in itertools.combinations(terminals, 2):
        if b in graph.component_of(a, removed):
            return False
    return True


def fulfills_requests(graph: MultiGraph, requests, removed: FrozenSet[int]) -> bool:
    for s, t in requests:
        if t in graph.component_of(s, removed):
            return False
    return True


def brute_bipartization(graph: MultiGraph, k: int):
    return brute_edge_deletion(graph, lambda rm: is_bipartite_after(graph, rm), k)


def brute_multiway_cut(graph: MultiGraph, terminals, k: int):
    return brute_edge_deletion(
        graph, lambda rm: separates_terminals(graph, terminals, rm), k)


def brute_multicut(graph: MultiGraph, requests, k: int):
    return brute_edge_deletion(
        graph, lambda rm: fulfills_requests(graph, requests, rm), k)


# ---------------------------------------------------------------------------
# important separators

def brute_important_separators(graph: MultiGraph, s: Vertex, t: Vertex,
                               k: int) -> List[FrozenSet[int]]:
    """All important (s,t)-edge-separators of weight <= k.

    A cut C is important when no other cut C' has weight at most w(C)
    while keeping at least the same set of vertices reachable from s.
    Exhaustive over edge subsets; desk scale only.
    """
    if s == t:
        raise ValueError("s and t must differ")
    eids = sorted(graph.edges)
    cuts: List[Tuple[int, FrozenSet[int], FrozenSet[Vertex]]] = []
    for r in range(len(eids) + 1):
        for combo in itertools.combinations(eids, r):
            removed = frozenset(combo)
            weight = graph.weight(removed)
            if weight > k:
                continue
            reach = frozenset(graph.component_of(s, removed))
            if t in reach:
                continue
            cuts.append((weight, removed, reach))
    important = []
    for w1, c1, r1 in cuts:
        dominated = False
        for w2, c2, r2 in cuts:
            if c2 != c1 and w2 <= w1 and r1 <= r2:
                dominated = True
                break
        if not dominated:
            important.append(c1)
    return sorted(set(important), key=lambda c: (graph.weight(c), sorted(c)))


# ---------------------------------------------------------------------------
# random instances

def _random_element(dom: Domain, rng: random.Random, nonzero: bool):
    if isinstance(dom, Integers):
        pool = [x for x in range(-3, 4) if x != 0] if nonzero else list(range(-4, 5))
        return rng.choice(pool)
    if isinstance(dom, Rationals):
        num = rng.choice([x for x in range(-3, 4) if x != 0]) if nonzero \
            else rng.randint(-3, 3)
        den = rng.randint(1, 3)
        return Fraction(num, den)
    if isinstance(dom, PrimeField):
        lo = 1 if nonzero else 0
        return rng.randint(lo, dom.p - 1)
    raise ValueError(f"unsupported domain {dom!r}")


def gen_random(config: GeneratorConfig) -> LinSystem:
    """Random system; identical config yields an identical instance."""
    dom = config.domain.domain()
    rng = random.Random(config.seed)
    names = [f"x{i}" for i in range(config.n_vars)]
    eqs = []
    for i in range(config.n_eqs):
        u, v = rng.sample(names, 2)
        a = _random_element(dom, rng, nonzero=True)
        b = _random_element(dom, rng, nonzero=True)
        c = _random_element(dom, rng, nonzero=False)
        w = rng.randint(1, config.weight_max)
        eqs.append(Equation(u, v, a, b, c, weight=w, eid=i))
    return LinSystem.build(dom, eqs, names)


def gen_planted(config: GeneratorConfig
                ) -> Tuple[LinSystem, FrozenSet[int], Assignment]:
    """Random instance with a planted witness.

    Builds a consistent base satisfied by a hidden assignment, then
    injects up to ``planted_budget`` unit-weight equations violated by
    it; deleting the noise restores consistency, so the optimum is at
    most the budget.
    """
    if config.planted_budget is None:
        raise ValueError("planted_budget required")
    dom = config.domain.domain()
    rng = random.Random(config.seed)
    names = [f"x{i}" for i in range(config.n_vars)]
    witness = {v: _random_element(dom, rng, nonzero=False) for v in names}
    eqs = []
    eid = 0
    for _ in range(config.n_eqs):
        u, v = rng.sample(names, 2)
        a = _random_element(dom, rng, nonzero=True)
        b = _random_element(dom, rng, nonzero=True)
        c = dom.add(dom.mul(a, witness[u]), dom.mul(b, witness[v]))
        w = rng.randint(1, config.weight_max)
        eqs.append(Equation(u, v, a, b, c, weight=w, eid=eid))
        eid += 1
    noise = []
    for _ in range(config.planted_budget):
        u, v = rng.sample(names, 2)
        a = _random_element(dom, rng, nonzero=True)
        b = _random_element(dom, rng, nonzero=True)
        good = dom.add(dom.mul(a, witness[u]), dom.mul(b, witness[v]))
        delta = _random_element(dom, rng, nonzero=True)
        eqs.append(Equation(u, v, a, b, dom.add(good, delta), weight=1, eid=eid))
        noise.append(eid)
        eid += 1
    sys = LinSystem.build(dom, eqs, names)
    if not satisfies(sys.without(noise), witness):
        raise AssertionError("planted witness fails its own base")
    return sys, frozenset(noise), witness


def gen_random_graph(n: int, m: int, seed: int, weight_max: int = 1) -> MultiGraph:
    rng = random.Random(seed)
    edges = []
    for i in range(m):
        u, v = rng.sample(range(n), 2)
        edges.append(Edge(i, u, v, rng.randint(1, weight_max)))
    return MultiGraph(list(range(n)), edges)
