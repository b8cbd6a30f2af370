import itertools
import random
from fractions import Fraction

import pytest

from min2lin.biased import (
    BiasedGraphView, HalfIntegralSolution, component_is_balanced,
    extremal_lp_optimum, find_unbalanced_cycle, lp_value_lower_bound_check,
    _enumerate_simple_cycles,
)
from min2lin.graphs import AdditiveIntegersMod, Edge, MultiGraph, MultiplicativeFp

Z2 = AdditiveIntegersMod(2)


def even_cycle_view(n_vertices, edge_list, weights=None):
    """Bias where the balanced cycles are exactly the even-length ones."""
    weights = weights or {}
    edges = [Edge(i, u, v, weights.get(i, 1)) for i, (u, v) in enumerate(edge_list)]
    g = MultiGraph(list(range(n_vertices)), edges)
    return BiasedGraphView(g, group=Z2, labels={e.eid: 1 for e in edges})


def labelled_view(n_vertices, labelled_edges, group, weights=None):
    weights = weights or {}
    edges = [Edge(i, u, v, weights.get(i, 1)) for i, (u, v, _) in enumerate(labelled_edges)]
    g = MultiGraph(list(range(n_vertices)), edges)
    labels = {i: lab for i, (_, _, lab) in enumerate(labelled_edges)}
    return BiasedGraphView(g, group=group, labels=labels)


# ---------------------------------------------------------------------------
# unbalanced cycle detection

def test_triangle_is_unbalanced_under_even_bias():
    view = even_cycle_view(3, [(0, 1), (1, 2), (2, 0)])
    cyc = find_unbalanced_cycle(view, 0)
    assert cyc is not None and sorted(cyc) == [0, 1, 2]


def test_square_is_balanced_under_even_bias():
    view = even_cycle_view(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert find_unbalanced_cycle(view, 0) is None


def test_f5_labelled_four_cycle():
    F5 = MultiplicativeFp(5)
    # product 1*2*1*1 = 2 != 1 -> unbalanced
    view = labelled_view(4, [(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 1)], F5)
    cyc = find_unbalanced_cycle(view, 0)
    assert cyc is not None and len(cyc) == 4
    # fixing the label balances it
    view2 = labelled_view(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)], F5)
    assert find_unbalanced_cycle(view2, 0) is None


def test_flagged_vertex_cycles_unbalanced():
    edges = [Edge(0, "s", "a"), Edge(1, "s", "b"), Edge(2, "a", "b")]
    g = MultiGraph(["s", "a", "b"], edges)
    view = BiasedGraphView(g, flagged_vertex="s")
    cyc = find_unbalanced_cycle(view, "a")
    assert cyc is not None and sorted(cyc) == [0, 1, 2]
    # without the flag everything is balanced
    view2 = BiasedGraphView(g)
    assert find_unbalanced_cycle(view2, "a") is None


def test_parallel_pair_cycle():
    F5 = MultiplicativeFp(5)
    view = labelled_view(2, [(0, 1, 2), (0, 1, 1)], F5)
    cyc = find_unbalanced_cycle(view, 0)
    assert cyc is not None and sorted(cyc) == [0, 1]


def test_oracle_fallback_agrees_with_labels():
    rng = random.Random(42)
    for _ in range(40):
        n = rng.randint(3, 6)
        m = rng.randint(n - 1, min(9, n * 2))
        edge_list, labels = [], []
        for i in range(m):
            u, v = rng.sample(range(n), 2)
            edge_list.append((u, v, rng.randint(0, 1)))
        view = labelled_view(n, edge_list, Z2)

        def oracle(eids, _view=view):
            return _view.is_balanced_cycle(sorted(eids))

        g = view.graph
        oview = BiasedGraphView(g, oracle=oracle)
        for start in range(n):
            a = find_unbalanced_cycle(view, start)
            b = find_unbalanced_cycle(oview, start)
            assert (a is None) == (b is None)
            if b is not None:
                assert not oview.is_balanced_cycle(b)


def test_theta_property_sampling():
    # no theta subgraph of a group-labelled bias has exactly two balanced
    # cycles among its three
    rng = random.Random(9)
    for p, group in ((2, AdditiveIntegersMod(2)), (5, MultiplicativeFp(5))):
        identity = group.identity()
        for _ in range(30):
            n = rng.randint(4, 6)
            edge_list = []
            for _i in range(rng.randint(n, 10)):
                u, v = rng.sample(range(n), 2)
                if p == 2:
                    lab = rng.randint(0, 1)
                else:
                    lab = rng.randint(1, 4)
                edge_list.append((u, v, lab))
            view = labelled_view(n, edge_list, group)
            cycles = list(_enumerate_simple_cycles(view.graph, set(range(n)), frozenset()))
            for c1, c2 in itertools.combinations(cycles, 2):
                shared = frozenset(c1) & frozenset(c2)
                third = frozenset(c1) ^ frozenset(c2)
                if not shared or not third:
                    continue
                # a theta requires the shared edges to form one simple path
                deg = {}
                for eid in shared:
                    e = view.graph.edges[eid]
                    deg[e.u] = deg.get(e.u, 0) + 1
                    deg[e.v] = deg.get(e.v, 0) + 1
                if any(d > 2 for d in deg.values()):
                    continue
                if sum(1 for d in deg.values() if d == 1) != 2:
                    continue
                if len(deg) != len(shared) + 1:
                    continue
                match = next((c for c in cycles if frozenset(c) == third), None)
                if match is None:
                    continue
                balanced = sum([view.is_balanced_cycle(c1),
                                view.is_balanced_cycle(c2),
                                view.is_balanced_cycle(match)])
                assert balanced != 2


# ---------------------------------------------------------------------------
# brute oracle for the relaxation

def brute_lp_structures(view, root):
    """All feasible half-integral structures (V_R, X1) with their values."""
    graph = view.graph
    comp = sorted(graph.component_of(root), key=repr)
    rest = [v for v in comp if v != root]
    out = []
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            vr = frozenset({root, *extra})
            if not graph.connected_on(vr, frozenset(graph.boundary_edge_ids(set(vr)))):
                continue
            induced = graph.induced_edge_ids(set(vr))
            boundary = frozenset(graph.boundary_edge_ids(set(vr)))
            half = Fraction(graph.weight(boundary), 2)
            n = len(induced)
            for mask in range(1 << n):
                x1 = frozenset(induced[i] for i in range(n) if mask >> i & 1)
                removal = x1 | boundary
                if not graph.connected_on(vr, removal):
                    continue
                start = min(vr, key=repr)
                if find_unbalanced_cycle(view, start, removal) is not None:
                    continue
                out.append((Fraction(graph.weight(x1)) + half, vr, x1, boundary))
    return out


def brute_lp_optimum(view, root):
    structures = brute_lp_structures(view, root)
    value = min(s[0] for s in structures)
    best = [s for s in structures if s[0] == value]
    max_size = max(len(s[1]) for s in best)
    return value, [s for s in best if len(s[1]) == max_size]


# ---------------------------------------------------------------------------
# relaxation solver

def test_lp_balanced_graph_zero():
    view = even_cycle_view(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    sol = extremal_lp_optimum(view, 0)
    assert sol.value == 0 and sol.X1 == frozenset() and sol.Xhalf == frozenset()
    assert sol.VR == frozenset(range(4))


def test_lp_unbalanced_triangle():
    view = even_cycle_view(3, [(0, 1), (1, 2), (2, 0)])
    sol = extremal_lp_optimum(view, 0)
    assert sol.value == 1
    assert len(sol.X1) == 1 and not sol.Xhalf
    assert sol.VR == frozenset(range(3))


def test_lp_bridge_to_heavy_triangle():
    # root 0 joined by a unit bridge to a triangle of weight-3 edges:
    # cutting the bridge at value 1/2 beats cleaning the triangle
    view = even_cycle_view(4, [(0, 1), (1, 2), (2, 3), (3, 1)],
                           weights={0: 1, 1: 3, 2: 3, 3: 3})
    sol = extremal_lp_optimum(view, 0)
    assert sol.value == Fraction(1, 2)
    assert sol.Xhalf == frozenset({0}) and not sol.X1
    assert sol.VR == frozenset({0})


def test_lp_cap_none_when_exceeded():
    view = even_cycle_view(3, [(0, 1), (1, 2), (2, 0)], weights={0: 5, 1: 5, 2: 5})
    assert extremal_lp_optimum(view, 0, cap=Fraction(2)) is None
    assert extremal_lp_optimum(view, 0, cap=Fraction(5)) is not None


def random_small_view(rng, max_n=6, max_m=9, p_even=0.5, max_w=3):
    n = rng.randint(2, max_n)
    m = rng.randint(1, max_m)
    edge_list = []
    for _ in range(m):
        u, v = rng.sample(range(n), 2)
        edge_list.append((u, v))
    weights = {i: rng.randint(1, max_w) for i in range(m)}
    if rng.random() < p_even:
        edges = [Edge(i, u, v, weights[i]) for i, (u, v) in enumerate(edge_list)]
        g = MultiGraph(list(range(n)), edges)
        return BiasedGraphView(g, group=Z2,
                               labels={i: rng.randint(0, 1) for i in range(m)})
    F5 = MultiplicativeFp(5)
    edges = [Edge(i, u, v, weights[i]) for i, (u, v) in enumerate(edge_list)]
    g = MultiGraph(list(range(n)), edges)
    return BiasedGraphView(g, group=F5,
                           labels={i: rng.randint(1, 4) for i in range(m)})


def test_lp_matches_brute_on_random_graphs():
    rng = random.Random(77)
    for trial in range(60):
        view = random_small_view(rng)
        root = 0
        sol = extremal_lp_optimum(view, root)
        value, best = brute_lp_optimum(view, root)
        assert sol.value == value, f"trial {trial}"
        # extremality: the returned V_R has maximum cardinality among optima
        assert len(sol.VR) == len(best[0][1]), f"trial {trial}"
        assert any(sol.VR == s[1] for s in best), f"trial {trial}"
        # canonical shape + feasibility
        assert lp_value_lower_bound_check(view, root, sol), f"trial {trial}"


def test_lp_on_subdivided_graphs_matches_brute():
    # exercises the degree-2 chain contraction
    rng = random.Random(5)
    for trial in range(25):
        n = rng.randint(2, 4)
        m = rng.randint(1, 4)
        base = []
        for _ in range(m):
            u, v = rng.sample(range(n), 2)
            base.append((u, v, rng.randint(0, 1)))
        # subdivide every edge into a chain of three equal-weight parts
        edges, labels, nxt = [], {}, n
        eid = 0
        w_of = {}
        for (u, v, lab) in base:
            w = rng.randint(1, 2)
            z1, z2 = nxt, nxt + 1
            nxt += 2
            for (a, b, l2) in ((u, z1, lab), (z1, z2, 0), (z2, v, 0)):
                edges.append(Edge(eid, a, b, w))
                labels[eid] = l2
                eid += 1
        g = MultiGraph(list(range(nxt)), edges)
        view = BiasedGraphView(g, group=Z2, labels=labels)
        sol = extremal_lp_optimum(view, 0)
        value, best = brute_lp_optimum(view, 0)
        assert sol.value == value, f"trial {trial}"
        assert len(sol.VR) == len(best[0][1]), f"trial {trial}"
        assert lp_value_lower_bound_check(view, 0, sol), f"trial {trial}"


def test_lp_shape_invariants_random():
    rng = random.Random(123)
    for _ in range(40):
        view = random_small_view(rng)
        sol = extremal_lp_optimum(view, 0)
        g = view.graph
        assert set(sol.Xhalf) == set(g.boundary_edge_ids(set(sol.VR)))
        assert set(sol.X1) <= set(g.induced_edge_ids(set(sol.VR)))
        assert g.component_of(0, sol.support) == set(sol.VR)
        assert component_is_balanced(view, 0, sol.support)


def test_lower_bound_check_rejects_bad_candidates():
    view = even_cycle_view(3, [(0, 1), (1, 2), (2, 0)])
    # untouched unbalanced cycle inside V_R
    bad = HalfIntegralSolution(frozenset(), frozenset(), frozenset({0, 1, 2}),
                               Fraction(0))
    assert not lp_value_lower_bound_check(view, 0, bad)
    good = extremal_lp_optimum(view, 0)
    assert lp_value_lower_bound_check(view, 0, good)


def test_lower_bound_check_integral_candidate():
    # hand-built integral solution: delete enough to break every triangle
    view = even_cycle_view(3, [(0, 1), (1, 2), (2, 0)])
    cand = HalfIntegralSolution(frozenset({1}), frozenset(),
                                frozenset({0, 1, 2}), Fraction(1))
    assert lp_value_lower_bound_check(view, 0, cand)
