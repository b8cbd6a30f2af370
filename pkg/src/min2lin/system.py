"""Two-variable linear equation systems and their polynomial-time solver.

A system is an edge-labelled multigraph (the primal graph): vertices
are variables, every equation ``a*u + b*v = c`` is an edge between its
two variables.  The solver classifies each connected component: either
some cycle forces a unique value (which is then propagated and
verified), or the component is *flexible* -- all paths between any two
variables imply equivalent equations -- and a satisfying assignment is
built by a least-common-multiple product construction along a spanning
tree.

Normalized systems keep both coefficients of every equation nonzero:
degenerate single-variable constraints are rewritten through a pinned
zero-variable gadget.  This invariant keeps path composition, cycle
classification and the group labelling of cycles well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .ring import Domain

Var = str
Value = object
Assignment = Dict[Var, Value]

# Reserved variable names for the zero gadget; instance files reject them.
ZERO_VAR = "_z0"
ZERO_AUX_VAR = "_z0p"


class InvalidPath(ValueError):
    """Edges do not chain into a simple path."""


class InvalidCycle(ValueError):
    """Edges do not chain into a simple cycle."""


class NotSatisfying(ValueError):
    """The provided assignment violates an equation."""


class NotFlexible(ValueError):
    pass


class NotConnected(ValueError):
    pass


class NotAField(ValueError):
    pass


@dataclass(frozen=True)
class Equation:
    """a*u + b*v = c with a positive integer weight and a stable id."""

    u: Var
    v: Var
    a: Value
    b: Value
    c: Value
    weight: int = 1
    eid: int = -1

    def oriented(self, first: Var) -> Tuple[Value, Value, Value]:
        """Coefficients (a', b', c) with a' on `first`."""
        if first == self.u:
            return self.a, self.b, self.c
        if first == self.v:
            return self.b, self.a, self.c
        raise ValueError(f"{first} not a variable of equation {self.eid}")

    def other(self, x: Var) -> Var:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise ValueError(f"{x} not a variable of equation {self.eid}")

    def vars(self) -> Tuple[Var, Var]:
        return self.u, self.v


class CycleClass:
    INCONSISTENT = "inconsistent"
    IDENTITY = "identity"
    NON_IDENTITY = "non-identity"


@dataclass(frozen=True)
class LinSystem:
    """Immutable 2-Lin system over a fixed domain.

    ``variables`` may include isolated variables (no equations).
    Equation ids are stable: systems derived by deletion keep the
    original ids so deletion sets map back to the input.
    """

    domain: Domain
    variables: Tuple[Var, ...]
    equations: Tuple[Equation, ...]

    def __post_init__(self):
        # Self-loops are representable so that :func:`normalize` can accept
        # and rewrite them; every other operation assumes normalized input.
        vs = set(self.variables)
        for e in self.equations:
            if e.u not in vs or e.v not in vs:
                raise ValueError(f"equation {e.eid} uses unknown variable")
            if e.weight < 1:
                raise ValueError(f"equation {e.eid} has nonpositive weight")

    # -- construction helpers ---------------------------------------------

    @staticmethod
    def build(domain: Domain, equations: Iterable[Equation],
              variables: Iterable[Var] = ()) -> "LinSystem":
        equations = list(equations)
        eqs = []
        seen_vars: List[Var] = []
        seen = set()
        for v in variables:
            if v not in seen:
                seen.add(v)
                seen_vars.append(v)
        next_id = 0
        used_ids = {e.eid for e in equations if e.eid >= 0}
        for e in equations:
            if e.eid < 0:
                while next_id in used_ids:
                    next_id += 1
                e = replace(e, eid=next_id)
                used_ids.add(next_id)
            eqs.append(e)
            for v in e.vars():
                if v not in seen:
                    seen.add(v)
                    seen_vars.append(v)
        return LinSystem(domain, tuple(seen_vars), tuple(eqs))

    def by_id(self, eid: int) -> Equation:
        return self._id_map[eid]

    @property
    def _id_map(self) -> Dict[int, Equation]:
        m = self.__dict__.get("_id_map_cache")
        if m is None:
            m = {e.eid: e for e in self.equations}
            self.__dict__["_id_map_cache"] = m
        return m

    @property
    def adjacency(self) -> Dict[Var, Tuple[int, ...]]:
        adj = self.__dict__.get("_adj_cache")
        if adj is None:
            tmp: Dict[Var, List[int]] = {v: [] for v in self.variables}
            for e in self.equations:
                tmp[e.u].append(e.eid)
                tmp[e.v].append(e.eid)
            adj = {v: tuple(ids) for v, ids in tmp.items()}
            self.__dict__["_adj_cache"] = adj
        return adj

    def total_weight(self, eids: Iterable[int]) -> int:
        return sum(self.by_id(i).weight for i in eids)

    def without(self, eids: Iterable[int]) -> "LinSystem":
        drop = set(eids)
        return LinSystem(self.domain, self.variables,
                         tuple(e for e in self.equations if e.eid not in drop))

    def restrict(self, vars_subset: Iterable[Var]) -> "LinSystem":
        keep = set(vars_subset)
        eqs = tuple(e for e in self.equations if e.u in keep and e.v in keep)
        return LinSystem(self.domain, tuple(v for v in self.variables if v in keep), eqs)

    def components(self) -> List[List[Var]]:
        """Connected components of the primal graph, deterministic order."""
        seen: Set[Var] = set()
        comps = []
        for start in self.variables:
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            stack = [start]
            while stack:
                x = stack.pop()
                for eid in self.adjacency[x]:
                    y = self.by_id(eid).other(x)
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def component_of(self, x: Var) -> List[Var]:
        for comp in self.components():
            if x in comp:
                return comp
        raise KeyError(x)

    def is_homogeneous(self) -> bool:
        z = self.domain.zero
        return all(e.c == z for e in self.equations)


@dataclass(frozen=True)
class Substitution:
    """Per-variable invertible affine map x -> scale*x' + shift."""

    domain: Domain
    scale: Dict[Var, Value]
    shift: Dict[Var, Value]

    def pull_back(self, phi: Assignment) -> Assignment:
        """Map an assignment of the image system to the original variables."""
        dom = self.domain
        out = {}
        for x, val in phi.items():
            s = self.scale.get(x, dom.one)
            t = self.shift.get(x, dom.zero)
            out[x] = dom.add(dom.mul(s, val), t)
        return out


# ---------------------------------------------------------------------------
# normalization


def normalize_equation(dom: Domain, a, b, c):
    """Canonical form of a coefficient triple.

    Divides by gcd(a, b) when the gcd divides c, then scales by a unit
    so the first nonzero coefficient is canonical (positive over Z,
    1 over fields).  Inconsistent triples (gcd does not divide c) are
    returned with coefficients untouched apart from unit scaling.
    """
    g = dom.gcd(a, b)
    if not dom.is_zero(g) and not dom.is_unit(g) and dom.divides(g, c):
        a, b, c = dom.exact_div(a, g), dom.exact_div(b, g), dom.exact_div(c, g)
    lead = a if not dom.is_zero(a) else b
    if dom.is_zero(lead):
        return a, b, c
    _, u = dom.unit_canonical(lead)
    u_inv = dom.inverse(u)
    return dom.mul(u_inv, a), dom.mul(u_inv, b), dom.mul(u_inv, c)


def normalize(sys: LinSystem, k: int) -> Tuple[LinSystem, int]:
    """Preprocess a raw system for the deletion solvers.

    * drops 0 = 0 equations;
    * removes equations unsatisfiable on their own, summing their
      weights into the returned ``removed_weight``;
    * divides coefficients by their gcd and fixes a canonical unit;
    * rewrites self-loops and zero-coefficient equations (degenerate
      single-variable constraints) through the zero gadget: a pinned
      variable pair with weight-(k+1) equations forcing it to zero.
    """
    dom = sys.domain
    removed = 0
    out: List[Equation] = []
    need_gadget = False
    gadget_rewrites: List[Equation] = []

    for e in sys.equations:
        a, b, c = e.a, e.b, e.c
        if e.u == e.v:
            a, b, c = dom.add(a, b), dom.zero, c
            # fall through as a single-variable constraint on e.u
            if dom.is_zero(a):
                if dom.is_zero(c):
                    continue
                removed += e.weight
                continue
            need_gadget = True
            gadget_rewrites.append(replace(e, v=ZERO_VAR, a=a, b=dom.neg(dom.one), c=c))
            continue
        if dom.is_zero(a) and dom.is_zero(b):
            if dom.is_zero(c):
                continue
            removed += e.weight
            continue
        if dom.is_zero(a) or dom.is_zero(b):
            # single-variable constraint written over a pair: anchor it
            # to the zero variable so both coefficients stay nonzero.
            x = e.u if not dom.is_zero(a) else e.v
            coeff = a if not dom.is_zero(a) else b
            if dom.solve_single(coeff, dom.zero, c) is None:
                removed += e.weight
                continue
            need_gadget = True
            gadget_rewrites.append(
                replace(e, u=x, v=ZERO_VAR, a=coeff, b=dom.neg(dom.one), c=c))
            continue
        if dom.solve_single(a, b, c) is None:
            removed += e.weight
            continue
        a, b, c = normalize_equation(dom, a, b, c)
        out.append(replace(e, a=a, b=b, c=c))

    variables = list(sys.variables)
    if need_gadget:
        for e in gadget_rewrites:
            a, b, c = normalize_equation(dom, e.a, e.b, e.c)
            out.append(replace(e, a=a, b=b, c=c))
        next_id = max((e.eid for e in out), default=-1) + 1
        for v in (ZERO_VAR, ZERO_AUX_VAR):
            if v not in variables:
                variables.append(v)
        one = dom.one
        out.append(Equation(ZERO_AUX_VAR, ZERO_VAR, one, one, dom.zero,
                            weight=k + 1, eid=next_id))
        out.append(Equation(ZERO_AUX_VAR, ZERO_VAR, one, dom.neg(one), dom.zero,
                            weight=k + 1, eid=next_id + 1))
    return LinSystem(dom, tuple(variables), tuple(out)), removed


# ---------------------------------------------------------------------------
# path composition

def compose_triples(dom: Domain, first, second):
    """Eliminate the shared middle variable of two oriented triples.

    ``first`` constrains (p1, p2), ``second`` constrains (p2, p3); the
    result constrains (p1, p3):  (a'a) p1 - (b'b) p3 = a'c - b c'.
    """
    a, b, c = first
    a2, b2, c2 = second
    return (dom.mul(a2, a),
            dom.neg(dom.mul(b2, b)),
            dom.sub(dom.mul(a2, c), dom.mul(b, c2)))


def _path_orientation(sys: LinSystem, path: Sequence[int],
                      start: Optional[Var]) -> List[Var]:
    """Vertex sequence [p1..pL] realized by the edge id sequence."""
    eqs = [sys.by_id(i) for i in path]
    if len(eqs) == 1:
        e = eqs[0]
        if start is None:
            return [e.u, e.v]
        return [start, e.other(start)]
    first_vars = set(eqs[0].vars())
    second_vars = set(eqs[1].vars())
    shared = first_vars & second_vars
    if len(shared) != 1:
        raise InvalidPath("ambiguous or broken chain between first two edges")
    mid = shared.pop()
    verts = [eqs[0].other(mid), mid]
    if start is not None and verts[0] != start:
        raise InvalidPath(f"path does not start at {start}")
    for e in eqs[1:]:
        if verts[-1] not in e.vars():
            raise InvalidPath("edges do not chain")
        verts.append(e.other(verts[-1]))
    if len(set(verts)) != len(verts):
        raise InvalidPath("path revisits a variable")
    return verts


def compose_path(sys: LinSystem, path: Sequence[int],
                 start: Optional[Var] = None) -> Equation:
    """Equation implied by a simple path, normalized up to a unit.

    The result relates the path endpoints; interior variables are
    eliminated pairwise, left to right.
    """
    if not path:
        raise InvalidPath("empty path")
    dom = sys.domain
    verts = _path_orientation(sys, path, start)
    eqs = [sys.by_id(i) for i in path]
    acc = eqs[0].oriented(verts[0])
    for e, first in zip(eqs[1:], verts[1:]):
        acc = compose_triples(dom, acc, e.oriented(first))
    a, b, c = normalize_equation(dom, *acc)
    return Equation(verts[0], verts[-1], a, b, c, weight=1, eid=-1)


# ---------------------------------------------------------------------------
# assignments

def violates(sys: LinSystem, phi: Assignment, e: Equation) -> bool:
    dom = sys.domain
    lhs = dom.add(dom.mul(e.a, phi[e.u]), dom.mul(e.b, phi[e.v]))
    return lhs != e.c


def satisfies(sys: LinSystem, phi: Assignment) -> bool:
    return all(not violates(sys, phi, e) for e in sys.equations)


def homogenize(sys: LinSystem, phi: Assignment) -> Tuple[LinSystem, Substitution]:
    """Shift the solution space so `phi` maps to zero.

    Every equation keeps its coefficients and weight; right-hand sides
    become zero.  The substitution x -> x' + phi(x) is recorded so
    assignments of the image pull back to the original system.
    """
    dom = sys.domain
    for e in sys.equations:
        if violates(sys, phi, e):
            raise NotSatisfying(f"assignment violates equation {e.eid}")
    eqs = tuple(replace(e, c=dom.zero) for e in sys.equations)
    sub = Substitution(dom, {}, {x: phi[x] for x in sys.variables})
    return LinSystem(dom, sys.variables, eqs), sub


def substitute_assignment(sys: LinSystem, phi: Assignment) -> LinSystem:
    """Rewrite right-hand sides as violations under `phi` (c - a*u - b*v).

    Unlike :func:`homogenize` this accepts assignments that violate
    some equations; those keep a nonzero right-hand side.
    """
    dom = sys.domain
    eqs = []
    for e in sys.equations:
        lhs = dom.add(dom.mul(e.a, phi[e.u]), dom.mul(e.b, phi[e.v]))
        eqs.append(replace(e, c=dom.sub(e.c, lhs)))
    return LinSystem(dom, sys.variables, tuple(eqs))


# ---------------------------------------------------------------------------
# cycle classification and flexibility

def _equivalence_case(dom: Domain, e1, e2):
    """Four-way comparison of oriented triples over the same pair.

    Returns (kind, value) where kind is 'inconsistent', 'equivalent' or
    'forced'; in the forced case `value` is the unique y satisfying
    both equations simultaneously (y the second variable).
    """
    a1, b1, c1 = e1
    a2, b2, c2 = e2
    A = dom.sub(dom.mul(b1, a2), dom.mul(a1, b2))
    B = dom.sub(dom.mul(c1, a2), dom.mul(a1, c2))
    if dom.is_zero(A):
        if dom.is_zero(B):
            return "equivalent", None
        return "inconsistent", None
    if not dom.divides(A, B):
        return "inconsistent", None
    return "forced", dom.exact_div(B, A)


def equations_equivalent(dom: Domain, e1: Equation, e2: Equation) -> bool:
    """Same solution set, tested by cross-multiplication (never by search)."""
    t1 = e1.oriented(e1.u)
    t2 = e2.oriented(e1.u)
    kind, _ = _equivalence_case(dom, t1, t2)
    if kind != "equivalent":
        return False
    # the A/B split above pins y; swap roles to pin x as well
    kind2, _ = _equivalence_case(dom, e1.oriented(e1.v), e2.oriented(e1.v))
    return kind2 == "equivalent"


def classify_cycle(sys: LinSystem, cycle: Sequence[int]) -> str:
    """Classify a simple cycle: inconsistent, identity or non-identity.

    Non-identity means the cycle admits exactly one satisfying
    assignment; identity cycles have more than one.
    """
    if len(cycle) < 2:
        raise InvalidCycle("a simple cycle needs at least two edges")
    dom = sys.domain
    eqs = [sys.by_id(i) for i in cycle]
    if len(cycle) == 2:
        e1, e2 = eqs
        if set(e1.vars()) != set(e2.vars()):
            raise InvalidCycle("two-edge cycle must be a parallel pair")
        verts = [e1.u, e1.v]
        path_triple = e1.oriented(e1.u)
        closing = e2
    else:
        verts = _path_orientation(sys, cycle[:-1], None)
        closing = eqs[-1]
        if set((verts[0], verts[-1])) != set(closing.vars()):
            raise InvalidCycle("closing edge does not join path endpoints")
        acc = eqs[0].oriented(verts[0])
        for e, first in zip(eqs[1:-1], verts[1:]):
            acc = compose_triples(dom, acc, e.oriented(first))
        path_triple = acc
    kind, forced = _equivalence_case(dom, path_triple, closing.oriented(verts[0]))
    if kind == "inconsistent":
        return CycleClass.INCONSISTENT
    if kind == "equivalent":
        return CycleClass.IDENTITY
    # the last variable on the path is forced; propagate around and verify
    sub = LinSystem(dom, tuple(verts), tuple(
        replace(e, eid=i) for i, e in enumerate(eqs)))
    phi = _propagate_forced(sub, verts[-1], forced)
    return CycleClass.NON_IDENTITY if phi is not None else CycleClass.INCONSISTENT


def _propagate_forced(sys: LinSystem, x0: Var, val) -> Optional[Assignment]:
    """Propagate a pinned value through a component; None on conflict."""
    dom = sys.domain
    phi: Assignment = {x0: val}
    stack = [x0]
    while stack:
        x = stack.pop()
        for eid in sys.adjacency[x]:
            e = sys.by_id(eid)
            y = e.other(x)
            ax, by, c = e.oriented(x)
            rhs = dom.sub(c, dom.mul(ax, phi[x]))
            if y in phi:
                if dom.mul(by, phi[y]) != rhs:
                    return None
                continue
            sol = dom.solve_single(by, dom.zero, rhs)
            if sol is None:
                return None
            phi[y] = sol[0]
            stack.append(y)
    for v in sys.variables:
        phi.setdefault(v, dom.zero)
    return phi


def _spanning_tree(sys: LinSystem, comp: Sequence[Var]) -> Tuple[List[int], List[int], Dict[Var, Tuple[Var, int]]]:
    """BFS tree of a component: (tree edge ids, non-tree ids, parent map)."""
    comp_set = set(comp)
    root = comp[0]
    parent: Dict[Var, Tuple[Var, int]] = {}
    seen = {root}
    order = [root]
    tree: List[int] = []
    nontree: List[int] = []
    used = set()
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for eid in sorted(sys.adjacency[x]):
            if eid in used:
                continue
            e = sys.by_id(eid)
            y = e.other(x)
            if y not in comp_set:
                continue
            used.add(eid)
            if y in seen:
                nontree.append(eid)
            else:
                seen.add(y)
                parent[y] = (x, eid)
                tree.append(eid)
                order.append(y)
    return tree, nontree, parent


def _tree_path(parent: Dict[Var, Tuple[Var, int]], x: Var, y: Var) -> List[int]:
    """Edge ids of the tree path from x to y."""
    def ancestors(v):
        chain = [v]
        while chain[-1] in parent:
            chain.append(parent[chain[-1]][0])
        return chain

    ax = ancestors(x)
    ay = set(ancestors(y))
    meet = next(v for v in ax if v in ay)
    path_x = []
    v = x
    while v != meet:
        p, eid = parent[v]
        path_x.append(eid)
        v = p
    path_y = []
    v = y
    while v != meet:
        p, eid = parent[v]
        path_y.append(eid)
        v = p
    return path_x + list(reversed(path_y))


def is_flexible(sys: LinSystem) -> bool:
    """True iff every non-tree edge agrees with its spanning-tree path."""
    dom = sys.domain
    for comp in sys.components():
        if len(comp) == 1:
            continue
        _, nontree, parent = _spanning_tree(sys, comp)
        for eid in nontree:
            e = sys.by_id(eid)
            path = _tree_path(parent, e.u, e.v)
            ep = compose_path(sys, path, start=e.u) if path else None
            if ep is None:
                return False  # parallel edge to itself cannot happen
            kind, _ = _equivalence_case(dom, ep.oriented(e.u), e.oriented(e.u))
            if kind != "equivalent":
                return False
    return True


def implied_equation(sys: LinSystem, x: Var, y: Var) -> Equation:
    """e_xy: the equation implied by any x-y path (requires flexibility)."""
    for comp in sys.components():
        if x in comp:
            if y not in comp:
                raise NotConnected(f"{x} and {y} are not connected")
            _, _, parent = _spanning_tree(sys, comp)
            path = _tree_path(parent, x, y)
            if not path:
                raise NotConnected(f"no path between {x} and {y}")
            return compose_path(sys, path, start=x)
    raise KeyError(x)


def star(sys: LinSystem, x: Var) -> LinSystem:
    """System {e_xy : y != x} with the same satisfying assignments."""
    comps = sys.components()
    if len(comps) != 1:
        raise NotConnected("star requires a connected system")
    if not is_flexible(sys):
        raise NotFlexible("star requires a flexible system")
    eqs = []
    for i, y in enumerate(v for v in sys.variables if v != x):
        e = implied_equation(sys, x, y)
        eqs.append(replace(e, eid=i))
    return LinSystem(sys.domain, sys.variables, tuple(eqs))


# ---------------------------------------------------------------------------
# solving

def _solve_tree(sys: LinSystem, comp: List[Var], tree_eids: List[int]) -> Optional[Assignment]:
    """Satisfying assignment of a spanning tree, or None.

    Recursive leaf peeling: solve the tree without one leaf, shift the
    subtree solution to zero, and extend across the leaf edge.  The
    extension value for the leaf's neighbour is a multiple of the lcm
    of the subtree's implied-equation coefficients, which keeps every
    propagated division exact.
    """
    dom = sys.domain
    if len(comp) == 1:
        return {comp[0]: dom.zero}
    tree_set = set(tree_eids)
    degree = {v: 0 for v in comp}
    for eid in tree_eids:
        e = sys.by_id(eid)
        degree[e.u] += 1
        degree[e.v] += 1
    leaf = min(v for v in comp if degree[v] == 1)
    leaf_eid = next(eid for eid in sorted(sys.adjacency[leaf]) if eid in tree_set)
    edge = sys.by_id(leaf_eid)
    nbr = edge.other(leaf)

    sub_comp = [v for v in comp if v != leaf]
    sub_tree = [eid for eid in tree_eids if eid != leaf_eid]
    phi1 = _solve_tree(sys, sub_comp, sub_tree)
    if phi1 is None:
        return None

    # implied equations of the zero-shifted subtree, rooted at nbr
    sub_sys = LinSystem(dom, tuple(sub_comp),
                        tuple(replace(sys.by_id(i), c=dom.zero) for i in sub_tree))
    ratios = {}
    _, _, parent = _spanning_tree(sub_sys, sorted(sub_comp, key=lambda v: (v != nbr, v)))
    for y in sub_comp:
        if y == nbr:
            continue
        path = _tree_path(parent, nbr, y)
        ep = compose_path(sub_sys, path, start=nbr)
        a_y, b_raw, _ = ep.oriented(nbr)
        ratios[y] = (a_y, dom.neg(b_raw))  # a_y * nbr = b_y * y

    big = dom.lcm_many(b for _, b in ratios.values())
    a, b, c = edge.oriented(nbr)  # a*nbr + b*leaf = c
    c2 = dom.sub(c, dom.mul(a, phi1[nbr]))
    sol = dom.solve_single(dom.mul(a, big), b, c2)
    if sol is None:
        return None
    r0, leaf_val, _ = sol
    phi: Assignment = {leaf: leaf_val}
    shift = dom.mul(big, r0)
    phi[nbr] = dom.add(phi1[nbr], shift)
    for y, (a_y, b_y) in ratios.items():
        inc = dom.mul(dom.mul(a_y, dom.exact_div(big, b_y)), r0)
        phi[y] = dom.add(phi1[y], inc)
    return phi


def _solve_component(sys: LinSystem, comp: List[Var]) -> Optional[Assignment]:
    dom = sys.domain
    if len(comp) == 1 and not sys.adjacency[comp[0]]:
        return {comp[0]: dom.zero}
    tree, nontree, parent = _spanning_tree(sys, comp)
    for eid in nontree:
        e = sys.by_id(eid)
        path = _tree_path(parent, e.u, e.v)
        ep = compose_path(sys, path, start=e.u)
        kind, forced = _equivalence_case(dom, ep.oriented(e.u), e.oriented(e.u))
        if kind == "inconsistent":
            return None
        if kind == "forced":
            comp_sys = sys.restrict(comp)
            phi = _propagate_forced(comp_sys, e.v, forced)
            if phi is None or not satisfies(comp_sys, phi):
                return None
            return phi
    phi = _solve_tree(sys, comp, tree)
    if phi is None:
        return None
    comp_sys = sys.restrict(comp)
    if not satisfies(comp_sys, phi):
        return None
    return phi


def solve(sys: LinSystem) -> Optional[Assignment]:
    """Satisfying assignment of the system, or None if inconsistent."""
    phi: Assignment = {}
    for comp in sys.components():
        part = _solve_component(sys, comp)
        if part is None:
            return None
        phi.update(part)
    return phi


def solve_flexible_at(sys: LinSystem, pin: Var, value) -> Optional[Assignment]:
    """Solve a flexible system while pinning one variable's value.

    Works per component; in the pinned component the value is
    propagated through implied equations (divisions may fail over a
    non-field domain, in which case None is returned).
    """
    dom = sys.domain
    phi: Assignment = {}
    for comp in sys.components():
        if pin in comp:
            comp_sys = sys.restrict(comp)
            got = _propagate_forced(comp_sys, pin, value)
            if got is None or not satisfies(comp_sys, got):
                return None
            phi.update(got)
        else:
            part = _solve_component(sys, comp)
            if part is None:
                return None
            phi.update(part)
    return phi


def equalize(sys: LinSystem) -> Tuple[LinSystem, Substitution]:
    """Rewrite a flexible field system so every equation reads x' = y'.

    The substitution is x -> a_x * x' + phi(x) with a_x nonzero, so it
    is invertible and primal graph and weights are untouched.
    """
    dom = sys.domain
    if not dom.is_field:
        raise NotAField("equalize needs a field domain")
    if not is_flexible(sys):
        raise NotFlexible("equalize needs a flexible system")
    phi = solve(sys)
    if phi is None:
        raise NotFlexible("flexible field system must be consistent")
    scale: Dict[Var, Value] = {}
    shift: Dict[Var, Value] = {x: phi[x] for x in sys.variables}
    homog, _ = homogenize(sys, phi)
    for comp in sys.components():
        root = comp[0]
        scale[root] = dom.one
        for y in comp[1:]:
            e = implied_equation(homog, root, y)
            a_r, b_y, _ = e.oriented(root)
            # a_r * root = -b_y * y, both nonzero in a flexible system
            scale[y] = dom.neg(dom.exact_div(a_r, b_y))
    eqs = []
    one = dom.one
    for e in sys.equations:
        new_a = dom.mul(e.a, scale[e.u])
        new_b = dom.mul(e.b, scale[e.v])
        a, b, c = normalize_equation(dom, new_a, new_b, dom.zero)
        if (a, b, c) != (one, dom.neg(one), dom.zero):
            raise AssertionError("equalized equation is not an equality")
        eqs.append(replace(e, a=a, b=b, c=c))
    return LinSystem(dom, sys.variables, tuple(eqs)), Substitution(dom, scale, shift)
