"""Token flow graphs: a DAG encoding of reduction equations.

Nodes are places of the original net, places of the reduced net, variables
introduced by agglomerations and fresh constant nodes.  A redundancy equation
``v = x1 + ... + xl`` contributes redundancy arcs ``xi -> v`` (v was removed
from the net); an agglomeration equation ``v = x1 + ... + xl`` contributes
agglomeration arcs ``v -> xi`` (the xi were removed, v inserted).  A valuation
of the roots then extends along the arcs to token counts for every removed
place, which is what makes projections and concurrency propagation cheap.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from tfgkit.net_io import TaggedEquation
from tfgkit.petri import Marking

CHECK_IDS = ("T1", "T2", "T3", "T4", "T5", "T6")


class NotWellFormedError(Exception):
    """Graph violates one of the structural checks T1..T6."""

    def __init__(self, check_id: str, witness: tuple[str, ...], detail: str):
        self.check_id = check_id
        self.witness = witness
        self.detail = detail
        super().__init__(f"{check_id}: {detail}")


class DivergesError(Exception):
    """Defensive cap on node values blew up during extension enumeration."""


@dataclass(frozen=True)
class Violation:
    check_id: str
    witness: tuple[str, ...]
    detail: str


@dataclass(frozen=True, eq=True)
class TokenFlowGraph:
    """Immutable graph structure.  Use :func:`build` to construct and validate.

    Attributes
    ----------
    nodes:
        All node names in canonical order: original places first (their
        declaration order), then surviving extra places, then remaining
        variables sorted, then constant nodes.
    constants:
        Value of each constant node.
    r_arcs, a_arcs:
        Redundancy and agglomeration arcs as (source, target) pairs.
    p1, p2:
        Place sets of the original and the reduced net.
    """

    nodes: tuple[str, ...]
    constants: Mapping[str, int]
    r_arcs: frozenset[tuple[str, str]]
    a_arcs: frozenset[tuple[str, str]]
    p1: frozenset[str]
    p2: frozenset[str]

    @cached_property
    def _order(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    def _sorted(self, names: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(names, key=self._order.__getitem__))

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        """Targets of outgoing arcs, both kinds, in node order."""
        out: dict[str, set[str]] = {v: set() for v in self.nodes}
        for src, dst in self.r_arcs | self.a_arcs:
            out[src].add(dst)
        return {v: self._sorted(out[v]) for v in self.nodes}

    @cached_property
    def parents(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, set[str]] = {v: set() for v in self.nodes}
        for src, dst in self.r_arcs | self.a_arcs:
            out[dst].add(src)
        return {v: self._sorted(out[v]) for v in self.nodes}

    @cached_property
    def a_children(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, set[str]] = {v: set() for v in self.nodes}
        for src, dst in self.a_arcs:
            out[src].add(dst)
        return {v: self._sorted(out[v]) for v in self.nodes}

    @cached_property
    def r_children(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, set[str]] = {v: set() for v in self.nodes}
        for src, dst in self.r_arcs:
            out[src].add(dst)
        return {v: self._sorted(out[v]) for v in self.nodes}

    @cached_property
    def r_parents(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, set[str]] = {v: set() for v in self.nodes}
        for src, dst in self.r_arcs:
            out[dst].add(src)
        return {v: self._sorted(out[v]) for v in self.nodes}

    @cached_property
    def roots(self) -> tuple[str, ...]:
        return tuple(v for v in self.nodes if not self.parents[v])

    @cached_property
    def o_leaves(self) -> tuple[str, ...]:
        """Nodes without outgoing agglomeration arcs."""
        return tuple(v for v in self.nodes if not self.a_children[v])

    @cached_property
    def topo_order(self) -> tuple[str, ...]:
        """Roots-first topological order; requires acyclicity (check T5)."""
        indeg = {v: len(self.parents[v]) for v in self.nodes}
        ready = deque(v for v in self.nodes if indeg[v] == 0)
        order: list[str] = []
        while ready:
            v = ready.popleft()
            order.append(v)
            for w in self.children[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        return tuple(order)

    @cached_property
    def groups(self) -> tuple[tuple[str, tuple[str, ...]], ...]:
        """Equation groups (head, members): head's value equals the member sum.

        One group per agglomeration source (members: its agglomeration
        children) and one per redundancy target (members: its redundancy
        parents).
        """
        out = []
        for v in self.nodes:
            if self.a_children[v]:
                out.append((v, self.a_children[v]))
        for v in self.nodes:
            if self.r_parents[v]:
                out.append((v, self.r_parents[v]))
        return tuple(out)

    def successors(self, v: str) -> frozenset[str]:
        """Reflexive-transitive closure along both arc kinds."""
        return self._successor_map[v]

    @cached_property
    def _successor_map(self) -> dict[str, frozenset[str]]:
        succ: dict[str, frozenset[str]] = {}
        for v in reversed(self.topo_order):
            acc: set[str] = {v}
            for w in self.children[v]:
                acc |= succ[w]
            succ[v] = frozenset(acc)
        return succ


def _fresh_constant_names(equations, used: set[str]) -> dict[int, str]:
    """Deterministic constant node names, one per constant equation.

    Indexed by equation position; names k0, k1, ... are assigned in sorted
    order of the defining lhs so that permuting the equation list cannot
    change them.
    """
    const_positions = [i for i, eq in enumerate(equations) if eq.constant is not None]
    const_positions.sort(key=lambda i: (equations[i].lhs, equations[i].constant))
    names: dict[int, str] = {}
    counter = 0
    for pos in const_positions:
        while f"k{counter}" in used:
            counter += 1
        names[pos] = f"k{counter}"
        used.add(names[pos])
        counter += 1
    return names


def _construct(
    equations: Iterable[TaggedEquation],
    p1: Iterable[str],
    p2: Iterable[str],
) -> tuple[TokenFlowGraph, list[tuple[str, frozenset[str]]]]:
    equations = tuple(equations)
    p1 = tuple(p1)
    p2 = tuple(p2)
    fv: set[str] = set()
    for eq in equations:
        fv.add(eq.lhs)
        fv.update(eq.terms)
    used = set(p1) | set(p2) | fv
    cnames = _fresh_constant_names(equations, used)

    constants: dict[str, int] = {}
    r_arcs: set[tuple[str, str]] = set()
    a_arcs: set[tuple[str, str]] = set()
    canonical: list[tuple[str, frozenset[str]]] = []
    for i, eq in enumerate(equations):
        if eq.constant is not None:
            rhs: tuple[str, ...] = (cnames[i],)
            constants[cnames[i]] = eq.constant
        else:
            rhs = eq.terms
        if eq.tag == "R":
            r_arcs.update((x, eq.lhs) for x in rhs)
        else:
            a_arcs.update((eq.lhs, x) for x in rhs)
        canonical.append((eq.lhs, frozenset(rhs)))

    p1_set, p2_set = set(p1), set(p2)
    nodes = list(p1)
    nodes.extend(p for p in p2 if p not in p1_set)
    nodes.extend(sorted(fv - p1_set - p2_set))
    nodes.extend(cnames[i] for i in sorted(cnames, key=lambda i: cnames[i]))
    graph = TokenFlowGraph(
        nodes=tuple(nodes),
        constants=constants,
        r_arcs=frozenset(r_arcs),
        a_arcs=frozenset(a_arcs),
        p1=frozenset(p1_set),
        p2=frozenset(p2_set),
    )
    return graph, canonical


def violations(
    graph: TokenFlowGraph,
    canonical_equations: list[tuple[str, frozenset[str]]] | None = None,
) -> list[Violation]:
    """All failed structural checks, in check order T1..T6.

    T4 (arc groups match the equations one for one) is only checkable when
    the canonical equation list is supplied, as :func:`build` does.
    """
    found: list[Violation] = []
    node_set = set(graph.nodes)
    const_set = set(graph.constants)

    fv: set[str] = set()
    if canonical_equations is not None:
        for lhs, rhs in canonical_equations:
            fv.add(lhs)
            fv.update(rhs - const_set)
        expected = graph.p1 | graph.p2 | fv
        actual = node_set - const_set
        if actual != expected:
            extra = tuple(sorted(actual ^ expected))
            found.append(Violation("T1", extra, f"node set mismatch on {extra}"))

    for c in sorted(const_set):
        if graph.parents[c]:
            found.append(Violation("T2", (c,), f"constant {c} has an incoming arc"))

    both = graph.r_arcs & graph.a_arcs
    for src, dst in sorted(both):
        found.append(
            Violation("T3", (src, dst), f"arc {src}->{dst} is both redundancy and agglomeration")
        )
    for v in graph.nodes:
        a_in = [src for src, dst in graph.a_arcs if dst == v]
        if a_in and len(graph.parents[v]) > 1:
            found.append(
                Violation(
                    "T3",
                    (v,) + tuple(graph.parents[v]),
                    f"{v} has an incoming agglomeration arc plus another incoming arc",
                )
            )

    if canonical_equations is not None:
        from collections import Counter

        eq_count = Counter((lhs, rhs) for lhs, rhs in canonical_equations)
        group_count = Counter(
            (head, frozenset(members)) for head, members in graph.groups
        )
        if eq_count != group_count:
            diff = eq_count - group_count
            witness_head = sorted(diff)[0][0] if diff else sorted(group_count - eq_count)[0][0]
            found.append(
                Violation(
                    "T4",
                    (witness_head,),
                    "arc groups do not correspond one for one with the equations",
                )
            )

    if len(graph.topo_order) != len(graph.nodes):
        stuck = tuple(sorted(node_set - set(graph.topo_order)))
        found.append(Violation("T5", stuck, f"cycle through {stuck}"))
        return found  # closure-based checks below assume acyclicity

    root_places = set(graph.roots) - const_set
    if root_places != graph.p2:
        extra = tuple(sorted(root_places ^ graph.p2))
        found.append(Violation("T6", extra, f"roots differ from reduced places on {extra}"))
    leaf_places = set(graph.o_leaves) - const_set
    if leaf_places != graph.p1:
        extra = tuple(sorted(leaf_places ^ graph.p1))
        found.append(Violation("T6", extra, f"leaves differ from original places on {extra}"))
    return found


def build(
    equations: Iterable[TaggedEquation],
    p1: Iterable[str],
    p2: Iterable[str],
) -> TokenFlowGraph:
    """Construct the graph for ``equations`` and validate it.

    ``p1`` and ``p2`` are the ordered place lists of the original and the
    reduced net.  Raises :class:`NotWellFormedError` naming the first failed
    check.
    """
    graph, canonical = _construct(equations, p1, p2)
    found = violations(graph, canonical)
    if found:
        first = min(found, key=lambda v: CHECK_IDS.index(v.check_id))
        raise NotWellFormedError(first.check_id, first.witness, first.detail)
    return graph


def check(
    equations: Iterable[TaggedEquation],
    p1: Iterable[str],
    p2: Iterable[str],
) -> tuple[TokenFlowGraph, list[Violation]]:
    """Like :func:`build` but returns every violation instead of raising."""
    graph, canonical = _construct(equations, p1, p2)
    return graph, violations(graph, canonical)


# ---------------------------------------------------------------------------
# configurations

Configuration = Mapping[str, int]  # partial: absent nodes are undefined


def is_well_defined(graph: TokenFlowGraph, c: Configuration) -> bool:
    """Check a partial valuation against the graph.

    Along every arc both ends must be defined or both undefined; every defined
    group head must equal the sum of its members; defined constants must hold
    their stored value.
    """
    for src, dst in graph.r_arcs | graph.a_arcs:
        if (src in c) != (dst in c):
            return False
    for head, members in graph.groups:
        if head in c:
            if any(x not in c for x in members):
                return False
            if c[head] != sum(c[x] for x in members):
                return False
    for name, value in graph.constants.items():
        if name in c and c[name] != value:
            return False
    return True


def restrict(c: Configuration, places: Iterable[str]) -> Marking:
    """Marking over ``places`` read off a configuration."""
    return Marking({p: c[p] for p in places})


def _root_values(graph: TokenFlowGraph, roots: Configuration) -> dict[str, int]:
    if isinstance(roots, Marking):
        given = {p: roots[p] for p in roots.support()}
    else:
        given = {name: int(value) for name, value in roots.items()}
    root_set = set(graph.roots)
    for name, value in given.items():
        if name not in root_set:
            raise ValueError(f"{name!r} is not a root of the graph")
        if value < 0:
            raise ValueError(f"negative value for root {name!r}")
        if name in graph.constants and value != graph.constants[name]:
            raise ValueError(f"constant {name} pinned to a different value")
    return {v: graph.constants.get(v, given.get(v, 0)) for v in graph.roots}


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` naturals summing to ``total``, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def enumerate_extensions(
    graph: TokenFlowGraph,
    roots: Configuration,
    bound: int = 1,
) -> list[dict[str, int]]:
    """All total well-defined configurations extending a root valuation.

    ``roots`` assigns the non-constant roots (absent reduced places count as
    zero); constants are filled in automatically.  Token counts split over
    agglomeration children in every possible way, enumerated lexicographically
    in node order, so the result is exhaustive and duplicate free.  ``bound``
    only feeds a defensive divergence cap of ``bound * |nodes|`` per node
    value.
    """
    base = _root_values(graph, roots)
    cap = max(1, bound) * max(1, len(graph.nodes))
    configs: list[dict[str, int]] = [base]
    for v in graph.topo_order:
        r_parents = graph.r_parents[v]
        splits = graph.a_children[v]
        next_configs: list[dict[str, int]] = []
        for cfg in configs:
            if r_parents:
                cfg[v] = sum(cfg[x] for x in r_parents)
            value = cfg[v]  # roots and agglomeration targets are already set
            if value > cap:
                raise DivergesError(f"value {value} at {v} exceeds cap {cap}")
            if splits:
                for parts in _compositions(value, len(splits)):
                    branch = dict(cfg)
                    branch.update(zip(splits, parts))
                    next_configs.append(branch)
            else:
                next_configs.append(cfg)
        configs = next_configs
    return configs


def forward_propagate(
    graph: TokenFlowGraph, c: Configuration, src: str, dst: str
) -> dict[str, int]:
    """Reroute the tokens under ``src`` so they all pass through ``dst``.

    Returns a well-defined configuration that agrees with ``c`` outside the
    successors of ``src`` and carries at least ``c[src]`` tokens on ``dst``.
    ``c`` must be defined on the component of ``src`` and ``dst`` must be a
    successor of ``src``.
    """
    cone = graph.successors(src)
    if dst not in cone:
        raise ValueError(f"{dst!r} is not a successor of {src!r}")
    # one src -> dst path; splits along it route everything to the path child
    path_next: dict[str, str] = {}
    parent: dict[str, str] = {src: src}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if v == dst:
            break
        for w in graph.children[v]:
            if w not in parent:
                parent[w] = v
                queue.append(w)
    node = dst
    while node != src:
        path_next[parent[node]] = node
        node = parent[node]

    out = dict(c)
    for v in graph.topo_order:
        if v not in cone:
            continue
        if v != src and graph.r_parents[v]:
            out[v] = sum(out[x] for x in graph.r_parents[v])
        splits = graph.a_children[v]
        if splits:
            target = path_next.get(v)
            if target not in splits:
                target = splits[0]
            for x in splits:
                out[x] = out[v] if x == target else 0
    return out


def to_dot(graph: TokenFlowGraph) -> str:
    """Graphviz rendering: dot arrowheads for redundancy arcs, open dots for
    agglomeration arcs, boxed constants."""
    lines = ["digraph tfg {"]
    for v in graph.nodes:
        if v in graph.constants:
            lines.append(f'  "{v}" [shape=box, label="{graph.constants[v]}"];')
        else:
            lines.append(f'  "{v}";')
    for src, dst in sorted(graph.r_arcs):
        lines.append(f'  "{src}" -> "{dst}" [arrowhead=dot];')
    for src, dst in sorted(graph.a_arcs):
        lines.append(f'  "{src}" -> "{dst}" [arrowhead=odot];')
    lines.append("}")
    return "\n".join(lines) + "\n"
