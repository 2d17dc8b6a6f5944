"""Mixed causal graphs: DAGs, CPDAGs, d-separation, and knowledge-based orientation.

A :class:`CausalGraph` holds a fixed node set together with directed and
undirected edges.  Fully oriented acyclic graphs model causal DAGs; graphs
with undirected edges represent equivalence classes (CPDAGs) or partially
oriented intermediate states.  All graphs are immutable; every operation
returns a new graph.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "CausalGraph",
    "KnowledgeConstraints",
    "PathDiagnostic",
    "ContradictionError",
    "is_d_separated",
    "classify_paths",
    "apply_knowledge",
    "export_graph",
    "parse_graph",
]


class ContradictionError(ValueError):
    """A knowledge constraint conflicts with the graph or another constraint."""


def _norm_pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True, eq=False)
class CausalGraph:
    """Immutable mixed graph with directed and undirected edges.

    ``nodes`` keeps a stable presentation order; equality ignores it and
    compares node and edge sets only.
    """

    nodes: tuple[str, ...]
    directed: frozenset[tuple[str, str]] = frozenset()
    undirected: frozenset[tuple[str, str]] = frozenset()

    def __init__(
        self,
        nodes: Iterable[str],
        directed: Iterable[tuple[str, str]] = (),
        undirected: Iterable[tuple[str, str]] = (),
    ) -> None:
        node_tuple = tuple(nodes)
        if len(set(node_tuple)) != len(node_tuple):
            raise ValueError("duplicate node names")
        node_set = set(node_tuple)
        dir_set = frozenset((str(a), str(b)) for a, b in directed)
        und_set = frozenset(_norm_pair(str(a), str(b)) for a, b in undirected)
        for a, b in dir_set | und_set:
            if a == b:
                raise ValueError(f"self-loop on node {a!r}")
            if a not in node_set or b not in node_set:
                raise ValueError(f"edge ({a!r}, {b!r}) references unknown node")
        for a, b in dir_set:
            if (b, a) in dir_set:
                raise ValueError(f"both orientations of ({a!r}, {b!r}) present")
            if _norm_pair(a, b) in und_set:
                raise ValueError(f"({a!r}, {b!r}) is both directed and undirected")
        object.__setattr__(self, "nodes", node_tuple)
        object.__setattr__(self, "directed", dir_set)
        object.__setattr__(self, "undirected", und_set)

    # -- comparisons ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CausalGraph):
            return NotImplemented
        return (
            set(self.nodes) == set(other.nodes)
            and self.directed == other.directed
            and self.undirected == other.undirected
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.nodes), self.directed, self.undirected))

    def __repr__(self) -> str:
        return (
            f"CausalGraph({len(self.nodes)} nodes, {len(self.directed)} directed, "
            f"{len(self.undirected)} undirected)"
        )

    # -- local structure -------------------------------------------------

    def _check_node(self, v: str) -> None:
        if v not in self._node_set:
            raise ValueError(f"unknown node {v!r}")

    @property
    def _node_set(self) -> frozenset[str]:
        return frozenset(self.nodes)

    def parents(self, v: str) -> frozenset[str]:
        self._check_node(v)
        return frozenset(a for a, b in self.directed if b == v)

    def children(self, v: str) -> frozenset[str]:
        self._check_node(v)
        return frozenset(b for a, b in self.directed if a == v)

    def undirected_neighbors(self, v: str) -> frozenset[str]:
        self._check_node(v)
        return frozenset(a if b == v else b for a, b in self.undirected if v in (a, b))

    def adjacent(self, a: str, b: str) -> bool:
        return (
            (a, b) in self.directed
            or (b, a) in self.directed
            or _norm_pair(a, b) in self.undirected
        )

    def neighbors(self, v: str) -> frozenset[str]:
        return self.parents(v) | self.children(v) | self.undirected_neighbors(v)

    @property
    def has_undirected(self) -> bool:
        return bool(self.undirected)

    def descendants(self, v: str) -> frozenset[str]:
        """All nodes reachable from ``v`` along directed edges (excluding ``v``)."""
        self._check_node(v)
        seen: set[str] = set()
        stack = [v]
        while stack:
            cur = stack.pop()
            for child in self.children(cur):
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return frozenset(seen)

    def ancestors(self, v: str) -> frozenset[str]:
        self._check_node(v)
        seen: set[str] = set()
        stack = [v]
        while stack:
            cur = stack.pop()
            for parent in self.parents(cur):
                if parent not in seen:
                    seen.add(parent)
                    stack.append(parent)
        return frozenset(seen)

    def topological_order(self) -> tuple[str, ...]:
        """Topological order of the directed part; raises on cycles.

        Only meaningful for fully oriented graphs; undirected edges are
        ignored here (acyclicity of the directed part is what is checked).
        """
        indegree = {v: 0 for v in self.nodes}
        for _, b in self.directed:
            indegree[b] += 1
        ready = sorted(v for v in self.nodes if indegree[v] == 0)
        order: list[str] = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            changed = False
            for child in sorted(self.children(v)):
                indegree[child] -= 1
                if indegree[child] == 0:
                    ready.append(child)
                    changed = True
            if changed:
                ready.sort()
        if len(order) != len(self.nodes):
            raise ValueError("graph contains a directed cycle")
        return tuple(order)

    def is_dag(self) -> bool:
        if self.undirected:
            return False
        try:
            self.topological_order()
        except ValueError:
            return False
        return True

    def require_dag(self, context: str = "operation") -> None:
        if self.undirected:
            raise ValueError(f"{context} requires fully oriented DAG")
        self.topological_order()

    def skeleton_pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset(_norm_pair(a, b) for a, b in self.directed) | self.undirected


@dataclass(frozen=True)
class KnowledgeConstraints:
    """Expert edits applied on top of a discovered skeleton.

    ``required`` / ``forbidden`` hold ordered pairs (cause, effect).
    Forbidding both orientations of a pair removes the adjacency entirely.
    ``tiers`` optionally partitions (a subset of) the nodes into an ordered
    sequence of groups; edges may only point from earlier to later tiers.
    """

    required: frozenset[tuple[str, str]] = frozenset()
    forbidden: frozenset[tuple[str, str]] = frozenset()
    tiers: tuple[tuple[str, ...], ...] = ()

    def __init__(
        self,
        required: Iterable[tuple[str, str]] = (),
        forbidden: Iterable[tuple[str, str]] = (),
        tiers: Iterable[Iterable[str]] = (),
    ) -> None:
        req = frozenset((str(a), str(b)) for a, b in required)
        forb = frozenset((str(a), str(b)) for a, b in forbidden)
        tier_tuple = tuple(tuple(str(v) for v in tier) for tier in tiers)
        overlap = req & forb
        if overlap:
            raise ContradictionError(
                f"edge {sorted(overlap)[0]} is both required and forbidden"
            )
        seen: set[str] = set()
        for tier in tier_tuple:
            for v in tier:
                if v in seen:
                    raise ValueError(f"node {v!r} appears in more than one tier")
                seen.add(v)
        tier_index = {v: i for i, tier in enumerate(tier_tuple) for v in tier}
        for a, b in req:
            ia, ib = tier_index.get(a), tier_index.get(b)
            if ia is not None and ib is not None and ia > ib:
                raise ContradictionError(
                    f"required edge ({a!r}, {b!r}) points against the tier order"
                )
        object.__setattr__(self, "required", req)
        object.__setattr__(self, "forbidden", forb)
        object.__setattr__(self, "tiers", tier_tuple)

    @property
    def is_empty(self) -> bool:
        return not (self.required or self.forbidden or self.tiers)


@dataclass(frozen=True)
class PathDiagnostic:
    """One simple path between treatment and outcome with its blocking status.

    ``roles`` classifies each interior node as chain, fork, or collider from
    the edge orientations along the path; ``blocked_given`` records the
    conditioning set used for the open/blocked verdict.
    """

    nodes: tuple[str, ...]
    roles: tuple[str, ...]
    blocked_given: frozenset[str]
    is_open: bool
    is_backdoor: bool

    def to_json_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "roles": list(self.roles),
            "blocked_given": sorted(self.blocked_given),
            "open": self.is_open,
            "backdoor": self.is_backdoor,
        }


# ---------------------------------------------------------------------------
# d-separation
# ---------------------------------------------------------------------------


def is_d_separated(
    g: CausalGraph,
    xs: Iterable[str],
    ys: Iterable[str],
    zs: Iterable[str] = (),
) -> bool:
    """Decide whether every path between ``xs`` and ``ys`` is blocked by ``zs``.

    Linear-time reachability over (node, travel direction) states: a collider
    passes only when it or one of its descendants is conditioned on, a chain
    or fork passes only when unconditioned.
    """
    x_set, y_set, z_set = frozenset(xs), frozenset(ys), frozenset(zs)
    for v in x_set | y_set | z_set:
        g._check_node(v)
    if x_set & y_set or x_set & z_set or y_set & z_set:
        raise ValueError("X, Y, Z must be disjoint")
    if not x_set or not y_set:
        raise ValueError("X and Y must be non-empty")
    g.require_dag("d-separation")

    # Nodes that are in Z or have a descendant in Z (collider openers).
    z_ancestry: set[str] = set(z_set)
    stack = list(z_set)
    while stack:
        cur = stack.pop()
        for parent in g.parents(cur):
            if parent not in z_ancestry:
                z_ancestry.add(parent)
                stack.append(parent)

    # Direction "up" means the trail is currently moving against arrows.
    frontier: list[tuple[str, str]] = [(x, "up") for x in x_set]
    visited: set[tuple[str, str]] = set()
    while frontier:
        node, direction = frontier.pop()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node in y_set and node not in z_set:
            return False
        if direction == "up" and node not in z_set:
            for parent in g.parents(node):
                frontier.append((parent, "up"))
            for child in g.children(node):
                frontier.append((child, "down"))
        elif direction == "down":
            if node not in z_set:
                for child in g.children(node):
                    frontier.append((child, "down"))
            if node in z_ancestry:
                for parent in g.parents(node):
                    frontier.append((parent, "up"))
    return True


def _simple_paths(g: CausalGraph, x: str, y: str) -> Iterator[tuple[str, ...]]:
    """All simple paths between x and y over the skeleton, in DFS order."""
    path = [x]
    on_path = {x}

    def walk(v: str) -> Iterator[tuple[str, ...]]:
        for nxt in sorted(g.neighbors(v)):
            if nxt == y:
                yield tuple(path) + (y,)
            elif nxt not in on_path:
                path.append(nxt)
                on_path.add(nxt)
                yield from walk(nxt)
                path.pop()
                on_path.discard(nxt)

    yield from walk(x)


def classify_paths(
    g: CausalGraph, x: str, y: str, zs: Iterable[str] = ()
) -> list[PathDiagnostic]:
    """Diagnose every simple path between two nodes of a DAG."""
    g._check_node(x)
    g._check_node(y)
    if x == y:
        raise ValueError("endpoints must differ")
    g.require_dag("path classification")
    z_set = frozenset(zs)

    desc_cache: dict[str, frozenset[str]] = {}

    def collider_open(v: str) -> bool:
        if v in z_set:
            return True
        if v not in desc_cache:
            desc_cache[v] = g.descendants(v)
        return bool(desc_cache[v] & z_set)

    out: list[PathDiagnostic] = []
    for path in _simple_paths(g, x, y):
        roles: list[str] = []
        is_open = True
        for i in range(1, len(path) - 1):
            prev_in = (path[i - 1], path[i]) in g.directed
            next_in = (path[i + 1], path[i]) in g.directed
            if prev_in and next_in:
                role = "collider"
                node_open = collider_open(path[i])
            elif not prev_in and not next_in:
                role = "fork"
                node_open = path[i] not in z_set
            else:
                role = "chain"
                node_open = path[i] not in z_set
            roles.append(role)
            is_open = is_open and node_open
        backdoor = (path[1], path[0]) in g.directed
        out.append(
            PathDiagnostic(
                nodes=path,
                roles=tuple(roles),
                blocked_given=z_set,
                is_open=is_open,
                is_backdoor=backdoor,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Orientation machinery (shared by knowledge application and CPDAG completion)
# ---------------------------------------------------------------------------


class _MutableMixed:
    """Dict-based mutable mixed graph used while orienting edges."""

    __slots__ = ("nodes", "par", "chi", "und")

    def __init__(self, nodes: Sequence[str]):
        self.nodes = list(nodes)
        self.par: dict[str, set[str]] = {v: set() for v in nodes}
        self.chi: dict[str, set[str]] = {v: set() for v in nodes}
        self.und: dict[str, set[str]] = {v: set() for v in nodes}

    @classmethod
    def from_graph(cls, g: CausalGraph) -> "_MutableMixed":
        m = cls(g.nodes)
        for a, b in g.directed:
            m.add_directed(a, b)
        for a, b in g.undirected:
            m.add_undirected(a, b)
        return m

    def add_directed(self, a: str, b: str) -> None:
        self.chi[a].add(b)
        self.par[b].add(a)

    def add_undirected(self, a: str, b: str) -> None:
        self.und[a].add(b)
        self.und[b].add(a)

    def remove_adjacency(self, a: str, b: str) -> None:
        self.chi[a].discard(b)
        self.chi[b].discard(a)
        self.par[a].discard(b)
        self.par[b].discard(a)
        self.und[a].discard(b)
        self.und[b].discard(a)

    def has_directed(self, a: str, b: str) -> bool:
        return b in self.chi[a]

    def has_undirected(self, a: str, b: str) -> bool:
        return b in self.und[a]

    def adjacent(self, a: str, b: str) -> bool:
        return b in self.chi[a] or a in self.chi[b] or b in self.und[a]

    def orient(self, a: str, b: str) -> None:
        """Turn the undirected edge a--b into a->b."""
        self.und[a].discard(b)
        self.und[b].discard(a)
        self.add_directed(a, b)

    def find_cycle_edge(self) -> tuple[str, str] | None:
        """Return one edge participating in a directed cycle, if any."""
        color: dict[str, int] = {v: 0 for v in self.nodes}
        parent_edge: dict[str, str] = {}

        for start in self.nodes:
            if color[start]:
                continue
            stack: list[tuple[str, Iterator[str]]] = [(start, iter(sorted(self.chi[start])))]
            color[start] = 1
            while stack:
                node, it = stack[-1]
                advanced = False
                for child in it:
                    if color[child] == 0:
                        color[child] = 1
                        parent_edge[child] = node
                        stack.append((child, iter(sorted(self.chi[child]))))
                        advanced = True
                        break
                    if color[child] == 1:
                        return (node, child)
                if not advanced:
                    color[node] = 2
                    stack.pop()
        return None

    def to_graph(self) -> CausalGraph:
        directed = [(a, b) for a in self.nodes for b in sorted(self.chi[a])]
        undirected = [
            (a, b) for a in self.nodes for b in sorted(self.und[a]) if a < b
        ]
        return CausalGraph(self.nodes, directed, undirected)


def _meek_closure(m: _MutableMixed) -> None:
    """Orient undirected edges implied by Meek rules R1-R4 until fixpoint."""
    changed = True
    while changed:
        changed = False
        for b in m.nodes:
            for c in sorted(m.und[b]):
                # R1: a -> b -- c with a, c non-adjacent  =>  b -> c
                if any(not m.adjacent(a, c) for a in m.par[b] if a != c):
                    m.orient(b, c)
                    changed = True
                    continue
                # R2: b -> w -> c with b -- c  =>  b -> c
                if any(c in m.chi[w] for w in m.chi[b]):
                    m.orient(b, c)
                    changed = True
                    continue
                # R3: b -- d1, b -- d2, d1 -> c, d2 -> c, d1, d2 non-adjacent
                parents_in_und = [d for d in m.par[c] if d in m.und[b]]
                fired = False
                for i, d1 in enumerate(parents_in_und):
                    for d2 in parents_in_und[i + 1 :]:
                        if not m.adjacent(d1, d2):
                            m.orient(b, c)
                            changed = True
                            fired = True
                            break
                    if fired:
                        break
                if fired:
                    continue
                # R4: b -- d, d -> e, e -> c, b adjacent to e... orient b -> c
                # when c and d are non-adjacent (kite configuration).
                for d in sorted(m.und[b]):
                    if d == c:
                        continue
                    hit = False
                    for e in sorted(m.chi[d]):
                        if c in m.chi[e] and m.adjacent(b, e) and not m.adjacent(c, d):
                            m.orient(b, c)
                            changed = True
                            hit = True
                            break
                    if hit:
                        break


def _orient_v_structures(m: _MutableMixed, dag: CausalGraph) -> None:
    """Copy every v-structure of ``dag`` onto the skeleton state ``m``."""
    for z in dag.nodes:
        ps = sorted(dag.parents(z))
        for i, a in enumerate(ps):
            for b in ps[i + 1 :]:
                if not dag.adjacent(a, b):
                    if m.has_undirected(a, z):
                        m.orient(a, z)
                    if m.has_undirected(b, z):
                        m.orient(b, z)


def complete_pattern(dag: CausalGraph) -> CausalGraph:
    """Completed partially directed graph (CPDAG) of a DAG."""
    dag.require_dag("pattern completion")
    m = _MutableMixed(dag.nodes)
    for a, b in dag.directed:
        m.add_undirected(a, b)
    _orient_v_structures(m, dag)
    _meek_closure(m)
    return m.to_graph()


def extend_to_dag(g: CausalGraph) -> CausalGraph:
    """Orient all undirected edges into a DAG consistent with ``g``.

    Dor-Tarsi extension: repeatedly removes a node with no outgoing directed
    edges whose undirected neighbors form a clique with all its neighbors.
    Raises if no consistent extension exists.
    """
    m = _MutableMixed.from_graph(g)
    remaining = set(g.nodes)
    oriented: list[tuple[str, str]] = []
    while remaining:
        progress = False
        for v in sorted(remaining):
            if m.chi[v] & remaining:
                continue
            nbrs = (m.par[v] | m.und[v]) & remaining
            ok = all(
                m.adjacent(u, w)
                for u in m.und[v] & remaining
                for w in nbrs
                if w != u
            )
            if not ok:
                continue
            for u in sorted(m.und[v] & remaining):
                oriented.append((u, v))
            remaining.discard(v)
            progress = True
            break
        if not progress:
            raise ValueError("graph admits no consistent DAG extension")
    return CausalGraph(g.nodes, list(g.directed) + oriented, ())


def apply_knowledge(g: CausalGraph, k: KnowledgeConstraints) -> CausalGraph:
    """Orient or remove edges per expert constraints, then close under Meek rules.

    Forbidding both orientations of an adjacent pair removes the adjacency.
    Contradictions (conflicting orientations, forced cycles) raise
    :class:`ContradictionError` naming the offending edge.
    """
    for a, b in sorted(k.required):
        if not g.adjacent(a, b):
            raise ValueError(
                f"required edge ({a!r}, {b!r}) has no corresponding adjacency"
            )

    m = _MutableMixed.from_graph(g)

    both_forbidden = {
        _norm_pair(a, b) for a, b in k.forbidden if (b, a) in k.forbidden
    }
    for a, b in sorted(both_forbidden):
        m.remove_adjacency(a, b)

    for a, b in sorted(k.required):
        if m.has_directed(b, a):
            raise ContradictionError(
                f"required edge ({a!r}, {b!r}) conflicts with existing {b!r} -> {a!r}"
            )
        if m.has_undirected(a, b):
            m.orient(a, b)

    for a, b in sorted(k.forbidden):
        if _norm_pair(a, b) in both_forbidden:
            continue
        if m.has_directed(a, b):
            raise ContradictionError(
                f"forbidden orientation ({a!r}, {b!r}) already present in graph"
            )
        if m.has_undirected(a, b):
            m.orient(b, a)

    if k.tiers:
        tier_index = {v: i for i, tier in enumerate(k.tiers) for v in tier}
        for a in m.nodes:
            for b in sorted(m.chi[a]):
                ia, ib = tier_index.get(a), tier_index.get(b)
                if ia is not None and ib is not None and ia > ib:
                    raise ContradictionError(
                        f"edge ({a!r}, {b!r}) points against the tier order"
                    )
        for a in m.nodes:
            for b in sorted(m.und[a]):
                if a >= b:
                    continue
                ia, ib = tier_index.get(a), tier_index.get(b)
                if ia is None or ib is None or ia == ib:
                    continue
                if ia < ib:
                    m.orient(a, b)
                else:
                    m.orient(b, a)

    _meek_closure(m)

    cycle_edge = m.find_cycle_edge()
    if cycle_edge is not None:
        raise ContradictionError(
            f"constraints force a directed cycle through edge {cycle_edge}"
        )
    result = m.to_graph()
    for a, b in result.directed:
        if (a, b) in k.forbidden:
            raise ContradictionError(
                f"constraint propagation forces forbidden edge ({a!r}, {b!r})"
            )
    return result


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def export_graph(g: CausalGraph, fmt: str = "json") -> str:
    """Render a graph as DOT or JSON text; ``parse_graph`` inverts both."""
    if fmt == "dot":
        lines = ["digraph causal {"]
        for v in g.nodes:
            lines.append(f'  "{v}";')
        for a, b in sorted(g.directed):
            lines.append(f'  "{a}" -> "{b}";')
        for a, b in sorted(g.undirected):
            lines.append(f'  "{a}" -- "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        payload = {
            "nodes": list(g.nodes),
            "directed": [[a, b] for a, b in sorted(g.directed)],
            "undirected": [[a, b] for a, b in sorted(g.undirected)],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown graph format {fmt!r}")


_DOT_NODE = re.compile(r'^\s*"([^"]+)"\s*;\s*$')
_DOT_EDGE = re.compile(r'^\s*"([^"]+)"\s*(->|--)\s*"([^"]+)"\s*;\s*$')


def parse_graph(text: str, fmt: str = "json") -> CausalGraph:
    if fmt == "dot":
        nodes: list[str] = []
        directed: list[tuple[str, str]] = []
        undirected: list[tuple[str, str]] = []
        seen: set[str] = set()

        def note(v: str) -> None:
            if v not in seen:
                seen.add(v)
                nodes.append(v)

        for line in text.splitlines():
            stripped = line.strip()
            if not stripped or stripped.startswith(("digraph", "}")):
                continue
            edge = _DOT_EDGE.match(line)
            if edge:
                a, kind, b = edge.groups()
                note(a)
                note(b)
                (directed if kind == "->" else undirected).append((a, b))
                continue
            node = _DOT_NODE.match(line)
            if node:
                note(node.group(1))
                continue
            raise ValueError(f"unparseable DOT line: {line.strip()!r}")
        return CausalGraph(nodes, directed, undirected)
    if fmt == "json":
        payload = json.loads(text)
        return graph_from_json_dict(payload)
    raise ValueError(f"unknown graph format {fmt!r}")


def graph_to_json_dict(g: CausalGraph) -> dict:
    return {
        "nodes": list(g.nodes),
        "directed": [[a, b] for a, b in sorted(g.directed)],
        "undirected": [[a, b] for a, b in sorted(g.undirected)],
    }


def graph_from_json_dict(payload: Mapping) -> CausalGraph:
    def edge_pairs(entries: Iterable) -> list[tuple[str, str]]:
        pairs = []
        for entry in entries:
            if isinstance(entry, Mapping):
                pairs.append((entry["from"], entry["to"]))
            else:
                a, b = entry[0], entry[1]
                pairs.append((a, b))
        return pairs

    return CausalGraph(
        payload["nodes"],
        edge_pairs(payload.get("directed", ())),
        edge_pairs(payload.get("undirected", ())),
    )
