"""Estimand identification: backdoor validation and minimal adjustment sets.

Validity follows the backdoor criterion literally: an adjustment set may not
contain descendants of the treatment and must block every path that enters
the treatment through an incoming arrow.  Enumeration of all
inclusion-minimal valid sets runs over vertex separators of the moralized
ancestor graph of the treatment-outcome pair in the graph with the
treatment's outgoing edges removed; within the ancestor-restricted candidate
pool this is exactly equivalent to the path-blocking definition but far
cheaper than filtering subsets.

Identification is for *total* effects.  When the only directed path from
treatment to outcome is the direct edge, total and direct effects coincide;
controlled-direct-effect identification in general graphs is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .graphs import CausalGraph, PathDiagnostic, classify_paths

__all__ = [
    "Estimand",
    "AdjustmentSearch",
    "is_valid_adjustment",
    "minimal_adjustment_sets",
    "identify_estimand",
]


def _check_pair(g: CausalGraph, x: str, y: str) -> None:
    g._check_node(x)
    g._check_node(y)
    if x == y:
        raise ValueError("treatment and outcome must differ")
    if g.has_undirected:
        raise ValueError("graph not fully oriented; apply knowledge first")
    g.topological_order()


def is_valid_adjustment(
    g: CausalGraph, x: str, y: str, zs: Iterable[str]
) -> bool:
    """Backdoor criterion: no descendants of ``x`` in ``zs``, and ``zs``
    blocks every backdoor path from ``x`` to ``y``."""
    z_set = frozenset(zs)
    _check_pair(g, x, y)
    for v in z_set:
        g._check_node(v)
    if x in z_set or y in z_set:
        raise ValueError("adjustment set must exclude treatment and outcome")
    if z_set & g.descendants(x):
        return False
    for path in classify_paths(g, x, y, z_set):
        if path.is_backdoor and path.is_open:
            return False
    return True


@dataclass(frozen=True)
class AdjustmentSearch:
    """Result of minimal-set enumeration.

    ``null_effect`` marks treatment-outcome pairs with no directed path: the
    interventional contrast is identically zero and no adjustment applies.
    """

    sets: tuple[frozenset[str], ...]
    null_effect: bool


@dataclass(frozen=True)
class Estimand:
    """A treatment/outcome query with everything needed to estimate it."""

    treatment: str
    outcome: str
    minimal_adjustment_sets: tuple[frozenset[str], ...]
    forbidden_nodes: frozenset[str]
    null_effect: bool
    diagnostics: tuple[PathDiagnostic, ...]

    @property
    def primary_adjustment_set(self) -> frozenset[str] | None:
        return self.minimal_adjustment_sets[0] if self.minimal_adjustment_sets else None

    def to_json_dict(self) -> dict:
        return {
            "treatment": self.treatment,
            "outcome": self.outcome,
            "null_effect": self.null_effect,
            "minimal_adjustment_sets": [
                sorted(s) for s in self.minimal_adjustment_sets
            ],
            "forbidden_nodes": sorted(self.forbidden_nodes),
            "paths": [p.to_json_dict() for p in self.diagnostics],
        }


# ---------------------------------------------------------------------------
# Separator machinery
# ---------------------------------------------------------------------------


def _moral_backdoor_graph(
    g: CausalGraph, x: str, y: str
) -> tuple[dict[str, set[str]], frozenset[str]]:
    """Moralized ancestor graph of {x, y} after cutting x's outgoing edges.

    Returns (undirected adjacency, node set).  Separation of x and y by a
    subset Z of the ancestor pool in this graph is equivalent to Z blocking
    every backdoor path in the original DAG.
    """
    cut = CausalGraph(
        g.nodes,
        [(a, b) for a, b in g.directed if a != x],
    )
    keep = cut.ancestors(x) | cut.ancestors(y) | {x, y}
    adjacency: dict[str, set[str]] = {v: set() for v in keep}

    def connect(a: str, b: str) -> None:
        if a != b:
            adjacency[a].add(b)
            adjacency[b].add(a)

    for a, b in cut.directed:
        if a in keep and b in keep:
            connect(a, b)
    for v in keep:
        parents = sorted(p for p in cut.parents(v) if p in keep)
        for i, a in enumerate(parents):
            for b in parents[i + 1 :]:
                connect(a, b)
    return adjacency, frozenset(keep)


def _separates(
    adjacency: Mapping[str, set[str]], x: str, y: str, z: frozenset[str]
) -> bool:
    seen = {x}
    stack = [x]
    while stack:
        for nxt in adjacency[stack.pop()]:
            if nxt == y:
                return False
            if nxt not in seen and nxt not in z:
                seen.add(nxt)
                stack.append(nxt)
    return True


def _greedy_minimal_separator(
    adjacency: Mapping[str, set[str]],
    x: str,
    y: str,
    include: frozenset[str],
    pool: frozenset[str],
) -> frozenset[str] | None:
    """Inclusion-minimal separator S with include <= S <= pool, or None."""
    if not _separates(adjacency, x, y, pool):
        return None
    current = set(pool)
    for v in sorted(pool - include):
        trial = frozenset(current - {v})
        if _separates(adjacency, x, y, trial):
            current.discard(v)
    return frozenset(current)


def _all_minimal_separators(
    adjacency: Mapping[str, set[str]], x: str, y: str, pool: frozenset[str]
) -> list[frozenset[str]]:
    found: set[frozenset[str]] = set()

    def explore(include: frozenset[str], candidates: frozenset[str]) -> None:
        sep = _greedy_minimal_separator(adjacency, x, y, include, candidates)
        if sep is None:
            return
        found.add(sep)
        free = sorted(sep - include)
        # Partition the remaining separators by the first free vertex they
        # drop; every other minimal separator misses at least one of them.
        for i, v in enumerate(free):
            explore(
                include | frozenset(free[:i]),
                candidates - {v},
            )

    explore(frozenset(), pool)
    minimal = [s for s in found if not any(o < s for o in found)]
    return sorted(minimal, key=lambda s: (len(s), tuple(sorted(s))))


def minimal_adjustment_sets(g: CausalGraph, x: str, y: str) -> AdjustmentSearch:
    """All inclusion-minimal valid backdoor adjustment sets, smallest first.

    A pair without a directed treatment-to-outcome path reports
    ``null_effect`` and no sets rather than an error.
    """
    _check_pair(g, x, y)
    if y not in g.descendants(x):
        return AdjustmentSearch(sets=(), null_effect=True)
    adjacency, keep = _moral_backdoor_graph(g, x, y)
    pool = frozenset(keep - {x, y} - g.descendants(x))
    seps = _all_minimal_separators(adjacency, x, y, pool)
    return AdjustmentSearch(sets=tuple(seps), null_effect=False)


def identify_estimand(g: CausalGraph, treatment: str, outcome: str) -> Estimand:
    """Bundle adjustment sets, forbidden nodes and path diagnostics."""
    _check_pair(g, treatment, outcome)
    search = minimal_adjustment_sets(g, treatment, outcome)
    return Estimand(
        treatment=treatment,
        outcome=outcome,
        minimal_adjustment_sets=search.sets,
        forbidden_nodes=g.descendants(treatment),
        null_effect=search.null_effect,
        diagnostics=tuple(classify_paths(g, treatment, outcome, ())),
    )
