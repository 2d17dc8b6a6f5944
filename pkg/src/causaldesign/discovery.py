"""Score-based causal structure finding: linear-Gaussian BIC and greedy
equivalence search (GES).

The search walks over equivalence classes represented as CPDAGs: a forward
sweep repeatedly applies the best score-improving valid edge insertion, a
backward sweep the best valid deletion.  Operator validity follows the
standard clique and semi-directed-path conditions; after every accepted
operator the state is re-completed to a CPDAG via a consistent DAG
extension.  Ties break lexicographically on (source, target, subset) so
results are reproducible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .dataset import Dataset
from .graphs import (
    CausalGraph,
    _MutableMixed,
    _meek_closure,
    _orient_v_structures,
    complete_pattern,
    extend_to_dag,
)

__all__ = [
    "GesConfig",
    "ScoreCache",
    "DiscoveryResult",
    "design_space_config",
    "local_bic",
    "ges_discover",
    "run_ges",
    "cpdag_of_dag",
]

# Minimum score gain treated as a real improvement; guards against float
# noise keeping the greedy loop alive on equivalent states.
_MIN_GAIN = 1e-9


@dataclass(frozen=True)
class GesConfig:
    """Search and scoring knobs.

    ``penalty_multiplier`` scales the BIC complexity term (1.0 is the plain
    criterion), ``max_parents`` caps regression size, ``standardize``
    rescales columns to zero mean and unit variance before scoring (the raw
    columns differ by orders of magnitude), ``variance_floor`` bounds the
    residual variance away from zero for near-deterministic columns.

    ``score_features`` selects the node-model basis used by the local score:
    plain parents ("linear") or parents plus all pairwise products
    ("interactions2").  The richer basis is the right choice for design
    spaces whose structural relations are multiplicative (geometry being
    area x height x floors); a linear basis misreads the leftover curvature
    of such relations as extra dependence.  The complexity term counts the
    fitted coefficients, so with interactions it grows quadratically in the
    parent count.

    ``transform`` optionally rescales columns before scoring: "log" turns
    multiplicative relations into additive ones (requires strictly positive
    data).  The structures found are reported over the original columns.
    """

    penalty_multiplier: float = 1.0
    max_parents: int = 18
    standardize: bool = True
    variance_floor: float = 1e-12
    score_features: str = "linear"
    transform: str = "none"

    def __post_init__(self) -> None:
        if self.penalty_multiplier < 0:
            raise ValueError("penalty_multiplier must be non-negative")
        if self.max_parents < 1:
            raise ValueError("max_parents must be at least 1")
        if not 0 < self.variance_floor <= 1e-6:
            raise ValueError("variance_floor must lie in (0, 1e-6]")
        if self.score_features not in ("linear", "interactions2"):
            raise ValueError(f"unknown score_features {self.score_features!r}")
        if self.transform not in ("none", "log"):
            raise ValueError(f"unknown transform {self.transform!r}")


def design_space_config(penalty_multiplier: float = 0.75) -> GesConfig:
    """Recommended scoring configuration for parametric design-space data.

    Geometry relations in such data are products of the sampled drivers, so
    the interaction basis is required for the residuals to behave like
    noise; the slightly reduced penalty keeps the weakest real effects
    (occupant gains on the load) above the acceptance threshold.
    """
    return GesConfig(
        penalty_multiplier=penalty_multiplier,
        score_features="interactions2",
    )


class ScoreCache:
    """Memo of local scores keyed by (target, parent set)."""

    def __init__(self) -> None:
        self._table: dict[tuple[str, frozenset[str]], float] = {}
        self.hits = 0
        self.misses = 0

    def get(self, target: str, parents: frozenset[str]) -> float | None:
        value = self._table.get((target, parents))
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value

    def put(self, target: str, parents: frozenset[str], score: float) -> None:
        self._table[(target, parents)] = score

    def __len__(self) -> int:
        return len(self._table)


class _LocalScorer:
    """Gaussian BIC local scores from a centered cross-product matrix.

    The residual sum of squares of a least-squares fit with intercept is
    read off the centered Gram matrix of the feature columns, which makes
    repeated scoring of small parent sets cheap and exactly equivalent to
    running the regression.  With ``interactions2`` the feature pool also
    holds every pairwise product of columns; a parent set then regresses on
    its parents plus the products among them.
    """

    def __init__(self, ds: Dataset, cfg: GesConfig):
        data = np.asarray(ds.rows, dtype=float)
        self.n = data.shape[0]
        self.names = list(ds.column_names)
        self.index = {name: i for i, name in enumerate(self.names)}
        if cfg.transform == "log":
            if np.any(data <= 0):
                raise ValueError(
                    "log transform requires strictly positive data"
                )
            data = np.log(data)
        centered = data - data.mean(axis=0)
        if cfg.standardize:
            scale = centered.std(axis=0, ddof=0)
            scale[scale == 0] = 1.0
            centered = centered / scale
        p = centered.shape[1]
        self.pair_index: dict[tuple[int, int], int] = {}
        if cfg.score_features == "interactions2":
            blocks = [centered]
            next_col = p
            for i in range(p):
                for j in range(i, p):
                    product = centered[:, i] * centered[:, j]
                    product = product - product.mean()
                    blocks.append(product[:, None])
                    self.pair_index[(i, j)] = next_col
                    next_col += 1
            features = np.concatenate(blocks, axis=1)
        else:
            features = centered
        self.gram = features.T @ features
        self.cfg = cfg
        self.cache = ScoreCache()

    def _feature_indices(self, parent_idx: list[int]) -> list[int]:
        cols = list(parent_idx)
        if self.cfg.score_features == "interactions2":
            for a in range(len(parent_idx)):
                for b in range(a, len(parent_idx)):
                    i, j = sorted((parent_idx[a], parent_idx[b]))
                    cols.append(self.pair_index[(i, j)])
        return cols

    def local(self, target: str, parents: Iterable[str]) -> float:
        parent_set = frozenset(parents)
        cached = self.cache.get(target, parent_set)
        if cached is not None:
            return cached
        t = self.index[target]
        n_features = 0
        if not parent_set:
            rss = self.gram[t, t]
        else:
            idx = self._feature_indices(
                [self.index[p] for p in sorted(parent_set)]
            )
            n_features = len(idx)
            sub = self.gram[np.ix_(idx, idx)]
            cross = self.gram[idx, t]
            try:
                solved = np.linalg.solve(sub, cross)
            except np.linalg.LinAlgError:
                # Rank-deficient regressors: ridge damping, never a crash.
                damp = 1e-8 * float(np.trace(sub)) / len(idx)
                solved = np.linalg.solve(sub + damp * np.eye(len(idx)), cross)
            rss = self.gram[t, t] - float(cross @ solved)
        variance = max(rss / self.n, self.cfg.variance_floor)
        score = (
            -0.5 * self.n * np.log(variance)
            - self.cfg.penalty_multiplier
            * ((n_features + 1) / 2.0)
            * np.log(self.n)
        )
        self.cache.put(target, parent_set, float(score))
        return float(score)

    def total(self, g: CausalGraph) -> float:
        return sum(self.local(v, g.parents(v)) for v in g.nodes)


def local_bic(
    ds: Dataset,
    target: str,
    parents: Iterable[str],
    cfg: GesConfig | None = None,
) -> float:
    """BIC local score of regressing ``target`` on ``parents`` plus intercept."""
    cfg = cfg or GesConfig()
    parent_set = frozenset(parents)
    if target in parent_set:
        raise ValueError("target cannot be its own parent")
    ds.index(target)
    for p in parent_set:
        ds.index(p)
    if ds.n <= len(parent_set) + 2:
        raise ValueError(
            f"need more than {len(parent_set) + 2} rows to score "
            f"{len(parent_set)} parents"
        )
    return _LocalScorer(ds, cfg).local(target, parent_set)


@dataclass
class DiscoveryResult:
    """GES output bundle: final pattern, accepted operators, score path."""

    graph: CausalGraph
    operators: list[dict] = field(default_factory=list)
    score_trajectory: list[float] = field(default_factory=list)
    cache_hits: int = 0
    cache_misses: int = 0

    def to_json_dict(self) -> dict:
        from .graphs import graph_to_json_dict

        return {
            "cpdag": graph_to_json_dict(self.graph),
            "operators": self.operators,
            "score_trajectory": self.score_trajectory,
            "cache": {"hits": self.cache_hits, "misses": self.cache_misses},
        }


def _subsets(items: Sequence[str]):
    for size in range(len(items) + 1):
        yield from combinations(items, size)


class _SearchState:
    """CPDAG under construction, with the operator machinery of GES."""

    def __init__(self, nodes: Sequence[str]):
        self.m = _MutableMixed(list(nodes))
        self.nodes = sorted(nodes)

    # -- structure helpers ------------------------------------------------

    def adjacent(self, a: str, b: str) -> bool:
        return self.m.adjacent(a, b)

    def parents(self, v: str) -> set[str]:
        return set(self.m.par[v])

    def und_neighbors(self, v: str) -> set[str]:
        return set(self.m.und[v])

    def adj(self, v: str) -> set[str]:
        return self.m.par[v] | self.m.chi[v] | self.m.und[v]

    def is_clique(self, vs: Iterable[str]) -> bool:
        vs = list(vs)
        return all(
            self.adjacent(a, b) for i, a in enumerate(vs) for b in vs[i + 1 :]
        )

    def semidirected_path_avoiding(
        self, source: str, sink: str, blocked: set[str]
    ) -> bool:
        """Is there a path source->sink along undirected or forward edges
        that avoids ``blocked``?"""
        if source in blocked:
            return False
        seen = {source}
        stack = [source]
        while stack:
            cur = stack.pop()
            if cur == sink:
                return True
            for nxt in self.m.chi[cur] | self.m.und[cur]:
                if nxt not in seen and nxt not in blocked:
                    seen.add(nxt)
                    stack.append(nxt)
        return False

    def recomplete(self) -> None:
        """Re-close the PDAG to a CPDAG via a consistent DAG extension."""
        dag = extend_to_dag(self.m.to_graph())
        fresh = _MutableMixed(self.m.nodes)
        for a, b in dag.directed:
            fresh.add_undirected(a, b)
        _orient_v_structures(fresh, dag)
        _meek_closure(fresh)
        self.m = fresh

    def to_graph(self) -> CausalGraph:
        return self.m.to_graph()

    # -- forward phase -----------------------------------------------------

    def best_insertion(self, scorer: _LocalScorer):
        best = None
        for y in self.nodes:
            pa_y = self.parents(y)
            und_y = self.und_neighbors(y)
            for x in self.nodes:
                if x == y or self.adjacent(x, y):
                    continue
                adj_x = self.adj(x)
                na = und_y & adj_x
                t_candidates = sorted(und_y - adj_x)
                for t in _subsets(t_candidates):
                    block = na | set(t)
                    if not self.is_clique(block):
                        continue
                    new_parents = pa_y | block | {x}
                    if len(new_parents) > scorer.cfg.max_parents:
                        continue
                    if self.semidirected_path_avoiding(y, x, block):
                        continue
                    gain = scorer.local(y, new_parents) - scorer.local(
                        y, pa_y | block
                    )
                    key = (x, y, t)
                    if gain > _MIN_GAIN and (
                        best is None
                        or gain > best[0] + _MIN_GAIN
                        or (abs(gain - best[0]) <= _MIN_GAIN and key < best[1])
                    ):
                        best = (gain, key)
        return best

    def apply_insertion(self, x: str, y: str, t: tuple[str, ...]) -> None:
        self.m.add_directed(x, y)
        for node in t:
            self.m.orient(node, y)
        self.recomplete()

    # -- backward phase ----------------------------------------------------

    def best_deletion(self, scorer: _LocalScorer):
        best = None
        for y in self.nodes:
            pa_y = self.parents(y)
            und_y = self.und_neighbors(y)
            for x in sorted(pa_y | und_y):
                na = self.und_neighbors(y) & self.adj(x)
                for h in _subsets(sorted(na)):
                    keep = na - set(h)
                    if not self.is_clique(keep):
                        continue
                    old_parents = (pa_y | keep) | {x}
                    new_parents = (pa_y | keep) - {x}
                    gain = scorer.local(y, new_parents) - scorer.local(
                        y, old_parents
                    )
                    key = (x, y, h)
                    if gain > _MIN_GAIN and (
                        best is None
                        or gain > best[0] + _MIN_GAIN
                        or (abs(gain - best[0]) <= _MIN_GAIN and key < best[1])
                    ):
                        best = (gain, key)
        return best

    def apply_deletion(self, x: str, y: str, h: tuple[str, ...]) -> None:
        self.m.remove_adjacency(x, y)
        for node in h:
            if self.m.has_undirected(y, node):
                self.m.orient(y, node)
            if self.m.has_undirected(x, node):
                self.m.orient(x, node)
        self.recomplete()


def run_ges(ds: Dataset, cfg: GesConfig | None = None) -> DiscoveryResult:
    """Two-phase greedy equivalence search over the dataset columns."""
    cfg = cfg or GesConfig()
    p = len(ds.column_names)
    if p < 2:
        raise ValueError("need at least two columns to search over")
    if ds.n < 10 * p:
        warnings.warn(
            f"only {ds.n} rows for {p} columns; recommend n >= 10·p",
            stacklevel=2,
        )
    scorer = _LocalScorer(ds, cfg)
    state = _SearchState(ds.column_names)
    result = DiscoveryResult(graph=state.to_graph())
    total = scorer.total(state.to_graph())
    result.score_trajectory.append(total)

    while True:
        best = state.best_insertion(scorer)
        if best is None:
            break
        gain, (x, y, t) = best
        state.apply_insertion(x, y, t)
        total += gain
        result.operators.append(
            {
                "phase": "forward",
                "op": "insert",
                "source": x,
                "target": y,
                "subset": list(t),
                "gain": float(gain),
            }
        )
        result.score_trajectory.append(total)

    while True:
        best = state.best_deletion(scorer)
        if best is None:
            break
        gain, (x, y, h) = best
        state.apply_deletion(x, y, h)
        total += gain
        result.operators.append(
            {
                "phase": "backward",
                "op": "delete",
                "source": x,
                "target": y,
                "subset": list(h),
                "gain": float(gain),
            }
        )
        result.score_trajectory.append(total)

    result.graph = state.to_graph()
    result.cache_hits = scorer.cache.hits
    result.cache_misses = scorer.cache.misses
    return result


def ges_discover(ds: Dataset, cfg: GesConfig | None = None) -> CausalGraph:
    """CPDAG of the equivalence class found by greedy search."""
    return run_ges(ds, cfg).graph


def cpdag_of_dag(g: CausalGraph) -> CausalGraph:
    """Canonical equivalence-class representative of a DAG."""
    return complete_pattern(g)
