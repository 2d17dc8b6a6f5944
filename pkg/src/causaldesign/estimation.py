"""Effect quantification: fitted structural equations and do-sampling.

Each endogenous node gets a least-squares model on its parents (optionally
with degree-2 interaction features, the default: the design space's
geometry is multiplicative, and purely linear node models would force every
unit to show the same effect).  Exogenous nodes keep their empirical
marginals.  Interventions fix a column and sever its incoming influence;
effects are paired differences of the two interventional arms over shared
exogenous draws, so the mean effect is exactly the average of the per-unit
effects.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .dataset import Dataset
from .graphs import CausalGraph
from .oracle import expand_wwr_condition

__all__ = [
    "Scenario",
    "NodeModel",
    "FittedScm",
    "EffectEstimate",
    "fit_scm",
    "simulate_do",
    "estimate_ate",
    "estimate_cate",
]


@dataclass(frozen=True)
class Scenario:
    """A what-if query: move ``treatment`` from control to treated value.

    ``conditions`` pins known design parameters (the current scheme);
    remaining inputs stay free and are drawn from their training marginals.
    """

    treatment: str
    control_value: float
    treatment_value: float
    outcome: str
    conditions: Mapping[str, float] = field(default_factory=dict)
    n_samples: int = 2000

    def __post_init__(self) -> None:
        if self.control_value == self.treatment_value:
            raise ValueError("control and treatment values must differ")
        if self.n_samples < 2:
            raise ValueError("need at least two samples")
        if self.treatment in self.conditions:
            raise ValueError("treatment cannot also be conditioned")
        if self.outcome in self.conditions:
            raise ValueError("outcome cannot be conditioned")
        object.__setattr__(self, "conditions", dict(self.conditions))

    def to_json_dict(self) -> dict:
        return {
            "treatment": self.treatment,
            "control": self.control_value,
            "treat": self.treatment_value,
            "outcome": self.outcome,
            "conditions": dict(sorted(self.conditions.items())),
            "n_samples": self.n_samples,
        }


def _expand_features(matrix: np.ndarray, expansion: str) -> np.ndarray:
    if expansion == "linear":
        return matrix
    if expansion == "interactions2":
        k = matrix.shape[1]
        blocks = [matrix]
        for i in range(k):
            for j in range(i, k):
                blocks.append((matrix[:, i] * matrix[:, j])[:, None])
        return np.concatenate(blocks, axis=1)
    raise ValueError(f"unknown expansion {expansion!r}")


@dataclass(frozen=True)
class NodeModel:
    parents: tuple[str, ...]
    coefficients: np.ndarray  # intercept first, then expanded features
    residual_std: float
    r_squared: float

    def predict(self, parent_columns: np.ndarray, expansion: str) -> np.ndarray:
        features = _expand_features(parent_columns, expansion)
        return self.coefficients[0] + features @ self.coefficients[1:]


@dataclass(frozen=True)
class FittedScm:
    """Structural model over a DAG: node regressions plus exogenous marginals."""

    dag: CausalGraph
    node_models: Mapping[str, NodeModel]
    marginals: Mapping[str, np.ndarray]
    expansion: str
    topo_order: tuple[str, ...]
    bounds: Mapping[str, tuple[float, float]]

    def r_squared(self, node: str) -> float:
        return self.node_models[node].r_squared

    def exogenous(self) -> tuple[str, ...]:
        return tuple(sorted(self.marginals))


def fit_scm(ds: Dataset, dag: CausalGraph, expansion: str = "interactions2") -> FittedScm:
    """Fit per-node least squares along the DAG; exogenous nodes keep data.

    Singular design matrices fall back to ridge damping (1e-8 scaled) with a
    warning rather than failing.
    """
    if expansion not in ("linear", "interactions2"):
        raise ValueError(f"unknown expansion {expansion!r}")
    dag.require_dag("structural fitting")
    for node in dag.nodes:
        ds.index(node)

    node_models: dict[str, NodeModel] = {}
    marginals: dict[str, np.ndarray] = {}
    for node in dag.nodes:
        parents = tuple(sorted(dag.parents(node)))
        values = ds.column(node)
        if not parents:
            marginals[node] = values.copy()
            continue
        matrix = np.column_stack([ds.column(p) for p in parents])
        features = _expand_features(matrix, expansion)
        design = np.column_stack([np.ones(len(values)), features])
        coef, _, rank, _ = np.linalg.lstsq(design, values, rcond=None)
        if rank < design.shape[1]:
            warnings.warn(
                f"singular fit for node {node}; applying ridge damping",
                stacklevel=2,
            )
            gram = design.T @ design
            damp = 1e-8 * float(np.trace(gram)) / gram.shape[0]
            coef = np.linalg.solve(
                gram + damp * np.eye(gram.shape[0]), design.T @ values
            )
        predictions = design @ coef
        residuals = values - predictions
        total = float(((values - values.mean()) ** 2).sum())
        r2 = 1.0 - float((residuals**2).sum()) / total if total > 0 else 1.0
        node_models[node] = NodeModel(
            parents=parents,
            coefficients=coef,
            residual_std=float(residuals.std(ddof=1)),
            r_squared=r2,
        )

    bounds = {}
    for spec in ds.param_specs:
        bounds[spec.name] = (spec.min, spec.max)
    return FittedScm(
        dag=dag,
        node_models=node_models,
        marginals=marginals,
        expansion=expansion,
        topo_order=dag.topological_order(),
        bounds=bounds,
    )


def simulate_do(
    scm: FittedScm,
    do: Mapping[str, float],
    conditions: Mapping[str, float],
    n: int,
    seed: int,
    include_noise: bool = False,
) -> dict[str, np.ndarray]:
    """Ancestral sampling under an intervention.

    Do-columns are fixed with incoming edges severed; conditioned exogenous
    columns are pinned; remaining exogenous columns bootstrap from their
    training marginals; endogenous columns are predicted from their parents
    (conditional means unless ``include_noise``).
    """
    if n < 1:
        raise ValueError("need at least one sample")
    node_set = set(scm.dag.nodes)
    for name in list(do) + list(conditions):
        if name not in node_set:
            raise ValueError(f"unknown column {name!r}")
    do_descendants: set[str] = set()
    for name in do:
        do_descendants |= scm.dag.descendants(name)
    for name in conditions:
        if name in do:
            raise ValueError(f"column {name!r} both intervened and conditioned")
        if name in do_descendants:
            raise ValueError(
                f"post-treatment conditioning: {name!r} is a descendant of an "
                "intervened column"
            )
        if name in scm.node_models:
            raise ValueError(
                f"cannot condition on derived column {name!r}; pin its "
                "exogenous inputs instead"
            )

    rng = np.random.default_rng(seed)
    columns: dict[str, np.ndarray] = {}
    for node in scm.topo_order:
        if node in do:
            columns[node] = np.full(n, float(do[node]))
        elif node in conditions:
            columns[node] = np.full(n, float(conditions[node]))
        elif node in scm.marginals:
            marginal = scm.marginals[node]
            columns[node] = rng.choice(marginal, size=n, replace=True)
        else:
            model = scm.node_models[node]
            parents = np.column_stack([columns[p] for p in model.parents])
            values = model.predict(parents, scm.expansion)
            if include_noise:
                values = values + rng.normal(0.0, model.residual_std, size=n)
            columns[node] = values
    return columns


@dataclass(frozen=True)
class EffectEstimate:
    """Interventional contrast with its full per-unit effect distribution."""

    tau: float
    unit_effects: np.ndarray
    standard_error: float
    n: int
    scenario: Scenario

    def __post_init__(self) -> None:
        effects = np.asarray(self.unit_effects, dtype=float)
        object.__setattr__(self, "unit_effects", effects)
        if len(effects) != self.n:
            raise ValueError("unit effect count must equal n")

    @property
    def distribution(self) -> np.ndarray:
        """Unit effects in ascending order (the cumulative curve support)."""
        return np.sort(self.unit_effects)

    def histogram(self, bins: int = 40) -> tuple[np.ndarray, np.ndarray]:
        counts, edges = np.histogram(self.unit_effects, bins=bins)
        return counts, edges

    def cumulative_points(self, max_points: int = 200) -> list[tuple[float, float]]:
        ordered = self.distribution
        n = len(ordered)
        idx = np.unique(np.linspace(0, n - 1, min(max_points, n)).astype(int))
        return [(float(ordered[i]), float((i + 1) / n)) for i in idx]

    def to_json_dict(self) -> dict:
        counts, edges = self.histogram()
        return {
            "tau": self.tau,
            "standard_error": self.standard_error,
            "n": self.n,
            "scenario": self.scenario.to_json_dict(),
            "histogram": {
                "counts": [int(c) for c in counts],
                "bin_edges": [float(e) for e in edges],
            },
            "cumulative": [
                {"value": v, "fraction": f} for v, f in self.cumulative_points()
            ],
        }


def _paired_contrast(
    scm: FittedScm, scenario: Scenario, conditions: Mapping[str, float], seed: int
) -> EffectEstimate:
    n = scenario.n_samples
    treated = simulate_do(
        scm, {scenario.treatment: scenario.treatment_value}, conditions, n, seed
    )
    control = simulate_do(
        scm, {scenario.treatment: scenario.control_value}, conditions, n, seed
    )
    unit_effects = treated[scenario.outcome] - control[scenario.outcome]
    tau = float(unit_effects.mean())
    se = float(unit_effects.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return EffectEstimate(
        tau=tau,
        unit_effects=unit_effects,
        standard_error=se,
        n=n,
        scenario=scenario,
    )


def estimate_ate(scm: FittedScm, scenario: Scenario, seed: int = 0) -> EffectEstimate:
    """Population-average effect: free inputs sampled over their ranges."""
    if scenario.conditions:
        raise ValueError("average effect takes no conditions; use estimate_cate")
    _check_scenario_columns(scm, scenario)
    return _paired_contrast(scm, scenario, {}, seed)


def estimate_cate(scm: FittedScm, scenario: Scenario, seed: int = 0) -> EffectEstimate:
    """Conditional effect: pinned design parameters, free inputs sampled.

    A pin on the aggregate window ratio expands to the four directional
    ratios; all conditions must be exogenous non-descendants of the
    treatment and lie inside their sampling bounds.
    """
    if not scenario.conditions:
        raise ValueError("conditional effect requires non-empty conditions")
    _check_scenario_columns(scm, scenario)
    treatment_downstream = scm.dag.descendants(scenario.treatment)
    for name in sorted(scenario.conditions):
        if name in treatment_downstream:
            raise ValueError(
                f"post-treatment conditioning: {name!r} is a descendant of "
                f"{scenario.treatment!r}"
            )
    conditions = expand_wwr_condition(dict(scenario.conditions))
    for name, value in sorted(conditions.items()):
        lo_hi = scm.bounds.get(name)
        if lo_hi is not None:
            lo, hi = lo_hi
            if not (lo - 1e-9 <= float(value) <= hi + 1e-9):
                raise ValueError(
                    f"condition {name}={value} outside [{lo}, {hi}]"
                )
    return _paired_contrast(scm, scenario, conditions, seed)


def _check_scenario_columns(scm: FittedScm, scenario: Scenario) -> None:
    node_set = set(scm.dag.nodes)
    if scenario.treatment not in node_set:
        raise ValueError(f"unknown treatment column {scenario.treatment!r}")
    if scenario.outcome not in node_set:
        raise ValueError(f"unknown outcome column {scenario.outcome!r}")
    lo_hi = scm.bounds.get(scenario.treatment)
    if lo_hi is not None:
        lo, hi = lo_hi
        for value in (scenario.control_value, scenario.treatment_value):
            if not (lo - 1e-9 <= float(value) <= hi + 1e-9):
                raise ValueError(
                    f"treatment value {value} outside [{lo}, {hi}]"
                )
