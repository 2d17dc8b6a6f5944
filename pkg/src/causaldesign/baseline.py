"""Purely predictive baseline: boosted regression trees and naive what-ifs.

This is the counterpoint to the causal estimator: a strong supervised model
trained on every column at once, then queried by sampling all non-pinned
inputs independently over their observed ranges.  That sampling deliberately
ignores the dependencies between inputs (volume drawn independently of
height, say) and is exactly the mistake the causal pipeline avoids; it must
not be "fixed".

Trees grow greedily on histogram bins (binned once per fit), split by
variance reduction, and serialize their split records to JSON exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .dataset import Dataset
from .estimation import EffectEstimate, Scenario

__all__ = [
    "BaselineConfig",
    "TreeEnsemble",
    "CvReport",
    "fit_baseline",
    "cross_validate",
    "naive_whatif",
    "save_model",
    "load_model",
]


@dataclass(frozen=True)
class BaselineConfig:
    n_trees: int = 300
    max_depth: int = 4
    learning_rate: float = 0.1
    min_samples_leaf: int = 5
    max_bins: int = 255

    def __post_init__(self) -> None:
        if self.n_trees < 1 or self.max_depth < 1:
            raise ValueError("need at least one tree of depth one")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning rate must lie in (0, 1]")
        if self.min_samples_leaf < 1 or self.max_bins < 2:
            raise ValueError("invalid leaf or bin limit")


@dataclass(frozen=True)
class Tree:
    """Flat split records: feature < 0 marks a leaf holding ``value``."""

    feature: tuple[int, ...]
    threshold: tuple[float, ...]
    left: tuple[int, ...]
    right: tuple[int, ...]
    value: tuple[float, ...]

    def predict(self, matrix: np.ndarray) -> np.ndarray:
        out = np.empty(matrix.shape[0])
        for row in range(matrix.shape[0]):
            node = 0
            while self.feature[node] >= 0:
                if matrix[row, self.feature[node]] <= self.threshold[node]:
                    node = self.left[node]
                else:
                    node = self.right[node]
            out[row] = self.value[node]
        return out

    def predict_fast(self, matrix: np.ndarray) -> np.ndarray:
        """Vectorized level-wise descent (same result as ``predict``)."""
        n = matrix.shape[0]
        nodes = np.zeros(n, dtype=np.int64)
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        value = np.asarray(self.value)
        active = feature[nodes] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            f = feature[nodes[idx]]
            goes_left = matrix[idx, f] <= threshold[nodes[idx]]
            nodes[idx] = np.where(goes_left, left[nodes[idx]], right[nodes[idx]])
            active = feature[nodes] >= 0
        return value[nodes]


@dataclass(frozen=True)
class TreeEnsemble:
    feature_names: tuple[str, ...]
    base_prediction: float
    learning_rate: float
    trees: tuple[Tree, ...]
    target: str

    def predict_matrix(self, matrix: np.ndarray) -> np.ndarray:
        out = np.full(matrix.shape[0], self.base_prediction)
        for tree in self.trees:
            out += self.learning_rate * tree.predict_fast(matrix)
        return out

    def predict(self, columns: Mapping[str, np.ndarray]) -> np.ndarray:
        missing = [n for n in self.feature_names if n not in columns]
        if missing:
            raise ValueError(f"missing feature column {missing[0]!r}")
        matrix = np.column_stack([columns[n] for n in self.feature_names])
        return self.predict_matrix(matrix)


class _TreeGrower:
    def __init__(self, binned: np.ndarray, bin_values: list[np.ndarray], cfg: BaselineConfig):
        self.binned = binned  # (n, p) uint8/16 bin codes
        self.bin_values = bin_values  # per feature, upper edge value per bin
        self.cfg = cfg

    def grow(self, residual: np.ndarray) -> Tree:
        feature: list[int] = []
        threshold: list[float] = []
        left: list[int] = []
        right: list[int] = []
        value: list[float] = []

        def new_node() -> int:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(0.0)
            return len(feature) - 1

        def build(rows: np.ndarray, depth: int) -> int:
            node = new_node()
            res = residual[rows]
            value[node] = float(res.mean())
            if depth >= self.cfg.max_depth or len(rows) < 2 * self.cfg.min_samples_leaf:
                return node
            split = self._best_split(rows, res)
            if split is None:
                return node
            f, bin_idx, cut_value = split
            goes_left = self.binned[rows, f] <= bin_idx
            feature[node] = f
            threshold[node] = cut_value
            left[node] = build(rows[goes_left], depth + 1)
            right[node] = build(rows[~goes_left], depth + 1)
            return node

        build(np.arange(len(residual)), 0)
        return Tree(
            feature=tuple(feature),
            threshold=tuple(threshold),
            left=tuple(left),
            right=tuple(right),
            value=tuple(value),
        )

    def _best_split(self, rows: np.ndarray, res: np.ndarray):
        total_sum = res.sum()
        total_count = len(rows)
        best = None  # (gain, feature, bin_idx, cut_value)
        parent_score = total_sum * total_sum / total_count
        min_leaf = self.cfg.min_samples_leaf
        for f in range(self.binned.shape[1]):
            codes = self.binned[rows, f]
            n_bins = len(self.bin_values[f])
            counts = np.bincount(codes, minlength=n_bins)
            sums = np.bincount(codes, weights=res, minlength=n_bins)
            left_counts = np.cumsum(counts)[:-1]
            left_sums = np.cumsum(sums)[:-1]
            right_counts = total_count - left_counts
            right_sums = total_sum - left_sums
            ok = (left_counts >= min_leaf) & (right_counts >= min_leaf)
            if not ok.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                gains = (
                    left_sums**2 / left_counts
                    + right_sums**2 / right_counts
                    - parent_score
                )
            gains = np.where(ok, gains, -np.inf)
            idx = int(np.argmax(gains))
            gain = float(gains[idx])
            if gain <= 1e-12:
                continue
            if best is None or gain > best[0] + 1e-12:
                best = (gain, f, idx, float(self.bin_values[f][idx]))
        if best is None:
            return None
        _, f, bin_idx, cut_value = best
        return f, bin_idx, cut_value


def _bin_features(matrix: np.ndarray, max_bins: int):
    """Quantile-ish histogram bins; returns codes and per-bin upper edges."""
    n, p = matrix.shape
    binned = np.empty((n, p), dtype=np.int32)
    bin_values: list[np.ndarray] = []
    for f in range(p):
        column = matrix[:, f]
        uniq = np.unique(column)
        if len(uniq) <= max_bins:
            edges = uniq
        else:
            qs = np.linspace(0, 1, max_bins + 1)[1:]
            edges = np.unique(np.quantile(column, qs, method="lower"))
        codes = np.searchsorted(edges, column, side="left")
        binned[:, f] = codes
        bin_values.append(edges.astype(float))
    return binned, bin_values


def fit_baseline(
    ds: Dataset, target: str, config: BaselineConfig | None = None
) -> TreeEnsemble:
    """Boosted least-squares trees of the target on every other column."""
    config = config or BaselineConfig()
    target_idx = ds.index(target)
    if ds.n < 50:
        raise ValueError(f"refusing to fit on {ds.n} rows; need at least 50")
    feature_names = tuple(n for n in ds.column_names if n != target)
    matrix = np.column_stack([ds.column(n) for n in feature_names])
    y = ds.column(target)
    del target_idx
    return _fit_matrix(matrix, y, feature_names, target, config)


def _fit_matrix(
    matrix: np.ndarray,
    y: np.ndarray,
    feature_names: tuple[str, ...],
    target: str,
    config: BaselineConfig,
) -> TreeEnsemble:
    binned, bin_values = _bin_features(matrix, config.max_bins)
    grower = _TreeGrower(binned, bin_values, config)
    base = float(y.mean())
    prediction = np.full(len(y), base)
    trees: list[Tree] = []
    for _ in range(config.n_trees):
        residual = y - prediction
        tree = grower.grow(residual)
        trees.append(tree)
        prediction += config.learning_rate * tree.predict_fast(matrix)
    return TreeEnsemble(
        feature_names=feature_names,
        base_prediction=base,
        learning_rate=config.learning_rate,
        trees=tuple(trees),
        target=target,
    )


@dataclass(frozen=True)
class CvReport:
    mape_percent: float
    r_squared: float
    folds: int
    per_fold: tuple[dict, ...] = field(default_factory=tuple)

    def to_json_dict(self) -> dict:
        return {
            "mape_percent": self.mape_percent,
            "r_squared": self.r_squared,
            "folds": self.folds,
            "per_fold": list(self.per_fold),
        }


def _mape(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    mask = np.abs(y_true) > 1e-12
    if not mask.any():
        return float("inf")
    return float(
        100.0 * np.mean(np.abs((y_true[mask] - y_pred[mask]) / y_true[mask]))
    )


def _r2(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    total = float(((y_true - y_true.mean()) ** 2).sum())
    if total <= 0:
        # Constant target: no variance to explain; report 0 by convention.
        return 0.0
    return 1.0 - float(((y_true - y_pred) ** 2).sum()) / total


def cross_validate(
    ds: Dataset,
    target: str,
    k: int = 4,
    seed: int = 0,
    config: BaselineConfig | None = None,
) -> CvReport:
    """Seeded k-fold assessment of the baseline; averages MAPE and R²."""
    if k < 2:
        raise ValueError("need at least two folds")
    if k > ds.n:
        raise ValueError(f"cannot split {ds.n} rows into {k} folds")
    config = config or BaselineConfig()
    feature_names = tuple(n for n in ds.column_names if n != target)
    matrix = np.column_stack([ds.column(n) for n in feature_names])
    y = ds.column(target)
    rng = np.random.default_rng(seed)
    order = rng.permutation(ds.n)
    folds = np.array_split(order, k)
    per_fold = []
    for i, test_idx in enumerate(folds):
        train_mask = np.ones(ds.n, dtype=bool)
        train_mask[test_idx] = False
        model = _fit_matrix(
            matrix[train_mask], y[train_mask], feature_names, target, config
        )
        pred = model.predict_matrix(matrix[test_idx])
        per_fold.append(
            {
                "fold": i,
                "mape_percent": _mape(y[test_idx], pred),
                "r_squared": _r2(y[test_idx], pred),
            }
        )
    return CvReport(
        mape_percent=float(np.mean([f["mape_percent"] for f in per_fold])),
        r_squared=float(np.mean([f["r_squared"] for f in per_fold])),
        folds=k,
        per_fold=tuple(per_fold),
    )


def naive_whatif(
    model: TreeEnsemble,
    scenario: Scenario,
    ranges: Mapping[str, tuple[float, float]],
    n: int,
    seed: int,
) -> EffectEstimate:
    """What-if by independent input sampling, ignoring dependencies.

    Every non-pinned model input, including derived geometry, is drawn
    uniformly over its observed range; the treatment column alone differs
    between the two arms.
    """
    if scenario.treatment not in model.feature_names:
        raise ValueError(f"unknown column {scenario.treatment!r}")
    for name in scenario.conditions:
        if name not in model.feature_names:
            raise ValueError(f"unknown column {name!r}")
    missing = [n for n in model.feature_names if n not in ranges]
    if missing:
        raise ValueError(f"no observed range for column {missing[0]!r}")
    rng = np.random.default_rng(seed)
    columns: dict[str, np.ndarray] = {}
    for name in model.feature_names:
        if name == scenario.treatment:
            continue
        if name in scenario.conditions:
            columns[name] = np.full(n, float(scenario.conditions[name]))
        else:
            lo, hi = ranges[name]
            columns[name] = rng.uniform(lo, hi, size=n)
    treated = dict(columns)
    treated[scenario.treatment] = np.full(n, float(scenario.treatment_value))
    control = dict(columns)
    control[scenario.treatment] = np.full(n, float(scenario.control_value))
    unit_effects = model.predict(treated) - model.predict(control)
    tau = float(unit_effects.mean())
    se = float(unit_effects.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return EffectEstimate(
        tau=tau,
        unit_effects=unit_effects,
        standard_error=se,
        n=n,
        scenario=scenario,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def save_model(model: TreeEnsemble, path) -> None:
    payload = {
        "feature_names": list(model.feature_names),
        "target": model.target,
        "base_prediction": model.base_prediction,
        "learning_rate": model.learning_rate,
        "trees": [
            {
                "feature": list(t.feature),
                "threshold": list(t.threshold),
                "left": list(t.left),
                "right": list(t.right),
                "value": list(t.value),
            }
            for t in model.trees
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_model(path) -> TreeEnsemble:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    trees = tuple(
        Tree(
            feature=tuple(t["feature"]),
            threshold=tuple(t["threshold"]),
            left=tuple(t["left"]),
            right=tuple(t["right"]),
            value=tuple(t["value"]),
        )
        for t in payload["trees"]
    )
    return TreeEnsemble(
        feature_names=tuple(payload["feature_names"]),
        base_prediction=payload["base_prediction"],
        learning_rate=payload["learning_rate"],
        trees=trees,
        target=payload["target"],
    )
