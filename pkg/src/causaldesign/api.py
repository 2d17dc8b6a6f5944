"""HTTP/JSON facade over the pipeline for interactive clients.

Single-user design tool: an in-memory session store keyed by dataset and
graph ids, with every graph version immutable (edits create new versions)
and an optional JSON snapshot for persistence across restarts.  Seeds are
client-suppliable and echoed back so every response is reproducible.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from . import baseline as baseline_mod
from . import dataset as dataset_mod
from . import discovery, estimation, identify, oracle
from .graphs import (
    CausalGraph,
    ContradictionError,
    KnowledgeConstraints,
    apply_knowledge,
    export_graph,
    graph_from_json_dict,
    graph_to_json_dict,
)

__all__ = ["create_app", "SessionStore"]


@dataclass
class GraphEntry:
    graph: CausalGraph
    dataset_id: str
    parent_id: str | None
    created_by: str


@dataclass
class DatasetEntry:
    dataset: dataset_mod.Dataset
    generated: bool
    generator_args: dict | None
    graph_ids: list[str] = field(default_factory=list)
    queries: list[dict] = field(default_factory=list)


class SessionStore:
    """Thread-guarded store; graphs are immutable once registered."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.datasets: dict[str, DatasetEntry] = {}
        self.graphs: dict[str, GraphEntry] = {}
        self.models: dict[tuple[str, str], estimation.FittedScm] = {}
        self.baselines: dict[str, baseline_mod.TreeEnsemble] = {}
        self._counter = 0

    def next_id(self, prefix: str) -> str:
        with self._lock:
            self._counter += 1
            return f"{prefix}-{self._counter}"

    def add_dataset(self, entry: DatasetEntry) -> str:
        dataset_id = self.next_id("ds")
        with self._lock:
            self.datasets[dataset_id] = entry
        return dataset_id

    def add_graph(self, entry: GraphEntry) -> str:
        graph_id = self.next_id("g")
        with self._lock:
            self.graphs[graph_id] = entry
            self.datasets[entry.dataset_id].graph_ids.append(graph_id)
        return graph_id

    def dataset(self, dataset_id: str) -> DatasetEntry:
        entry = self.datasets.get(dataset_id)
        if entry is None:
            raise HTTPException(404, f"unknown dataset id {dataset_id!r}")
        return entry

    def graph(self, graph_id: str) -> GraphEntry:
        entry = self.graphs.get(graph_id)
        if entry is None:
            raise HTTPException(404, f"unknown graph id {graph_id!r}")
        return entry


# -- request bodies ----------------------------------------------------------


class GenerateSpec(BaseModel):
    n: int = Field(default=1000, ge=1, le=100_000)
    seed: int = 0
    noise: float = Field(default=0.005, ge=0.0, le=0.05)


class DatasetRequest(BaseModel):
    generate: GenerateSpec | None = None
    csv: str | None = None


class DiscoverRequest(BaseModel):
    penalty: float = Field(default=0.75, ge=0.0)
    max_parents: int = Field(default=18, ge=1)
    score_features: str = "interactions2"
    standardize: bool = True


class ConstraintsRequest(BaseModel):
    required: list[tuple[str, str]] = Field(default_factory=list)
    forbidden: list[tuple[str, str]] = Field(default_factory=list)
    tiers: list[list[str]] = Field(default_factory=list)


class IdentifyRequest(BaseModel):
    treatment: str
    outcome: str


class ScenarioBody(BaseModel):
    treatment: str
    control: float
    treat: float
    outcome: str = dataset_mod.OUTCOME_COLUMN
    conditions: dict[str, float] = Field(default_factory=dict)
    n_samples: int = Field(default=2000, ge=2, le=100_000)


class EstimateRequest(BaseModel):
    scenario: ScenarioBody
    seed: int = 0
    expansion: str = "interactions2"
    include_baseline: bool = False
    include_oracle: bool = False
    oracle_samples: int = Field(default=200, ge=10, le=5000)


# -- persistence -------------------------------------------------------------


def _snapshot(store: SessionStore, path: Path) -> None:
    payload = {
        "datasets": {},
        "graphs": {},
        "counter": store._counter,
    }
    for ds_id, entry in store.datasets.items():
        payload["datasets"][ds_id] = {
            "generated": entry.generated,
            "generator_args": entry.generator_args,
            "graph_ids": entry.graph_ids,
            "queries": entry.queries,
            "columns": [
                {"name": c.name, "unit": c.unit, "role": c.role}
                for c in entry.dataset.columns
            ],
            "rows": entry.dataset.rows.tolist(),
            "seed": entry.dataset.seed,
        }
    for g_id, entry in store.graphs.items():
        payload["graphs"][g_id] = {
            "graph": graph_to_json_dict(entry.graph),
            "dataset_id": entry.dataset_id,
            "parent_id": entry.parent_id,
            "created_by": entry.created_by,
        }
    path.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def _restore(store: SessionStore, path: Path) -> None:
    payload = json.loads(path.read_text(encoding="utf-8"))
    specs = tuple(dataset_mod.default_schema())
    for ds_id, raw in payload["datasets"].items():
        columns = tuple(
            dataset_mod.ColumnInfo(c["name"], c["unit"], c["role"])
            for c in raw["columns"]
        )
        ds = dataset_mod.Dataset(
            columns, np.array(raw["rows"], dtype=float), raw["seed"], specs
        )
        store.datasets[ds_id] = DatasetEntry(
            dataset=ds,
            generated=raw["generated"],
            generator_args=raw["generator_args"],
            graph_ids=list(raw["graph_ids"]),
            queries=list(raw["queries"]),
        )
    for g_id, raw in payload["graphs"].items():
        store.graphs[g_id] = GraphEntry(
            graph=graph_from_json_dict(raw["graph"]),
            dataset_id=raw["dataset_id"],
            parent_id=raw["parent_id"],
            created_by=raw["created_by"],
        )
    store._counter = payload.get("counter", len(store.datasets) + len(store.graphs))


# -- application -------------------------------------------------------------


def create_app(persist_path: str | None = None) -> FastAPI:
    app = FastAPI(title="causaldesign", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore()
    app.state.store = store
    snapshot_path = Path(persist_path) if persist_path else None
    if snapshot_path and snapshot_path.exists():
        _restore(store, snapshot_path)

    def persist() -> None:
        if snapshot_path:
            _snapshot(store, snapshot_path)

    @app.exception_handler(ContradictionError)
    async def contradiction_handler(request: Request, exc: ContradictionError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    def schema_payload(entry: DatasetEntry) -> list[dict]:
        """Column descriptors with sampling bounds where they exist.

        The aggregate WWR carries the directional bounds: a pin on it
        expands to the four directions, so those are its legal values.
        """
        bounds = {s.name: (s.min, s.max) for s in entry.dataset.param_specs}
        wwr_bounds = bounds.get(dataset_mod.WWR_DIRECTIONS[0])
        out = []
        for col in entry.dataset.columns:
            lo_hi = bounds.get(col.name)
            if col.name == dataset_mod.WWR_COLUMN and wwr_bounds:
                lo_hi = wwr_bounds
            out.append(
                {
                    "name": col.name,
                    "unit": col.unit,
                    "role": col.role,
                    "min": lo_hi[0] if lo_hi else None,
                    "max": lo_hi[1] if lo_hi else None,
                }
            )
        return out

    @app.post("/datasets")
    def create_dataset(body: DatasetRequest):
        if (body.generate is None) == (body.csv is None):
            raise HTTPException(
                422, "provide exactly one of 'generate' or 'csv'"
            )
        if body.generate is not None:
            spec = body.generate
            ds = dataset_mod.generate_dataset(
                dataset_mod.default_schema(), spec.n, spec.seed, spec.noise
            )
            entry = DatasetEntry(
                dataset=ds,
                generated=True,
                generator_args={"n": spec.n, "seed": spec.seed, "noise": spec.noise},
            )
        else:
            import tempfile

            with tempfile.NamedTemporaryFile(
                "w", suffix=".csv", delete=False, encoding="utf-8"
            ) as fh:
                fh.write(body.csv)
                tmp = fh.name
            try:
                ds = dataset_mod.load_csv(tmp)
            finally:
                Path(tmp).unlink(missing_ok=True)
            entry = DatasetEntry(dataset=ds, generated=False, generator_args=None)
        dataset_id = store.add_dataset(entry)
        persist()
        return {
            "dataset_id": dataset_id,
            "n": entry.dataset.n,
            "schema": schema_payload(entry),
            "summary": entry.dataset.summary_stats(),
            "generated": entry.generated,
        }

    @app.get("/datasets/{dataset_id}")
    def dataset_info(dataset_id: str):
        entry = store.dataset(dataset_id)
        return {
            "dataset_id": dataset_id,
            "n": entry.dataset.n,
            "generated": entry.generated,
            "generator_args": entry.generator_args,
            "schema": schema_payload(entry),
            "summary": entry.dataset.summary_stats(),
            "graphs": [
                {
                    "graph_id": g_id,
                    "parent_id": store.graphs[g_id].parent_id,
                    "created_by": store.graphs[g_id].created_by,
                }
                for g_id in entry.graph_ids
            ],
            "queries": entry.queries,
        }

    @app.post("/datasets/{dataset_id}/discover")
    def discover(dataset_id: str, body: DiscoverRequest):
        entry = store.dataset(dataset_id)
        cfg = discovery.GesConfig(
            penalty_multiplier=body.penalty,
            max_parents=body.max_parents,
            standardize=body.standardize,
            score_features=body.score_features,
        )
        import warnings as _warnings

        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore")
            result = discovery.run_ges(entry.dataset, cfg)
        graph_id = store.add_graph(
            GraphEntry(
                graph=result.graph,
                dataset_id=dataset_id,
                parent_id=None,
                created_by="discover",
            )
        )
        persist()
        return {
            "graph_id": graph_id,
            "cpdag": graph_to_json_dict(result.graph),
            "operator_log": result.operators,
            "score_trajectory": result.score_trajectory,
        }

    @app.post("/graphs/{graph_id}/constraints")
    def constraints(graph_id: str, body: ConstraintsRequest):
        entry = store.graph(graph_id)
        k = KnowledgeConstraints(
            required=[tuple(e) for e in body.required],
            forbidden=[tuple(e) for e in body.forbidden],
            tiers=[list(t) for t in body.tiers],
        )
        new_graph = apply_knowledge(entry.graph, k)
        new_id = store.add_graph(
            GraphEntry(
                graph=new_graph,
                dataset_id=entry.dataset_id,
                parent_id=graph_id,
                created_by="constraints",
            )
        )
        persist()
        return {"graph_id": new_id, "graph": graph_to_json_dict(new_graph)}

    @app.get("/graphs/{graph_id}")
    def get_graph(graph_id: str, format: str = Query(default="json")):
        entry = store.graph(graph_id)
        if format == "dot":
            return PlainTextResponse(export_graph(entry.graph, "dot"))
        if format == "json":
            return {
                "graph_id": graph_id,
                "dataset_id": entry.dataset_id,
                "parent_id": entry.parent_id,
                "created_by": entry.created_by,
                "graph": graph_to_json_dict(entry.graph),
            }
        raise HTTPException(422, f"unknown format {format!r}")

    @app.post("/graphs/{graph_id}/identify")
    def identify_endpoint(graph_id: str, body: IdentifyRequest):
        entry = store.graph(graph_id)
        estimand = identify.identify_estimand(
            entry.graph, body.treatment, body.outcome
        )
        store.dataset(entry.dataset_id).queries.append(
            {
                "kind": "identify",
                "graph_id": graph_id,
                "treatment": body.treatment,
                "outcome": body.outcome,
            }
        )
        persist()
        return {"graph_id": graph_id, "estimand": estimand.to_json_dict()}

    @app.post("/graphs/{graph_id}/estimate")
    def estimate(graph_id: str, body: EstimateRequest):
        entry = store.graph(graph_id)
        ds_entry = store.dataset(entry.dataset_id)
        scenario = estimation.Scenario(
            treatment=body.scenario.treatment,
            control_value=body.scenario.control,
            treatment_value=body.scenario.treat,
            outcome=body.scenario.outcome,
            conditions=body.scenario.conditions,
            n_samples=body.scenario.n_samples,
        )
        key = (graph_id, body.expansion)
        scm = store.models.get(key)
        if scm is None:
            scm = estimation.fit_scm(ds_entry.dataset, entry.graph, body.expansion)
            store.models[key] = scm
        if scenario.conditions:
            estimate = estimation.estimate_cate(scm, scenario, seed=body.seed)
        else:
            estimate = estimation.estimate_ate(scm, scenario, seed=body.seed)
        estimand = identify.identify_estimand(
            entry.graph, scenario.treatment, scenario.outcome
        )
        response = {
            "graph_id": graph_id,
            "seed": body.seed,
            "estimate": estimate.to_json_dict(),
            "estimand": estimand.to_json_dict(),
            "node_r_squared": {
                node: scm.r_squared(node) for node in sorted(scm.node_models)
            },
        }
        if body.include_baseline:
            model = store.baselines.get(entry.dataset_id)
            if model is None:
                model = baseline_mod.fit_baseline(
                    ds_entry.dataset, scenario.outcome
                )
                store.baselines[entry.dataset_id] = model
            naive = baseline_mod.naive_whatif(
                model,
                scenario,
                dataset_mod.observed_ranges(ds_entry.dataset),
                scenario.n_samples,
                body.seed,
            )
            response["baseline"] = naive.to_json_dict()
        if body.include_oracle:
            if not ds_entry.generated:
                raise HTTPException(
                    422, "oracle validation requires a generated dataset"
                )
            configs = oracle.sample_conditioned_configs(
                dict(scenario.conditions), body.oracle_samples, body.seed
            )
            effects = [
                oracle.paired_effect(
                    cfg,
                    scenario.treatment,
                    scenario.control_value,
                    scenario.treatment_value,
                )
                for cfg in configs
            ]
            response["oracle"] = {
                "mean": float(np.mean(effects)),
                "std": float(np.std(effects, ddof=1)),
                "n": len(effects),
            }
        ds_entry.queries.append(
            {
                "kind": "estimate",
                "graph_id": graph_id,
                "scenario": scenario.to_json_dict(),
                "seed": body.seed,
                "tau": estimate.tau,
            }
        )
        persist()
        return response

    return app
