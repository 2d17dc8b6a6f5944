"""Command-line entry point for the full discovery-to-estimation pipeline.

Every step reads and writes plain files (CSV datasets, JSON graphs and
reports), so each stage of an analysis is re-runnable and diffable.  Exit
codes: 0 success, 2 usage or validation error, 1 internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import baseline as baseline_mod
from . import dataset as dataset_mod
from . import discovery, estimation, identify, oracle
from .graphs import KnowledgeConstraints, apply_knowledge, export_graph, parse_graph

__all__ = ["main"]


def _dump_json(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_graph(path: str):
    return parse_graph(Path(path).read_text(encoding="utf-8"), "json")


def _parse_conditions(pairs: list[str]) -> dict[str, float]:
    conditions: dict[str, float] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"condition {pair!r} must look like NAME=VALUE")
        name, _, raw = pair.partition("=")
        try:
            conditions[name.strip()] = float(raw)
        except ValueError:
            raise ValueError(f"condition {pair!r} has a non-numeric value") from None
    return conditions


def _schema_from_flag(path: str | None):
    if path is None:
        return dataset_mod.default_schema()
    return dataset_mod.schema_from_json(Path(path).read_text(encoding="utf-8"))


def cmd_generate(args) -> int:
    schema = _schema_from_flag(args.schema)
    ds = dataset_mod.generate_dataset(schema, args.n, args.seed, args.noise)
    dataset_mod.save_csv(ds, args.out)
    sys.stdout.write(f"wrote {ds.n} rows x {len(ds.columns)} columns to {args.out}\n")
    return 0


def cmd_discover(args) -> int:
    ds = dataset_mod.load_csv(args.data, _schema_from_flag(args.schema))
    cfg = discovery.GesConfig(
        penalty_multiplier=args.penalty,
        max_parents=args.max_parents,
        score_features=args.features,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = discovery.run_ges(ds, cfg)
    Path(args.out).write_text(export_graph(result.graph, "json"), encoding="utf-8")
    if args.report:
        _dump_json(result.to_json_dict(), args.report)
    sys.stdout.write(
        f"found {len(result.graph.directed)} directed and "
        f"{len(result.graph.undirected)} undirected edges -> {args.out}\n"
    )
    return 0


def cmd_prune(args) -> int:
    g = _load_graph(args.graph)
    raw = json.loads(Path(args.constraints).read_text(encoding="utf-8"))
    k = KnowledgeConstraints(
        required=[tuple(e) for e in raw.get("required", [])],
        forbidden=[tuple(e) for e in raw.get("forbidden", [])],
        tiers=[list(t) for t in raw.get("tiers", [])],
    )
    pruned = apply_knowledge(g, k)
    Path(args.out).write_text(export_graph(pruned, "json"), encoding="utf-8")
    sys.stdout.write(f"wrote constrained graph to {args.out}\n")
    return 0


def cmd_identify(args) -> int:
    g = _load_graph(args.graph)
    estimand = identify.identify_estimand(g, args.treatment, args.outcome)
    _dump_json(estimand.to_json_dict(), args.out)
    return 0


def cmd_estimate(args) -> int:
    g = _load_graph(args.graph)
    ds = dataset_mod.load_csv(args.data, _schema_from_flag(args.schema))
    scenario = estimation.Scenario(
        treatment=args.treatment,
        control_value=args.control,
        treatment_value=args.treat,
        outcome=args.outcome,
        conditions=_parse_conditions(args.condition),
        n_samples=args.samples,
    )
    scm = estimation.fit_scm(ds, g, args.expansion)
    if scenario.conditions:
        estimate = estimation.estimate_cate(scm, scenario, seed=args.seed)
    else:
        estimate = estimation.estimate_ate(scm, scenario, seed=args.seed)
    payload = estimate.to_json_dict()
    payload["seed"] = args.seed
    _dump_json(payload, args.out)
    return 0


def cmd_validate(args) -> int:
    raw = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
    scenario = estimation.Scenario(
        treatment=raw["treatment"],
        control_value=float(raw["control"]),
        treatment_value=float(raw["treat"]),
        outcome=raw.get("outcome", dataset_mod.OUTCOME_COLUMN),
        conditions={k: float(v) for k, v in raw.get("conditions", {}).items()},
        n_samples=int(raw.get("n_samples", 2000)),
    )
    schema = _schema_from_flag(args.schema)
    if args.data:
        ds = dataset_mod.load_csv(args.data, schema)
    else:
        ds = dataset_mod.generate_dataset(schema, args.n, args.seed, args.noise)
    if args.graph:
        g = _load_graph(args.graph)
    else:
        g = oracle.ground_truth_dag()

    scm = estimation.fit_scm(ds, g, "interactions2")
    if scenario.conditions:
        causal = estimation.estimate_cate(scm, scenario, seed=args.seed)
    else:
        causal = estimation.estimate_ate(scm, scenario, seed=args.seed)

    model = baseline_mod.fit_baseline(ds, scenario.outcome)
    naive = baseline_mod.naive_whatif(
        model,
        scenario,
        dataset_mod.observed_ranges(ds),
        scenario.n_samples,
        args.seed,
    )

    configs = oracle.sample_conditioned_configs(
        dict(scenario.conditions), args.oracle_samples, args.seed
    )
    effects = [
        oracle.paired_effect(
            cfg, scenario.treatment, scenario.control_value, scenario.treatment_value
        )
        for cfg in configs
    ]
    oracle_mean = float(np.mean(effects))

    def spread(values) -> dict:
        return {
            "p5": float(np.percentile(values, 5)),
            "p95": float(np.percentile(values, 95)),
        }

    report = {
        "scenario": scenario.to_json_dict(),
        "causal": {
            "tau": causal.tau,
            "standard_error": causal.standard_error,
            "abs_error_vs_oracle": abs(causal.tau - oracle_mean),
            "unit_effect_range": spread(causal.unit_effects),
        },
        "naive": {
            "tau": naive.tau,
            "standard_error": naive.standard_error,
            "abs_error_vs_oracle": abs(naive.tau - oracle_mean),
            "unit_effect_range": spread(naive.unit_effects),
        },
        "oracle": {
            "mean": oracle_mean,
            "std": float(np.std(effects, ddof=1)),
            "n": len(effects),
            "unit_effect_range": spread(effects),
        },
        "seed": args.seed,
    }
    _dump_json(report, args.out)
    if not args.out:
        return 0
    width = max(len("estimator"), 9)
    lines = [
        f"{'estimator':<{width}}  {'tau':>12}  {'|err| vs oracle':>16}",
        f"{'causal':<{width}}  {causal.tau:>12.2f}  {abs(causal.tau - oracle_mean):>16.2f}",
        f"{'naive':<{width}}  {naive.tau:>12.2f}  {abs(naive.tau - oracle_mean):>16.2f}",
        f"{'oracle':<{width}}  {oracle_mean:>12.2f}  {0.0:>16.2f}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(persist_path=args.persist)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causaldesign",
        description=(
            "Causal structure discovery and what-if effect estimation for "
            "parametric building design spaces."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a labeled design-space dataset")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.005)
    p.add_argument("--out", required=True)
    p.add_argument("--schema", help="schema JSON (defaults to built-in)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("discover", help="run greedy equivalence search")
    p.add_argument("--data", required=True)
    p.add_argument("--penalty", type=float, default=0.75)
    p.add_argument("--max-parents", type=int, default=18)
    p.add_argument(
        "--features",
        choices=["linear", "interactions2"],
        default="interactions2",
    )
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="write operator log / score trajectory JSON")
    p.add_argument("--schema")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("prune", help="apply knowledge constraints to a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--constraints", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("identify", help="compute adjustment sets for a query")
    p.add_argument("--graph", required=True)
    p.add_argument("--treatment", required=True)
    p.add_argument("--outcome", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("estimate", help="interventional effect estimate")
    p.add_argument("--graph", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--treatment", required=True)
    p.add_argument("--control", type=float, required=True)
    p.add_argument("--treat", type=float, required=True)
    p.add_argument("--outcome", default=dataset_mod.OUTCOME_COLUMN)
    p.add_argument(
        "--condition",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="pin a column (repeatable); presence switches to a conditional effect",
    )
    p.add_argument(
        "--expansion", choices=["linear", "interactions2"], default="interactions2"
    )
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schema")
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser(
        "validate", help="compare causal vs naive estimates against the oracle"
    )
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--oracle-samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--data", help="CSV dataset (generated fresh when omitted)")
    p.add_argument("--graph", help="graph JSON (reference structure when omitted)")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--noise", type=float, default=0.005)
    p.add_argument("--schema")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--persist", help="JSON snapshot file for the session store")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(f"internal error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
