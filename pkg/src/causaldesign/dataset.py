"""Design-space schema, configuration sampling and labeled dataset generation.

The sampled schema covers the 17 early-design parameters of the case study
(geometry drivers, envelope u-values, glazing, airtightness, per-direction
window ratios, internal gains, occupancy).  Generated datasets append four
derived geometry columns and the simulated heating load, 22 columns total.

Generation is pure in (schema, n, seed, noise): the byte content of the
saved CSV is fully determined by those inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ParameterSpec",
    "ColumnInfo",
    "Dataset",
    "default_schema",
    "sample_configs",
    "generate_dataset",
    "save_csv",
    "load_csv",
    "schema_to_json",
    "schema_from_json",
    "observed_ranges",
    "WWR_COLUMN",
    "WWR_DIRECTIONS",
    "DERIVED_COLUMNS",
    "OUTCOME_COLUMN",
    "all_column_names",
]

ROLE_SAMPLED = "sampled"
ROLE_DERIVED = "derived"
ROLE_OUTCOME = "outcome"

WWR_COLUMN = "WWR"
WWR_DIRECTIONS = ("WWR_North", "WWR_East", "WWR_South", "WWR_West")
DERIVED_COLUMNS = ("Volume", "External_Wall_Area", "Window_Area", WWR_COLUMN)
OUTCOME_COLUMN = "Heating_Load"

_DERIVED_UNITS = {
    "Volume": "m³",
    "External_Wall_Area": "m²",
    "Window_Area": "m²",
    WWR_COLUMN: "–",
}


@dataclass(frozen=True)
class ParameterSpec:
    """One sampled design parameter with its unit and sampling bounds."""

    name: str
    unit: str
    min: float
    max: float
    kind: str = "continuous"

    def __post_init__(self) -> None:
        if self.kind not in ("continuous", "integer"):
            raise ValueError(f"unknown parameter kind {self.kind!r}")
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ValueError(f"{self.name}: bounds must be finite")
        if not self.min < self.max:
            raise ValueError(f"{self.name}: min must be below max")
        if self.kind == "integer" and (
            self.min != int(self.min) or self.max != int(self.max)
        ):
            raise ValueError(f"{self.name}: integer parameter needs integral bounds")


@dataclass(frozen=True)
class ColumnInfo:
    name: str
    unit: str
    role: str


def default_schema() -> list[ParameterSpec]:
    """The 17 sampled early-design parameters with their units and ranges.

    The window-to-wall ratio varies independently per facade direction, so
    it contributes four columns; facade area and the aggregate ratio are
    derived, not sampled.  Occupancy is floor area per person (the published
    person-per-area unit is not physically plausible for the 16-24 range).
    """
    return list(_DEFAULT_SPECS)


def _build_default_schema() -> tuple[ParameterSpec, ...]:
    u = "W/m²K"
    return tuple([
        ParameterSpec("Ground_Floor_Area", "m²", 250.0, 800.0),
        ParameterSpec("Height", "m", 3.0, 4.0),
        ParameterSpec("Number_of_Floors", "–", 2, 5, kind="integer"),
        ParameterSpec("u_Value_Wall", u, 0.15, 0.25),
        ParameterSpec("u_Value_Internal_Wall", u, 0.4, 0.6),
        ParameterSpec("u_Value_Ground_Floor", u, 0.15, 0.25),
        ParameterSpec("u_Value_Roof", u, 0.15, 0.25),
        ParameterSpec("u_Value_Internal_Floor", u, 0.4, 0.6),
        ParameterSpec("u_Value_Windows", u, 0.7, 1.0),
        ParameterSpec("g_Value_Windows", "–", 0.3, 0.6),
        ParameterSpec("Permeability", "m³/m²h", 6.0, 9.0),
        ParameterSpec("WWR_North", "–", 0.1, 0.5),
        ParameterSpec("WWR_East", "–", 0.1, 0.5),
        ParameterSpec("WWR_South", "–", 0.1, 0.5),
        ParameterSpec("WWR_West", "–", 0.1, 0.5),
        ParameterSpec("Building_Equipment_Heat_Gain", "W/m²", 10.0, 14.0),
        ParameterSpec("Building_Occupancy", "m²/person", 16.0, 24.0),
    ])


_DEFAULT_SPECS = _build_default_schema()


def all_column_names(schema: Sequence[ParameterSpec] | None = None) -> tuple[str, ...]:
    specs = list(schema) if schema is not None else default_schema()
    return tuple(s.name for s in specs) + DERIVED_COLUMNS + (OUTCOME_COLUMN,)


def _validate_schema(schema: Sequence[ParameterSpec]) -> None:
    names = [s.name for s in schema]
    if len(set(names)) != len(names):
        dup = sorted(n for n in set(names) if names.count(n) > 1)[0]
        raise ValueError(f"duplicate parameter name {dup!r}")


def _columns_for(schema: Sequence[ParameterSpec]) -> tuple[ColumnInfo, ...]:
    cols = [ColumnInfo(s.name, s.unit, ROLE_SAMPLED) for s in schema]
    cols += [ColumnInfo(n, _DERIVED_UNITS[n], ROLE_DERIVED) for n in DERIVED_COLUMNS]
    cols.append(ColumnInfo(OUTCOME_COLUMN, "kWh/a", ROLE_OUTCOME))
    return tuple(cols)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable numeric table of sampled, derived and outcome columns.

    Equality compares schema and values; ``seed`` is provenance metadata
    (``None`` for datasets loaded from CSV).
    """

    columns: tuple[ColumnInfo, ...]
    rows: np.ndarray
    seed: int | None
    param_specs: tuple[ParameterSpec, ...]

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        object.__setattr__(self, "rows", rows)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-d matrix")
        if rows.shape[1] != len(self.columns):
            raise ValueError(
                f"row width {rows.shape[1]} does not match "
                f"{len(self.columns)} declared columns"
            )
        if not np.all(np.isfinite(rows)):
            raise ValueError("dataset contains missing or non-finite values")
        by_name = {s.name: s for s in self.param_specs}
        for idx, col in enumerate(self.columns):
            spec = by_name.get(col.name)
            if col.role == ROLE_SAMPLED and spec is not None and len(rows):
                lo, hi = rows[:, idx].min(), rows[:, idx].max()
                if lo < spec.min - 1e-9 or hi > spec.max + 1e-9:
                    raise ValueError(
                        f"column {col.name} leaves its sampling bounds "
                        f"[{spec.min}, {spec.max}]"
                    )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.columns == other.columns and np.array_equal(self.rows, other.rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def index(self, name: str) -> int:
        for i, col in enumerate(self.columns):
            if col.name == name:
                return i
        raise ValueError(f"unknown column {name!r}")

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.index(name)]

    def bounds(self, name: str) -> tuple[float, float]:
        for spec in self.param_specs:
            if spec.name == name:
                return (spec.min, spec.max)
        raise ValueError(f"no sampling bounds for column {name!r}")

    def summary_stats(self) -> list[dict]:
        out = []
        for i, col in enumerate(self.columns):
            values = self.rows[:, i]
            out.append(
                {
                    "name": col.name,
                    "unit": col.unit,
                    "role": col.role,
                    "min": float(values.min()),
                    "max": float(values.max()),
                    "mean": float(values.mean()),
                    "std": float(values.std(ddof=1)) if len(values) > 1 else 0.0,
                }
            )
        return out


def sample_configs(schema: Sequence[ParameterSpec], n: int, seed: int):
    """Draw ``n`` configurations, each column independently uniform.

    Integer parameters use the inclusive uniform-integer distribution; the
    latent shape factor is drawn alongside.  Deterministic in ``seed``.
    """
    from . import oracle  # deferred: the oracle validates against this schema

    _validate_schema(schema)
    if n < 1:
        raise ValueError("need at least one configuration")
    rng = np.random.default_rng(seed)
    columns: dict[str, np.ndarray] = {}
    for spec in schema:
        if spec.kind == "integer":
            columns[spec.name] = rng.integers(
                int(spec.min), int(spec.max) + 1, size=n
            ).astype(float)
        else:
            columns[spec.name] = rng.uniform(spec.min, spec.max, size=n)
    lo, hi = oracle.SHAPE_FACTOR_RANGE
    columns["shape_factor"] = rng.uniform(lo, hi, size=n)
    return [
        oracle.BuildingConfig(**{name: float(col[i]) for name, col in columns.items()})
        for i in range(n)
    ]


def generate_dataset(
    schema: Sequence[ParameterSpec],
    n: int,
    seed: int,
    noise: float = 0.005,
) -> Dataset:
    """Sample configurations, derive geometry, simulate the heating load.

    ``noise`` is the relative standard deviation of multiplicative Gaussian
    jitter applied to the derived geometry columns; it keeps those columns
    from being exact functions of their drivers (a requirement for
    likelihood-based structure scoring).  The outcome is computed from the
    jittered columns, so the column-level structural equations hold exactly
    in the emitted table.
    """
    from . import oracle

    if not 0 <= noise <= 0.05:
        raise ValueError("noise must lie in [0, 0.05]")
    configs = sample_configs(schema, n, seed)
    sampled = np.array(
        [[getattr(cfg, spec.name) for spec in schema] for cfg in configs]
    )
    clean = np.array(
        [
            [geom[name] for name in DERIVED_COLUMNS]
            for geom in (oracle.derive_geometry(cfg) for cfg in configs)
        ]
    )
    jitter_rng = np.random.default_rng([seed, 1])
    derived = clean * (1.0 + noise * jitter_rng.standard_normal(clean.shape))

    names = [s.name for s in schema]
    values = {name: sampled[:, i] for i, name in enumerate(names)}
    values.update({name: derived[:, i] for i, name in enumerate(DERIVED_COLUMNS)})
    load = oracle.heating_load_from_columns(values)

    rows = np.column_stack([sampled, derived, load])
    return Dataset(_columns_for(schema), rows, seed, tuple(schema))


def save_csv(ds: Dataset, path) -> None:
    """Write a dataset as UTF-8 CSV with full round-trip float precision."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(ds.column_names) + "\n")
        for row in ds.rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def load_csv(path, schema: Sequence[ParameterSpec] | None = None) -> Dataset:
    """Read a dataset written by :func:`save_csv`, validating the header.

    The header must contain exactly the declared columns (any order); cells
    must parse as numbers.  Errors name the offending column or cell.
    """
    specs = list(schema) if schema is not None else default_schema()
    _validate_schema(specs)
    expected = all_column_names(specs)
    with open(path, "r", encoding="utf-8") as fh:
        header_line = fh.readline().rstrip("\n")
        if not header_line:
            raise ValueError("empty CSV: missing header row")
        header = header_line.split(",")
        for name in expected:
            if name not in header:
                raise ValueError(f"missing column {name}")
        for name in header:
            if name not in expected:
                raise ValueError(f"unexpected column {name}")
        if len(set(header)) != len(header):
            raise ValueError("duplicate column in header")
        order = [header.index(name) for name in expected]
        data: list[list[float]] = []
        for row_number, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != len(header):
                raise ValueError(
                    f"row {row_number} has {len(cells)} cells, expected {len(header)}"
                )
            parsed = []
            for idx in order:
                try:
                    parsed.append(float(cells[idx]))
                except ValueError:
                    raise ValueError(
                        f"non-numeric value {cells[idx]!r} at row {row_number} "
                        f"column {header[idx]}"
                    ) from None
            data.append(parsed)
    rows = np.array(data, dtype=float).reshape(len(data), len(expected))
    return Dataset(_columns_for(specs), rows, None, tuple(specs))


def schema_to_json(schema: Sequence[ParameterSpec]) -> str:
    payload = [
        {"name": s.name, "unit": s.unit, "min": s.min, "max": s.max, "kind": s.kind}
        for s in schema
    ]
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def schema_from_json(text: str) -> list[ParameterSpec]:
    payload = json.loads(text)
    schema = [
        ParameterSpec(
            entry["name"],
            entry["unit"],
            float(entry["min"]),
            float(entry["max"]),
            entry.get("kind", "continuous"),
        )
        for entry in payload
    ]
    _validate_schema(schema)
    return schema


def observed_ranges(ds: Dataset) -> dict[str, tuple[float, float]]:
    """Per-column (min, max) over the data; the naive sampler's input."""
    return {
        col.name: (float(ds.rows[:, i].min()), float(ds.rows[:, i].max()))
        for i, col in enumerate(ds.columns)
    }
