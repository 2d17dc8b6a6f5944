"""Steady-state heating-load oracle for the parametric building design space.

A transparent first-principles surrogate: transmission and infiltration
losses over seasonal degree-hours, minus utilizable solar and internal
gains, clamped at zero.  It supplies training data, unit-level ground-truth
effects for validating causal estimates, and the reference causal structure
over the dataset columns.

The load formula is written over the *dataset columns* (sampled parameters
plus derived geometry), so the set of columns it actually reads is exactly
the parent set of the outcome in :func:`ground_truth_dag`.  Two structural
commitments keep that correspondence intact:

* east and west facades receive the mean of south and north irradiation, so
  directional window ratios other than south/north act on the load only
  through the aggregate ratio and window area;
* ventilation loss carries a stack-effect factor in storey height, giving
  height a direct channel beyond volume and facade area.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import dataset as dataset_mod
from .graphs import CausalGraph

__all__ = [
    "BuildingConfig",
    "OracleConstants",
    "DEFAULT_CONSTANTS",
    "SHAPE_FACTOR_RANGE",
    "derive_geometry",
    "heating_load",
    "heating_load_from_columns",
    "paired_effect",
    "ground_truth_dag",
    "sample_conditioned_configs",
    "load_constants",
]

# Perimeter irregularity of the randomly shaped footprints; exogenous and
# never exported as a dataset column (a square footprint would be 4.0).
SHAPE_FACTOR_RANGE = (4.0, 4.4)

# The published occupancy range (16-24) is only physically plausible as
# floor area per person; the sampled column is interpreted accordingly.
OCCUPANCY_UNIT = "m2_per_person"


@dataclass(frozen=True)
class OracleConstants:
    """Climate and usage constants of the surrogate model.

    Units: degree_hours K.h/a, infiltration_conversion Wh/(m3.K),
    irradiation kWh/(m2.a), occupant_heat_output W/person, lighting and
    equipment gains W/m2, hours_of_operation h/a (effective full-load hours
    of internal gains), stack_coefficient 1/m.
    """

    degree_hours: float = 84_000.0
    infiltration_conversion: float = 0.34
    permeability_divisor: float = 20.0
    irradiation_south: float = 400.0
    irradiation_east: float = 250.0
    irradiation_west: float = 250.0
    irradiation_north: float = 100.0
    occupant_heat_output: float = 70.0
    lighting_heat_gain: float = 8.0
    gain_utilization: float = 0.7
    hours_of_operation: float = 1_400.0
    stack_coefficient: float = 0.1
    stack_reference_height: float = 3.0

    def __post_init__(self) -> None:
        for fld in dataclasses.fields(self):
            value = getattr(self, fld.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ValueError(f"constant {fld.name} must be a finite number")
            if value <= 0:
                raise ValueError(f"constant {fld.name} must be strictly positive")
        if not (0 < self.gain_utilization <= 1):
            raise ValueError("gain_utilization must lie in (0, 1]")
        if not (
            self.irradiation_south > self.irradiation_east
            and self.irradiation_south > self.irradiation_west
        ):
            raise ValueError("south irradiation must be strictly greatest")
        mean_sn = (self.irradiation_south + self.irradiation_north) / 2.0
        if not (
            math.isclose(self.irradiation_east, mean_sn)
            and math.isclose(self.irradiation_west, mean_sn)
        ):
            # Keeps east/west ratios mediated purely by the aggregate ratio,
            # which is what fixes the reference causal structure.
            raise ValueError(
                "east and west irradiation must equal the mean of south and north"
            )

    @property
    def irradiation_mean(self) -> float:
        return (
            self.irradiation_south
            + self.irradiation_east
            + self.irradiation_west
            + self.irradiation_north
        ) / 4.0


DEFAULT_CONSTANTS = OracleConstants()


def load_constants(path) -> OracleConstants:
    """Read a (possibly partial) constants override from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    known = {f.name for f in dataclasses.fields(OracleConstants)}
    unknown = sorted(set(payload) - known)
    if unknown:
        raise ValueError(f"unknown oracle constant {unknown[0]!r}")
    return dataclasses.replace(DEFAULT_CONSTANTS, **payload)


@dataclass(frozen=True)
class BuildingConfig:
    """One point of the sampled design space plus its latent shape factor."""

    Ground_Floor_Area: float
    Height: float
    Number_of_Floors: float
    u_Value_Wall: float
    u_Value_Internal_Wall: float
    u_Value_Ground_Floor: float
    u_Value_Roof: float
    u_Value_Internal_Floor: float
    u_Value_Windows: float
    g_Value_Windows: float
    Permeability: float
    WWR_North: float
    WWR_East: float
    WWR_South: float
    WWR_West: float
    Building_Equipment_Heat_Gain: float
    Building_Occupancy: float
    shape_factor: float

    def __post_init__(self) -> None:
        for spec in dataset_mod.default_schema():
            value = getattr(self, spec.name)
            if not math.isfinite(value):
                raise ValueError(f"{spec.name} must be finite")
            if not (spec.min - 1e-9 <= value <= spec.max + 1e-9):
                raise ValueError(
                    f"{spec.name}={value} outside [{spec.min}, {spec.max}]"
                )
        lo, hi = SHAPE_FACTOR_RANGE
        if not (lo - 1e-9 <= self.shape_factor <= hi + 1e-9):
            raise ValueError(
                f"shape_factor={self.shape_factor} outside [{lo}, {hi}]"
            )

    def replace(self, **changes) -> "BuildingConfig":
        return dataclasses.replace(self, **changes)

    def sampled_values(self) -> dict[str, float]:
        return {
            spec.name: float(getattr(self, spec.name))
            for spec in dataset_mod.default_schema()
        }


def derive_geometry(cfg: BuildingConfig) -> dict[str, float]:
    """Geometric quantities implied by a configuration.

    Gross facade area comes from the perimeter approximation
    shape_factor * sqrt(footprint); window area splits off via the mean
    window-to-wall ratio.
    """
    gfa = cfg.Ground_Floor_Area
    height = cfg.Height
    floors = cfg.Number_of_Floors
    if gfa <= 0 or height <= 0 or floors <= 0:
        raise ValueError("floor area, height and floor count must be positive")
    volume = gfa * height * floors
    gross_wall = cfg.shape_factor * math.sqrt(gfa) * height * floors
    wwr = (cfg.WWR_North + cfg.WWR_East + cfg.WWR_South + cfg.WWR_West) / 4.0
    window_area = wwr * gross_wall
    return {
        "Volume": volume,
        "Gross_Wall": gross_wall,
        "WWR": wwr,
        "Window_Area": window_area,
        "External_Wall_Area": gross_wall - window_area,
    }


def heating_load_from_columns(
    values: Mapping[str, float | np.ndarray],
    constants: OracleConstants = DEFAULT_CONSTANTS,
) -> float | np.ndarray:
    """Annual heating load (kWh/a) as a function of dataset columns.

    Accepts scalars or aligned numpy arrays.  Reads exactly the columns that
    are parents of the outcome in :func:`ground_truth_dag`; in particular
    the internal u-values, the east/west window ratios, and the aggregate
    WWR column are never consulted.
    """
    c = constants
    gfa = values["Ground_Floor_Area"]
    height = values["Height"]
    floors = values["Number_of_Floors"]
    volume = values["Volume"]
    ext_wall = values["External_Wall_Area"]
    window = values["Window_Area"]

    transmission = (
        values["u_Value_Wall"] * ext_wall
        + values["u_Value_Windows"] * window
        + values["u_Value_Roof"] * gfa
        + values["u_Value_Ground_Floor"] * gfa
    )
    stack = 1.0 + c.stack_coefficient * (height - c.stack_reference_height)
    ventilation = (
        c.infiltration_conversion
        * (values["Permeability"] / c.permeability_divisor)
        * volume
        * stack
    )
    losses = (transmission + ventilation) * c.degree_hours / 1000.0

    solar = values["g_Value_Windows"] * (
        c.irradiation_mean * window
        + (
            (c.irradiation_south - c.irradiation_mean) * values["WWR_South"]
            + (c.irradiation_north - c.irradiation_mean) * values["WWR_North"]
        )
        * (ext_wall + window)
        / 4.0
    )
    internal_density = (
        c.lighting_heat_gain
        + values["Building_Equipment_Heat_Gain"]
        + c.occupant_heat_output / values["Building_Occupancy"]
    )
    internal = internal_density * gfa * floors * c.hours_of_operation / 1000.0

    load = losses - c.gain_utilization * (solar + internal)
    return np.maximum(0.0, load) if isinstance(load, np.ndarray) else max(0.0, load)


def heating_load(
    cfg: BuildingConfig, constants: OracleConstants = DEFAULT_CONSTANTS
) -> float:
    """Annual heating load of a configuration, kWh/a."""
    columns = cfg.sampled_values()
    columns.update(derive_geometry(cfg))
    return float(heating_load_from_columns(columns, constants))


def paired_effect(
    cfg: BuildingConfig,
    treatment: str,
    control: float,
    treated: float,
    constants: OracleConstants = DEFAULT_CONSTANTS,
) -> float:
    """Unit-level causal ground truth: load at treated minus load at control.

    Every other field of the configuration is held fixed.
    """
    sampled = {spec.name for spec in dataset_mod.default_schema()}
    if treatment not in sampled:
        raise ValueError(f"unknown sampled column {treatment!r}")
    treated_cfg = cfg.replace(**{treatment: float(treated)})
    control_cfg = cfg.replace(**{treatment: float(control)})
    return heating_load(treated_cfg, constants) - heating_load(control_cfg, constants)


def sample_conditioned_configs(
    conditions: Mapping[str, float],
    n: int,
    seed: int,
    schema=None,
) -> list[BuildingConfig]:
    """Sample configurations uniformly with some columns pinned.

    A pin on the aggregate ``WWR`` expands to the four directional ratios,
    matching how a designer fixes the window-to-wall ratio of a scheme.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    schema = list(schema) if schema is not None else dataset_mod.default_schema()
    pinned = expand_wwr_condition(dict(conditions))
    by_name = {spec.name: spec for spec in schema}
    for name, value in pinned.items():
        spec = by_name.get(name)
        if spec is None:
            raise ValueError(f"unknown sampled column {name!r}")
        if not (spec.min - 1e-9 <= value <= spec.max + 1e-9):
            raise ValueError(
                f"condition {name}={value} outside [{spec.min}, {spec.max}]"
            )
    rng = np.random.default_rng(seed)
    columns: dict[str, np.ndarray] = {}
    for spec in schema:
        if spec.name in pinned:
            columns[spec.name] = np.full(n, float(pinned[spec.name]))
        elif spec.kind == "integer":
            columns[spec.name] = rng.integers(
                int(spec.min), int(spec.max) + 1, size=n
            ).astype(float)
        else:
            columns[spec.name] = rng.uniform(spec.min, spec.max, size=n)
    lo, hi = SHAPE_FACTOR_RANGE
    columns["shape_factor"] = rng.uniform(lo, hi, size=n)
    return [
        BuildingConfig(**{name: float(col[i]) for name, col in columns.items()})
        for i in range(n)
    ]


def expand_wwr_condition(conditions: dict[str, float]) -> dict[str, float]:
    """Replace a pin on the aggregate WWR by pins on the four directions."""
    if dataset_mod.WWR_COLUMN in conditions:
        value = conditions.pop(dataset_mod.WWR_COLUMN)
        for direction in dataset_mod.WWR_DIRECTIONS:
            existing = conditions.setdefault(direction, value)
            if existing != value:
                raise ValueError(
                    f"condition on {dataset_mod.WWR_COLUMN} conflicts with "
                    f"{direction}={existing}"
                )
    return conditions


def ground_truth_dag() -> CausalGraph:
    """Reference causal structure over the 22 dataset columns.

    Geometry drivers cause volume, facade areas and the load; directional
    window ratios cause the aggregate ratio, with south/north also direct
    causes of the load; every envelope/usage property feeds the load; the
    internal u-values are isolated.
    """
    geometry = ["Ground_Floor_Area", "Height", "Number_of_Floors"]
    geometry_effects = ["Volume", "External_Wall_Area", "Window_Area", "Heating_Load"]
    load_parents = [
        "Volume",
        "External_Wall_Area",
        "Window_Area",
        "u_Value_Wall",
        "u_Value_Ground_Floor",
        "u_Value_Roof",
        "u_Value_Windows",
        "g_Value_Windows",
        "Permeability",
        "Building_Equipment_Heat_Gain",
        "Building_Occupancy",
    ]
    edges: list[tuple[str, str]] = []
    for cause in geometry:
        for effect in geometry_effects:
            edges.append((cause, effect))
    for direction in dataset_mod.WWR_DIRECTIONS:
        edges.append((direction, dataset_mod.WWR_COLUMN))
    edges.append((dataset_mod.WWR_COLUMN, "External_Wall_Area"))
    edges.append((dataset_mod.WWR_COLUMN, "Window_Area"))
    edges.append(("WWR_South", "Heating_Load"))
    edges.append(("WWR_North", "Heating_Load"))
    for cause in load_parents:
        edges.append((cause, "Heating_Load"))
    return CausalGraph(dataset_mod.all_column_names(), edges)
