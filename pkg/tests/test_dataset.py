"""Dataset schema, sampling determinism, generation and CSV round-trips."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causaldesign.dataset import (
    Dataset,
    ParameterSpec,
    default_schema,
    generate_dataset,
    load_csv,
    observed_ranges,
    sample_configs,
    save_csv,
    schema_from_json,
    schema_to_json,
)


class TestSchema:
    def test_has_17_parameters(self):
        assert len(default_schema()) == 17

    def test_ground_floor_area_row(self):
        spec = {s.name: s for s in default_schema()}["Ground_Floor_Area"]
        assert (spec.unit, spec.min, spec.max) == ("m²", 250.0, 800.0)

    def test_window_u_value_row(self):
        spec = {s.name: s for s in default_schema()}["u_Value_Windows"]
        assert (spec.unit, spec.min, spec.max) == ("W/m²K", 0.7, 1.0)

    def test_floor_count_is_integer_kind(self):
        spec = {s.name: s for s in default_schema()}["Number_of_Floors"]
        assert (spec.min, spec.max, spec.kind) == (2, 5, "integer")

    def test_directional_wwr_columns_present(self):
        names = {s.name for s in default_schema()}
        assert {"WWR_North", "WWR_East", "WWR_South", "WWR_West"} <= names

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ValueError, match="min must be below max"):
            ParameterSpec("x", "m", 2.0, 1.0)
        with pytest.raises(ValueError, match="integral bounds"):
            ParameterSpec("x", "m", 1.5, 3.0, kind="integer")

    def test_json_roundtrip(self):
        schema = default_schema()
        again = schema_from_json(schema_to_json(schema))
        assert again == schema


class TestSampling:
    def test_within_bounds(self):
        schema = default_schema()
        configs = sample_configs(schema, 1000, 42)
        assert len(configs) == 1000
        for spec in schema:
            values = [getattr(c, spec.name) for c in configs]
            assert min(values) >= spec.min and max(values) <= spec.max

    def test_seeded_determinism(self):
        a = sample_configs(default_schema(), 50, 7)
        b = sample_configs(default_schema(), 50, 7)
        assert a == b

    def test_directions_vary_independently(self):
        configs = sample_configs(default_schema(), 5, 7)
        assert any(c.WWR_North != c.WWR_South for c in configs)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            sample_configs(default_schema(), 0, 1)

    def test_integer_column_integral(self):
        configs = sample_configs(default_schema(), 200, 3)
        floors = {c.Number_of_Floors for c in configs}
        assert floors <= {2.0, 3.0, 4.0, 5.0}
        assert len(floors) > 1

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=20, deadline=None)
    def test_bounds_hold_for_any_seed(self, seed):
        configs = sample_configs(default_schema(), 20, seed)
        for spec in default_schema():
            for c in configs:
                assert spec.min <= getattr(c, spec.name) <= spec.max


class TestGeneration:
    def test_column_count(self, building_dataset):
        assert building_dataset.rows.shape == (1000, 22)
        roles = [c.role for c in building_dataset.columns]
        assert roles.count("sampled") == 17
        assert roles.count("derived") == 4
        assert roles.count("outcome") == 1

    def test_zero_noise_geometry_exact(self):
        ds = generate_dataset(default_schema(), 25, seed=5, noise=0.0)
        volume = ds.column("Volume")
        expected = (
            ds.column("Ground_Floor_Area")
            * ds.column("Height")
            * ds.column("Number_of_Floors")
        )
        np.testing.assert_allclose(volume, expected, rtol=1e-12)
        wwr = ds.column("WWR")
        mean_dirs = (
            ds.column("WWR_North")
            + ds.column("WWR_East")
            + ds.column("WWR_South")
            + ds.column("WWR_West")
        ) / 4.0
        np.testing.assert_allclose(wwr, mean_dirs, rtol=1e-12)

    def test_load_nonnegative(self, building_dataset):
        assert (building_dataset.column("Heating_Load") >= 0).all()

    def test_noise_bounds_validated(self):
        with pytest.raises(ValueError, match="noise"):
            generate_dataset(default_schema(), 10, 1, noise=0.2)

    def test_generation_deterministic(self):
        a = generate_dataset(default_schema(), 40, seed=9, noise=0.005)
        b = generate_dataset(default_schema(), 40, seed=9, noise=0.005)
        assert a == b

    def test_observed_ranges_cover_all_columns(self, building_dataset):
        ranges = observed_ranges(building_dataset)
        assert set(ranges) == set(building_dataset.column_names)
        lo, hi = ranges["Height"]
        assert 3.0 <= lo < hi <= 4.0


class TestCsv:
    def test_roundtrip_identity(self, tmp_path, building_dataset):
        path = tmp_path / "data.csv"
        save_csv(building_dataset, path)
        again = load_csv(path)
        assert again == building_dataset

    def test_byte_determinism(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        save_csv(generate_dataset(default_schema(), 30, 4, 0.005), p1)
        save_csv(generate_dataset(default_schema(), 30, 4, 0.005), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_missing_column_named(self, tmp_path):
        ds = generate_dataset(default_schema(), 5, 1, 0.0)
        path = tmp_path / "data.csv"
        save_csv(ds, path)
        text = path.read_text()
        lines = text.splitlines()
        cut = lines[0].split(",").index("Heating_Load")
        broken = "\n".join(
            ",".join(v for i, v in enumerate(line.split(",")) if i != cut)
            for line in lines
        )
        bad = tmp_path / "broken.csv"
        bad.write_text(broken + "\n")
        with pytest.raises(ValueError, match="missing column Heating_Load"):
            load_csv(bad)

    def test_unexpected_column_named(self, tmp_path):
        ds = generate_dataset(default_schema(), 3, 1, 0.0)
        path = tmp_path / "data.csv"
        save_csv(ds, path)
        lines = path.read_text().splitlines()
        lines[0] += ",Mystery"
        for i in range(1, len(lines)):
            lines[i] += ",1.0"
        bad = tmp_path / "extra.csv"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError, match="unexpected column Mystery"):
            load_csv(bad)

    def test_non_numeric_cell_cites_row(self, tmp_path):
        ds = generate_dataset(default_schema(), 5, 1, 0.0)
        path = tmp_path / "data.csv"
        save_csv(ds, path)
        lines = path.read_text().splitlines()
        cells = lines[3].split(",")  # data row 3
        cells[0] = "abc"
        lines[3] = ",".join(cells)
        bad = tmp_path / "text.csv"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError, match="row 3"):
            load_csv(bad)

    def test_loaded_dataset_has_no_seed(self, tmp_path):
        ds = generate_dataset(default_schema(), 5, 1, 0.0)
        path = tmp_path / "data.csv"
        save_csv(ds, path)
        assert load_csv(path).seed is None


class TestDatasetInvariants:
    def test_rejects_nan(self):
        ds = generate_dataset(default_schema(), 3, 1, 0.0)
        rows = ds.rows.copy()
        rows[0, 0] = np.nan
        with pytest.raises(ValueError, match="missing or non-finite"):
            Dataset(ds.columns, rows, None, ds.param_specs)

    def test_rejects_out_of_bounds_sampled(self):
        ds = generate_dataset(default_schema(), 3, 1, 0.0)
        rows = ds.rows.copy()
        rows[0, 0] = 10_000.0
        with pytest.raises(ValueError, match="bounds"):
            Dataset(ds.columns, rows, None, ds.param_specs)

    def test_rejects_wrong_width(self):
        ds = generate_dataset(default_schema(), 3, 1, 0.0)
        with pytest.raises(ValueError, match="columns"):
            Dataset(ds.columns, ds.rows[:, :-1], None, ds.param_specs)
