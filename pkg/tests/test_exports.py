import math

import numpy as np
import pytest

from atomloc import FilterGrid, GridSpec
from atomloc.exports import (CSV_HEADER, PALETTES, grid_from_csv,
                             grid_from_json, grid_to_csv, grid_to_json,
                             load_grid, plot_script, render_heatmap)


def tiny_grid() -> FilterGrid:
    spec = GridSpec(u_min=-1.0, u_max=1.0, v_min=-1.0, v_max=1.0, nx=3, ny=3)
    vals = np.arange(9, dtype=float).reshape(3, 3) + 0.25
    vals /= vals.sum() * spec.du * spec.dv
    return FilterGrid(values=vals, norm_constant=1.0, spec=spec)


class TestCsv:
    def test_header_and_row_count(self):
        lines = grid_to_csv(tiny_grid()).decode().splitlines()
        assert lines[0] == CSV_HEADER == "# atomloc-grid v1"
        assert len(lines) == 1 + 9

    def test_row_order_v_outer_u_inner(self):
        lines = grid_to_csv(tiny_grid()).decode().splitlines()[1:]
        us = [float(ln.split(",")[0]) for ln in lines]
        vs = [float(ln.split(",")[1]) for ln in lines]
        assert us == [-1.0, 0.0, 1.0] * 3
        assert vs == [-1.0] * 3 + [0.0] * 3 + [1.0] * 3

    def test_round_trip_is_byte_identical(self, preset_grids):
        first = grid_to_csv(preset_grids["fig2d"])
        second = grid_to_csv(grid_from_csv(first))
        assert first == second

    def test_values_survive_exactly(self):
        grid = tiny_grid()
        again = grid_from_csv(grid_to_csv(grid))
        assert np.array_equal(grid.values, again.values)
        assert again.spec == grid.spec

    def test_rejects_foreign_data(self):
        with pytest.raises(ValueError, match="header"):
            grid_from_csv(b"u,v,W\n0,0,1\n")


class TestJson:
    def test_round_trip_is_byte_identical(self, preset_grids):
        first = grid_to_json(preset_grids["fig3c"])
        second = grid_to_json(grid_from_json(first))
        assert first == second

    def test_metadata_round_trips_losslessly(self, preset_grids):
        grid = preset_grids["fig3c"]
        again = grid_from_json(grid_to_json(grid))
        assert again.system == grid.system
        assert again.field == grid.field
        assert again.init == grid.init
        assert again.query == grid.query
        assert again.solver == grid.solver
        assert again.norm_constant == grid.norm_constant
        assert np.array_equal(again.values, grid.values)

    def test_csv_grid_has_no_metadata(self, preset_grids):
        bare = grid_from_csv(grid_to_csv(preset_grids["fig3c"]))
        assert bare.system is None
        assert math.isnan(bare.norm_constant)

    def test_rejects_foreign_data(self):
        with pytest.raises(ValueError, match="format"):
            grid_from_json(b'{"values": []}')


def test_load_grid_sniffs_format(tmp_path, preset_grids):
    g = preset_grids["fig2d"]
    (tmp_path / "g.csv").write_bytes(grid_to_csv(g))
    (tmp_path / "g.json").write_bytes(grid_to_json(g))
    assert np.array_equal(load_grid(tmp_path / "g.csv").values, g.values)
    assert load_grid(tmp_path / "g.json").system == g.system
    (tmp_path / "g.bin").write_bytes(b"\x00\x01")
    with pytest.raises(ValueError, match="unrecognized"):
        load_grid(tmp_path / "g.bin")


class TestHeatmap:
    def test_ppm_layout(self, preset_grids):
        data = render_heatmap(preset_grids["fig2d"])
        assert data.startswith(b"P6\n201 201\n255\n")
        assert len(data) == 15 + 201 * 201 * 3

    def test_constant_grid_uniform(self):
        spec = GridSpec(nx=5, ny=5)
        vals = np.full((5, 5), 0.3)
        grid = FilterGrid(values=vals, norm_constant=1.0, spec=spec)
        body = render_heatmap(grid)[15:]
        assert len(set(body)) == 1

    def test_fig2d_brightest_pixels_at_antinodes(self, preset_grids):
        grid = preset_grids["fig2d"]
        data = render_heatmap(grid)
        img = np.frombuffer(data[15:], dtype=np.uint8).reshape(201, 201, 3)
        rows, cols = np.nonzero(img[:, :, 0] == 255)
        u, v = grid.axes()
        # rows run v descending, columns u ascending
        pts = {(round(u[c] / math.pi, 2), round(v[200 - r] / math.pi, 2))
               for r, c in zip(rows, cols)}
        assert (0.5, 0.5) in pts or (-0.5, -0.5) in pts
        for pu, pv in pts:
            assert abs(abs(pu) - 0.5) < 0.05 and abs(abs(pv) - 0.5) < 0.05
            assert (pu > 0) == (pv > 0)

    def test_fig3c_bright_ring_in_third_quadrant(self, preset_grids):
        grid = preset_grids["fig3c"]
        img = np.frombuffer(render_heatmap(grid)[15:], dtype=np.uint8)
        img = img.reshape(201, 201, 3)
        bright = np.argwhere(img[:, :, 0] >= 230)
        u, v = grid.axes()
        assert len(bright) > 20
        for r, c in bright:
            assert u[c] < 0 and v[200 - r] < 0

    def test_fire_palette_exact_bytes(self):
        fire = PALETTES["fire"]
        assert tuple(fire[0]) == (0, 0, 0)
        assert tuple(fire[85]) == (255, 0, 0)
        assert tuple(fire[170]) == (255, 255, 0)
        assert tuple(fire[255]) == (255, 255, 255)
        assert tuple(fire[50]) == (150, 0, 0)

    def test_unknown_palette(self, preset_grids):
        with pytest.raises(ValueError, match="palette"):
            render_heatmap(preset_grids["fig2d"], palette="jet")


def test_plot_script_references_csv():
    script = plot_script("fig2d_grid.csv").decode()
    assert '"fig2d_grid.csv"' in script
    assert "pm3d" in script
