"""
Tests de la construction de grille et du pas de temps CFL.
"""

import numpy as np
import pytest

from src.exceptions import GridError
from src.grid import build_grid, cfl_timestep


class TestBuildGrid:

    @pytest.mark.parametrize("dim, a, L, dx, count", [
        (2, 0.5, 0.1, 0.002, 601),
        (2, 1.0, 0.2, 0.004, 601),
        (3, 0.5, 0.1, 0.00625, 193),
    ])
    def test_node_counts(self, dim, a, L, dx, count):
        grid = build_grid(dim, a, L, dx)
        assert grid.shape == (count,) * dim

    def test_interior_and_layer_ranges(self):
        grid = build_grid(2, 0.5, 0.1, 0.002)
        assert grid.layer_nodes == (50, 50)
        assert grid.interior_nodes == (501, 501)
        sl = grid.interior_slices()[0]
        x = grid.coordinates(0)[sl]
        assert x[0] == pytest.approx(-0.5)
        assert x[-1] == pytest.approx(0.5)

    def test_per_axis_values(self):
        grid = build_grid(2, [0.5, 1.0], [0.1, 0.2], [0.01, 0.02])
        assert grid.shape == (121, 121)
        assert grid.origin == pytest.approx((-0.6, -1.2))

    def test_non_integral_layer_names_axis(self):
        with pytest.raises(GridError) as exc:
            build_grid(2, 0.5, [0.1, 0.013], 0.01)
        assert exc.value.axis == 1

    def test_layer_not_multiple_of_spacing_3d(self):
        """L = 0.1 n'est pas un multiple de dx = 0.006 : 0.1 / 0.006 = 16.67."""
        with pytest.raises(GridError) as exc:
            build_grid(3, 0.5, 0.1, 0.006)
        assert exc.value.axis == 0

    @pytest.mark.parametrize("a, L, dx", [(-0.5, 0.1, 0.01), (0.5, 0.0, 0.01), (0.5, 0.1, 0.0)])
    def test_non_positive_values(self, a, L, dx):
        with pytest.raises(GridError):
            build_grid(2, a, L, dx)

    def test_dimension_checked(self):
        with pytest.raises(GridError):
            build_grid(4, 0.5, 0.1, 0.01)

    def test_periodic_axis_wraps_cells(self):
        grid = build_grid(2, 0.5, 0.1, 0.01, periodic=(False, True))
        assert grid.cell_shape == (120, 121)
        assert grid.update_slices()[1] == slice(None)


class TestCfl:

    def test_2d_value(self):
        grid = build_grid(2, 0.5, 0.1, 0.01)
        assert cfl_timestep(grid, 1.0, 0.9) == pytest.approx(0.0063640, rel=1e-4)

    def test_3d_value(self):
        grid = build_grid(3, 0.5, 0.1, 0.01)
        assert cfl_timestep(grid, 1.0, 1.0) == pytest.approx(0.0057735, rel=1e-4)

    def test_uses_smallest_spacing(self):
        grid = build_grid(2, 0.5, 0.1, [0.01, 0.005])
        assert cfl_timestep(grid, 2.0, 1.0) == pytest.approx(0.005 / (2.0 * 2 ** 0.5))

    @pytest.mark.parametrize("c_max, safety", [(0.0, 0.9), (-1.0, 0.9), (1.0, 0.0), (1.0, 1.5)])
    def test_invalid_arguments(self, c_max, safety):
        grid = build_grid(2, 0.5, 0.1, 0.01)
        with pytest.raises(ValueError):
            cfl_timestep(grid, c_max, safety)


class TestCoordinates:

    @pytest.mark.parametrize("dim, a, L, dx", [
        (2, [0.5, 1.0], [0.1, 0.2], [0.01, 0.02]),
        (3, 0.5, 0.1, 0.00625),
    ])
    def test_index_coordinate_round_trip(self, dim, a, L, dx):
        grid = build_grid(dim, a, L, dx)
        for axis in range(dim):
            x = grid.coordinates(axis)
            indices = [grid.nearest_index(axis, xi) for xi in x]
            assert indices == list(range(grid.shape[axis]))

    def test_cell_centre_is_mean_of_corners(self):
        grid = build_grid(3, [0.5, 0.3, 0.2], [0.1, 0.1, 0.05], [0.01, 0.02, 0.025])
        for axis in range(grid.dim):
            x = grid.coordinates(axis)
            centres = grid.half_coordinates(axis)
            assert centres.shape == (grid.shape[axis] - 1,)
            np.testing.assert_allclose(centres, 0.5 * (x[:-1] + x[1:]), rtol=0, atol=1e-12)

    def test_periodic_axis_has_wrap_cell(self):
        grid = build_grid(3, (0.3, 0.3, 0.04), (0.1, 0.1, 0.02), 0.02, periodic=(False, False, True))
        assert grid.cell_shape == (grid.shape[0] - 1, grid.shape[1] - 1, grid.shape[2])
