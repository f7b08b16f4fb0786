"""
Tests du banc d'essai : normes L2, référence élargie, convergence, balayage.
"""

import numpy as np
import pytest

from src.exceptions import CausalityError, NonNestedLevelsError
from src.grid import build_grid
from src.harness import (ErrorSeries, compare_with_reference, convergence_study, l2_error_series,
                         reference_run, reflection_sweep, required_half_width, sample_times,
                         trapezoid_weights)
from src.models import SimulationConfig, SourceTerm

POINT = SourceTerm("point_gaussian_derivative", (0.0, 0.0), 10.0)


@pytest.fixture
def small_config(grid2d):
    return SimulationConfig(grid=grid2d, t_end=0.2, zeta_bar=(80.0, 80.0), source=POINT)


class TestErrorSeries:

    def test_weights_sum_to_volume(self):
        assert trapezoid_weights((11, 21), (0.1, 0.1)).sum() == pytest.approx(2.0)

    def test_identical_inputs(self):
        field = np.random.default_rng(0).standard_normal((11, 11))
        series = l2_error_series({0.0: field, 1.0: field}, {0.0: field.copy(), 1.0: field.copy()}, (0.1, 0.1))
        assert not np.any(series.l2_error)

    def test_unit_difference_on_unit_area(self):
        ref = np.zeros((11, 11))
        series = l2_error_series({0.5: ref + 1.0}, {0.5: ref}, (0.1, 0.1))
        assert series.l2_error[0] == pytest.approx(1.0)
        assert series.normalization == 0.0
        assert series.relative[0] == 0.0

    def test_mismatched_times(self):
        with pytest.raises(ValueError):
            l2_error_series({0.0: np.zeros(3)}, {0.1: np.zeros(3)}, (0.1,))

    def test_invariants(self):
        with pytest.raises(ValueError):
            ErrorSeries(np.array([0.0, 0.0]), np.array([0.0, 1.0]), 1.0)
        with pytest.raises(ValueError):
            ErrorSeries(np.array([0.0, 1.0]), np.array([0.0, -1.0]), 1.0)
        with pytest.raises(ValueError):
            ErrorSeries(np.array([0.0, 1.0]), np.array([0.0]), 1.0)

    def test_frame_and_lookup(self):
        series = ErrorSeries(np.array([0.0, 0.5, 1.0]), np.array([0.0, 2.0, 1.0]), 4.0)
        assert series.at(0.6) == 2.0
        frame = series.to_frame()
        assert list(frame.columns) == ["t", "e_L2", "e_rel"]
        assert frame["e_rel"].tolist() == [0.0, 0.5, 0.25]


class TestReference:

    def test_causality_guard(self):
        config = SimulationConfig(grid=build_grid(2, 0.5, 0.1, 0.05), t_end=1.0, source=POINT)
        assert required_half_width(config, 1.0) == pytest.approx(1.5)
        with pytest.raises(CausalityError) as exc:
            reference_run(config, half_width=(1.2, 1.2))
        assert exc.value.required_half_width == pytest.approx(1.5)

    def test_zero_source_zero_reference(self, grid2d):
        config = SimulationConfig(grid=grid2d, t_end=0.2)
        ref = reference_run(config, half_width=(0.5, 0.5), snapshot_times=(0.1, 0.2))
        assert set(ref.snapshots) == {0.1, 0.2}
        for snap in ref.snapshots.values():
            assert snap.shape == grid2d.interior_nodes
            assert not np.any(snap)

    def test_independent_of_enlargement(self, small_config):
        near = reference_run(small_config, half_width=(0.5, 0.5), snapshot_times=(0.2,))
        far = reference_run(small_config, half_width=(1.0, 1.0), snapshot_times=(0.2,))
        scale = np.abs(far.snapshots[0.2]).max()
        assert scale > 0
        assert np.abs(near.snapshots[0.2] - far.snapshots[0.2]).max() <= 1e-12 * scale

    def test_compare_starts_at_zero(self, small_config):
        times = sample_times(0.2, 4)
        series, run, ref = compare_with_reference(small_config, times, half_width=(0.5, 0.5))
        assert series.times.tolist() == pytest.approx(times)
        assert series.l2_error[0] == 0.0
        assert run.snapshots[0.2].shape == small_config.grid.interior_nodes
        assert ref.grid.shape == (51, 51)
        assert series.normalization > 0


class TestConvergence:

    def test_standing_mode_2d(self):
        report = convergence_study("standing2d", [20, 40, 80])
        assert len(report.orders) == 2
        for p in report.orders:
            assert 1.7 <= p <= 2.3

    def test_standing_mode_3d(self):
        report = convergence_study("standing3d", [12, 24, 48])
        for p in report.orders:
            assert 1.7 <= p <= 2.3

    def test_zero_data_is_exact(self):
        report = convergence_study("zero", [10, 20, 40])
        assert report.exact
        assert all(np.isnan(p) for p in report.orders)

    @pytest.mark.parametrize("levels", [[20, 30, 60], [20, 40]])
    def test_levels_must_be_nested(self, levels):
        with pytest.raises(NonNestedLevelsError):
            convergence_study("standing2d", levels)

    def test_unknown_scenario(self):
        with pytest.raises(ValueError):
            convergence_study("travelling", [10, 20, 40])


class TestSweep:

    def test_layer_beats_dirichlet_wall(self, grid2d):
        source = SourceTerm("point_gaussian_derivative", (0.0, 0.0), 5.0)
        config = SimulationConfig(grid=grid2d, t_end=1.0, source=source)
        series = reflection_sweep(config, [0.0, 80.0], sample_times(1.0, 10), half_width=(1.3, 1.3))
        assert set(series) == {0.0, 80.0}
        assert series[0.0].l2_error[-1] > 5.0 * series[80.0].l2_error[-1]
        assert series[0.0].normalization == series[80.0].normalization
