"""
Tests des noyaux de différences finies et du stockage compact de la couche.
"""

import numpy as np
import pytest

from src.damping import DampingProfile, sample_profile
from src.grid import build_grid
from src.stencils import LayerRegion, laplacian


class TestLaplacian:

    def test_quadratic_exact(self, grid2d, unit_medium):
        x1, x2 = grid2d.meshgrid()
        u = x1 ** 2 + 3.0 * x2 ** 2
        lap = laplacian(u, unit_medium(grid2d).faces, grid2d)
        np.testing.assert_allclose(lap[1:-1, 1:-1], 8.0, rtol=1e-8)
        assert not np.any(lap[0]) and not np.any(lap[:, -1])

    def test_periodic_axis_wraps(self, unit_medium):
        grid = build_grid(2, 0.2, 0.1, 0.02, periodic=(False, True))
        x1, _ = grid.meshgrid()
        u = np.sin(np.pi * x1)
        lap = laplacian(u, unit_medium(grid).faces, grid)
        # u ne dépend pas de x2 : toutes les colonnes sont identiques, bords périodiques compris
        np.testing.assert_array_equal(lap[:, 0], lap[:, 7])
        np.testing.assert_array_equal(lap[:, -1], lap[:, 7])


class TestLayerRegion:

    def test_empty_without_damping(self, grid2d):
        region = LayerRegion(grid2d, DampingProfile.zero(grid2d))
        assert region.is_empty
        assert region.storage_report()["aux_scalars"] == 0

    def test_cells_only_in_layer(self, grid2d, layer80):
        region = LayerRegion(grid2d, layer80(grid2d))
        cells = np.zeros(grid2d.cell_shape, dtype=bool).ravel()
        cells[region.cell_ids] = True
        cells = cells.reshape(grid2d.cell_shape)
        n = grid2d.layer_nodes[0]
        assert not np.any(cells[n:-n, n:-n])
        assert np.all(cells[:n, :]) and np.all(cells[:, -n:])

    def test_gradient_exact_for_linear_fields(self, grid3d, layer80):
        region = LayerRegion(grid3d, layer80(grid3d))
        x1, x2, x3 = grid3d.meshgrid()
        u = 2.0 * x1 - 3.0 * x2 + 0.5 * x3 + 1.0
        grad = region.gradient(region.gather(u))
        np.testing.assert_allclose(grad[0], 2.0, rtol=1e-9)
        np.testing.assert_allclose(grad[1], -3.0, rtol=1e-9)
        np.testing.assert_allclose(grad[2], 0.5, rtol=1e-9)

    @pytest.mark.parametrize("dim", [2, 3])
    def test_divergence_is_minus_adjoint(self, dim, layer80):
        grid = build_grid(dim, 0.1, 0.05, 0.025)
        region = LayerRegion(grid, layer80(grid))
        rng = np.random.default_rng(3)
        values = rng.standard_normal(region.n_touched)
        phi = rng.standard_normal((dim, region.n_cells))
        lhs = float(np.dot(values, region.divergence(phi)))
        rhs = -float(np.sum(phi * region.gradient(values)))
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_interface_nodes_touched_but_undamped(self, grid2d, layer80):
        region = LayerRegion(grid2d, layer80(grid2d))
        sigma = region.node_sigma()
        assert np.any(sigma == 0.0)
        assert np.all(sigma >= 0.0)

    def test_storage_2d(self, layer80):
        grid = build_grid(2, 0.5, 0.1, 0.01)
        report = LayerRegion(grid, layer80(grid)).storage_report()
        assert report["phi_cells"] == report["layer_cells"]
        assert report["psi_nodes"] == 0
        assert report["aux_per_layer_cell"] <= 2.0

    def test_storage_3d(self, grid3d, layer80):
        region = LayerRegion(grid3d, layer80(grid3d))
        report = region.storage_report()
        assert report["layer_cells"] == 12 ** 3 - 8 ** 3
        assert 0 < report["psi_nodes"] < report["layer_cells"]
        assert report["aux_per_layer_cell"] <= 4.0

    def test_psi_support_needs_two_axes(self, grid3d):
        # amortissement sur un seul axe : aucun produit zeta_a zeta_b, donc pas de psi
        profile = sample_profile(grid3d, zeta_bar=(80.0, 0.0, 0.0))
        region = LayerRegion(grid3d, profile)
        assert region.n_psi == 0
        assert region.n_cells > 0
