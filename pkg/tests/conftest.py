"""
Fixtures partagées : petites grilles, milieu homogène, profils d'amortissement.
"""

import numpy as np
import pytest

from src.damping import sample_profile
from src.grid import build_grid
from src.media import build_medium
from src.models import MediumSpec


@pytest.fixture
def grid2d():
    """Ω = [-0.2, 0.2]², couche de 5 noeuds, 31 x 31 noeuds."""
    return build_grid(2, 0.2, 0.1, 0.02)


@pytest.fixture
def grid3d():
    """Ω = [-0.1, 0.1]³, couche de 2 noeuds, 13 noeuds par axe."""
    return build_grid(3, 0.1, 0.05, 0.025)


@pytest.fixture
def unit_medium():
    """Fabrique d'un milieu homogène c = 1 sur une grille donnée."""
    return lambda grid: build_medium(grid, MediumSpec(kind="constant", c=1.0))


@pytest.fixture
def layer80():
    """Fabrique du profil zeta_bar = 80 sur une grille donnée."""
    return lambda grid: sample_profile(grid, zeta_bar=80.0)


def gaussian(grid, centre, width):
    """Bosse gaussienne sur les noeuds entiers de la grille."""
    mesh = grid.meshgrid()
    r2 = sum((x - x0) ** 2 for x, x0 in zip(mesh, centre))
    return np.exp(-r2 / width ** 2)
