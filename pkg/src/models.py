"""
Modèles de données partagés par tous les modules.

Convention d'indexation : tableaux en ordre ligne (C), axes dans l'ordre
(x1, x2[, x3]). Les champs auxiliaires vivent aux centres de cellules
(i+1/2, j+1/2[, k+1/2]) et sont stockés de façon compacte, uniquement dans
la couche absorbante (voir `src.stencils.LayerRegion`).
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import numpy as np


# ═══════════════════════════════════════════════════════════════════════════════
# GÉOMÉTRIE
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class GridSpec:
    """
    Domaine rectangulaire Ω = Π[-a_i, a_i] entouré d'une couche de largeur L_i.

    Les noeuds entiers sont x_{i,l} = x_{i,0} + l*dx_i avec x_{i,0} = -(a_i + L_i),
    l = 0..M_i-1. Construire via `src.grid.build_grid` qui valide les invariants.
    """
    dim: int
    half_width: Tuple[float, ...]
    layer_width: Tuple[float, ...]
    spacing: Tuple[float, ...]
    shape: Tuple[int, ...]
    layer_nodes: Tuple[int, ...]
    periodic: Tuple[bool, ...] = ()

    def __post_init__(self):
        if not self.periodic:
            object.__setattr__(self, "periodic", (False,) * self.dim)

    @property
    def interior_nodes(self) -> Tuple[int, ...]:
        """Nombre de noeuds avec |x_i| <= a_i, par axe."""
        return tuple(m - 2 * n for m, n in zip(self.shape, self.layer_nodes))

    @property
    def origin(self) -> Tuple[float, ...]:
        return tuple(-(a + L) for a, L in zip(self.half_width, self.layer_width))

    @property
    def cell_shape(self) -> Tuple[int, ...]:
        """Un noeud de moins par axe, sauf sur un axe périodique (cellule de bouclage)."""
        return tuple(m if p else m - 1 for m, p in zip(self.shape, self.periodic))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def coordinates(self, axis: int) -> np.ndarray:
        """Coordonnées des noeuds entiers le long d'un axe."""
        return self.origin[axis] + np.arange(self.shape[axis]) * self.spacing[axis]

    def half_coordinates(self, axis: int) -> np.ndarray:
        """Coordonnées des noeuds demi-entiers x_{i,l+1/2}."""
        n = self.cell_shape[axis]
        return self.origin[axis] + (np.arange(n) + 0.5) * self.spacing[axis]

    def nearest_index(self, axis: int, x: float) -> int:
        return int(round((x - self.origin[axis]) / self.spacing[axis]))

    def interior_slices(self) -> Tuple[slice, ...]:
        """Tranches des noeuds de Ω (|x_i| <= a_i)."""
        return tuple(slice(n, m - n) for m, n in zip(self.shape, self.layer_nodes))

    def update_slices(self) -> Tuple[slice, ...]:
        """Noeuds mis à jour : tout sauf la coquille de Dirichlet (axes non périodiques)."""
        return tuple(slice(None) if p else slice(1, m - 1)
                     for m, p in zip(self.shape, self.periodic))

    def meshgrid(self) -> Tuple[np.ndarray, ...]:
        return np.meshgrid(*(self.coordinates(a) for a in range(self.dim)), indexing="ij")


@dataclass
class FieldState:
    """
    État d'un pas de temps.

    u_curr, u_prev : u aux niveaux n et n-1 (noeuds entiers).
    phi : (dim, n_cellules_actives), niveau n, stockage compact de la couche.
    psi : 3D uniquement, niveau n-1/2, stockage compact (None en 2D).
    """
    u_curr: np.ndarray
    u_prev: np.ndarray
    phi: np.ndarray
    psi: Optional[np.ndarray] = None
    step: int = 0


# ═══════════════════════════════════════════════════════════════════════════════
# SÉLECTEURS DE SCÉNARIO
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class MediumSpec:
    """Choix du milieu : 'constant' (vitesse c) ou 'layered' (profil en x2, paramètre b)."""
    kind: str = "constant"
    c: float = 1.0
    b: float = 0.95


@dataclass(frozen=True)
class SourceTerm:
    """Source ponctuelle h(t) = d/dt exp(-pi^2 (f0 t - 1)^2), ou aucune source."""
    kind: str = "none"
    location: Tuple[float, ...] = ()
    f0: float = 10.0


@dataclass(frozen=True)
class InitialCondition:
    """Donnée initiale : 'zero' ou 'bump2d' (u0 du milieu hétérogène, v0 = 0)."""
    kind: str = "zero"


@dataclass(frozen=True)
class SimulationConfig:
    """Configuration complète et validée d'une simulation (voir `src.loader`)."""
    grid: GridSpec
    t_end: float
    dt: Optional[float] = None
    cfl_safety: float = 0.9
    zeta_bar: Optional[Tuple[float, ...]] = None
    reflection: Optional[float] = None
    medium: MediumSpec = field(default_factory=MediumSpec)
    source: SourceTerm = field(default_factory=SourceTerm)
    initial: InitialCondition = field(default_factory=InitialCondition)
    snapshots: Tuple[float, ...] = ()
    output_dir: Path = Path("results")
    name: str = "simulation"
