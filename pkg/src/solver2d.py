"""
Solveur 2D : équation des ondes avec couche absorbante à deux champs auxiliaires.

    u_tt + (zeta1 + zeta2) u_t + zeta1 zeta2 u = div(c² grad u) + div phi + f
    phi_t = Gamma1 phi + c² Gamma2 grad u

    Gamma1 = diag(-zeta1, -zeta2),  Gamma2 = diag(zeta2 - zeta1, zeta1 - zeta2)

phi = (phi1, phi2) vit aux centres de cellules (i+1/2, j+1/2).
Ordre dans un pas : u^{n+1} (utilise phi^n) puis phi^{n+1}.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.media import initial_fields
from src.models import FieldState, SimulationConfig
from src.simulation import RunResult, WaveSimulation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Gamma2D:
    """Diagonales de Gamma1 et Gamma2 par cellule active, formes (2, n_cells)."""
    gamma1: np.ndarray
    gamma2: np.ndarray

    @classmethod
    def from_zeta(cls, zeta: np.ndarray) -> "Gamma2D":
        z1, z2 = zeta
        return cls(gamma1=-zeta.copy(), gamma2=np.array([z2 - z1, z1 - z2]).reshape(2, -1))


def step_u_2d(state: FieldState, solver: "Solver2D") -> np.ndarray:
    """u^{n+1} ; résout l'équation scalaire issue du terme amorti centré."""
    return solver.update_u(state)


def step_phi_2d(state: FieldState, u_next: np.ndarray, solver: "Solver2D") -> np.ndarray:
    """phi^{n+1} à partir de phi^n, u^n et u^{n+1} (u doit déjà être avancé)."""
    gamma = solver.gamma
    return solver.update_phi(state, u_next, gamma.gamma1, gamma.gamma2)


class Solver2D(WaveSimulation):
    dim = 2

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.gamma = Gamma2D.from_zeta(self.region.zeta_cells)
        logger.debug("Solveur 2D : %d cellules phi, dt = %.4g", self.region.n_cells, self.dt)

    def step(self, state: FieldState) -> FieldState:
        u_next = step_u_2d(state, self)
        phi_next = step_phi_2d(state, u_next, self)
        return FieldState(u_curr=u_next, u_prev=state.u_curr, phi=phi_next, psi=None, step=state.step + 1)


def run2d(config: SimulationConfig, solver: Optional[Solver2D] = None) -> RunResult:
    """Exécute une configuration 2D de t = 0 à t_end."""
    solver = solver or Solver2D.from_config(config)
    u0, v0 = initial_fields(config.grid, config.initial)
    return solver.run(config.t_end, config.snapshots, u0, v0)
