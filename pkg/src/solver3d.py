"""
Solveur 3D : quatre champs auxiliaires (phi1, phi2, phi3, psi).

    u_tt + (z1+z2+z3) u_t + (z1 z2 + z2 z3 + z3 z1) u + z1 z2 z3 psi
        = div(c² grad u) + div phi + f
    phi_t = Gamma1 phi + c² Gamma2 grad u + c² Gamma3 grad psi
    psi_t = u

    Gamma1 = diag(-z1, -z2, -z3)
    Gamma2 = diag(z2+z3-z1, z3+z1-z2, z1+z2-z3)
    Gamma3 = diag(z2 z3, z3 z1, z1 z2)

Ordre dans un pas : psi^{n+1/2}, puis u^{n+1}, puis phi^{n+1}.
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
class Gamma3D:
    """Diagonales de Gamma1, Gamma2, Gamma3 par cellule active, formes (3, n_cells)."""
    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: np.ndarray

    @classmethod
    def from_zeta(cls, zeta: np.ndarray) -> "Gamma3D":
        z1, z2, z3 = zeta
        return cls(
            gamma1=-zeta.copy(),
            gamma2=np.array([z2 + z3 - z1, z3 + z1 - z2, z1 + z2 - z3]).reshape(3, -1),
            gamma3=np.array([z2 * z3, z3 * z1, z1 * z2]).reshape(3, -1),
        )


def step_psi(state: FieldState, solver: "Solver3D") -> np.ndarray:
    """psi^{n+1/2} = psi^{n-1/2} + dt u^n (règle du point milieu), sur les noeuds compacts de psi."""
    return state.psi + solver.dt * np.take(state.u_curr, solver.psi_nodes)


def step_u_3d(state: FieldState, psi_half: np.ndarray, solver: "Solver3D") -> np.ndarray:
    """u^{n+1} ; le terme en psi est la moyenne (psi^{n+1/2} + psi^{n-1/2})/2."""
    region = solver.region
    psi_avg = region.expand_psi(0.5 * (psi_half + state.psi))
    return solver.update_u(state, psi_avg)


def step_phi_3d(state: FieldState, u_next: np.ndarray, psi_half: np.ndarray,
                solver: "Solver3D") -> np.ndarray:
    """phi^{n+1} à partir de u^n, u^{n+1} et psi^{n+1/2}."""
    gamma = solver.gamma
    return solver.update_phi(state, u_next, gamma.gamma1, gamma.gamma2, gamma.gamma3, psi_half)


class Solver3D(WaveSimulation):
    dim = 3

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.gamma = Gamma3D.from_zeta(self.region.zeta_cells)
        self.psi_nodes = self.region.touched[self.region.psi_local]
        logger.debug("Solveur 3D : %d cellules phi, %d noeuds psi, dt = %.4g",
                     self.region.n_cells, self.region.n_psi, self.dt)

    def step(self, state: FieldState) -> FieldState:
        psi_half = step_psi(state, self)
        u_next = step_u_3d(state, psi_half, self)
        phi_next = step_phi_3d(state, u_next, psi_half, self)
        return FieldState(u_curr=u_next, u_prev=state.u_curr, phi=phi_next, psi=psi_half, step=state.step + 1)


def run3d(config: SimulationConfig, solver: Optional[Solver3D] = None) -> RunResult:
    """Exécute une configuration 3D de t = 0 à t_end."""
    solver = solver or Solver3D.from_config(config)
    u0, v0 = initial_fields(config.grid, config.initial)
    return solver.run(config.t_end, config.snapshots, u0, v0)
