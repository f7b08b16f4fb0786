"""
Boucle d'avance en temps commune aux solveurs 2D et 3D.

Un pas n -> n+1 se fait en deux temps :

1. mise à jour saute-mouton sans amortissement sur tous les noeuds hors
   coquille de Dirichlet (noyau partagé avec le calcul de référence) ;
2. réécriture des seuls noeuds de la couche par le schéma amorti :

    (u+ - 2u + u-)/dt² + sigma (u+ - u-)/(2 dt) + pi2 u
        = div(c² grad u) + div phi + f - pi3 (psi^{n+1/2} + psi^{n-1/2})/2

   avec sigma = somme des zeta_a, pi2 = somme des zeta_a zeta_b (a<b),
   pi3 = zeta1 zeta2 zeta3 (nul en 2D).

Les champs auxiliaires sont avancés ensuite par les sous-classes
(`src.solver2d.Solver2D`, `src.solver3d.Solver3D`).
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.damping import DampingProfile, sample_profile
from src.exceptions import GridError, NumericalInstabilityError
from src.grid import cfl_timestep
from src.media import MediumModel, build_medium, inject_point_source, source_node
from src.models import FieldState, GridSpec, SimulationConfig, SourceTerm
from src.stencils import LayerRegion, laplacian

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    """Résultat d'une simulation : snapshots, état final, historique et résumé."""
    snapshots: Dict[float, np.ndarray]
    snapshot_steps: Dict[float, int]
    state: FieldState
    history: pd.DataFrame
    summary: Dict[str, float] = field(default_factory=dict)


def step_count(t_end: float, dt: float) -> int:
    """Nombre de pas pour atteindre t_end (le dernier pas peut le dépasser de moins de dt)."""
    if t_end <= 0:
        return 0
    return int(math.ceil(t_end / dt - 1e-9))


class WaveSimulation:
    """Base des solveurs : géométrie, coefficients de couche, démarrage et boucle."""

    dim: Optional[int] = None

    def __init__(self, grid: GridSpec, medium: MediumModel,
                 damping: Optional[DampingProfile] = None,
                 source: Optional[SourceTerm] = None,
                 dt: Optional[float] = None,
                 cfl_safety: float = 0.9):
        if self.dim is not None and grid.dim != self.dim:
            raise GridError(f"{type(self).__name__} attend une grille de dimension {self.dim} (reçu {grid.dim})")
        self.grid = grid
        self.medium = medium
        self.damping = damping if damping is not None else DampingProfile.zero(grid)
        self.source = source if source is not None else SourceTerm()
        if self.source.kind != "none":
            source_node(self.source, grid)

        limit = cfl_timestep(grid, medium.c_max, 1.0)
        if dt is None:
            dt = cfl_timestep(grid, medium.c_max, cfl_safety)
        elif not 0 < dt <= limit * (1 + 1e-12):
            raise ValueError(f"dt = {dt} viole la condition CFL (dt <= {limit:.6g})")
        self.dt = float(dt)

        self.region = LayerRegion(grid, self.damping)
        cell_index = np.unravel_index(self.region.cell_ids, grid.cell_shape)
        self.c2_cells = np.asarray(medium.cells)[cell_index]
        self.sigma = self.region.node_sigma()
        self.pi2 = self.region.node_pair_products()
        self.pi3 = self.region.node_triple_product()

    @classmethod
    def from_config(cls, config: SimulationConfig) -> "WaveSimulation":
        """Milieu et profils échantillonnés à partir d'une configuration validée."""
        grid = config.grid
        medium = build_medium(grid, config.medium)
        damping = sample_profile(grid, config.zeta_bar, config.reflection, c=medium.c_max)
        return cls(grid, medium, damping, config.source, dt=config.dt, cfl_safety=config.cfl_safety)

    # ─── état initial ────────────────────────────────────────────────────────

    def _zero_shell(self, field_: np.ndarray) -> None:
        for axis in range(self.grid.dim):
            if self.grid.periodic[axis]:
                continue
            index = [slice(None)] * self.grid.dim
            for edge in (0, -1):
                index[axis] = edge
                field_[tuple(index)] = 0.0

    def initial_state(self, u0: Optional[np.ndarray] = None,
                      v0: Optional[np.ndarray] = None) -> FieldState:
        """
        Démarrage de Taylor à l'ordre deux :
        u^-1 = u0 - dt v0 + dt²/2 (div(c² grad u0) + f0 - sigma v0 - pi2 u0), phi0 = 0, psi^-1/2 = 0.
        """
        grid, dt = self.grid, self.dt
        u0 = np.zeros(grid.shape) if u0 is None else np.array(u0, dtype=float, order="C")
        v0 = np.zeros(grid.shape) if v0 is None else np.array(v0, dtype=float, order="C")
        if u0.shape != grid.shape or v0.shape != grid.shape:
            raise GridError(f"données initiales de forme {u0.shape}/{v0.shape}, attendu {grid.shape}")
        self._zero_shell(u0)
        self._zero_shell(v0)

        accel = laplacian(u0, self.medium.faces, grid)
        inject_point_source(accel, self.source, grid, 0.0)
        u_prev = u0 - dt * v0 + 0.5 * dt * dt * accel
        if not self.region.is_empty:
            ids = self.region.update_nodes
            local = self.region.update_local
            damping_term = self.sigma[local] * np.take(v0, ids) + self.pi2[local] * np.take(u0, ids)
            np.put(u_prev, ids, np.take(u_prev, ids) - 0.5 * dt * dt * damping_term)
        self._zero_shell(u_prev)

        psi = np.zeros(self.region.n_psi) if grid.dim == 3 else None
        return FieldState(u_curr=u0, u_prev=u_prev, phi=np.zeros((grid.dim, self.region.n_cells)), psi=psi)

    # ─── noyaux ──────────────────────────────────────────────────────────────

    def update_u(self, state: FieldState, psi_avg: Optional[np.ndarray] = None) -> np.ndarray:
        """u^{n+1} : saute-mouton partout, puis schéma amorti sur les noeuds de couche."""
        grid, dt = self.grid, self.dt
        dt2 = dt * dt
        u, u_prev = state.u_curr, state.u_prev

        lap = laplacian(u, self.medium.faces, grid)
        inject_point_source(lap, self.source, grid, state.step * dt)

        u_next = np.zeros_like(u)
        inner = grid.update_slices()
        u_next[inner] = 2.0 * u[inner] - u_prev[inner] + dt2 * lap[inner]

        region = self.region
        if region.is_empty:
            return u_next

        local = region.update_local
        ids = region.update_nodes
        rhs = np.take(lap, ids) + region.divergence(state.phi)[local] - self.pi2[local] * np.take(u, ids)
        if psi_avg is not None:
            rhs -= self.pi3[local] * psi_avg[local]
        half_sigma = 0.5 * dt * self.sigma[local]
        values = (2.0 * np.take(u, ids) - (1.0 - half_sigma) * np.take(u_prev, ids) + dt2 * rhs) / (1.0 + half_sigma)
        np.put(u_next, ids, values)
        return u_next

    def update_phi(self, state: FieldState, u_next: np.ndarray,
                   gamma1: np.ndarray, gamma2: np.ndarray,
                   gamma3: Optional[np.ndarray] = None,
                   psi_half: Optional[np.ndarray] = None) -> np.ndarray:
        """
        phi^{n+1} par la règle du trapèze sur le terme Gamma1 phi :

        (phi+ - phi)/dt = Gamma1 (phi+ + phi)/2 + c² Gamma2 G u^{n+1/2} + c² Gamma3 G psi^{n+1/2}
        """
        region = self.region
        if region.is_empty:
            return state.phi
        inv_dt = 1.0 / self.dt
        grad_u = 0.5 * (region.gradient(region.gather(u_next)) + region.gradient(region.gather(state.u_curr)))
        drive = gamma2 * grad_u
        if gamma3 is not None and psi_half is not None:
            drive += gamma3 * region.gradient(region.expand_psi(psi_half))
        return ((inv_dt + 0.5 * gamma1) * state.phi + self.c2_cells * drive) / (inv_dt - 0.5 * gamma1)

    def step(self, state: FieldState) -> FieldState:
        raise NotImplementedError

    # ─── boucle ──────────────────────────────────────────────────────────────

    def _check_finite(self, u_next: np.ndarray, step: int) -> float:
        peak = float(np.max(np.abs(u_next)))
        if not np.isfinite(peak):
            location = tuple(int(i) for i in np.argwhere(~np.isfinite(u_next))[0])
            logger.error("Valeur non finie au pas %d, noeud %s", step, location)
            raise NumericalInstabilityError(step, location)
        return peak

    def run(self, t_end: float,
            snapshot_times: Sequence[float] = (),
            u0: Optional[np.ndarray] = None,
            v0: Optional[np.ndarray] = None,
            snapshot_region: Optional[Tuple[slice, ...]] = None) -> RunResult:
        """
        Avance de t = 0 à t_end (premier multiple de dt atteignant t_end).

        Les snapshots sont pris au pas le plus proche de chaque instant demandé ;
        `snapshot_region` restreint les copies conservées (Ω par exemple).
        """
        grid, dt = self.grid, self.dt
        n_steps = step_count(t_end, dt)
        region = snapshot_region if snapshot_region is not None else tuple(slice(None) for _ in range(grid.dim))
        omega = grid.interior_slices()

        wanted: Dict[int, List[float]] = {}
        steps_of: Dict[float, int] = {}
        for t in snapshot_times:
            s = min(int(round(t / dt)), n_steps)
            wanted.setdefault(s, []).append(float(t))
            steps_of[float(t)] = s

        state = self.initial_state(u0, v0)
        snapshots: Dict[float, np.ndarray] = {}
        rows = []

        def record(st: FieldState, peak: float) -> None:
            rows.append((st.step, st.step * dt, peak, float(np.max(np.abs(st.u_curr[omega])))))
            for t in wanted.get(st.step, ()):
                snapshots[t] = st.u_curr[region].copy()

        record(state, float(np.max(np.abs(state.u_curr))))
        report_every = max(1, n_steps // 10)
        started = time.perf_counter()
        logger.info("Simulation %dD %s : %d pas, dt = %.4g", grid.dim, grid.shape, n_steps, dt)

        for _ in range(n_steps):
            state = self.step(state)
            record(state, self._check_finite(state.u_curr, state.step))
            if state.step % report_every == 0:
                logger.info("  pas %d/%d (t = %.3f), max|u| = %.3e", state.step, n_steps, state.step * dt, rows[-1][2])

        elapsed = time.perf_counter() - started
        history = pd.DataFrame(rows, columns=["step", "t", "max_u", "max_u_omega"])
        summary = {
            "dim": grid.dim,
            "dt": dt,
            "steps": n_steps,
            "t_final": n_steps * dt,
            "max_u": float(history["max_u"].max()),
            "max_u_omega": float(history["max_u_omega"].max()),
            "elapsed_s": elapsed,
        }
        summary.update({f"aux_{k}": v for k, v in self.region.storage_report().items()})
        return RunResult(snapshots=snapshots, snapshot_steps=steps_of, state=state, history=history, summary=summary)
