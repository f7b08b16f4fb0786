"""
Solutions de référence, courbes d'erreur, études de convergence et balayages.

La référence est une simulation sans couche absorbante (zeta = 0, Dirichlet
au loin) sur un domaine élargi, avec le même dx et le même dt, restreinte
aux noeuds de Ω. Tant que le bord élargi ne peut influencer Ω avant t_end,
l'écart entre la simulation avec couche et la référence mesure la seule
réflexion parasite de la couche.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.damping import DampingProfile
from src.exceptions import CausalityError, NonNestedLevelsError
from src.grid import build_grid, cfl_timestep
from src.media import build_medium, initial_fields
from src.models import GridSpec, MediumSpec, SimulationConfig
from src.simulation import RunResult
from src.solver2d import Solver2D
from src.solver3d import Solver3D
from src.utils import thread_cap

logger = logging.getLogger(__name__)

Snapshots = Dict[float, np.ndarray]

SOLVERS = {2: Solver2D, 3: Solver3D}


# ═══════════════════════════════════════════════════════════════════════════════
# SÉRIES D'ERREUR
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ErrorSeries:
    times: np.ndarray
    l2_error: np.ndarray
    normalization: float

    def __post_init__(self):
        if len(self.times) != len(self.l2_error):
            raise ValueError("times et l2_error doivent avoir la même longueur")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("les instants doivent être strictement croissants")
        if np.any(self.l2_error < 0):
            raise ValueError("erreur négative")

    @property
    def relative(self) -> np.ndarray:
        if self.normalization > 0:
            return self.l2_error / self.normalization
        return np.zeros_like(self.l2_error)

    def at(self, t: float) -> float:
        """Erreur absolue à l'instant échantillonné le plus proche de t."""
        return float(self.l2_error[int(np.argmin(np.abs(self.times - t)))])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times, "e_L2": self.l2_error, "e_rel": self.relative})


def trapezoid_weights(shape: Tuple[int, ...], spacing: Sequence[float]) -> np.ndarray:
    """Poids de quadrature des trapèzes (demi-poids au bord) : leur somme vaut le volume."""
    weights = np.ones(shape)
    for axis, (m, dx) in enumerate(zip(shape, spacing)):
        w = np.full(m, dx)
        if m > 1:
            w[0] = w[-1] = 0.5 * dx
        view = [1] * len(shape)
        view[axis] = m
        weights = weights * w.reshape(view)
    return weights


def l2_norm(field: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sqrt(np.sum(field * field * weights)))


def l2_error_series(run: Snapshots, reference: Snapshots, spacing: Sequence[float]) -> ErrorSeries:
    """
    e(t) = sqrt( somme_Ω (u - u_ref)² w ), w poids des trapèzes.

    La normalisation est le maximum en temps de la norme de la référence.
    """
    if set(run) != set(reference):
        raise ValueError("les instants de la simulation et de la référence diffèrent")
    times = sorted(run)
    errors, norms = [], []
    weights = None
    for t in times:
        u, ref = run[t], reference[t]
        if u.shape != ref.shape:
            raise ValueError(f"formes incompatibles à t={t} : {u.shape} / {ref.shape}")
        if weights is None:
            weights = trapezoid_weights(u.shape, spacing)
        errors.append(l2_norm(u - ref, weights))
        norms.append(l2_norm(ref, weights))
    return ErrorSeries(
        times=np.array(times, dtype=float),
        l2_error=np.array(errors),
        normalization=max(norms) if norms else 0.0,
    )


# ═══════════════════════════════════════════════════════════════════════════════
# RÉFÉRENCE
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass
class ReferenceSolution:
    grid: GridSpec
    half_width: Tuple[float, ...]
    snapshots: Snapshots
    result: RunResult


def required_half_width(config: SimulationConfig, c_max: float) -> float:
    """Demi-largeur minimale du domaine élargi : a + c_max t_end."""
    return max(config.grid.half_width) + c_max * config.t_end


def reference_grid(config: SimulationConfig, half_width: Sequence[float]) -> Tuple[GridSpec, Tuple[slice, ...]]:
    """Grille élargie (bord en ±A, même dx) et tranches des noeuds de Ω dans cette grille."""
    grid = config.grid
    big = build_grid(grid.dim,
                     [A - L for A, L in zip(half_width, grid.layer_width)],
                     grid.layer_width, grid.spacing)
    omega = []
    for axis in range(grid.dim):
        offset = big.nearest_index(axis, -grid.half_width[axis])
        omega.append(slice(offset, offset + grid.interior_nodes[axis]))
    return big, tuple(omega)


def _embed(field: np.ndarray, small: GridSpec, big: GridSpec) -> np.ndarray:
    out = np.zeros(big.shape)
    index = tuple(slice(big.nearest_index(a, small.origin[a]), big.nearest_index(a, small.origin[a]) + small.shape[a])
                  for a in range(small.dim))
    out[index] = field
    return out


def reference_run(config: SimulationConfig,
                  enlargement_factor: float = 11.0,
                  half_width: Optional[Sequence[float]] = None,
                  dt: Optional[float] = None,
                  snapshot_times: Optional[Sequence[float]] = None) -> ReferenceSolution:
    """
    Simulation sans couche sur [-A, A]^d, A = enlargement_factor * a (ou `half_width`).

    Le milieu est échantillonné avec les coordonnées ramenées dans Ω, comme dans
    la simulation avec couche. Rejette un domaine trop petit (CausalityError).
    """
    grid = config.grid
    A = tuple(half_width) if half_width is not None else tuple(enlargement_factor * a for a in grid.half_width)

    medium_small = build_medium(grid, config.medium)
    needed = required_half_width(config, medium_small.c_max)
    shortest = min(Ai - ai for Ai, ai in zip(A, grid.half_width))
    if shortest / medium_small.c_max < config.t_end:
        raise CausalityError(
            f"domaine de référence trop petit : A = {min(A):g}, il faut A >= {needed:g} "
            f"pour t_end = {config.t_end:g}",
            required_half_width=needed,
        )

    big, omega = reference_grid(config, A)
    medium = build_medium(big, config.medium, clip_box=grid.half_width)
    if dt is None:
        dt = cfl_timestep(grid, medium_small.c_max, config.cfl_safety) if config.dt is None else config.dt
    solver = SOLVERS[grid.dim](big, medium, DampingProfile.zero(big), config.source, dt=dt)

    u0, v0 = initial_fields(grid, config.initial)
    times = config.snapshots if snapshot_times is None else snapshot_times
    logger.info("Référence sur [-%g, %g]^%d : grille %s", min(A), min(A), grid.dim, big.shape)
    result = solver.run(config.t_end, times, _embed(u0, grid, big), _embed(v0, grid, big), snapshot_region=omega)
    return ReferenceSolution(grid=big, half_width=A, snapshots=result.snapshots, result=result)


def pml_run(config: SimulationConfig, snapshot_times: Sequence[float]) -> RunResult:
    """Simulation avec couche, snapshots restreints à Ω."""
    solver = SOLVERS[config.grid.dim].from_config(config)
    u0, v0 = initial_fields(config.grid, config.initial)
    return solver.run(config.t_end, snapshot_times, u0, v0, snapshot_region=config.grid.interior_slices())


def sample_times(t_end: float, n: int) -> List[float]:
    """n+1 instants régulièrement espacés sur [0, t_end]."""
    return [float(t) for t in np.linspace(0.0, t_end, n + 1)]


def compare_with_reference(config: SimulationConfig,
                           times: Sequence[float],
                           enlargement_factor: float = 11.0,
                           half_width: Optional[Sequence[float]] = None) -> Tuple[ErrorSeries, RunResult, ReferenceSolution]:
    """Simulation avec couche et référence (en parallèle), puis série d'erreur sur Ω."""
    with ThreadPoolExecutor(max_workers=min(2, thread_cap())) as pool:
        run_future = pool.submit(pml_run, config, times)
        ref_future = pool.submit(reference_run, config, enlargement_factor, half_width, None, times)
        run, ref = run_future.result(), ref_future.result()
    series = l2_error_series(run.snapshots, ref.snapshots, config.grid.spacing)
    return series, run, ref


def reflection_sweep(config: SimulationConfig,
                     zeta_bars: Sequence[float],
                     times: Sequence[float],
                     enlargement_factor: float = 11.0,
                     half_width: Optional[Sequence[float]] = None) -> Dict[float, ErrorSeries]:
    """Une série d'erreur par valeur de zeta_bar ; la référence est calculée une seule fois."""
    reference = reference_run(config, enlargement_factor, half_width, snapshot_times=times)
    dim = config.grid.dim

    def one(zb: float) -> Tuple[float, ErrorSeries]:
        cfg = replace(config, zeta_bar=(float(zb),) * dim, reflection=None)
        run = pml_run(cfg, times)
        return float(zb), l2_error_series(run.snapshots, reference.snapshots, config.grid.spacing)

    workers = thread_cap()
    logger.info("Balayage de %d valeurs de zeta_bar (%d fil(s))", len(zeta_bars), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return dict(pool.map(one, zeta_bars))


# ═══════════════════════════════════════════════════════════════════════════════
# CONVERGENCE
# ═══════════════════════════════════════════════════════════════════════════════

SCENARIOS = {"standing2d": 2, "standing3d": 3, "zero": 2}


@dataclass
class ConvergenceReport:
    scenario: str
    table: pd.DataFrame

    @property
    def orders(self) -> List[float]:
        return [float(p) for p in self.table["order"].iloc[1:]]

    @property
    def exact(self) -> bool:
        return bool((self.table["error"] == 0).all())


def _check_levels(levels: Sequence[int]) -> None:
    if len(levels) < 3:
        raise NonNestedLevelsError(f"au moins 3 niveaux requis (reçu {len(levels)})")
    for coarse, fine in zip(levels, levels[1:]):
        if fine != 2 * coarse:
            raise NonNestedLevelsError(f"niveaux non emboîtés : {coarse} -> {fine} (dx doit être divisé par 2)")


def standing_mode_error(dim: int, n: int, t_end: float = 0.5, amplitude: float = 1.0,
                        safety: float = 0.5) -> Tuple[float, float, float]:
    """
    Erreur L2 du mode propre prod cos(pi x_i) sur [-0.5, 0.5]^dim (zeta = 0, c = 1),
    solution exacte cos(sqrt(dim) pi t) prod cos(pi x_i). Renvoie (erreur, dt, t).
    """
    dx = 1.0 / n
    grid = build_grid(dim, 0.5 - dx, dx, dx)
    medium = build_medium(grid, MediumSpec(kind="constant", c=1.0))
    solver = SOLVERS[dim](grid, medium, DampingProfile.zero(grid), dt=cfl_timestep(grid, 1.0, safety))
    mode = amplitude * np.prod(np.array([np.cos(np.pi * x) for x in grid.meshgrid()]), axis=0)
    result = solver.run(t_end, (), mode, np.zeros(grid.shape))
    t = result.summary["t_final"]
    exact = math.cos(math.sqrt(dim) * math.pi * t) * mode
    error = l2_norm(result.state.u_curr - exact, trapezoid_weights(grid.shape, grid.spacing))
    return error, solver.dt, t


def convergence_study(scenario: str, levels: Sequence[int], t_end: float = 0.5) -> ConvergenceReport:
    """
    Erreurs contre la solution analytique pour dx = 1/N, N dans `levels`,
    et ordre observé p = log2(e_h / e_{h/2}).
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"scénario inconnu : {scenario!r} (choix : {', '.join(SCENARIOS)})")
    _check_levels(levels)
    dim = SCENARIOS[scenario]
    amplitude = 0.0 if scenario == "zero" else 1.0

    rows = []
    for n in levels:
        error, dt, t = standing_mode_error(dim, n, t_end, amplitude)
        order = float("nan")
        if rows and rows[-1]["error"] > 0 and error > 0:
            order = math.log2(rows[-1]["error"] / error)
        rows.append({"N": n, "dx": 1.0 / n, "dt": dt, "t": t, "error": error, "order": order})
        logger.info("Niveau N=%d : erreur = %.3e", n, error)
    return ConvergenceReport(scenario=scenario, table=pd.DataFrame(rows))
