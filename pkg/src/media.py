"""
Milieux de propagation, termes sources et données initiales des scénarios.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import ConfigError
from src.models import GridSpec, InitialCondition, MediumSpec, SourceTerm

logger = logging.getLogger(__name__)

SpeedFunction = Callable[..., np.ndarray]


# ═══════════════════════════════════════════════════════════════════════════════
# VITESSES
# ═══════════════════════════════════════════════════════════════════════════════

def layered_speed(x2, b: float = 0.95):
    """
    Vitesse dépendant de x2 seulement :
    0.5 sous -b, 1.5 au-dessus de b, raccord continu 1 + x2/(2b) + sin(pi x2/b)/(2 pi) entre les deux.
    """
    if not b > 0:
        raise ValueError(f"b doit être > 0 (reçu {b})")
    x2 = np.asarray(x2, dtype=float)
    middle = 1.0 + x2 / (2.0 * b) + np.sin(np.pi * x2 / b) / (2.0 * np.pi)
    value = np.where(x2 < -b, 0.5, np.where(x2 > b, 1.5, middle))
    return float(value) if value.ndim == 0 else value


def speed_function(spec: MediumSpec) -> SpeedFunction:
    """Fonction c(x1, x2[, x3]) vectorisée correspondant au sélecteur."""
    if spec.kind == "constant":
        if not spec.c > 0:
            raise ValueError(f"c doit être > 0 (reçu {spec.c})")
        return lambda *xs: np.full(np.broadcast(*xs).shape, float(spec.c))
    if spec.kind == "layered":
        return lambda *xs: np.broadcast_to(layered_speed(xs[1], spec.b), np.broadcast(*xs).shape)
    raise ConfigError([f"medium.kind inconnu : {spec.kind!r}"])


@dataclass(frozen=True)
class MediumModel:
    """
    c² échantillonné aux emplacements utilisés par les schémas.

    faces[i] : c² aux demi-noeuds de l'axe i (noeuds entiers sur les autres axes),
               entre les noeuds l et l+1 de l'axe i
    cells    : c² aux centres de cellules (mise à jour des champs auxiliaires)
    """
    faces: Tuple[np.ndarray, ...]
    cells: np.ndarray
    c_max: float


def _sample(grid: GridSpec, speed: SpeedFunction, half_axes: Sequence[int],
            box: Sequence[float]) -> np.ndarray:
    axes = []
    for axis in range(grid.dim):
        x = grid.half_coordinates(axis) if axis in half_axes else grid.coordinates(axis)
        axes.append(np.clip(x, -box[axis], box[axis]))
    mesh = np.meshgrid(*axes, indexing="ij", sparse=True)
    c = speed(*mesh)
    return np.broadcast_to(c * c, tuple(len(x) for x in axes))


def build_medium(grid: GridSpec, spec: MediumSpec,
                 clip_box: Optional[Sequence[float]] = None) -> MediumModel:
    """
    Échantillonne le milieu sur la grille.

    Les coordonnées sont ramenées dans la boîte `clip_box` (Ω par défaut) :
    la vitesse est prolongée constante dans la couche, le long de la normale.
    """
    box = tuple(clip_box) if clip_box is not None else grid.half_width
    speed = speed_function(spec)
    faces = tuple(_sample(grid, speed, (axis,), box) for axis in range(grid.dim))
    cells = _sample(grid, speed, tuple(range(grid.dim)), box)

    c2_max = max(float(np.max(f)) for f in faces + (cells,))
    c2_min = min(float(np.min(f)) for f in faces + (cells,))
    if not c2_min > 0:
        raise ValueError("vitesse nulle ou négative dans le milieu")
    logger.debug("Milieu %s : c dans [%.4f, %.4f]", spec.kind, np.sqrt(c2_min), np.sqrt(c2_max))
    return MediumModel(faces=faces, cells=cells, c_max=float(np.sqrt(c2_max)))


# ═══════════════════════════════════════════════════════════════════════════════
# SOURCE PONCTUELLE
# ═══════════════════════════════════════════════════════════════════════════════

def source_amplitude(t: float, f0: float) -> float:
    """h(t) = d/dt exp(-pi² (f0 t - 1)²) = -2 pi² f0 (f0 t - 1) exp(-pi² (f0 t - 1)²)."""
    arg = f0 * t - 1.0
    return float(-2.0 * np.pi ** 2 * f0 * arg * np.exp(-np.pi ** 2 * arg * arg))


def source_node(src: SourceTerm, grid: GridSpec) -> Tuple[int, ...]:
    """Noeud entier le plus proche de la position de la source (strictement dans Ω)."""
    if len(src.location) != grid.dim:
        raise ConfigError([f"source.location : {len(src.location)} coordonnée(s) pour dim={grid.dim}"])
    for axis, (x, a) in enumerate(zip(src.location, grid.half_width)):
        if not abs(x) < a:
            raise ConfigError([f"source.location hors de Ω sur l'axe {axis} : {x} (|x| < {a} requis)"])
    return tuple(grid.nearest_index(axis, x) for axis, x in enumerate(src.location))


def inject_point_source(force: np.ndarray, src: SourceTerm, grid: GridSpec, t_n: float) -> float:
    """
    Ajoute h(t_n)/Π dx_i au second membre, au noeud de la source.

    Renvoie la valeur ajoutée (0 si aucune source).
    """
    if src.kind == "none":
        return 0.0
    value = source_amplitude(t_n, src.f0) / grid.cell_volume
    if value != 0.0:
        force[source_node(src, grid)] += value
    return value


# ═══════════════════════════════════════════════════════════════════════════════
# DONNÉES INITIALES
# ═══════════════════════════════════════════════════════════════════════════════

def bump_initial(x1, x2):
    """(4(x1+0.4)(0.4-x1))³ sin(3 pi x2) sur ]-0.4, 0.4[ x ]-1, 1[, 0 ailleurs."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    inside = (np.abs(x1) < 0.4) & (np.abs(x2) < 1.0)
    value = np.where(inside, (4.0 * (x1 + 0.4) * (0.4 - x1)) ** 3 * np.sin(3.0 * np.pi * x2), 0.0)
    return float(value) if value.ndim == 0 else value


def initial_fields(grid: GridSpec, initial: InitialCondition) -> Tuple[np.ndarray, np.ndarray]:
    """(u0, v0) échantillonnés sur les noeuds entiers."""
    u0 = np.zeros(grid.shape)
    v0 = np.zeros(grid.shape)
    if initial.kind == "zero":
        return u0, v0
    if initial.kind == "bump2d":
        if grid.dim != 2:
            raise ConfigError(["initial.kind = 'bump2d' n'existe qu'en dimension 2"])
        x1, x2 = grid.meshgrid()
        return bump_initial(x1, x2), v0
    raise ConfigError([f"initial.kind inconnu : {initial.kind!r}"])
