"""
Profils d'amortissement de la couche absorbante.

Profil utilisé sur chaque axe (nul dans Ω, C² à l'interface) :

    zeta(x) = zeta_bar * (s - sin(2 pi s) / (2 pi)),   s = (|x| - a) / L

et relation avec le coefficient de réflexion relative R :

    zeta_bar = (c / L) * log(1 / R)
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.models import GridSpec

logger = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════════════════
# RELATION ZETA_BAR <-> R
# ═══════════════════════════════════════════════════════════════════════════════

def zeta_bar_from_reflection(c: float, L: float, R: float) -> float:
    if not c > 0:
        raise ValueError(f"c doit être > 0 (reçu {c})")
    if not L > 0:
        raise ValueError(f"L doit être > 0 (reçu {L})")
    if not 0 < R <= 1:
        raise ValueError(f"R doit être dans ]0, 1] (reçu {R})")
    return (c / L) * math.log(1.0 / R)


def reflection_from_zeta_bar(c: float, L: float, zeta_bar: float) -> float:
    """Inverse de `zeta_bar_from_reflection` : R = exp(-zeta_bar L / c)."""
    if not c > 0 or not L > 0:
        raise ValueError("c et L doivent être > 0")
    if zeta_bar < 0:
        raise ValueError(f"zeta_bar doit être >= 0 (reçu {zeta_bar})")
    return math.exp(-zeta_bar * L / c)


# ═══════════════════════════════════════════════════════════════════════════════
# ÉVALUATION DU PROFIL
# ═══════════════════════════════════════════════════════════════════════════════

def _shape(s: np.ndarray) -> np.ndarray:
    return s - np.sin(2.0 * np.pi * s) / (2.0 * np.pi)


def eval_zeta(x, a: float, L: float, zeta_bar: float):
    """
    Valeur du profil en x (scalaire ou tableau).

    Nul exactement pour |x| <= a ; vaut zeta_bar en |x| = a + L.
    """
    d = np.abs(np.asarray(x, dtype=float)) - a
    s = np.clip(d / L, 0.0, 1.0)
    value = np.where(d > 0, zeta_bar * _shape(s), 0.0)
    return float(value) if value.ndim == 0 else value


def _index_depth(positions: np.ndarray, n_layer: int, n_nodes: int) -> np.ndarray:
    """
    Profondeur relative s dans la couche, calculée sur les indices.

    Le calcul en indices (et non en coordonnées) donne des zéros exacts dans Ω
    et une symétrie exacte zeta(-x) = zeta(x).
    """
    last = n_nodes - 1
    depth = np.maximum(np.maximum(n_layer - positions, positions - (last - n_layer)), 0.0)
    return depth / n_layer


@dataclass(frozen=True)
class DampingProfile:
    """
    Profils zeta_i échantillonnés par axe.

    nodes[i] : valeurs aux noeuds entiers x_{i,l} (longueur M_i)
    half[i]  : valeurs aux noeuds demi-entiers x_{i,l+1/2} (une par cellule)
    """
    zeta_bar: Tuple[float, ...]
    nodes: Tuple[np.ndarray, ...]
    half: Tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return len(self.nodes)

    @property
    def is_zero(self) -> bool:
        return all(not np.any(z) for z in self.nodes + self.half)

    @classmethod
    def zero(cls, grid: GridSpec) -> "DampingProfile":
        return cls(
            zeta_bar=(0.0,) * grid.dim,
            nodes=tuple(np.zeros(m) for m in grid.shape),
            half=tuple(np.zeros(n) for n in grid.cell_shape),
        )

    @classmethod
    def constant(cls, grid: GridSpec, zeta0: float) -> "DampingProfile":
        """zeta_i = zeta0 partout (axes périodiques exceptés)."""
        if zeta0 < 0:
            raise ValueError(f"zeta0 doit être >= 0 (reçu {zeta0})")
        values = [0.0 if p else float(zeta0) for p in grid.periodic]
        return cls(
            zeta_bar=tuple(values),
            nodes=tuple(np.full(m, v) for m, v in zip(grid.shape, values)),
            half=tuple(np.full(n, v) for n, v in zip(grid.cell_shape, values)),
        )


def sample_profile(grid: GridSpec,
                   zeta_bar: Optional[Union[float, Sequence[float]]] = None,
                   reflection: Optional[float] = None,
                   c: float = 1.0) -> DampingProfile:
    """
    Échantillonne les profils aux noeuds entiers et demi-entiers.

    `zeta_bar` l'emporte sur `reflection` ; sans l'un ni l'autre le profil est nul.
    `c` est la vitesse vue par la couche (utilisée seulement pour convertir R).
    """
    if zeta_bar is None and reflection is None:
        return DampingProfile.zero(grid)

    if zeta_bar is not None:
        bars = [float(zeta_bar)] * grid.dim if np.isscalar(zeta_bar) else [float(z) for z in zeta_bar]
        if reflection is not None:
            derived = [reflection_from_zeta_bar(c, L, z) for L, z in zip(grid.layer_width, bars)]
            logger.info("zeta_bar fourni, R ignoré (R dérivé : %s)", ", ".join(f"{r:.3e}" for r in derived))
    else:
        bars = [zeta_bar_from_reflection(c, L, reflection) for L in grid.layer_width]

    if len(bars) != grid.dim:
        raise ValueError(f"zeta_bar : {len(bars)} valeur(s) pour dim={grid.dim}")
    if any(z < 0 for z in bars):
        raise ValueError(f"zeta_bar doit être >= 0 (reçu {bars})")

    nodes: List[np.ndarray] = []
    half: List[np.ndarray] = []
    for axis in range(grid.dim):
        m, n_layer = grid.shape[axis], grid.layer_nodes[axis]
        if grid.periodic[axis]:
            bars[axis] = 0.0
            nodes.append(np.zeros(m))
            half.append(np.zeros(grid.cell_shape[axis]))
            continue
        s_node = _index_depth(np.arange(m, dtype=float), n_layer, m)
        s_half = _index_depth(np.arange(grid.cell_shape[axis]) + 0.5, n_layer, m)
        nodes.append(bars[axis] * _shape(s_node))
        half.append(bars[axis] * _shape(s_half))

    return DampingProfile(zeta_bar=tuple(bars), nodes=tuple(nodes), half=tuple(half))


def profile_curve(a: float, L: float, zeta_bars: Sequence[float], n: int = 201) -> pd.DataFrame:
    """Table (x, zeta) sur [0, a+L], une colonne par valeur de zeta_bar."""
    if a < 0 or not L > 0:
        raise ValueError(f"a >= 0 et L > 0 attendus (reçu a={a}, L={L})")
    if n < 2:
        raise ValueError(f"au moins 2 points attendus (reçu n={n})")
    if any(zb < 0 for zb in zeta_bars):
        raise ValueError(f"zeta_bar doit être >= 0 (reçu {list(zeta_bars)})")
    x = np.linspace(0.0, a + L, n)
    table = {"x": x}
    for zb in zeta_bars:
        table[f"zeta_{zb:g}"] = eval_zeta(x, a, L, zb)
    return pd.DataFrame(table)
