"""
Construction et validation de la grille uniforme (domaine Ω + couche absorbante).
"""

import logging
import math
from typing import Optional, Sequence, Tuple, Union

from src.exceptions import GridError
from src.models import GridSpec

logger = logging.getLogger(__name__)

Number = Union[int, float]

_REL_TOL = 1e-12


def _broadcast(values: Union[Number, Sequence[Number]], dim: int, name: str) -> Tuple[float, ...]:
    if isinstance(values, (int, float)):
        return (float(values),) * dim
    values = tuple(float(v) for v in values)
    if len(values) != dim:
        raise GridError(f"{name} : {len(values)} valeur(s) pour dim={dim}")
    return values


def _as_integer(ratio: float, what: str, axis: int) -> int:
    n = round(ratio)
    if n <= 0 or abs(ratio - n) > _REL_TOL * max(1.0, abs(ratio)):
        raise GridError(f"axe {axis} : {what} = {ratio!r} n'est pas un entier", axis=axis)
    return int(n)


def build_grid(dim: int,
               a: Union[Number, Sequence[Number]],
               L: Union[Number, Sequence[Number]],
               dx: Union[Number, Sequence[Number]],
               periodic: Optional[Sequence[bool]] = None) -> GridSpec:
    """
    Construit la GridSpec du domaine Π[-a_i, a_i] entouré d'une couche L_i.

    Les scalaires sont diffusés sur tous les axes. La frontière de la couche
    et le bord extérieur doivent tomber sur des noeuds de la grille.
    """
    if dim not in (2, 3):
        raise GridError(f"dim doit valoir 2 ou 3 (reçu {dim})")

    a = _broadcast(a, dim, "half_width")
    L = _broadcast(L, dim, "layer_width")
    dx = _broadcast(dx, dim, "spacing")
    periodic = tuple(bool(p) for p in periodic) if periodic is not None else (False,) * dim
    if len(periodic) != dim:
        raise GridError(f"periodic : {len(periodic)} valeur(s) pour dim={dim}")

    shape, layer_nodes = [], []
    for axis in range(dim):
        for name, value in (("half_width", a[axis]), ("layer_width", L[axis]), ("spacing", dx[axis])):
            if not value > 0:
                raise GridError(f"axe {axis} : {name} doit être > 0 (reçu {value})", axis=axis)
        n_layer = _as_integer(L[axis] / dx[axis], "L/dx", axis)
        n_cells = _as_integer(2.0 * (a[axis] + L[axis]) / dx[axis], "2(a+L)/dx", axis)
        shape.append(n_cells + 1)
        layer_nodes.append(n_layer)

    grid = GridSpec(
        dim=dim,
        half_width=a,
        layer_width=L,
        spacing=dx,
        shape=tuple(shape),
        layer_nodes=tuple(layer_nodes),
        periodic=periodic,
    )
    logger.debug("Grille %s construite (couche %s noeuds)", grid.shape, grid.layer_nodes)
    return grid


def cfl_timestep(grid: GridSpec, c_max: float, safety: float = 0.9) -> float:
    """dt = safety * min(dx_i) / (c_max * sqrt(dim))."""
    if not c_max > 0:
        raise ValueError(f"c_max doit être > 0 (reçu {c_max})")
    if not 0 < safety <= 1:
        raise ValueError(f"le facteur de sécurité doit être dans ]0, 1] (reçu {safety})")
    return safety * min(grid.spacing) / (c_max * math.sqrt(grid.dim))

