"""
Noyaux de différences finies partagés par les solveurs 2D/3D et par le calcul
de référence.

- `laplacian` : opérateur à coefficients variables, c² aux demi-noeuds,
  forme c²₊u₊ - (c²₊ + c²₋)u + c²₋u₋ sur chaque axe.
- `LayerRegion` : géométrie compacte de la couche absorbante. Les champs
  auxiliaires ne sont stockés que sur les cellules où un zeta_i est non nul ;
  les noeuds « touchés » sont les coins de ces cellules.

Gradient aux centres de cellules (moyennes de cellule) :

    G_a u = somme sur les 2^(d-1) arêtes de la cellule parallèles à l'axe a
            de (u_haut - u_bas), divisée par 2^(d-1) dx_a

Divergence aux noeuds : adjoint de G au signe près (chaque cellule adjacente
contribue +phi_a si le noeud est son coin bas sur l'axe a, -phi_a sinon).
"""

import itertools
import logging
from typing import Dict, List, Tuple

import numpy as np

from src.damping import DampingProfile
from src.models import GridSpec

logger = logging.getLogger(__name__)


def _along(dim: int, axis: int, sl: slice) -> Tuple[slice, ...]:
    index = [slice(None)] * dim
    index[axis] = sl
    return tuple(index)


def laplacian(u: np.ndarray, faces: Tuple[np.ndarray, ...], grid: GridSpec) -> np.ndarray:
    """
    div(c² grad u) aux noeuds entiers.

    Seules les valeurs hors coquille de Dirichlet sont significatives ;
    un axe périodique boucle (le noeud M-1 voisine le noeud 0).
    """
    dim = grid.dim
    out = np.zeros_like(u)
    for axis in range(dim):
        inv = 1.0 / grid.spacing[axis] ** 2
        f = faces[axis]
        if grid.periodic[axis]:
            fp = f
            fm = np.roll(f, 1, axis=axis)
            out += (fp * np.roll(u, -1, axis=axis) - (fp + fm) * u + fm * np.roll(u, 1, axis=axis)) * inv
            continue
        centre = _along(dim, axis, slice(1, -1))
        fp = f[_along(dim, axis, slice(1, None))]
        fm = f[_along(dim, axis, slice(None, -1))]
        up = u[_along(dim, axis, slice(2, None))]
        um = u[_along(dim, axis, slice(None, -2))]
        out[centre] += (fp * up - (fp + fm) * u[centre] + fm * um) * inv
    return out


class LayerRegion:
    """
    Stockage compact de la couche absorbante.

    Attributs principaux :
        cell_ids      indices plats (ordre C, forme grid.cell_shape) des cellules actives
        zeta_cells    (dim, n_cells) zeta_a au centre de chaque cellule
        corners       (2^dim, n_cells) indices plats des noeuds coins
        touched       indices plats triés des noeuds coins (mis à jour par le schéma amorti)
        zeta_nodes    (dim, n_touched) zeta_a aux noeuds touchés
        update_local  positions dans `touched` des noeuds hors coquille de Dirichlet
        psi_local     positions dans `touched` des noeuds portant psi (3D)
    """

    def __init__(self, grid: GridSpec, damping: DampingProfile):
        self.grid = grid
        dim = grid.dim
        self.dim = dim

        half = [damping.half[a] for a in range(dim)]
        mask = np.zeros(grid.cell_shape, dtype=bool)
        for axis in range(dim):
            shape = [1] * dim
            shape[axis] = -1
            mask |= (half[axis] > 0).reshape(shape)

        self.cell_ids = np.flatnonzero(mask)
        cell_index = np.unravel_index(self.cell_ids, grid.cell_shape)
        self.zeta_cells = np.array([half[a][cell_index[a]] for a in range(dim)]).reshape(dim, -1)

        self.offsets: List[Tuple[int, ...]] = list(itertools.product((0, 1), repeat=dim))
        corners = np.empty((len(self.offsets), self.cell_ids.size), dtype=np.intp)
        for k, offset in enumerate(self.offsets):
            node_index = tuple((cell_index[a] + offset[a]) % grid.shape[a] for a in range(dim))
            corners[k] = np.ravel_multi_index(node_index, grid.shape)
        self.corners = corners

        self.touched = np.unique(corners)
        self.corner_local = np.searchsorted(self.touched, corners)
        node_index = np.unravel_index(self.touched, grid.shape)
        self.zeta_nodes = np.array([damping.nodes[a][node_index[a]] for a in range(dim)]).reshape(dim, -1)

        on_shell = np.zeros(self.touched.size, dtype=bool)
        for axis in range(dim):
            if not grid.periodic[axis]:
                on_shell |= (node_index[axis] == 0) | (node_index[axis] == grid.shape[axis] - 1)
        self.update_local = np.flatnonzero(~on_shell)
        self.update_nodes = self.touched[self.update_local]

        # paires (haut, bas) de coins le long de chaque axe
        self._pairs: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        for axis in range(dim):
            upper = [k for k, o in enumerate(self.offsets) if o[axis] == 1]
            lower = [self.offsets.index(o[:axis] + (0,) + o[axis + 1:]) for o in (self.offsets[k] for k in upper)]
            self._pairs[axis] = (np.array(upper), np.array(lower))
        self._weights = np.array([1.0 / (2 ** (dim - 1) * dx) for dx in grid.spacing])
        self._signs = np.array([[-1.0 if o[axis] == 0 else 1.0 for o in self.offsets] for axis in range(dim)])

        self.psi_local = self._psi_support() if dim == 3 else np.empty(0, dtype=np.intp)

        logger.debug("Couche : %d cellules actives, %d noeuds touchés, %d noeuds psi",
                     self.n_cells, self.touched.size, self.psi_local.size)

    # ─── dimensions ──────────────────────────────────────────────────────────

    @property
    def n_cells(self) -> int:
        return int(self.cell_ids.size)

    @property
    def n_touched(self) -> int:
        return int(self.touched.size)

    @property
    def n_psi(self) -> int:
        return int(self.psi_local.size)

    @property
    def is_empty(self) -> bool:
        return self.cell_ids.size == 0

    # ─── coefficients ────────────────────────────────────────────────────────

    def node_sigma(self) -> np.ndarray:
        """Somme des zeta_a aux noeuds touchés."""
        return self.zeta_nodes.sum(axis=0)

    def node_pair_products(self) -> np.ndarray:
        """Somme des produits zeta_a zeta_b (a < b) aux noeuds touchés."""
        z = self.zeta_nodes
        return sum(z[a] * z[b] for a, b in itertools.combinations(range(self.dim), 2))

    def node_triple_product(self) -> np.ndarray:
        return np.prod(self.zeta_nodes, axis=0) if self.dim == 3 else np.zeros(self.n_touched)

    def _psi_support(self) -> np.ndarray:
        """
        Noeuds où psi intervient : zeta1 zeta2 zeta3 > 0 au noeud, ou coin d'une
        cellule dont un produit zeta_a zeta_b est non nul.
        """
        z = self.zeta_cells
        paired = (z[0] * z[1] > 0) | (z[1] * z[2] > 0) | (z[0] * z[2] > 0)
        support = np.zeros(self.n_touched, dtype=bool)
        support[self.corner_local[:, paired].ravel()] = True
        support |= self.node_triple_product() > 0
        return np.flatnonzero(support)

    # ─── opérateurs ──────────────────────────────────────────────────────────

    def gather(self, field: np.ndarray) -> np.ndarray:
        """Valeurs d'un champ nodal complet aux noeuds touchés."""
        return np.take(field, self.touched)

    def gradient(self, values: np.ndarray) -> np.ndarray:
        """G u aux cellules actives, à partir des valeurs aux noeuds touchés : (dim, n_cells)."""
        at_corners = values[self.corner_local]
        grad = np.empty((self.dim, self.n_cells))
        for axis in range(self.dim):
            upper, lower = self._pairs[axis]
            grad[axis] = (at_corners[upper] - at_corners[lower]).sum(axis=0) * self._weights[axis]
        return grad

    def divergence(self, phi: np.ndarray) -> np.ndarray:
        """div phi aux noeuds touchés (adjoint de `gradient` au signe près)."""
        contrib = np.zeros_like(self.corners, dtype=float)
        for axis in range(self.dim):
            contrib -= np.outer(self._signs[axis], phi[axis] * self._weights[axis])
        return np.bincount(self.corner_local.ravel(), weights=contrib.ravel(), minlength=self.n_touched)

    def expand_cells(self, values: np.ndarray) -> np.ndarray:
        """Replace un champ compact (n_cells,) sur la grille des cellules (zéro hors couche)."""
        full = np.zeros(int(np.prod(self.grid.cell_shape)))
        full[self.cell_ids] = values
        return full.reshape(self.grid.cell_shape)

    def expand_psi(self, psi: np.ndarray) -> np.ndarray:
        """psi compact -> valeurs aux noeuds touchés (zéro hors support)."""
        values = np.zeros(self.n_touched)
        values[self.psi_local] = psi
        return values

    # ─── bilan mémoire ───────────────────────────────────────────────────────

    def storage_report(self) -> Dict[str, float]:
        """Nombre de scalaires auxiliaires stockés, rapporté au nombre de cellules de couche."""
        grid = self.grid
        total_cells = int(np.prod(grid.cell_shape))
        omega_cells = int(np.prod([m if p else n - 1
                                   for m, n, p in zip(grid.shape, grid.interior_nodes, grid.periodic)]))
        layer_cells = total_cells - omega_cells
        aux = self.dim * self.n_cells + self.n_psi
        return {
            "phi_cells": self.n_cells,
            "psi_nodes": self.n_psi,
            "aux_scalars": aux,
            "layer_cells": layer_cells,
            "total_cells": total_cells,
            "aux_per_layer_cell": aux / layer_cells if layer_cells else 0.0,
        }
