"""
Analyse de stabilité du système du premier ordre équivalent.

Variables d'état :
    2D : (u, phi1, phi2, v1, v2)
    3D : (u, phi1, phi2, phi3, v1, v2, v3, psi)

avec v défini par u_t = -zeta2 u + div v [- zeta3 psi], v_t = -zeta1 v + c² grad u + phi.
Le système s'écrit U_t = A U_x + B U_y [+ C U_z] + (terme d'ordre inférieur) U et
son symbole est P(ik) = i (k1 A + k2 B [+ k3 C]) [+ terme d'ordre inférieur].

Vérification numérique : valeurs propres (partie réelle) et complétude des
vecteurs propres (multiplicités algébrique et géométrique).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
import scipy.linalg

from src.exceptions import EigenSolverError

logger = logging.getLogger(__name__)

STATE_2D = ("u", "phi1", "phi2", "v1", "v2")
STATE_3D = ("u", "phi1", "phi2", "phi3", "v1", "v2", "v3", "psi")

CLUSTER_TOL = 1e-8
RANK_TOL = 1e-8


@dataclass(frozen=True)
class SymbolMatrices:
    """Matrices A, B[, C] (dérivées) et `lower` (C en 2D, D en 3D, ordre inférieur)."""
    dim: int
    principal: tuple
    lower: np.ndarray
    zeta: tuple
    c: float

    @property
    def size(self) -> int:
        return self.lower.shape[0]

    def symbol(self, k: Sequence[float], include_lower_order: bool = False) -> np.ndarray:
        """P(ik) = i sum_j k_j M_j (+ terme d'ordre inférieur)."""
        k = np.asarray(k, dtype=float)
        if k.shape != (self.dim,):
            raise ValueError(f"vecteur d'onde de taille {k.shape}, attendu ({self.dim},)")
        if not np.all(np.isfinite(k)):
            raise ValueError("vecteur d'onde non fini")
        P = 1j * sum(kj * M for kj, M in zip(k, self.principal))
        if include_lower_order:
            P = P + self.lower
        return P


def _check_zeta(zeta: Sequence[float], c: float) -> None:
    if any(z < 0 for z in zeta):
        raise ValueError(f"les zeta doivent être >= 0 (reçu {tuple(zeta)})")
    if not c > 0:
        raise ValueError(f"c doit être > 0 (reçu {c})")


def assemble_2d(zeta1: float, zeta2: float, c: float = 1.0) -> SymbolMatrices:
    """
    Matrices du système 2D.

    L'entrée c²(zeta1 - zeta2) de B est placée sur la ligne de phi2 : c'est
    phi2_t qui dépend de d u / d y (phi_t = Gamma1 phi + c² Gamma2 grad u).
    """
    _check_zeta((zeta1, zeta2), c)
    c2 = c * c
    iu, ip1, ip2, iv1, iv2 = range(5)

    A = np.zeros((5, 5))
    A[iu, iv1] = 1.0
    A[ip1, iu] = c2 * (zeta2 - zeta1)
    A[iv1, iu] = c2

    B = np.zeros((5, 5))
    B[iu, iv2] = 1.0
    B[ip2, iu] = c2 * (zeta1 - zeta2)
    B[iv2, iu] = c2

    lower = -np.diag([zeta2, zeta1, zeta2, zeta1, zeta1]).astype(float)
    return SymbolMatrices(dim=2, principal=(A, B), lower=lower, zeta=(zeta1, zeta2), c=c)


def assemble_3d(zeta1: float, zeta2: float, zeta3: float, c: float = 1.0) -> SymbolMatrices:
    """
    Matrices du système 3D.

    Terme d'ordre inférieur D, reconstruit des équations de u, phi, v, psi :
        u_t   : -zeta2 u - zeta3 psi        -> D[u,u] = -zeta2, D[u,psi] = -zeta3
        phi_t : Gamma1 phi                  -> D[phi_a,phi_a] = -zeta_a
        v_t   : -zeta1 v                    -> D[v_a,v_a] = -zeta1
        psi_t : u                           -> D[psi,u] = 1
    Les entrées de la colonne psi de A, B, C sont zeta2 zeta3, zeta3 zeta1, zeta1 zeta2.
    """
    _check_zeta((zeta1, zeta2, zeta3), c)
    c2 = c * c
    iu, ip1, ip2, ip3, iv1, iv2, iv3, ipsi = range(8)
    zeta = (zeta1, zeta2, zeta3)
    phi_rows = (ip1, ip2, ip3)
    v_rows = (iv1, iv2, iv3)

    principal = []
    for a in range(3):
        b, d = (a + 1) % 3, (a + 2) % 3
        M = np.zeros((8, 8))
        M[iu, v_rows[a]] = 1.0
        M[phi_rows[a], iu] = c2 * (zeta[b] + zeta[d] - zeta[a])
        M[phi_rows[a], ipsi] = zeta[b] * zeta[d]
        M[v_rows[a], iu] = c2
        principal.append(M)

    D = np.zeros((8, 8))
    D[iu, iu] = -zeta2
    D[iu, ipsi] = -zeta3
    for a in range(3):
        D[phi_rows[a], phi_rows[a]] = -zeta[a]
        D[v_rows[a], v_rows[a]] = -zeta1
    D[ipsi, iu] = 1.0
    return SymbolMatrices(dim=3, principal=tuple(principal), lower=D, zeta=zeta, c=c)


def assemble(zeta: Sequence[float], c: float = 1.0) -> SymbolMatrices:
    return assemble_2d(*zeta, c=c) if len(zeta) == 2 else assemble_3d(*zeta, c=c)


# ═══════════════════════════════════════════════════════════════════════════════
# VALEURS PROPRES
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class EigenCluster:
    value: complex
    algebraic: int
    geometric: int

    @property
    def defective(self) -> bool:
        return self.geometric < self.algebraic


@dataclass
class EigenReport:
    k: np.ndarray
    eigenvalues: np.ndarray
    clusters: List[EigenCluster] = field(default_factory=list)

    @property
    def max_real(self) -> float:
        return float(np.max(self.eigenvalues.real))

    @property
    def complete(self) -> bool:
        return all(not cl.defective for cl in self.clusters)


def _cluster(values: np.ndarray, tol: float) -> List[List[int]]:
    """Regroupe les valeurs propres proches (composantes connexes à distance <= tol)."""
    groups: List[List[int]] = []
    for i in np.lexsort((values.real, values.imag)):
        for group in groups:
            if any(abs(values[i] - values[j]) <= tol for j in group):
                group.append(int(i))
                break
        else:
            groups.append([int(i)])
    return groups


def symbol_eigenvalues(m: SymbolMatrices, k: Sequence[float],
                       include_lower_order: bool = False) -> EigenReport:
    """
    Valeurs propres de P(ik), multiplicités et verdict de complétude.

    Regroupement à tau = 1e-8 (1 + |k| c) ; multiplicité géométrique = n - rang(P - lambda I)
    avec un rang numérique au seuil 1e-8 max(||P||, 1).
    """
    k = np.asarray(k, dtype=float)
    P = m.symbol(k, include_lower_order)
    try:
        values = scipy.linalg.eigvals(P)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"échec du calcul des valeurs propres pour k={k.tolist()} : {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise EigenSolverError(f"valeurs propres non finies pour k={k.tolist()}")

    n = P.shape[0]
    tau_cluster = CLUSTER_TOL * (1.0 + float(np.linalg.norm(k)) * m.c)
    tau_rank = RANK_TOL * max(float(np.linalg.norm(P, 2)), 1.0)

    clusters = []
    for group in _cluster(values, tau_cluster):
        value = complex(np.mean(values[group]))
        singular = scipy.linalg.svdvals(P - value * np.eye(n))
        rank = int(np.sum(singular > tau_rank))
        clusters.append(EigenCluster(value=value, algebraic=len(group), geometric=min(n - rank, len(group))))
    return EigenReport(k=k, eigenvalues=values, clusters=clusters)


# ═══════════════════════════════════════════════════════════════════════════════
# BALAYAGE
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass
class ScanSummary:
    table: pd.DataFrame
    max_real: float
    max_real_scaled: float
    n_defective: int

    @property
    def n_samples(self) -> int:
        return len(self.table)


def random_samples(dim: int, n: int, zeta_max: float = 100.0, k_max: float = 10.0,
                   active: Optional[int] = None, seed: int = 0):
    """
    Tirages (zeta, k) uniformes. `active` fixe le nombre de zeta strictement
    positifs (les autres sont mis à zéro, positions tirées au hasard).
    """
    rng = np.random.default_rng(seed)
    if active is None:
        zetas = rng.uniform(0.0, zeta_max, size=(n, dim))
    else:
        if not 0 <= active <= dim:
            raise ValueError(f"active doit être entre 0 et {dim} (reçu {active})")
        zetas = rng.uniform(1e-3 * zeta_max, zeta_max, size=(n, dim))
        for row in zetas:
            row[rng.permutation(dim)[: dim - active]] = 0.0
    ks = rng.uniform(-k_max, k_max, size=(n, dim))
    return zetas, ks


def stability_scan(dim: int, zetas: np.ndarray, ks: np.ndarray, c: float = 1.0,
                   include_lower_order: bool = False) -> ScanSummary:
    """Rapport sur chaque couple (zeta, k) : max Re lambda et complétude."""
    zetas = np.atleast_2d(np.asarray(zetas, dtype=float))
    ks = np.atleast_2d(np.asarray(ks, dtype=float))
    if zetas.shape != ks.shape or zetas.shape[1] != dim:
        raise ValueError(f"échantillons de formes {zetas.shape} et {ks.shape} pour dim={dim}")

    rows = []
    for zeta, k in zip(zetas, ks):
        report = symbol_eigenvalues(assemble(tuple(zeta), c), k, include_lower_order)
        k_norm = float(np.linalg.norm(k))
        row = {f"k{a + 1}": k[a] for a in range(dim)}
        row.update({f"zeta{a + 1}": zeta[a] for a in range(dim)})
        row.update({
            "max_re": report.max_real,
            "max_re_scaled": report.max_real / (c * k_norm) if k_norm > 0 else report.max_real,
            "complete": report.complete,
            "n_positive_zeta": int(np.sum(zeta > 0)),
        })
        rows.append(row)

    table = pd.DataFrame(rows)
    n_defective = int((~table["complete"]).sum()) if len(table) else 0
    logger.info("Balayage %dD : %d échantillons, max Re = %.3e, %d défectueux",
                dim, len(table), table["max_re"].max() if len(table) else 0.0, n_defective)
    return ScanSummary(
        table=table,
        max_real=float(table["max_re"].max()) if len(table) else 0.0,
        max_real_scaled=float(table["max_re_scaled"].max()) if len(table) else 0.0,
        n_defective=n_defective,
    )
