"""
Figures matplotlib (backend Agg, écriture PNG) :
profils d'amortissement, courbes d'erreur, profil de vitesse, snapshots.
"""

from pathlib import Path
from typing import Dict, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from src.media import layered_speed
from src.storage import image_plane


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_damping_profiles(table: pd.DataFrame, path: Path, a: Optional[float] = None) -> Path:
    """Une courbe par colonne zeta_* de la table (voir `src.damping.profile_curve`)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for column in table.columns:
        if column.startswith("zeta_"):
            ax.plot(table["x"], table[column], label=f"zeta_bar = {column[5:]}")
    if a is not None:
        ax.axvline(a, color="gray", linestyle=":", linewidth=1)
    ax.set_xlabel("x")
    ax.set_ylabel("zeta(x)")
    ax.set_title("Profils d'amortissement")
    ax.legend()
    return _save(fig, path)


def plot_error_curves(series: Dict[str, pd.DataFrame], path: Path, column: str = "e_L2") -> Path:
    """Erreur L2 en fonction du temps, échelle logarithmique."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, frame in series.items():
        values = frame[column].to_numpy()
        mask = values > 0
        ax.semilogy(frame["t"].to_numpy()[mask], values[mask], label=label)
    ax.set_xlabel("t")
    ax.set_ylabel(column)
    ax.set_title("Erreur L2 sur Ω")
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend()
    return _save(fig, path)


def plot_speed_profile(path: Path, b: float = 0.95, extent: float = 1.2) -> Path:
    x2 = np.linspace(-extent, extent, 481)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(layered_speed(x2, b), x2)
    ax.set_xlabel("c")
    ax.set_ylabel("x2")
    ax.set_title(f"Vitesse stratifiée (b = {b})")
    return _save(fig, path)


def plot_snapshot(data: np.ndarray, path: Path, extents: Sequence[Sequence[float]],
                  title: str = "") -> Path:
    """Carte du champ (plan x1-x2), échelle symétrique [-max|u|, max|u|]."""
    plane = image_plane(np.asarray(data))
    m = float(np.max(np.abs(plane))) or 1.0
    (x1_lo, x1_hi), (x2_lo, x2_hi) = extents[0], extents[1]
    fig, ax = plt.subplots(figsize=(5, 4.5))
    im = ax.imshow(plane.T, origin="lower", extent=(x1_lo, x1_hi, x2_lo, x2_hi),
                   cmap="gray", vmin=-m, vmax=m)
    fig.colorbar(im, ax=ax)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    if title:
        ax.set_title(title)
    return _save(fig, path)
