"""
Formats sur disque.

- Snapshot : charge utile binaire (float64 petit-boutiste, ordre ligne,
  axes (x1, x2[, x3]), x3 varie le plus vite) + fichier JSON compagnon de
  même nom (extension .json) décrivant la grille, l'instant et le champ.
- Image PGM binaire (P5) d'un snapshot, gris linéaire sur [-max|u|, +max|u|].
- Tables CSV (pandas) et résumés JSON.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np
import pandas as pd

from src.exceptions import SnapshotFormatError
from src.models import GridSpec

logger = logging.getLogger(__name__)

DTYPE = "<f8"
AXES = ("x1", "x2", "x3")


@dataclass(frozen=True)
class Snapshot:
    data: np.ndarray
    time: float
    field: str
    origin: Tuple[float, ...]
    spacing: Tuple[float, ...]


def sidecar_path(path: Path) -> Path:
    return Path(path).with_suffix(".json")


def write_snapshot(u: np.ndarray, grid: GridSpec, t: float, path: Path, field: str = "u") -> Path:
    """
    Écrit un champ nodal complet (grid.shape) ou restreint à Ω (grid.interior_nodes).
    Renvoie le chemin de la charge utile.
    """
    path = Path(path)
    if u.shape == grid.shape:
        origin = grid.origin
    elif u.shape == grid.interior_nodes:
        origin = tuple(-a for a in grid.half_width)
    else:
        raise SnapshotFormatError(f"forme {u.shape} incompatible avec la grille {grid.shape}")

    path.parent.mkdir(parents=True, exist_ok=True)
    payload = np.ascontiguousarray(u, dtype=DTYPE)
    payload.tofile(path)

    meta = {
        "field": field,
        "time": float(t),
        "dtype": DTYPE,
        "order": "C",
        "axis_order": list(AXES[: u.ndim]),
        "shape": list(u.shape),
        "origin": list(origin),
        "spacing": list(grid.spacing),
        "extents": [[o, o + (m - 1) * dx] for o, m, dx in zip(origin, u.shape, grid.spacing)],
    }
    with open(sidecar_path(path), "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, ensure_ascii=False)
    logger.debug("Snapshot t=%g écrit dans %s", t, path)
    return path


def read_snapshot(path: Path) -> Snapshot:
    """Relit un snapshot ; toute incohérence charge utile / métadonnées est une SnapshotFormatError."""
    path = Path(path)
    meta_path = sidecar_path(path)
    if not meta_path.exists():
        raise SnapshotFormatError(f"métadonnées absentes : {meta_path}")
    try:
        with open(meta_path, "r", encoding="utf-8") as f:
            meta = json.load(f)
        shape = tuple(int(m) for m in meta["shape"])
        dtype = np.dtype(meta.get("dtype", DTYPE))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise SnapshotFormatError(f"métadonnées illisibles ({meta_path}) : {exc}") from exc

    expected = int(np.prod(shape)) * dtype.itemsize
    actual = path.stat().st_size
    if actual != expected:
        raise SnapshotFormatError(f"{path.name} : {actual} octets, {expected} attendus pour la forme {shape}")

    data = np.fromfile(path, dtype=dtype).reshape(shape)
    return Snapshot(
        data=data,
        time=float(meta["time"]),
        field=str(meta.get("field", "u")),
        origin=tuple(meta.get("origin", [0.0] * len(shape))),
        spacing=tuple(meta.get("spacing", [1.0] * len(shape))),
    )


def image_plane(data: np.ndarray) -> np.ndarray:
    """Plan (x1, x2) d'un champ ; en 3D, tranche médiane x3 = 0."""
    if data.ndim == 3:
        return data[:, :, data.shape[2] // 2]
    if data.ndim != 2:
        raise SnapshotFormatError(f"champ de dimension {data.ndim} non exportable")
    return data


def export_image(snapshot: Union[Snapshot, np.ndarray], path: Path) -> Path:
    """
    PGM P5, largeur = noeuds en x1, hauteur = noeuds en x2 (x2 croissant vers le haut).
    Pixel = floor((u/m + 1) * 127.5), m = max|u| ; champ nul -> gris 127.
    """
    data = snapshot.data if isinstance(snapshot, Snapshot) else np.asarray(snapshot)
    plane = image_plane(data)
    m = float(np.max(np.abs(plane))) if plane.size else 0.0
    if m > 0:
        pixels = np.floor((plane / m + 1.0) * 127.5)
    else:
        pixels = np.full(plane.shape, 127.0)
    pixels = np.clip(pixels, 0, 255).astype(np.uint8)
    image = pixels.T[::-1, :]

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    height, width = image.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(np.ascontiguousarray(image).tobytes())
    return path


def read_pgm(path: Path) -> np.ndarray:
    """Relit une image P5 (lignes de haut en bas)."""
    raw = Path(path).read_bytes()
    parts = raw.split(maxsplit=4)
    if len(parts) < 5 or parts[0] != b"P5":
        raise SnapshotFormatError(f"{path} n'est pas une image PGM P5")
    width, height = int(parts[1]), int(parts[2])
    body = raw[len(raw) - width * height:]
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width)


def save_table(table: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False)
    return path


def save_json(data: Dict[str, Any], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False, default=_to_builtin)
    return path


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"type non sérialisable : {type(value).__name__}")
