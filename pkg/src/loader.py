"""
Chargement et validation stricte des configurations JSON (schéma version 1).

Document type :

    {
      "schema_version": 1,
      "preset": "point2d",            # optionnel, fusionné sous le document
      "dim": 2,
      "half_width": 0.5, "layer_width": 0.1, "spacing": 0.002,
      "t_end": 1.0,
      "dt": "auto", "cfl_safety": 0.9,
      "zeta_bar": 80,                  # ou "reflection": 1e-3
      "medium": {"kind": "constant", "c": 1.0},
      "source": {"kind": "point_gaussian_derivative", "location": [0, 0], "f0": 10},
      "initial": {"kind": "zero"},
      "snapshots": [0.2, 0.4],
      "output_dir": "results/point2d"
    }

Les clés inconnues sont refusées ; tous les problèmes trouvés sont remontés
ensemble dans une seule ConfigError.
"""

import json
import logging
from numbers import Real
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.exceptions import ConfigError, GridError
from src.grid import build_grid, cfl_timestep
from src.media import build_medium
from src.models import InitialCondition, MediumSpec, SimulationConfig, SourceTerm
from src.utils import PRESETS_DIR

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

REQUIRED_KEYS = ("schema_version", "dim", "half_width", "layer_width", "spacing", "t_end")
OPTIONAL_KEYS = ("name", "preset", "dt", "cfl_safety", "zeta_bar", "reflection",
                 "medium", "source", "initial", "snapshots", "output_dir")
NESTED_KEYS = {
    "medium": ("kind", "c", "b"),
    "source": ("kind", "location", "f0"),
    "initial": ("kind",),
}
MEDIUM_KINDS = ("constant", "layered")
SOURCE_KINDS = ("none", "point_gaussian_derivative")
INITIAL_KINDS = ("zero", "bump2d")


def load_json(path: Path) -> Dict[str, Any]:
    """Lit un document JSON ; un fichier vide donne un document vide."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        return {}
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path.name} : JSON invalide ({exc})"]) from exc
    if not isinstance(doc, dict):
        raise ConfigError([f"{path.name} : un objet JSON est attendu à la racine"])
    return doc


def preset_names() -> List[str]:
    return sorted(p.stem for p in PRESETS_DIR.glob("*.json"))


def load_preset(name: str) -> Dict[str, Any]:
    path = PRESETS_DIR / f"{name}.json"
    if not path.exists():
        raise ConfigError([f"preset inconnu : {name!r} (disponibles : {', '.join(preset_names())})"])
    return load_json(path)


def merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Fusion superficielle ; les sous-dictionnaires sont fusionnés sur un niveau."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = {**merged[key], **value}
        else:
            merged[key] = value
    return merged


def apply_overrides(doc: Dict[str, Any], dx: Optional[float] = None, t_end: Optional[float] = None,
                    out: Optional[str] = None) -> Dict[str, Any]:
    """Options de la ligne de commande (--dx, --t-end, --out), appliquées avant validation."""
    doc = dict(doc)
    if dx is not None:
        doc["spacing"] = dx
    if out is not None:
        doc["output_dir"] = str(out)
    if t_end is not None:
        doc["t_end"] = t_end
        snapshots = doc.get("snapshots", [])
        if not isinstance(snapshots, list):
            # laissé tel quel : la validation le signalera
            return doc
        kept = [t for t in snapshots if _is_number(t) and t <= t_end]
        if t_end not in kept:
            kept.append(t_end)
        doc["snapshots"] = kept
    return doc


# ═══════════════════════════════════════════════════════════════════════════════
# VALIDATION
# ═══════════════════════════════════════════════════════════════════════════════

def _is_number(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


def _per_axis(doc: Dict[str, Any], key: str, dim: int, problems: List[str]) -> Optional[List[float]]:
    value = doc.get(key)
    if _is_number(value):
        value = [value] * dim
    if not isinstance(value, list) or len(value) != dim or not all(_is_number(v) for v in value):
        problems.append(f"{key} : nombre ou liste de {dim} nombres attendu (reçu {value!r})")
        return None
    if any(v <= 0 for v in value):
        problems.append(f"{key} : valeurs > 0 attendues (reçu {value!r})")
        return None
    return [float(v) for v in value]


def _nested(doc: Dict[str, Any], key: str, problems: List[str]) -> Dict[str, Any]:
    value = doc.get(key, {})
    if not isinstance(value, dict):
        problems.append(f"{key} : objet attendu (reçu {value!r})")
        return {}
    for unknown in sorted(set(value) - set(NESTED_KEYS[key])):
        problems.append(f"clé inconnue : {key}.{unknown}")
    return value


def config_from_dict(doc: Dict[str, Any]) -> SimulationConfig:
    """Valide un document (preset déjà fusionné) et construit la SimulationConfig."""
    problems: List[str] = []

    missing = [k for k in REQUIRED_KEYS if k not in doc]
    if missing:
        problems.append("clés obligatoires manquantes : " + ", ".join(missing))
    for unknown in sorted(set(doc) - set(REQUIRED_KEYS) - set(OPTIONAL_KEYS)):
        problems.append(f"clé inconnue : {unknown}")

    if "schema_version" in doc and doc["schema_version"] != SCHEMA_VERSION:
        problems.append(f"schema_version : {SCHEMA_VERSION} attendu (reçu {doc['schema_version']!r})")

    dim = doc.get("dim")
    if "dim" in doc and dim not in (2, 3):
        problems.append(f"dim : 2 ou 3 attendu (reçu {dim!r})")
        dim = None

    axes = {}
    if dim is not None:
        for key in ("half_width", "layer_width", "spacing"):
            if key in doc:
                axes[key] = _per_axis(doc, key, dim, problems)

    t_end = doc.get("t_end")
    if "t_end" in doc and (not _is_number(t_end) or t_end <= 0):
        problems.append(f"t_end : nombre > 0 attendu (reçu {t_end!r})")
        t_end = None

    dt = doc.get("dt", "auto")
    if dt == "auto" or dt is None:
        dt = None
    elif not _is_number(dt) or dt <= 0:
        problems.append(f"dt : 'auto' ou nombre > 0 attendu (reçu {dt!r})")
        dt = None

    safety = doc.get("cfl_safety", 0.9)
    if not _is_number(safety) or not 0 < safety <= 1:
        problems.append(f"cfl_safety : nombre dans ]0, 1] attendu (reçu {safety!r})")
        safety = 0.9

    zeta_bar = doc.get("zeta_bar")
    if zeta_bar is not None and dim is not None:
        values = [zeta_bar] * dim if _is_number(zeta_bar) else zeta_bar
        if not isinstance(values, list) or len(values) != dim or not all(_is_number(v) and v >= 0 for v in values):
            problems.append(f"zeta_bar : nombre >= 0 ou liste de {dim} nombres attendu (reçu {zeta_bar!r})")
            zeta_bar = None
        else:
            zeta_bar = tuple(float(v) for v in values)

    reflection = doc.get("reflection")
    if reflection is not None and (not _is_number(reflection) or not 0 < reflection <= 1):
        problems.append(f"reflection : nombre dans ]0, 1] attendu (reçu {reflection!r})")
        reflection = None

    medium_doc = _nested(doc, "medium", problems)
    medium = MediumSpec(kind=medium_doc.get("kind", "constant"),
                        c=medium_doc.get("c", 1.0), b=medium_doc.get("b", 0.95))
    if medium.kind not in MEDIUM_KINDS:
        problems.append(f"medium.kind : {' | '.join(MEDIUM_KINDS)} attendu (reçu {medium.kind!r})")
    for key in ("c", "b"):
        value = getattr(medium, key)
        if not _is_number(value) or value <= 0:
            problems.append(f"medium.{key} : nombre > 0 attendu (reçu {value!r})")

    source_doc = _nested(doc, "source", problems)
    location = source_doc.get("location", [])
    location_ok = isinstance(location, list)
    source = SourceTerm(kind=source_doc.get("kind", "none"),
                        location=tuple(location) if location_ok else (),
                        f0=source_doc.get("f0", 10.0))
    if source.kind not in SOURCE_KINDS:
        problems.append(f"source.kind : {' | '.join(SOURCE_KINDS)} attendu (reçu {source.kind!r})")
    elif source.kind != "none":
        if not _is_number(source.f0) or source.f0 <= 0:
            problems.append(f"source.f0 : nombre > 0 attendu (reçu {source.f0!r})")
        half = axes.get("half_width")
        if not location_ok:
            problems.append(f"source.location : liste de coordonnées attendue (reçu {location!r})")
        elif dim is not None and (len(source.location) != dim or not all(_is_number(x) for x in source.location)):
            problems.append(f"source.location : {dim} coordonnées attendues (reçu {list(source.location)!r})")
        elif half is not None and any(abs(x) >= a for x, a in zip(source.location, half)):
            problems.append(f"source.location hors de Ω : {list(source.location)!r}")

    initial_doc = _nested(doc, "initial", problems)
    initial = InitialCondition(kind=initial_doc.get("kind", "zero"))
    if initial.kind not in INITIAL_KINDS:
        problems.append(f"initial.kind : {' | '.join(INITIAL_KINDS)} attendu (reçu {initial.kind!r})")
    elif initial.kind == "bump2d" and dim not in (None, 2):
        problems.append("initial.kind = 'bump2d' n'existe qu'en dimension 2")

    snapshots = doc.get("snapshots", [])
    if not isinstance(snapshots, list) or not all(_is_number(t) for t in snapshots):
        problems.append(f"snapshots : liste de nombres attendue (reçu {snapshots!r})")
        snapshots = []
    elif t_end is not None and any(t < 0 or t > t_end for t in snapshots):
        problems.append(f"snapshots : instants dans [0, {t_end}] attendus (reçu {snapshots!r})")

    name = doc.get("name", doc.get("preset", "simulation"))
    if not isinstance(name, str):
        problems.append(f"name : chaîne attendue (reçu {name!r})")
        name = "simulation"
    output_dir = doc.get("output_dir", f"results/{name}")
    if not isinstance(output_dir, str):
        problems.append(f"output_dir : chaîne attendue (reçu {output_dir!r})")
        output_dir = f"results/{name}"

    grid = None
    if dim is not None and all(axes.get(k) is not None for k in ("half_width", "layer_width", "spacing")):
        try:
            grid = build_grid(dim, axes["half_width"], axes["layer_width"], axes["spacing"])
        except GridError as exc:
            problems.append(f"grille : {exc}")

    if grid is not None and dt is not None and not problems:
        limit = cfl_timestep(grid, build_medium(grid, medium).c_max, 1.0)
        if dt > limit:
            problems.append(f"dt : {dt} viole la condition CFL (dt <= {limit:.6g})")

    if problems:
        raise ConfigError(problems)

    return SimulationConfig(
        grid=grid,
        t_end=float(t_end),
        dt=None if dt is None else float(dt),
        cfl_safety=float(safety),
        zeta_bar=zeta_bar,
        reflection=None if reflection is None else float(reflection),
        medium=MediumSpec(kind=medium.kind, c=float(medium.c), b=float(medium.b)),
        source=SourceTerm(kind=source.kind, location=tuple(float(x) for x in source.location), f0=float(source.f0)),
        initial=initial,
        snapshots=tuple(sorted(float(t) for t in snapshots)),
        output_dir=Path(output_dir),
        name=name,
    )


def parse_config(path: Optional[Path] = None, preset: Optional[str] = None,
                 dx: Optional[float] = None, t_end: Optional[float] = None,
                 out: Optional[str] = None) -> SimulationConfig:
    """
    Document utilisateur (optionnel) fusionné sur son preset, options de la
    ligne de commande appliquées, puis validation complète.
    """
    doc = load_json(path) if path is not None else {}
    preset = preset or doc.get("preset")
    if preset is not None:
        if not isinstance(preset, str):
            raise ConfigError([f"preset : chaîne attendue (reçu {preset!r})"])
        doc = merge(load_preset(preset), doc)
        doc.setdefault("preset", preset)
    doc = apply_overrides(doc, dx=dx, t_end=t_end, out=out)
    config = config_from_dict(doc)
    logger.debug("Configuration %s : grille %s, t_end = %g", config.name, config.grid.shape, config.t_end)
    return config
