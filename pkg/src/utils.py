"""
Fonctions utilitaires : journalisation, limite de parallélisme, chemins.
"""

import logging
import os
import sys
from pathlib import Path

logger = logging.getLogger(__name__)

THREADS_ENV = "PMLWAVE_THREADS"

BASE_DIR = Path(__file__).resolve().parent.parent
PRESETS_DIR = BASE_DIR / "data" / "presets"
RESULTS_DIR = BASE_DIR / "results"


def configure_logging(verbosity: int = 0) -> None:
    """
    Installe un unique gestionnaire sur la sortie d'erreur.
    verbosity : -1 -> WARNING, 0 -> INFO, >= 1 -> DEBUG.
    """
    level = logging.WARNING if verbosity < 0 else logging.DEBUG if verbosity > 0 else logging.INFO
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)-7s %(name)s : %(message)s", "%H:%M:%S"))
    root.addHandler(handler)
    root.setLevel(level)


def thread_cap() -> int:
    """Nombre maximal de simulations simultanées (PMLWAVE_THREADS, 1 par défaut)."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return 1
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        logger.warning("%s=%r invalide, utilisation de 1 fil", THREADS_ENV, raw)
        return 1
    return value


def ensure_dir(path: Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
