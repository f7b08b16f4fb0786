"""
Exceptions du projet PMLWAVE.

Chaque erreur porte les informations utiles au diagnostic (axe fautif,
pas de temps, liste des problèmes de configuration, ...), ce qui permet
au pilote `main.py` de choisir le code de sortie.
"""

from typing import List, Optional, Tuple


class PmlWaveError(Exception):
    """Classe de base de toutes les erreurs du projet."""


class GridError(PmlWaveError, ValueError):
    """Géométrie de grille invalide."""

    def __init__(self, message: str, axis: Optional[int] = None):
        super().__init__(message)
        self.axis = axis


class ConfigError(PmlWaveError, ValueError):
    """Configuration invalide : tous les problèmes détectés sont regroupés."""

    def __init__(self, problems: List[str]):
        self.problems = list(problems)
        super().__init__("Configuration invalide :\n  - " + "\n  - ".join(self.problems))


class NumericalInstabilityError(PmlWaveError, RuntimeError):
    """Valeur NaN/Inf détectée dans le champ mis à jour."""

    def __init__(self, step: int, location: Optional[Tuple[int, ...]] = None):
        self.step = step
        self.location = location
        where = f" au noeud {location}" if location is not None else ""
        super().__init__(f"Instabilité numérique au pas {step}{where}")


class CausalityError(PmlWaveError, ValueError):
    """Le domaine de référence est trop petit pour l'horizon demandé."""

    def __init__(self, message: str, required_half_width: float):
        super().__init__(message)
        self.required_half_width = required_half_width


class SnapshotFormatError(PmlWaveError, ValueError):
    """Fichier de snapshot corrompu ou incohérent avec ses métadonnées."""


class EigenSolverError(PmlWaveError, RuntimeError):
    """Le solveur de valeurs propres n'a pas convergé."""


class NonNestedLevelsError(PmlWaveError, ValueError):
    """Les niveaux d'une étude de convergence ne sont pas emboîtés."""
