"""
Configuration principale du workbench numérique
"""
import os
from typing import Dict, Any, Optional
from dataclasses import dataclass

import yaml
from dotenv import load_dotenv

# Charger les variables d'environnement
load_dotenv()


@dataclass
class QuadratureConfig:
    """Configuration de la quadrature de contour"""
    tol: float = 1e-10
    node_cap: int = 2 ** 20
    initial_step: float = 0.5
    truncation_cap: float = 60.0


@dataclass
class GridConfig:
    """Grilles d'échantillonnage des normes sup"""
    radius: float = 1e3
    points: int = 512
    ratio: float = 1.1
    r_min: float = 1e-4


@dataclass
class DilationConfig:
    """Configuration du solveur de normes quotient"""
    n_max: int = 256
    tol: float = 1e-6
    smoothing: float = 1e-12
    max_iterations: int = 500
    rel_decrease: float = 1e-10


@dataclass
class SemigroupConfig:
    """Configuration du laboratoire de semi-groupes"""
    x_points: int = 10_000
    x_max_floor: float = 50.0
    refinement_tolerance: float = 0.01


@dataclass
class RunConfig:
    """Paramètres d'exécution de la CLI"""
    seed: int = 20240607
    output_format: str = "json"
    defaults_file: str = "workbench.yaml"


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, str(default)))


def _env_int(name: str, default: int) -> int:
    return int(float(os.getenv(name, str(default))))


class WorkbenchConfig:
    """Configuration principale du workbench"""

    def __init__(self):
        self.quadrature = QuadratureConfig(
            tol=_env_float("WORKBENCH_QUAD_TOL", 1e-10),
            node_cap=_env_int("WORKBENCH_QUAD_NODE_CAP", 2 ** 20),
            initial_step=_env_float("WORKBENCH_QUAD_INITIAL_STEP", 0.5),
            truncation_cap=_env_float("WORKBENCH_QUAD_TRUNCATION_CAP", 60.0),
        )

        self.grid = GridConfig(
            radius=_env_float("WORKBENCH_GRID_RADIUS", 1e3),
            points=_env_int("WORKBENCH_GRID_POINTS", 512),
            ratio=_env_float("WORKBENCH_GRID_RATIO", 1.1),
            r_min=_env_float("WORKBENCH_GRID_R_MIN", 1e-4),
        )

        self.dilation = DilationConfig(
            n_max=_env_int("WORKBENCH_DILATION_N_MAX", 256),
            tol=_env_float("WORKBENCH_DILATION_TOL", 1e-6),
            smoothing=_env_float("WORKBENCH_DILATION_SMOOTHING", 1e-12),
            max_iterations=_env_int("WORKBENCH_DILATION_MAX_ITERATIONS", 500),
            rel_decrease=_env_float("WORKBENCH_DILATION_REL_DECREASE", 1e-10),
        )

        self.semigroup = SemigroupConfig(
            x_points=_env_int("WORKBENCH_SEMIGROUP_X_POINTS", 10_000),
            x_max_floor=_env_float("WORKBENCH_SEMIGROUP_X_MAX_FLOOR", 50.0),
            refinement_tolerance=_env_float("WORKBENCH_SEMIGROUP_REFINEMENT_TOL", 0.01),
        )

        self.run = RunConfig(
            seed=_env_int("WORKBENCH_SEED", 20240607),
            output_format=os.getenv("WORKBENCH_OUTPUT_FORMAT", "json"),
            defaults_file=os.getenv("WORKBENCH_DEFAULTS_FILE", "workbench.yaml"),
        )

        # Configuration des chemins
        self.base_path = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        self._command_defaults: Optional[Dict[str, Any]] = None

    def command_defaults(self, command: str) -> Dict[str, Any]:
        """Valeurs par défaut d'une commande, lues dans workbench.yaml"""
        if self._command_defaults is None:
            path = self.run.defaults_file
            if not os.path.isabs(path):
                path = os.path.join(self.base_path, path)
            if os.path.exists(path):
                with open(path, "r", encoding="utf-8") as file:
                    loaded = yaml.safe_load(file) or {}
                self._command_defaults = loaded.get("commands", {})
            else:
                self._command_defaults = {}
        return dict(self._command_defaults.get(command, {}))

    def validate_config(self) -> Dict[str, Any]:
        """Valider la configuration et retourner les erreurs"""
        errors = []
        warnings = []

        if self.quadrature.tol <= 0:
            errors.append("WORKBENCH_QUAD_TOL doit être strictement positif")
        elif self.quadrature.tol < 1e-14:
            warnings.append("WORKBENCH_QUAD_TOL sous 1e-14 - la quadrature atteindra le plafond de noeuds")
        if self.quadrature.node_cap < 16:
            errors.append("WORKBENCH_QUAD_NODE_CAP trop petit")
        if self.quadrature.initial_step <= 0:
            errors.append("WORKBENCH_QUAD_INITIAL_STEP doit être strictement positif")

        if self.grid.ratio <= 1:
            errors.append("WORKBENCH_GRID_RATIO doit être > 1")
        if self.grid.radius <= self.grid.r_min:
            errors.append("WORKBENCH_GRID_RADIUS doit dépasser WORKBENCH_GRID_R_MIN")
        if self.grid.points < 8:
            warnings.append("WORKBENCH_GRID_POINTS très faible - estimations grossières")

        if self.dilation.n_max < 1:
            errors.append("WORKBENCH_DILATION_N_MAX doit être >= 1")
        if self.dilation.tol <= 0:
            errors.append("WORKBENCH_DILATION_TOL doit être strictement positif")
        if self.dilation.smoothing > 1e-6:
            warnings.append("WORKBENCH_DILATION_SMOOTHING élevé - biais sur les normes quotient")

        if self.semigroup.x_points < 100:
            warnings.append("WORKBENCH_SEMIGROUP_X_POINTS faible - routes de l'exemple imprécises")

        if self.run.output_format not in ("json", "csv"):
            errors.append("WORKBENCH_OUTPUT_FORMAT doit valoir json ou csv")

        return {
            "errors": errors,
            "warnings": warnings,
            "is_valid": len(errors) == 0
        }


# Instance globale de configuration
config = WorkbenchConfig()
