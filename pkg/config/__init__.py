"""
Configuration du workbench d'opérateurs
"""
from .settings import (
    config,
    WorkbenchConfig,
    QuadratureConfig,
    GridConfig,
    DilationConfig,
    SemigroupConfig,
    RunConfig,
)

__all__ = [
    "config",
    "WorkbenchConfig",
    "QuadratureConfig",
    "GridConfig",
    "DilationConfig",
    "SemigroupConfig",
    "RunConfig",
]
