"""
Module des outils numériques du workbench d'opérateurs
"""

from .regions import Sector, ShiftedSector, HalfPlane, Strip, KRegion, boundary_contour, folklore_constants
from .holomorphic import HoloFunction
from .operator_core import resolvent, matrix_exp, smallest_singular_value, growth_bound_fit
from .funcalc import fc_sector, fc_strip, fc_halfplane, fc_kregion
from .dilation import DilationModel, BlockVector, quotient_norm, iota_norm
from .semigroup_lab import nu_rate, PHI_CATALOG, young_conjugate, example32_norm

__all__ = [
    'Sector',
    'ShiftedSector',
    'HalfPlane',
    'Strip',
    'KRegion',
    'boundary_contour',
    'folklore_constants',
    'HoloFunction',
    'resolvent',
    'matrix_exp',
    'smallest_singular_value',
    'growth_bound_fit',
    'fc_sector',
    'fc_strip',
    'fc_halfplane',
    'fc_kregion',
    'DilationModel',
    'BlockVector',
    'quotient_norm',
    'iota_norm',
    'nu_rate',
    'PHI_CATALOG',
    'young_conjugate',
    'example32_norm',
]
