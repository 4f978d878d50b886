"""
Exceptions du workbench
"""
from typing import Optional


class WorkbenchError(Exception):
    """Erreur de base du workbench"""


class PreconditionError(WorkbenchError, ValueError):
    """Une précondition d'une opération n'est pas satisfaite"""


class SpectrumOnContour(PreconditionError):
    pass


class SpectrumOutsideRegion(PreconditionError):
    pass


class SpectrumOutsideSector(PreconditionError):
    pass


class SingularResolvent(PreconditionError):
    """λ est (numériquement) dans le spectre"""


class InvalidRegion(PreconditionError):
    pass


class DegenerateRegion(InvalidRegion):
    pass


class InvalidAngles(PreconditionError):
    pass


class InvalidParameters(PreconditionError):
    pass


class NoDecay(PreconditionError):
    pass


class NotInCommutant(PreconditionError):
    pass


class LowerBoundViolated(PreconditionError):
    pass


class InadmissibleModel(PreconditionError):
    pass


class HypothesesViolated(PreconditionError):
    pass


class MaximizerAtBoundary(PreconditionError):
    pass


class MatrixOverflow(PreconditionError, OverflowError):
    pass


class NonConvergenceError(WorkbenchError, RuntimeError):
    """Un schéma itératif a atteint son plafond sans converger"""


class EvaluationFailure(WorkbenchError):
    """Une fonction a échoué sur un point de grille de la région"""


class MalformedInput(WorkbenchError):
    """Entrée JSON/CLI invalide; `field` nomme le champ fautif"""

    def __init__(self, field: str, message: Optional[str] = None):
        self.field = field
        super().__init__(f"malformed field '{field}'" + (f": {message}" if message else ""))
