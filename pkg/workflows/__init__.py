"""
Module des workflows du workbench (un par commande)
"""

from .fc_workflow import FunctionalCalculusWorkflow
from .dilation_workflow import DilationWorkflow
from .semigroup_workflow import SemigroupWorkflow
from .example32_workflow import Example32Workflow
from .folklore_workflow import FolkloreWorkflow

__all__ = [
    'FunctionalCalculusWorkflow',
    'DilationWorkflow',
    'SemigroupWorkflow',
    'Example32Workflow',
    'FolkloreWorkflow',
]
