"""
Workflow du calcul fonctionnel: f(A) par quadrature de contour
"""
import logging
from typing import Dict, Any, Optional

import numpy as np

from config.settings import config
from tools.errors import MalformedInput
from tools.funcalc import eigen_oracle, fc_region
from tools.operator_core import spectral_norm
from tools.serialization import (
    dumps,
    function_from_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
    region_from_json,
)

logger = logging.getLogger(__name__)

ORACLE_COND_LIMIT = 1e6


class FunctionalCalculusWorkflow:
    """Calcule f(A) pour une matrice, une fonction et une région donnée"""

    def __init__(self, tol: Optional[float] = None):
        self.tol = config.quadrature.tol if tol is None else tol

    def load_job(self, job_path: Optional[str] = None, matrix_path: Optional[str] = None,
                 function_path: Optional[str] = None, region_path: Optional[str] = None) -> Dict[str, Any]:
        """Un fichier de job unique, ou trois fichiers séparés"""
        job: Dict[str, Any] = {}
        if job_path:
            job = load_json(job_path, "input")
            if not isinstance(job, dict):
                raise MalformedInput("input", "expected an object with matrix, function, region")
        if matrix_path:
            job["matrix"] = load_json(matrix_path, "matrix")
        if function_path:
            job["function"] = load_json(function_path, "function")
        if region_path:
            job["region"] = load_json(region_path, "region")
        for key in ("matrix", "function", "region"):
            if key not in job:
                raise MalformedInput(key, "missing")
        return job

    def execute(self, job: Dict[str, Any], output_path: Optional[str] = None) -> Dict[str, Any]:
        A = matrix_from_json(job["matrix"])
        f = function_from_json(job["function"])
        region = region_from_json(job["region"])
        tol = job.get("tol", self.tol)
        if isinstance(tol, bool) or not isinstance(tol, (int, float)) or tol <= 0:
            raise MalformedInput("tol", "expected a positive number")

        logger.info(f"🚀 f(A) on {region.kind}, dim={A.shape[0]}, tol={tol:g}")
        result = fc_region(f, A, region, float(tol))

        deviation = None
        _, V = np.linalg.eig(A)
        if np.linalg.cond(V) < ORACLE_COND_LIMIT:
            deviation = spectral_norm(result.value - eigen_oracle(f, A))

        report = {
            "value": matrix_to_json(result.value),
            "error_estimate": float(result.error_estimate),
            "nodes": int(result.nodes_used),
            "oracle_deviation": None if deviation is None else float(deviation),
        }
        if output_path:
            with open(output_path, "w", encoding="utf-8") as file:
                file.write(dumps(report))
        logger.info(f"✅ converged with {result.nodes_used} nodes")
        return {"report": report, "passed": True}
