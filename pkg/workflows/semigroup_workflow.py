"""
Workflow semi-groupe: certificat de minoration exponentielle, enveloppe ν
et sous-multiplicativité de γ
"""
import logging
import os
from typing import Dict, Any, Optional, Sequence

import numpy as np
import pandas as pd

from tools.operator_core import growth_bound_fit
from tools.semigroup_lab import exponential_lower_bound_check, gamma_submultiplicativity_check
from tools.serialization import dumps

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def companion_json_path(output_path: str) -> str:
    stem, _ = os.path.splitext(output_path)
    return f"{stem}.json"


class SemigroupWorkflow:
    """Analyse quantitative de T(t) = exp(-tA)"""

    def __init__(self, t0: float = 1.0, alpha: float = 2 ** 0.5):
        self.t0 = t0
        self.alpha = alpha

    def execute(self, A, t_grid: Sequence[float], output_path: Optional[str] = None,
                output_format: str = "csv") -> Dict[str, Any]:
        logger.info(f"🚀 semigroup analysis: t0={self.t0}, alpha={self.alpha}, {len(t_grid)} grid points")
        certificate = exponential_lower_bound_check(A, self.t0, self.alpha, t_grid)
        positive = [t for t in certificate.grid if t > 0]
        gamma_report = gamma_submultiplicativity_check(A, positive)
        M, omega = growth_bound_fit(A, positive)

        gamma_by_t = dict(zip(positive, gamma_report.gamma))
        table = pd.DataFrame({
            "t": certificate.grid,
            "sigma_min": certificate.sigma_min,
            "nu_envelope": certificate.envelope(),
            "gamma": [gamma_by_t.get(t, 1.0 / s) for t, s in zip(certificate.grid, certificate.sigma_min)],
        })

        passed = certificate.passed and gamma_report.passed
        summary = {
            "c": certificate.c,
            "nu": certificate.nu,
            "m": certificate.m,
            "m_refined": certificate.m_refined,
            "refinement_stable": certificate.refinement_stable,
            "negative_time_ok": certificate.negative_time_ok,
            "negative_time_ok_alpha": certificate.negative_time_ok_alpha,
            "gamma_pairs_checked": gamma_report.pairs_checked,
            "gamma_worst_ratio": gamma_report.worst_ratio,
            "growth_bound": {"M": M, "omega": omega},
            "t0": self.t0,
            "alpha": self.alpha,
            "pass": passed,
        }
        if output_path:
            if output_format == "csv":
                table.to_csv(output_path, index=False, float_format=CSV_FLOAT_FORMAT)
                json_path = companion_json_path(output_path)
            else:
                json_path = output_path
            with open(json_path, "w", encoding="utf-8") as file:
                file.write(dumps(summary))
        logger.info(f"{'✅' if passed else '❌'} nu={certificate.nu:.6f}, m={certificate.m:.6g}")
        return {"report": summary, "table": table, "passed": passed}
