"""
Workflow de l'exemple à croissance arbitraire: trois routes de calcul de
‖exp(tA)‖ et identité de la conjuguée de Young
"""
import logging
from typing import Dict, Any, Optional, Sequence

import pandas as pd

from tools.errors import MalformedInput
from tools.semigroup_lab import PHI_CATALOG, PhiSpec, example32_identity_check, example32_norm
from tools.serialization import dumps
from workflows.semigroup_workflow import CSV_FLOAT_FORMAT, companion_json_path

logger = logging.getLogger(__name__)


def phi_by_name(name: str) -> PhiSpec:
    if name not in PHI_CATALOG:
        raise MalformedInput("phi", f"unknown phi {name!r}, expected one of {sorted(PHI_CATALOG)}")
    return PHI_CATALOG[name]


class Example32Workflow:
    """Tableau (t, norm_direct, norm_reduced, norm_young) + validation JSON"""

    def __init__(self, phi_name: str = "xsq"):
        self.phi = phi_by_name(phi_name)

    def execute(self, t_list: Sequence[float], output_path: Optional[str] = None,
                output_format: str = "csv") -> Dict[str, Any]:
        logger.info(f"🚀 example growth for phi={self.phi.name}, t={list(t_list)}")
        identity = example32_identity_check(self.phi, t_list)
        rows = [example32_norm(self.phi, t) for t in t_list]

        table = pd.DataFrame({
            "t": [r.t for r in rows],
            "norm_direct": [r.norm_direct for r in rows],
            "norm_reduced": [r.norm_reduced for r in rows],
            "norm_young": [r.norm_young for r in rows],
        })
        passed = identity.passed
        validation = {
            "phi": self.phi.name,
            "hypotheses": identity.hypotheses,
            "identity": [
                {
                    "t": r.t,
                    "constrained_sup": r.constrained,
                    "conjugate": r.conjugate,
                    "maximizer": r.maximizer,
                    "log_one_over_t": r.log_bound,
                    "agree": r.agree,
                    "maximizer_ok": r.maximizer_ok,
                }
                for r in identity.rows
            ],
            "log_norms": [
                {"t": r.t, "direct": r.log_direct, "reduced": r.log_reduced, "young": r.log_young, "agree": r.agree}
                for r in rows
            ],
            "routes_agree": all(r.agree for r in rows),
            "pass": passed,
        }
        if output_path:
            if output_format == "csv":
                table.to_csv(output_path, index=False, float_format=CSV_FLOAT_FORMAT)
                json_path = companion_json_path(output_path)
            else:
                json_path = output_path
            with open(json_path, "w", encoding="utf-8") as file:
                file.write(dumps(validation))
        logger.info(f"{'✅' if passed else '❌'} identity check for {self.phi.name}")
        return {"report": validation, "table": table, "passed": passed}
