"""
Workflow de dilatation: encadrement de ι, inégalité de norme pour Φ,
minoration de G, action inverse et admissibilité de (α, p).
"""
import logging
from typing import Dict, List, Any, Optional

import numpy as np

from config.settings import config
from tools.dilation import (
    BlockVector,
    DilationModel,
    alpha_p_admissibility,
    g_lower_bound_check,
    inverse_action_check,
    iota_norm,
    phi_image_norm,
)
from tools.sampling import complex_normal, make_rng, random_admissible_pair, random_lower_bounded
from tools.serialization import dumps, model_to_json

logger = logging.getLogger(__name__)


def _record(check: str, samples: int, worst_margin: float, passed: bool) -> Dict[str, Any]:
    return {"check": check, "samples": int(samples), "worst_margin": float(worst_margin), "pass": bool(passed)}


class DilationWorkflow:
    """Exécute toutes les vérifications numériques sur un modèle (T, c, α, p)"""

    def __init__(self, seed: Optional[int] = None, samples: int = 20, g_samples: int = 10_000,
                 n_max: Optional[int] = None, tol: Optional[float] = None):
        self.seed = config.run.seed if seed is None else seed
        self.samples = samples
        self.g_samples = g_samples
        self.n_max = config.dilation.n_max if n_max is None else n_max
        self.tol = config.dilation.tol if tol is None else tol

    def random_model(self, dim: int) -> DilationModel:
        rng = make_rng(self.seed)
        T, c = random_lower_bounded(rng, dim)
        alpha, p = random_admissible_pair(rng)
        return DilationModel(T=T, c=c, alpha=alpha, p=p)

    def execute(self, model: DilationModel, output_path: Optional[str] = None) -> Dict[str, Any]:
        model.require_admissible()
        rng = make_rng(self.seed)
        d = model.dim
        logger.info(f"🚀 dilation checks: d={d}, c={model.c:.6g}, alpha={model.alpha:.6g}, p={model.p:.6g}")

        checks: List[Dict[str, Any]] = []

        # Encadrement ‖x‖/α <= ‖ιx‖ <= ‖x‖
        xs = complex_normal(rng, (self.samples, d))
        margins, iota_ratios = [], []
        for x in xs:
            value = iota_norm(model, x, self.n_max, self.tol)
            norm_x = float(np.linalg.norm(x))
            iota_ratios.append(value / norm_x)
            margins.append(min(value - norm_x / model.alpha * (1 - 1e-4), norm_x * (1 + 1e-8) - value))
        checks.append(_record("sandwich", len(xs), min(margins), min(margins) >= -self.tol))

        # Inégalité de norme pour U dans le commutant
        T = model.T
        identity = np.eye(d)
        operators = {"T": T, "T^2": T @ T, "T^3": T @ T @ T, "I+T": identity + T}
        margins = []
        for U in operators.values():
            for x in xs[: max(1, self.samples // 4)]:
                margins.append(phi_image_norm(model, U, x, self.n_max, self.tol).margin)
        checks.append(_record("norm_inequality", len(margins), min(margins), min(margins) >= -self.tol))

        # Minoration ‖Gz‖ >= (α-1)‖z‖
        g_report = g_lower_bound_check(model, self.g_samples, rng=rng)
        checks.append(_record("g_lower_bound", self.g_samples, g_report.min_ratio - g_report.bound, g_report.passed))

        # Action inverse
        margins, inverse_ok = [], True
        for _ in range(max(1, self.samples // 4)):
            support = int(rng.integers(1, 5))
            v = BlockVector(complex_normal(rng, (support, d)), model.p)
            report = inverse_action_check(model, v, self.n_max, self.tol)
            inverse_ok &= report.passed
            margins.append(-max(report.range_defect, report.inverse_prep_defect))
        checks.append(_record("inverse_action", len(margins), min(margins), inverse_ok))

        admissibility = alpha_p_admissibility(model.alpha, model.p, rng=rng)
        checks.append(_record("admissibility", 1001, model.alpha - admissibility.threshold,
                              admissibility.admissible and admissibility.agree))

        passed = all(c["pass"] for c in checks)
        report = {
            "model": model_to_json(model),
            "iota_ratio_min": float(min(iota_ratios)),
            "iota_ratio_max": float(max(iota_ratios)),
            "checks": checks,
            "pass": passed,
        }
        if output_path:
            with open(output_path, "w", encoding="utf-8") as file:
                file.write(dumps(report))
        logger.info(f"{'✅' if passed else '❌'} dilation checks finished")
        return {"report": report, "passed": passed}
