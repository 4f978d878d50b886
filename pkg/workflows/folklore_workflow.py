"""
Workflow du lemme de contrôle de la dérivée: ‖zf'‖ sur HP_{-η} contre
C·sup|f| sur K_{σ,a,-η-ε}
"""
import logging
from typing import Dict, Any, Optional

from config.settings import config
from tools.funcalc import test_function_catalog
from tools.holomorphic import constant
from tools.regions import GridSpec, HalfPlane, KRegion, folklore_constants, hinf1_seminorm_estimate, sup_norm_estimate
from tools.sampling import make_rng
from tools.serialization import dumps

logger = logging.getLogger(__name__)


class FolkloreWorkflow:
    """Compare la constante théorique au pire rapport observé"""

    def __init__(self, seed: Optional[int] = None, count: int = 20, grid_spec: Optional[GridSpec] = None):
        self.seed = config.run.seed if seed is None else seed
        self.count = count
        self.grid_spec = grid_spec

    def execute(self, eta: float, epsilon: float, a: float, sigma: float, sigma_prime: float,
                output_path: Optional[str] = None) -> Dict[str, Any]:
        constants = folklore_constants(eta, epsilon, a, sigma, sigma_prime)
        region = KRegion(sigma, a, -eta - epsilon)
        half_plane = HalfPlane(-eta)
        rng = make_rng(self.seed)
        logger.info(f"🚀 folklore check: C={constants.C:.6g}, {self.count} test functions")

        family = [constant(1.0)] + test_function_catalog(region, rng, max(0, self.count - 1))
        ratios = []
        for f in family:
            seminorm = hinf1_seminorm_estimate(f, half_plane, self.grid_spec).value
            sup = sup_norm_estimate(f, region, self.grid_spec)
            ratios.append(seminorm / sup if sup > 0 else 0.0)

        worst = max(ratios)
        passed = worst <= constants.C
        report = {
            "C_theoretical": constants.C,
            "worst_ratio_observed": worst,
            "pass": passed,
            "constants": {
                "zone_radius": constants.zone_radius,
                "M": constants.M,
                "delta": constants.delta,
            },
            "functions": len(family),
        }
        if output_path:
            with open(output_path, "w", encoding="utf-8") as file:
                file.write(dumps(report))
        logger.info(f"{'✅' if passed else '❌'} worst ratio {worst:.6g} vs C={constants.C:.6g}")
        return {"report": report, "ratios": ratios, "passed": passed}
