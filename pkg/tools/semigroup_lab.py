"""
Laboratoire de semi-groupes: minoration exponentielle à partir d'une seule
minoration, sous-multiplicativité de γ, croissance de l'exemple à conjuguée
de Young.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from config.settings import config
from tools.errors import HypothesesViolated, InvalidParameters, MaximizerAtBoundary
from tools.operator_core import as_matrix, matrix_exp, semigroup_operator, smallest_singular_value, spectral_norm

logger = logging.getLogger(__name__)

LOG_ONE_PERCENT = math.log(1.01)


def nu_rate(t0: float, c: float, alpha: float) -> float:
    """ν = (1/t0)·ln(c/α)"""
    if not (t0 > 0 and c > 0 and alpha > 1):
        raise InvalidParameters(f"need t0 > 0, c > 0, alpha > 1 (got t0={t0}, c={c}, alpha={alpha})")
    return math.log(c / alpha) / t0


@dataclass
class LowerBoundCertificate:
    t0: float
    c: float
    alpha: float
    nu: float
    m: float
    grid: List[float]
    sigma_min: List[float] = field(default_factory=list)
    m_refined: float = 0.0
    refinement_stable: bool = True
    negative_time_ok: bool = True
    negative_time_ok_alpha: bool = True

    @property
    def passed(self) -> bool:
        return self.m > 0 and self.refinement_stable and self.negative_time_ok and self.negative_time_ok_alpha

    def envelope(self) -> List[float]:
        """m·e^{νt} sur la grille"""
        return [self.m * math.exp(self.nu * t) for t in self.grid]


def _sigma_mins(A, grid: Sequence[float]) -> np.ndarray:
    return np.array([smallest_singular_value(semigroup_operator(A, t)) for t in grid])


def exponential_lower_bound_check(A, t0: float, alpha: float,
                                  t_grid: Optional[Sequence[float]] = None) -> LowerBoundCertificate:
    """
    ‖T(t)x‖ >= m e^{νt}‖x‖ avec c = σ_min(T(t0)); m est mesuré sur la grille
    puis sur la grille raffinée. Temps négatifs: ‖T(nt0+δ)^{-1}‖ <= K c^{-n}
    (et a fortiori K(α/c)^n).
    """
    A = as_matrix(A)
    if t0 <= 0:
        raise InvalidParameters("t0 must be > 0")
    grid = np.linspace(0.0, 5.0 * t0, 51) if t_grid is None else np.asarray(sorted(t_grid), dtype=float)
    if grid.size == 0 or np.any(grid < 0):
        raise InvalidParameters("t_grid must be non-empty and non-negative")
    c = smallest_singular_value(semigroup_operator(A, t0))
    nu = nu_rate(t0, c, alpha)

    sigma = _sigma_mins(A, grid)
    m = float(np.min(sigma * np.exp(-nu * grid)))

    refined = np.union1d(grid, 0.5 * (grid[1:] + grid[:-1])) if grid.size > 1 else grid
    m_refined = float(np.min(_sigma_mins(A, refined) * np.exp(-nu * refined)))
    stable = abs(m_refined - m) <= config.semigroup.refinement_tolerance * m

    deltas = np.linspace(0.0, t0, 17)
    K = float(np.max(1.0 / _sigma_mins(A, deltas)))
    n_max = max(1, int(math.floor(grid[-1] / t0)))
    ok_exact, ok_alpha = True, True
    for n in range(n_max + 1):
        inverse_norms = 1.0 / _sigma_mins(A, n * t0 + deltas)
        ok_exact &= bool(np.all(inverse_norms <= K * c ** (-n) * (1 + 1e-9)))
        ok_alpha &= bool(np.all(inverse_norms <= K * (alpha / c) ** n * (1 + 1e-9)))

    certificate = LowerBoundCertificate(
        t0=t0, c=c, alpha=alpha, nu=nu, m=m, grid=grid.tolist(), sigma_min=sigma.tolist(),
        m_refined=m_refined, refinement_stable=stable,
        negative_time_ok=ok_exact, negative_time_ok_alpha=ok_alpha,
    )
    if not certificate.passed:
        logger.warning(f"⚠️ lower bound certificate failed: m={m:.6g}, refined={m_refined:.6g}")
    return certificate


@dataclass
class GammaReport:
    gamma: List[float]
    pairs_checked: int
    worst_ratio: float
    passed: bool
    log_gamma: List[float] = field(default_factory=list)


def _log_gammas(A: np.ndarray, grid: Sequence[float]) -> np.ndarray:
    """log γ(t) = log‖e^{tA}‖ = μt + log‖e^{t(A-μ)}‖, μ = max Re σ(A)"""
    mu = float(np.max(np.linalg.eigvals(A).real))
    shifted = A - mu * np.eye(A.shape[0])
    return np.array([mu * t + math.log(spectral_norm(matrix_exp(shifted, t))) for t in grid])


def gamma_submultiplicativity_check(A, t_grid: Sequence[float]) -> GammaReport:
    """
    γ(t) = 1/σ_min(T(t)); γ(t+s) <= γ(t)γ(s) pour toutes les paires de la grille.
    Comparaison en logarithmes: σ_min(T(t)) sous-passe 0 bien avant log γ.
    """
    A = as_matrix(A)
    grid = np.asarray(t_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0):
        raise InvalidParameters("t_grid must be non-empty and positive")
    log_gamma = _log_gammas(A, grid)
    i, j = np.triu_indices(grid.size)
    excess = _log_gammas(A, grid[i] + grid[j]) - (log_gamma[i] + log_gamma[j])
    worst = float(np.max(excess))
    with np.errstate(over="ignore"):
        gamma = np.exp(log_gamma)
        worst_ratio = float(np.exp(worst))
    return GammaReport(gamma.tolist(), int(i.size), worst_ratio, worst <= math.log1p(1e-10),
                       log_gamma=log_gamma.tolist())


# ---------------------------------------------------------------------------
# φ et conjuguée de Young
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiSpec:
    name: str
    phi: Callable[[np.ndarray], np.ndarray]
    dphi: Callable[[np.ndarray], np.ndarray]

    def validate(self) -> Dict[str, bool]:
        """Hypothèses: φ(0)=φ'(0)=0, φ' strictement croissante, φ'(log x) <= x, φ' -> ∞"""
        grid = np.linspace(0.0, 50.0, 1001)
        slopes = self.dphi(grid)
        xs = np.linspace(1.0, 1e3, 2000)[1:]
        flags = {
            "phi_zero": abs(float(self.phi(np.array(0.0)))) < 1e-12,
            "dphi_zero": abs(float(self.dphi(np.array(0.0)))) < 1e-12,
            "dphi_increasing": bool(np.all(np.diff(slopes) > 0)),
            "dphi_log_bound": bool(np.all(self.dphi(np.log(xs)) <= xs)),
            "dphi_unbounded": float(self.dphi(np.array(1e12))) > 2 * float(self.dphi(np.array(1e3))),
        }
        flags["valid"] = all(flags.values())
        return flags

    def require_valid(self):
        flags = self.validate()
        if not flags["valid"]:
            failed = [k for k, ok in flags.items() if not ok and k != "valid"]
            raise HypothesesViolated(f"phi '{self.name}' violates hypotheses: {', '.join(failed)}")


def _xlog(x):
    return x * np.log1p(x)


def _dxlog(x):
    return np.log1p(x) + x / (1 + x)


def _xloglog(x):
    l1 = np.log1p(x)
    return x * l1 * np.log1p(l1)


def _dxloglog(x):
    l1 = np.log1p(x)
    l2 = np.log1p(l1)
    return l1 * l2 + x / (1 + x) * (l2 + l1 / (1 + l1))


PHI_CATALOG: Dict[str, PhiSpec] = {
    "xsq": PhiSpec("xsq", lambda x: x ** 2, lambda x: 2 * x),
    "xsq_half": PhiSpec("xsq_half", lambda x: x ** 2 / 2, lambda x: x),
    "xlog": PhiSpec("xlog", _xlog, _dxlog),
    "xloglog": PhiSpec("xloglog", _xloglog, _dxloglog),
}


def conjugate_maximizer(phi: PhiSpec, s: float, x_max: Optional[float] = None) -> float:
    """x0 avec φ'(x0) = s"""
    if s <= 0:
        raise InvalidParameters("s must be > 0")
    if x_max is None:
        x_max = 1.0
        while float(phi.dphi(np.array(x_max))) < s:
            x_max *= 2.0
            if x_max > 1e300:
                raise MaximizerAtBoundary(f"phi' stays below {s}")
    elif float(phi.dphi(np.array(x_max))) < s:
        raise MaximizerAtBoundary(f"phi'(x_max={x_max}) < s={s}: maximizer beyond x_max")
    return float(brentq(lambda x: float(phi.dphi(np.array(x))) - s, 0.0, x_max, xtol=1e-300, rtol=1e-15, maxiter=500))


def young_conjugate(phi: PhiSpec, s: float, x_max: Optional[float] = None) -> float:
    """φ*(s) = sup_{x>0} (sx - φ(x))"""
    x0 = conjugate_maximizer(phi, s, x_max)
    return float(s * x0 - phi.phi(np.array(x0)))


def biconjugate(phi: PhiSpec, x: float) -> float:
    """(φ*)*(x) = sup_s (sx - φ*(s))"""
    s_max = 2.0 * float(phi.dphi(np.array(x))) + 1.0
    result = minimize_scalar(
        lambda s: -(s * x - young_conjugate(phi, s)),
        bounds=(1e-12, s_max), method="bounded", options={"xatol": 1e-12},
    )
    return float(-result.fun)


def _grid_sup(objective: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, points: int):
    """Max sur grille uniforme puis affinage borné autour du meilleur point"""
    xs = np.linspace(lo, hi, points)
    values = objective(xs)
    k = int(np.argmax(values))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, points - 1)]
    best_x, best = float(xs[k]), float(values[k])
    if b > a:
        polished = minimize_scalar(
            lambda x: -float(objective(np.array(x))), bounds=(a, b), method="bounded",
            options={"xatol": 1e-10 * (1.0 + abs(best_x))},
        )
        if -polished.fun > best:
            best_x, best = float(polished.x), float(-polished.fun)
    return best, best_x


def _check_t(t: float):
    if not 0 < t < 1:
        raise HypothesesViolated(f"t must lie in (0,1), got {t}")


@dataclass
class Example32Row:
    t: float
    log_direct: float
    log_reduced: float
    log_young: float

    @property
    def norm_direct(self) -> float:
        return _safe_exp(self.log_direct)

    @property
    def norm_reduced(self) -> float:
        return _safe_exp(self.log_reduced)

    @property
    def norm_young(self) -> float:
        return _safe_exp(self.log_young)

    @property
    def agree(self) -> bool:
        logs = (self.log_direct, self.log_reduced, self.log_young)
        return max(logs) - min(logs) <= LOG_ONE_PERCENT


def _safe_exp(value: float) -> float:
    return math.exp(value) if value < 709.0 else math.inf


def example32_norm(phi: PhiSpec, t: float, x_points: Optional[int] = None) -> Example32Row:
    """
    ‖exp(tA)‖ ≃ sup_x e^{-tφ(x)} max{1, te^x}, par trois routes en log:
    sup direct, sup réduit à x >= log(1/t), et max{1, t·exp(tφ*(1/t))}.
    """
    _check_t(t)
    phi.require_valid()
    points = x_points or config.semigroup.x_points
    s = 1.0 / t
    x0 = conjugate_maximizer(phi, s)
    x_max = max(config.semigroup.x_max_floor, 3.0 * x0)
    log_t = math.log(t)

    def direct(x):
        return -t * phi.phi(x) + np.maximum(0.0, log_t + x)

    def reduced(x):
        return log_t + x - t * phi.phi(x)

    log_direct, _ = _grid_sup(direct, 0.0, x_max, points)
    sup_reduced, _ = _grid_sup(reduced, -log_t, x_max, points)
    log_reduced = max(0.0, sup_reduced)
    log_young = max(0.0, log_t + t * young_conjugate(phi, s))
    row = Example32Row(t, max(0.0, log_direct), log_reduced, log_young)
    if not row.agree:
        logger.warning(f"⚠️ example routes disagree at t={t}: {row}")
    return row


@dataclass
class IdentityRow:
    t: float
    constrained: float
    conjugate: float
    maximizer: float
    log_bound: float
    agree: bool
    maximizer_ok: bool


@dataclass
class IdentityReport:
    phi: str
    rows: List[IdentityRow]
    hypotheses: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(r.agree and r.maximizer_ok for r in self.rows)


def example32_identity_check(phi: PhiSpec, t_list: Sequence[float], rel_tol: float = 1e-6,
                             x_points: Optional[int] = None) -> IdentityReport:
    """sup_{x >= log(1/t)} (x/t - φ(x)) = φ*(1/t), maximiseur x0 >= log(1/t)"""
    for t in t_list:
        _check_t(t)
    hypotheses = phi.validate()
    if not hypotheses["valid"]:
        phi.require_valid()
    points = x_points or config.semigroup.x_points
    rows = []
    for t in t_list:
        s = 1.0 / t
        x0 = conjugate_maximizer(phi, s)
        bound = math.log(s)
        x_max = max(config.semigroup.x_max_floor, 3.0 * x0)
        constrained, _ = _grid_sup(lambda x: s * x - phi.phi(x), bound, x_max, points)
        conjugate = young_conjugate(phi, s)
        agree = abs(constrained - conjugate) <= rel_tol * max(1.0, abs(conjugate))
        rows.append(IdentityRow(t, constrained, conjugate, x0, bound, agree, x0 >= bound))
    report = IdentityReport(phi.name, rows, hypotheses)
    logger.info(f"identity check for {phi.name}: {'✅' if report.passed else '❌'}")
    return report


def conjugate_growth_profile(phi: PhiSpec, s_values: Sequence[float]) -> List[Dict[str, float]]:
    """Asymptotique mesurée de φ*: (s, φ*, log φ*, log log φ*)"""
    rows = []
    for s in s_values:
        value = young_conjugate(phi, s)
        log_value = math.log(value) if value > 0 else math.nan
        loglog = math.log(log_value) if log_value > 0 else math.nan
        rows.append({"s": float(s), "conjugate": value, "log_conjugate": log_value, "loglog_conjugate": loglog})
    return rows
