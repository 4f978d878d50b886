"""
Calcul fonctionnel holomorphe par quadrature de contour: f(A) sur secteurs,
bandes, demi-plans et régions K, suites régularisantes et identités de contrôle.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Any

import numpy as np

from config.settings import config
from tools.errors import (
    EvaluationFailure,
    InvalidAngles,
    InvalidParameters,
    NoDecay,
    NonConvergenceError,
    SpectrumOnContour,
    SpectrumOutsideRegion,
)
from tools.holomorphic import HoloFunction, partial_fractions, rational, resolvent as resolvent_function
from tools.operator_core import as_matrix, resolvent_batch, spectral_norm
from tools.sampling import make_rng
from tools.regions import (
    Contour,
    GridSpec,
    HalfPlane,
    KRegion,
    RaySegment,
    Region,
    Sector,
    ShiftedSector,
    Strip,
    VerticalSegment,
    boundary_contour,
    region_grid,
    sample_exterior,
    sup_norm_estimate,
)

logger = logging.getLogger(__name__)

QUADRATURE_RADIUS = 1e12
CHUNK = 65536
MIN_LEVELS = 3


@dataclass
class QuadratureResult:
    value: np.ndarray
    error_estimate: float
    nodes_used: int
    converged: bool


# ---------------------------------------------------------------------------
# Paramétrisations des segments
# ---------------------------------------------------------------------------

def _tanh_map(lo: float, hi: float):
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return (lambda s: mid + half * np.tanh(s)), (lambda s: half / np.cosh(s) ** 2)


def _segment_map(seg) -> Callable[[np.ndarray], Any]:
    """s ∈ ℝ -> (λ(s), dλ/ds) dans le sens de parcours"""
    if isinstance(seg, RaySegment):
        if math.isinf(seg.t1):
            t_of = lambda s: seg.t0 + np.exp(s)
            dt_of = np.exp
        else:
            t_of, dt_of = _tanh_map(seg.t0, seg.t1)
        sign = 1.0 if seg.outgoing else -1.0
        unit = seg.unit

        def ray(s):
            return seg.vertex + t_of(s) * unit, sign * unit * dt_of(s)
        return ray

    if isinstance(seg, VerticalSegment):
        lo_inf, hi_inf = math.isinf(seg.y0), math.isinf(seg.y1)
        if lo_inf and hi_inf:
            y_of, dy_of = np.sinh, np.cosh
        elif hi_inf:
            y_of, dy_of = (lambda s: seg.y0 + np.exp(s)), np.exp
        elif lo_inf:
            y_of, dy_of = (lambda s: seg.y1 - np.exp(-s)), (lambda s: np.exp(-s))
        else:
            y_of, dy_of = _tanh_map(seg.y0, seg.y1)
        sign = 1.0 if seg.upward else -1.0

        def vertical(s):
            return seg.x + 1j * y_of(s), sign * 1j * dy_of(s)
        return vertical

    raise InvalidParameters(f"unsupported segment {seg!r}")


def _weighted(kernel, phi):
    def G(s):
        lam, jac = phi(np.asarray(s, dtype=float))
        values = kernel(lam) * (jac / (2j * np.pi))[:, None, None]
        if not np.all(np.isfinite(values)):
            raise EvaluationFailure("integrand is not finite on the contour")
        return values
    return G


def _truncate(G, phi, threshold: float, scale: float, cap: float) -> float:
    """Premier s entier au-delà duquel l'intégrande est négligeable"""
    direction = 1.0 if cap > 0 else -1.0
    k = 1.0
    while k <= abs(cap):
        s = direction * np.array([k, k + 0.5])
        lam, _ = phi(s)
        if np.all(np.abs(lam) > 4.0 * (1.0 + scale)) or np.all(np.isclose(lam, lam[0])):
            norms = np.linalg.norm(G(s), axis=(1, 2))
            if np.all(norms < threshold):
                return float(direction * (k + 0.5))
        k += 1.0
    raise NonConvergenceError(f"integrand does not decay before |s| = {abs(cap)}")


def _trapezoid(G, s_lo: float, s_hi: float, tol: float, step: float, budget: int):
    intervals = max(2, int(math.ceil((s_hi - s_lo) / step)))
    h = (s_hi - s_lo) / intervals
    values = G(s_lo + h * np.arange(intervals + 1))
    estimate = h * (values.sum(axis=0) - 0.5 * (values[0] + values[-1]))
    nodes = intervals + 1
    level = 0
    while True:
        mids = s_lo + h * (np.arange(intervals) + 0.5)
        if nodes + mids.size > budget:
            raise NonConvergenceError(f"node cap reached with {nodes} nodes")
        partial = sum(G(mids[i:i + CHUNK]).sum(axis=0) for i in range(0, mids.size, CHUNK))
        refined = 0.5 * estimate + 0.5 * h * partial
        nodes += mids.size
        intervals *= 2
        h *= 0.5
        level += 1
        diff = float(np.linalg.norm(refined - estimate, 2))
        estimate = refined
        logger.debug(f"trapezoid level {level}: h={h:.3e} diff={diff:.3e} nodes={nodes}")
        if level >= MIN_LEVELS and diff <= tol:
            return estimate, diff, nodes


def contour_integral(kernel: Callable[[np.ndarray], np.ndarray], contour: Contour,
                     tol: Optional[float] = None, scale: float = 0.0,
                     node_cap: Optional[int] = None) -> QuadratureResult:
    """
    (1/2πi)∫_Γ kernel(λ)dλ pour un noyau matriciel vectorisé (n,d,d):
    trapèzes après substitution exponentielle, raffinement par dédoublement.
    """
    tol = config.quadrature.tol if tol is None else tol
    node_cap = config.quadrature.node_cap if node_cap is None else node_cap
    if tol <= 0:
        raise InvalidParameters("tol must be > 0")
    tol_seg = tol / len(contour.segments)
    cap = config.quadrature.truncation_cap
    total, error, nodes = None, 0.0, 0
    for seg in contour.segments:
        phi = _segment_map(seg)
        G = _weighted(kernel, phi)
        threshold = 1e-3 * tol_seg
        s_lo = _truncate(G, phi, threshold, scale, -cap)
        s_hi = _truncate(G, phi, threshold, scale, cap)
        value, diff, used = _trapezoid(G, s_lo, s_hi, tol_seg, config.quadrature.initial_step, node_cap - nodes)
        total = value if total is None else total + value
        error += diff
        nodes += used
    logger.debug(f"contour integral: {nodes} nodes, error estimate {error:.3e}")
    return QuadratureResult(value=total, error_estimate=error, nodes_used=nodes, converged=error <= tol)


# ---------------------------------------------------------------------------
# Calcul fonctionnel
# ---------------------------------------------------------------------------

def _check_spectrum(eigenvalues: np.ndarray, region: Region, contour: Contour, tol: float):
    distances = np.atleast_1d(contour.distance(eigenvalues))
    floor = np.maximum(10.0 * tol, 1e-10 * (1.0 + np.abs(eigenvalues)))
    hit = distances <= floor
    if np.any(hit):
        raise SpectrumOnContour(
            f"SpectrumOnContour: eigenvalue {eigenvalues[hit][0]} lies on the contour of {region.kind}"
        )
    inside = np.atleast_1d(region.contains(eigenvalues))
    if not np.all(inside):
        raise SpectrumOutsideRegion(
            f"SpectrumOutsideRegion: eigenvalue {eigenvalues[~inside][0]} lies outside {region.kind}"
        )


def fc_region(f: HoloFunction, A, region: Region, tol: Optional[float] = None) -> QuadratureResult:
    """f(A) = (1/2πi)∫_{∂region} f(λ)R(λ,A)dλ"""
    A = as_matrix(A)
    tol = config.quadrature.tol if tol is None else tol
    if getattr(f, "decay_exponent", 0.0) <= 0:
        raise NoDecay("function has no decay; regularize it first (e.g. with regularizer_sequence)")
    contour = boundary_contour(region, truncation_radius=QUADRATURE_RADIUS)
    eigenvalues = np.linalg.eigvals(A)
    _check_spectrum(eigenvalues, region, contour, tol)

    def kernel(lam):
        return f(lam)[:, None, None] * resolvent_batch(A, lam)

    return contour_integral(kernel, contour, tol, scale=float(np.max(np.abs(eigenvalues))))


def fc_sector(f: HoloFunction, A, eta: float, tol: Optional[float] = None) -> QuadratureResult:
    domain = getattr(f, "domain", None)
    if isinstance(domain, Sector) and not eta < domain.sigma:
        raise InvalidAngles(f"contour angle {eta} must be below the domain angle {domain.sigma}")
    return fc_region(f, A, Sector(eta), tol)


def fc_strip(f: HoloFunction, B, sigma: float, tol: Optional[float] = None) -> QuadratureResult:
    return fc_region(f, B, Strip(sigma), tol)


def fc_halfplane(f: HoloFunction, A, eta: float, tol: Optional[float] = None) -> QuadratureResult:
    """
    Intégrale sur Re z = -η. La droite est parcourue vers le bas (demi-plan
    à gauche), ce qui revient au parcours vers le haut avec le signe global -1;
    le cas 1×1 redonne f(a).
    """
    return fc_region(f, A, HalfPlane(-eta), tol)


def fc_kregion(f: HoloFunction, A, sigma_prime: float, a: float, theta_prime: float,
               tol: Optional[float] = None) -> QuadratureResult:
    return fc_region(f, A, KRegion(sigma_prime, a, -theta_prime), tol)


def eigen_oracle(f, A) -> np.ndarray:
    """V f(Λ) V^{-1}"""
    A = as_matrix(A)
    eigenvalues, V = np.linalg.eig(A)
    return (V * np.asarray(f(eigenvalues), dtype=complex)) @ np.linalg.inv(V)


# ---------------------------------------------------------------------------
# Régularisation
# ---------------------------------------------------------------------------

def regularizer_sequence(n: int, eta_prime: float, verbatim: bool = False) -> HoloFunction:
    """
    τ_n(z) = [n/(n+w)]·[nw/(1+nw)], w = z+1+η': τ_n -> 1 ponctuellement sur
    HP_{-η'}, uniformément borné. verbatim=True donne ϱ(nz) - ϱ(z/n) avec
    ϱ(z) = z/(1+η'+z)², qui tend vers 0.
    """
    if n < 1 or eta_prime <= 0:
        raise InvalidParameters("need n >= 1 and eta_prime > 0")
    n = float(n)
    shift = 1.0 + eta_prime

    if verbatim:
        def rho(z):
            return z / (shift + z) ** 2

        def rho_prime(z):
            return (shift - z) / (shift + z) ** 3

        return HoloFunction(
            evaluator=lambda z: rho(n * np.asarray(z, dtype=complex)) - rho(np.asarray(z, dtype=complex) / n),
            derivative_evaluator=lambda z: n * rho_prime(n * np.asarray(z, dtype=complex))
            - rho_prime(np.asarray(z, dtype=complex) / n) / n,
            decay_exponent=1.0,
            domain=HalfPlane(-eta_prime),
            name=f"rho_{int(n)}",
        )

    def tau(z):
        w = np.asarray(z, dtype=complex) + shift
        return n * n * w / ((n + w) * (1.0 + n * w))

    def tau_prime(z):
        w = np.asarray(z, dtype=complex) + shift
        return n ** 3 * (1.0 - w * w) / ((n + w) * (1.0 + n * w)) ** 2

    return HoloFunction(tau, tau_prime, 1.0, HalfPlane(-eta_prime), f"tau_{int(n)}")


@dataclass
class ConvergenceReport:
    ns: List[int]
    errors: List[float]
    norms: List[float]
    sup_f: float
    uniform_constant: float
    monotone: bool
    final_error: float
    passed: bool


def convergence_lemma_check(f: HoloFunction, A, eta: float, tol: float,
                            eta_prime: Optional[float] = None,
                            ns: Sequence[int] = (1, 2, 4, 8, 16, 32, 64),
                            quad_tol: Optional[float] = None) -> ConvergenceReport:
    """f_n(A) = (τ_n² f)(A) -> f(A) avec ‖f_n(A)‖ <= C'·sup|f|"""
    A = as_matrix(A)
    eta_prime = eta if eta_prime is None else eta_prime
    target = eigen_oracle(f, A)
    sup_f = sup_norm_estimate(f, HalfPlane(-eta), extra_points=np.linalg.eigvals(A))
    errors, norms = [], []
    for n in ns:
        tau = regularizer_sequence(n, eta_prime)
        result = fc_halfplane(tau * tau * f, A, eta, quad_tol)
        errors.append(spectral_norm(result.value - target))
        norms.append(spectral_norm(result.value))
    monotone = all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))
    uniform_constant = max(norms) / sup_f if sup_f > 0 else 0.0
    passed = monotone and errors[-1] <= tol
    if not passed:
        logger.warning(f"⚠️ convergence lemma check failed: errors={errors}")
    return ConvergenceReport(list(ns), errors, norms, sup_f, uniform_constant, monotone, errors[-1], passed)


# ---------------------------------------------------------------------------
# Identités de contrôle
# ---------------------------------------------------------------------------

def multiplicativity_check(f: HoloFunction, g: HoloFunction, A, region: Region,
                           tol: Optional[float] = None) -> float:
    """‖(fg)(A) - f(A)g(A)‖ / (‖f(A)‖‖g(A)‖ + 1e-300)"""
    fg = fc_region(f * g, A, region, tol).value
    fa = fc_region(f, A, region, tol).value
    ga = fc_region(g, A, region, tol).value
    defect = spectral_norm(fg - fa @ ga) / (spectral_norm(fa) * spectral_norm(ga) + 1e-300)
    logger.debug(f"multiplicativity defect {defect:.3e} for {f.name}, {g.name}")
    return float(defect)


@dataclass
class ShiftIdentityReport:
    lhs: np.ndarray
    rhs: np.ndarray
    defect: float
    tol: float
    passed: bool


def resolvent_shift_identity_check(f: HoloFunction, A, eta: float,
                                   sigma_prime: float = 0.75 * math.pi, a: float = 0.0,
                                   theta_prime: float = 0.5, tol: float = 1e-6,
                                   quad_tol: Optional[float] = None) -> ShiftIdentityReport:
    """
    (1/2πi)∫Γ f R(·,A) = f(A+η) - (η/2πi)∫Γ f R(·,A+η)R(·,A),
    Γ = ∂K_{σ',a,-θ'}; les trois intégrales sont calculées par quadrature.
    """
    if eta < 0:
        raise InvalidParameters("eta must be >= 0")
    A = as_matrix(A)
    region = KRegion(sigma_prime, a, -theta_prime)
    shifted = A + eta * np.eye(A.shape[0])
    lhs = fc_region(f, A, region, quad_tol)
    f_shifted = fc_region(f, shifted, region, quad_tol)
    rhs = f_shifted.value
    if eta > 0:
        contour = boundary_contour(region, truncation_radius=QUADRATURE_RADIUS)
        scale = float(np.max(np.abs(np.linalg.eigvals(shifted))))

        def kernel(lam):
            return f(lam)[:, None, None] * (resolvent_batch(shifted, lam) @ resolvent_batch(A, lam))

        cross = contour_integral(kernel, contour, quad_tol, scale=scale)
        rhs = rhs - eta * cross.value
    defect = spectral_norm(lhs.value - rhs)
    return ShiftIdentityReport(lhs.value, rhs, float(defect), tol, defect <= tol)


# ---------------------------------------------------------------------------
# Sonde de borne du calcul
# ---------------------------------------------------------------------------

def admissible_contour_region(A, region: Region) -> Region:
    """Région de même famille, strictement entre le spectre et `region`"""
    eigenvalues = np.linalg.eigvals(as_matrix(A))
    if isinstance(region, Sector):
        omega = float(np.max(np.abs(np.angle(eigenvalues))))
        candidate = Sector(0.5 * (omega + region.sigma))
    elif isinstance(region, ShiftedSector):
        omega = float(np.max(np.abs(np.angle(eigenvalues - region.a))))
        candidate = ShiftedSector(region.a, 0.5 * (omega + region.sigma))
    elif isinstance(region, HalfPlane):
        candidate = HalfPlane(0.5 * (region.alpha + float(np.min(eigenvalues.real))))
    elif isinstance(region, Strip):
        candidate = Strip(0.5 * (region.beta + float(np.max(np.abs(eigenvalues.real)))))
    elif isinstance(region, KRegion):
        shifted = eigenvalues - region.a
        angles = np.abs(np.angle(shifted[shifted != 0])) if np.any(shifted != 0) else np.zeros(1)
        in_sector = angles < region.sigma
        omega = float(np.max(angles[in_sector])) if np.any(in_sector) else 0.0
        sigma_mid = 0.5 * (max(omega, 0.5 * math.pi) + region.sigma)
        min_re = float(np.min(eigenvalues.real))
        r_mid = 0.5 * (region.r + min_re) if min_re > region.r else region.r
        candidate = KRegion(sigma_mid, region.a, r_mid)
    else:
        raise InvalidParameters(f"unknown region {region!r}")
    if np.all(candidate.contains(eigenvalues)):
        return candidate
    return region


def test_function_catalog(region: Region, rng: np.random.Generator, count: int = 20) -> List[HoloFunction]:
    """Fractions rationnelles à pôles hors de la région fermée"""
    poles = sample_exterior(region, rng, 4 * count)
    catalog: List[HoloFunction] = []
    k = 0
    while len(catalog) < count:
        kind = len(catalog) % 3
        if kind == 0:
            catalog.append(resolvent_function(poles[k], power=1 + (len(catalog) // 3) % 3))
            k += 1
        elif kind == 1:
            p, q = poles[k], poles[k + 1]
            zero = complex(rng.normal(), rng.normal())
            mobius = rational([-zero, 1.0], [-p, 1.0], name=f"mobius({zero:.3g},{p:.3g})")
            catalog.append(mobius * resolvent_function(q))
            k += 2
        else:
            picked = poles[k:k + 3]
            residues = rng.normal(size=3) + 1j * rng.normal(size=3)
            catalog.append(partial_fractions(picked, residues))
            k += 3
    return catalog


def decay_constant(f: HoloFunction, region: Region, grid_spec: Optional[GridSpec] = None) -> float:
    """sup |f(z)|(1+|z|^{2ε})/|z|^ε sur la grille"""
    eps = f.decay_exponent
    points = region_grid(region, grid_spec)
    points = points[points != 0]
    r = np.abs(points)
    with np.errstate(all="ignore"):
        weighted = np.abs(f(points)) * (1.0 + r ** (2 * eps)) / r ** eps
    return float(np.max(weighted[np.isfinite(weighted)]))


@dataclass
class BoundProbe:
    value: float
    ratios: List[float] = field(default_factory=list)
    contour_region: Optional[Any] = None

    def __float__(self) -> float:
        return self.value


def calculus_bound_probe(A, region: Region, count: int = 20, rng: Optional[np.random.Generator] = None,
                         tol: Optional[float] = None, grid_spec: Optional[GridSpec] = None) -> BoundProbe:
    """max ‖f(A)‖ / sup_region |f|: borne inférieure empirique de la constante du calcul"""
    A = as_matrix(A)
    rng = rng if rng is not None else make_rng(config.run.seed)
    eigenvalues = np.linalg.eigvals(A)
    contour_region = admissible_contour_region(A, region)
    ratios = []
    for f in test_function_catalog(region, rng, count):
        value = fc_region(f, A, contour_region, tol).value
        sup = sup_norm_estimate(f, region, grid_spec, extra_points=eigenvalues)
        ratios.append(spectral_norm(value) / sup if sup > 0 else 0.0)
    probe = max(ratios)
    logger.info(f"calculus bound probe on {region.kind}: {probe:.6g} over {len(ratios)} functions")
    return BoundProbe(value=float(probe), ratios=ratios, contour_region=contour_region)
