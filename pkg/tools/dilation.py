"""
Dilatation d'un opérateur minoré sur ℓ_p(ℕ; C^d) tronqué.

Y = ℓ_p / F avec F = ran(G), G = I - (α/c)·T̂R. Les normes quotient sont des
distances à l'image de G, calculées à support croissant: z parcourt
(C^d)^N et Gz occupe N+1 blocs. Tronquer puis quotienter par ran(G_N) est
faux (G_N est inversible, le quotient s'effondre).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from config.settings import config
from tools.errors import (
    InadmissibleModel,
    InvalidParameters,
    LowerBoundViolated,
    NonConvergenceError,
    NotInCommutant,
)
from tools.operator_core import smallest_singular_value, spectral_norm
from tools.sampling import complex_normal, make_rng

logger = logging.getLogger(__name__)

COMMUTANT_TOL = 1e-10


def admissibility_threshold(p: float) -> float:
    return 2.0 ** (1.0 - 1.0 / p)


def admissible_p_bound(alpha: float) -> float:
    """Plus grand p avec 2^{1-1/p} <= α (∞ dès que α >= 2)"""
    if alpha <= 1:
        raise InvalidParameters("alpha must be > 1")
    if alpha >= 2:
        return math.inf
    return 1.0 / (1.0 - math.log2(alpha))


@dataclass
class DilationModel:
    """Données (T, c, α, p) de la construction"""
    T: np.ndarray
    c: float
    alpha: float
    p: float
    admissible: bool = field(init=False)

    def __post_init__(self):
        self.T = np.atleast_2d(np.asarray(self.T, dtype=complex))
        if self.T.ndim != 2 or self.T.shape[0] != self.T.shape[1]:
            raise InvalidParameters(f"T must be square, got shape {self.T.shape}")
        if not self.c > 0:
            raise InvalidParameters("c must be > 0")
        if not self.alpha > 1:
            raise InvalidParameters("alpha must be > 1")
        if not 1 < self.p < math.inf:
            raise InvalidParameters("p must lie in (1, inf)")
        if smallest_singular_value(self.T) < self.c - 1e-12:
            raise LowerBoundViolated(
                f"sigma_min(T) = {smallest_singular_value(self.T):.6g} is below c = {self.c}"
            )
        self.admissible = self.alpha >= admissibility_threshold(self.p) * (1 - 1e-12)

    @property
    def dim(self) -> int:
        return self.T.shape[0]

    @property
    def B(self) -> np.ndarray:
        """(α/c)·T"""
        return (self.alpha / self.c) * self.T

    def require_admissible(self):
        if not self.admissible:
            raise InadmissibleModel(
                f"alpha below 2^{{1-1/p}}: alpha={self.alpha}, threshold={admissibility_threshold(self.p):.6g}"
            )


@dataclass
class BlockVector:
    """Élément à support fini de ℓ_p(ℕ; C^d), blocs de forme (N, d)"""
    blocks: np.ndarray
    p: float

    def __post_init__(self):
        self.blocks = np.asarray(self.blocks, dtype=complex)
        if self.blocks.ndim == 1:
            self.blocks = self.blocks[:, None]

    @classmethod
    def embed(cls, x, p: float) -> "BlockVector":
        """j(x) = (x, 0, 0, ...)"""
        return cls(np.atleast_1d(np.asarray(x, dtype=complex))[None, :], p)

    @classmethod
    def unit(cls, index: int, dim: int, p: float) -> "BlockVector":
        blocks = np.zeros((index + 1, dim), dtype=complex)
        blocks[index, 0] = 1.0
        return cls(blocks, p)

    @property
    def length(self) -> int:
        return self.blocks.shape[0]

    @property
    def dim(self) -> int:
        return self.blocks.shape[1]

    def norm(self) -> float:
        return float(np.sum(np.linalg.norm(self.blocks, axis=1) ** self.p) ** (1.0 / self.p))

    def padded(self, length: int) -> "BlockVector":
        if length <= self.length:
            return self
        pad = np.zeros((length - self.length, self.dim), dtype=complex)
        return BlockVector(np.vstack([self.blocks, pad]), self.p)

    def shift(self) -> "BlockVector":
        """R: décalage à droite, un bloc de plus"""
        return BlockVector(np.vstack([np.zeros((1, self.dim), dtype=complex), self.blocks]), self.p)

    def apply(self, U) -> "BlockVector":
        """Û(x_n) = (U x_n)"""
        return BlockVector(self.blocks @ np.asarray(U, dtype=complex).T, self.p)

    def flat(self) -> np.ndarray:
        return self.blocks.ravel()

    def __add__(self, other: "BlockVector") -> "BlockVector":
        n = max(self.length, other.length)
        return BlockVector(self.padded(n).blocks + other.padded(n).blocks, self.p)

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        return self + other * (-1.0)

    def __mul__(self, scalar: complex) -> "BlockVector":
        return BlockVector(self.blocks * scalar, self.p)

    __rmul__ = __mul__


def apply_G(model: DilationModel, z: BlockVector) -> BlockVector:
    """Gz = z - (α/c)·T̂(Rz), support N+1"""
    Rz = z.shift()
    return z.padded(z.length + 1) - Rz.apply(model.B)


# ---------------------------------------------------------------------------
# Normes quotient
# ---------------------------------------------------------------------------

def _g_matrix(model: DilationModel, n_blocks: int, rows: int) -> sp.csc_matrix:
    d = model.dim
    identity = sp.eye(rows * d, n_blocks * d, format="csc", dtype=complex)
    shift = sp.kron(sp.eye(rows, n_blocks, k=-1, format="csc"), sp.csc_matrix(model.B))
    return (identity - shift).tocsc()


def _block_norms(r: np.ndarray, d: int) -> np.ndarray:
    return np.linalg.norm(r.reshape(-1, d), axis=1)


def _p_norm(r: np.ndarray, d: int, p: float) -> float:
    return float(np.sum(_block_norms(r, d) ** p) ** (1.0 / p))


def _least_squares(G: sp.csc_matrix, v: np.ndarray, weights: Optional[np.ndarray] = None) -> np.ndarray:
    GH = G.conj().T
    if weights is not None:
        GH = GH @ sp.diags(weights)
    return np.atleast_1d(spsolve((GH @ G).tocsc(), GH @ v))


def _irls(G: sp.csc_matrix, v: np.ndarray, d: int, p: float, z0: np.ndarray) -> np.ndarray:
    """min Σ_k (‖r_k‖² + μ)^{p/2} par moindres carrés repondérés"""
    settings = config.dilation
    mu = settings.smoothing

    def objective(z):
        r = v - G @ z
        return float(np.sum((_block_norms(r, d) ** 2 + mu) ** (p / 2)))

    z = z0
    current = objective(z)
    for iteration in range(settings.max_iterations):
        r = v - G @ z
        block_weights = (_block_norms(r, d) ** 2 + mu) ** ((p - 2) / 2)
        if p > 2:
            block_weights = np.maximum(block_weights, 1e-8 * np.max(block_weights))
        candidate = _least_squares(G, v, np.repeat(block_weights, d))
        step, improved = 1.0, None
        while step >= 1e-8:
            trial = z + step * (candidate - z)
            value = objective(trial)
            if value <= current:
                improved = (trial, value)
                break
            step *= 0.5
        if improved is None:
            break
        z, value = improved
        decrease = (current - value) / max(current, 1e-300)
        current = value
        if decrease < settings.rel_decrease:
            logger.debug(f"IRLS stopped after {iteration + 1} iterations")
            break
    return z


def quotient_distance_at(model: DilationModel, v: BlockVector, n_blocks: int,
                         warm_start: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
    """min_{z ∈ (C^d)^N} ‖v - Gz‖_p à N = n_blocks fixé (valeur, minimiseur)"""
    d = model.dim
    rows = max(v.length, n_blocks + 1)
    target = v.padded(rows).flat()
    G = _g_matrix(model, n_blocks, rows)
    z = _least_squares(G, target)
    if model.p != 2:
        if warm_start is not None:
            z0 = np.zeros(n_blocks * d, dtype=complex)
            z0[: warm_start.size] = warm_start[: n_blocks * d]
            if _p_norm(target - G @ z0, d, model.p) < _p_norm(target - G @ z, d, model.p):
                z = z0
        z = _irls(G, target, d, model.p, z)
    value = min(_p_norm(target - G @ z, d, model.p), v.norm())
    return value, z


def quotient_norm(model: DilationModel, v: BlockVector, n_max: Optional[int] = None,
                  tol: Optional[float] = None) -> float:
    """
    ‖[v]‖_Y = inf_z ‖v - Gz‖_p. Le support N double jusqu'à ce que deux
    minima consécutifs diffèrent de moins de tol.
    """
    model.require_admissible()
    n_max = config.dilation.n_max if n_max is None else n_max
    tol = config.dilation.tol if tol is None else tol
    if v.norm() == 0:
        return 0.0
    n = max(1, v.length)
    previous, warm = None, None
    while n <= n_max:
        value, warm = quotient_distance_at(model, v, n, warm)
        if previous is not None:
            value = min(value, previous)
            if previous - value < tol:
                return value
        previous = value
        n *= 2
    raise NonConvergenceError(f"quotient norm not stable before N_max={n_max} (last value {previous:.9g})")


def iota_norm(model: DilationModel, x, n_max: Optional[int] = None, tol: Optional[float] = None) -> float:
    """‖ιx‖_Y = ‖[j(x)]‖_Y"""
    return quotient_norm(model, BlockVector.embed(x, model.p), n_max, tol)


# ---------------------------------------------------------------------------
# Vérifications
# ---------------------------------------------------------------------------

@dataclass
class NormInequalityReport:
    value: float
    lower: float
    upper: float
    margin: float
    passed: bool

    def __float__(self) -> float:
        return self.value


def _check_commutant(model: DilationModel, U: np.ndarray):
    defect = spectral_norm(U @ model.T - model.T @ U)
    if defect > COMMUTANT_TOL * spectral_norm(U) * spectral_norm(model.T):
        raise NotInCommutant(f"||UT - TU|| = {defect:.3e}: U does not commute with T")


def phi_image_norm(model: DilationModel, U, x, n_max: Optional[int] = None,
                   tol: Optional[float] = None) -> NormInequalityReport:
    """‖Φ(U)ιx‖_Y = ‖ι(Ux)‖_Y, encadré par ‖Ux‖/α et ‖Ux‖"""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    _check_commutant(model, U)
    tol = config.dilation.tol if tol is None else tol
    Ux = U @ np.atleast_1d(np.asarray(x, dtype=complex))
    value = iota_norm(model, Ux, n_max, tol)
    norm_ux = float(np.linalg.norm(Ux))
    lower, upper = norm_ux / model.alpha, norm_ux
    margin = min(value - lower * (1 - 1e-4), upper * (1 + 1e-8) - value)
    return NormInequalityReport(value, lower, upper, margin, margin >= -tol)


@dataclass
class GLowerBoundReport:
    min_ratio: float
    bound: float
    samples: int
    passed: bool

    def __float__(self) -> float:
        return self.min_ratio


def g_lower_bound_check(model: DilationModel, samples: int = 10_000, max_support: int = 32,
                        rng: Optional[np.random.Generator] = None) -> GLowerBoundReport:
    """min ‖Gz‖/‖z‖ sur des z aléatoires à support <= max_support"""
    model.require_admissible()
    rng = rng if rng is not None else make_rng(config.run.seed)
    d, p = model.dim, model.p
    supports = rng.integers(1, max_support + 1, size=samples)
    z = complex_normal(rng, (samples, max_support, d))
    z[np.arange(max_support)[None, :] >= supports[:, None]] = 0.0
    padded = np.concatenate([z, np.zeros((samples, 1, d), dtype=complex)], axis=1)
    shifted = np.concatenate([np.zeros((samples, 1, d), dtype=complex), z], axis=1)
    gz = padded - shifted @ model.B.T
    gz_norm = np.sum(np.linalg.norm(gz, axis=2) ** p, axis=1) ** (1 / p)
    z_norm = np.sum(np.linalg.norm(z, axis=2) ** p, axis=1) ** (1 / p)
    min_ratio = float(np.min(gz_norm / z_norm))
    bound = model.alpha - 1.0
    passed = min_ratio >= bound * (1 - 1e-10)
    if not passed:
        logger.warning(f"⚠️ G lower bound violated: {min_ratio:.6g} < {bound:.6g}")
    return GLowerBoundReport(min_ratio, bound, samples, passed)


@dataclass
class InverseActionReport:
    range_defect: float
    inverse_prep_defect: float
    l_norm: float
    l_bound: float
    passed: bool


def inverse_action_check(model: DilationModel, v: BlockVector, n_max: Optional[int] = None,
                         tol: Optional[float] = None) -> InverseActionReport:
    """
    (i) [Gv] = 0; (ii) [v] = [(α/c)T̂Rv]; (iii) ‖L[v]‖ = (α/c)‖[Rv]‖ <= (α/c)‖[v]‖.
    """
    model.require_admissible()
    tol = config.dilation.tol if tol is None else tol
    scale = max(1.0, v.norm())
    range_defect = quotient_norm(model, apply_G(model, v), n_max, tol)
    prep = v.padded(v.length + 1) - v.shift().apply(model.B)
    inverse_prep_defect = quotient_norm(model, prep, n_max, tol)
    ratio = model.alpha / model.c
    l_norm = ratio * quotient_norm(model, v.shift(), n_max, tol)
    l_bound = ratio * quotient_norm(model, v, n_max, tol)
    passed = (
        range_defect <= tol * scale
        and inverse_prep_defect <= tol * scale
        and l_norm <= l_bound * (1 + tol) + ratio * tol
    )
    return InverseActionReport(range_defect, inverse_prep_defect, l_norm, l_bound, passed)


@dataclass
class ContractionReport:
    image_norm: float
    bound: float
    passed: bool


def phi_contraction_check(model: DilationModel, U, v: BlockVector, n_max: Optional[int] = None,
                          tol: Optional[float] = None) -> ContractionReport:
    """‖Φ(U)[v]‖_Y <= ‖U‖·‖[v]‖_Y pour U dans le commutant de T"""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    _check_commutant(model, U)
    tol = config.dilation.tol if tol is None else tol
    image = quotient_norm(model, v.apply(U), n_max, tol)
    bound = spectral_norm(U) * quotient_norm(model, v, n_max, tol)
    return ContractionReport(image, bound, image <= bound + 2 * tol * max(1.0, spectral_norm(U)))


@dataclass
class AdmissibilityReport:
    admissible: bool
    threshold: float
    empirical: bool
    agree: bool
    counterexample: Optional[Tuple[float, float]] = None

    def __bool__(self) -> bool:
        return self.admissible


def alpha_p_admissibility(alpha: float, p: float, samples: int = 1000,
                          rng: Optional[np.random.Generator] = None) -> AdmissibilityReport:
    """α >= 2^{1-1/p}, recoupé par (|a|+|b|)^p <= |αa|^p + |αb|^p sur des paires"""
    if not alpha > 1 or not 1 < p < math.inf:
        raise InvalidParameters("need alpha > 1 and p in (1, inf)")
    rng = rng if rng is not None else make_rng(config.run.seed)
    threshold = admissibility_threshold(p)
    admissible = alpha >= threshold * (1 - 1e-12)
    pairs = np.vstack([[1.0, 1.0], rng.normal(size=(samples, 2))])
    a, b = np.abs(pairs[:, 0]), np.abs(pairs[:, 1])
    lhs = (a + b) ** p
    rhs = (alpha * a) ** p + (alpha * b) ** p
    violated = lhs > rhs * (1 + 1e-12)
    counterexample = None
    if np.any(violated):
        worst = int(np.argmax(np.where(violated, lhs / rhs, -np.inf)))
        counterexample = (float(pairs[worst, 0]), float(pairs[worst, 1]))
    empirical = not np.any(violated)
    agree = empirical == admissible
    if not agree:
        logger.warning(f"⚠️ admissibility mismatch for alpha={alpha}, p={p}")
    return AdmissibilityReport(admissible, threshold, empirical, agree, counterexample)


# ---------------------------------------------------------------------------
# Deux espaces
# ---------------------------------------------------------------------------

@dataclass
class TwoSpaceReport:
    min_ratio: float
    samples_checked: int
    edge_excluded: int
    passed: bool
    ratios: List[float] = field(default_factory=list)


def _block_layout(d1: int, d2: int, window: int) -> List[slice]:
    """Tranches des blocs d'indice -window..window dans le vecteur aplati"""
    slices, offset = [], 0
    for n in range(-window, window + 1):
        size = d1 if n <= 0 else d2
        slices.append(slice(offset, offset + size))
        offset += size
    return slices


def two_space_embed(T1, c: float, window: int, p: float = 2.0, samples: int = 200,
                    rng: Optional[np.random.Generator] = None,
                    vectors: Optional[Sequence[np.ndarray]] = None) -> Tuple[np.ndarray, TwoSpaceReport]:
    """
    Opérateur tronqué sur Z = ℓ_p(Z≤0; C^{d1}) ⊕ ℓ_p(Z>0; C^{d2}), indices
    [-window, window]: (Tz)_n = z_{n-1} pour n ≠ 1, (Tz)_1 = (1/c)T1 z_0.
    Le bloc z_window sort de la fenêtre: les échantillons qui le touchent
    sont exclus du contrôle ‖Tz‖ >= ‖z‖.
    """
    T1 = np.atleast_2d(np.asarray(T1, dtype=complex))
    d2, d1 = T1.shape
    if window < 2:
        raise InvalidParameters("window must be >= 2")
    if smallest_singular_value(T1) < c - 1e-12 or d2 < d1:
        raise LowerBoundViolated(f"sigma_min(T1) is below c = {c}")
    layout = _block_layout(d1, d2, window)
    size = layout[-1].stop
    T = np.zeros((size, size), dtype=complex)
    for k in range(1, len(layout)):
        n = k - window
        out, src = layout[k], layout[k - 1]
        if n == 1:
            T[out, src] = T1 / c
        else:
            T[out, src] = np.eye(out.stop - out.start)

    def block_p_norm(z):
        return float(sum(np.linalg.norm(z[s]) ** p for s in layout) ** (1 / p))

    if vectors is None:
        rng = rng if rng is not None else make_rng(config.run.seed)
        vectors = []
        for _ in range(samples):
            lo = int(rng.integers(-window, window + 1))
            hi = int(rng.integers(lo, window + 1))
            z = np.zeros(size, dtype=complex)
            for k in range(lo + window, hi + window + 1):
                z[layout[k]] = complex_normal(rng, layout[k].stop - layout[k].start)
            vectors.append(z)

    ratios, excluded = [], 0
    last = layout[-1]
    for z in vectors:
        z = np.asarray(z, dtype=complex)
        if np.any(z[last] != 0):
            excluded += 1
            continue
        ratios.append(block_p_norm(T @ z) / block_p_norm(z))
    min_ratio = min(ratios) if ratios else math.inf
    report = TwoSpaceReport(min_ratio, len(ratios), excluded, min_ratio >= 1 - 1e-12, ratios)
    return T, report
