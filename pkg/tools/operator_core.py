"""
Noyau matriciel: résolvantes, exponentielles, valeurs singulières,
ajustement de bornes de croissance pour T(t) = exp(-tA).
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
from scipy.integrate import quad_vec

from tools.errors import (
    InvalidParameters,
    MatrixOverflow,
    SingularResolvent,
    SpectrumOutsideSector,
)

logger = logging.getLogger(__name__)

RCOND_FLOOR = 1e-14
EXP_SAFE_LIMIT = 700.0


def as_matrix(A) -> np.ndarray:
    """Valider une matrice complexe carrée à entrées finies"""
    M = np.atleast_2d(np.asarray(A, dtype=complex))
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InvalidParameters(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidParameters("matrix entries must be finite")
    return M


def spectral_norm(T) -> float:
    return float(sla.svdvals(np.atleast_2d(T))[0])


def smallest_singular_value(T) -> float:
    """σ_min(T) = meilleure constante c de ‖Tx‖₂ >= c‖x‖₂"""
    return float(sla.svdvals(np.atleast_2d(np.asarray(T, dtype=complex)))[-1])


def is_normal(A, tol: float = 1e-12) -> bool:
    A = as_matrix(A)
    scale = spectral_norm(A) ** 2
    defect = np.linalg.norm(A @ A.conj().T - A.conj().T @ A, 2)
    return bool(defect <= tol * max(scale, 1e-300))


def diagonalize(A) -> Tuple[np.ndarray, np.ndarray, float]:
    """(valeurs propres, vecteurs propres, conditionnement de V)"""
    A = as_matrix(A)
    eigenvalues, V = sla.eig(A)
    return eigenvalues, V, float(np.linalg.cond(V))


def resolvent(A, lam: complex) -> np.ndarray:
    """R(λ, A) = (λI - A)^{-1} par factorisation LU pivotée"""
    A = as_matrix(A)
    M = lam * np.eye(A.shape[0]) - A
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            lu, piv = sla.lu_factor(M)
            X = sla.lu_solve((lu, piv), np.eye(A.shape[0], dtype=complex))
        except (ValueError, np.linalg.LinAlgError) as e:
            raise SingularResolvent(f"lambda={lam} is in the spectrum: {e}") from e
    if not np.all(np.isfinite(X)):
        raise SingularResolvent(f"lambda={lam} is in the spectrum")
    rcond = 1.0 / (np.linalg.norm(M, 1) * np.linalg.norm(X, 1))
    if rcond < RCOND_FLOOR:
        raise SingularResolvent(f"lambda={lam} is numerically in the spectrum (rcond={rcond:.3e})")
    return X


def resolvent_batch(A, lams) -> np.ndarray:
    """Pile (n, d, d) des R(λ_k, A)"""
    A = np.asarray(A, dtype=complex)
    lams = np.asarray(lams, dtype=complex).ravel()
    d = A.shape[0]
    eye = np.eye(d, dtype=complex)
    M = lams[:, None, None] * eye - A
    return np.linalg.solve(M, np.broadcast_to(eye, M.shape))


def matrix_exp(A, t: float = 1.0) -> np.ndarray:
    """exp(tA): Schur pour A normale, Padé + scaling-and-squaring sinon"""
    A = as_matrix(A)
    M = t * A
    if not np.any(M):
        return np.eye(A.shape[0], dtype=complex)
    if is_normal(A):
        T, Z = sla.schur(M, output="complex")
        diagonal = np.diag(T)
        if np.max(diagonal.real) > EXP_SAFE_LIMIT:
            raise MatrixOverflow(f"exp overflows: spectral abscissa of tA is {np.max(diagonal.real):.1f}")
        return (Z * np.exp(diagonal)) @ Z.conj().T
    abscissa = np.max(np.linalg.eigvals(M).real)
    if abscissa > EXP_SAFE_LIMIT:
        raise MatrixOverflow(f"exp overflows: spectral abscissa of tA is {abscissa:.1f}")
    E = sla.expm(M)
    if not np.all(np.isfinite(E)):
        raise MatrixOverflow(f"exp(tA) overflowed with ||tA||_1 = {np.linalg.norm(M, 1):.1f}")
    return E


def semigroup_operator(A, t: float) -> np.ndarray:
    """T(t) = exp(-tA)"""
    return matrix_exp(A, -t)


def _upper_hull(points: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    hull: List[Tuple[float, float]] = []
    for p in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # on retire le point du milieu s'il n'est pas strictement au-dessus
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def growth_bound_fit(A, t_grid: Sequence[float]) -> Tuple[float, float]:
    """
    (M, ω) avec ‖T(t)‖ <= M e^{ωt} sur la grille: ω est la pente du dernier
    segment de l'enveloppe concave de log‖T(t)‖ (origine incluse).
    """
    t_grid = np.unique(np.asarray(t_grid, dtype=float))
    if t_grid.size == 0 or np.any(t_grid <= 0):
        raise InvalidParameters("t_grid must be non-empty and positive")
    norms = np.array([spectral_norm(semigroup_operator(A, t)) for t in t_grid])
    logs = np.log(norms)
    hull = _upper_hull([(0.0, 0.0)] + list(zip(t_grid.tolist(), logs.tolist())))
    (x1, y1), (x2, y2) = hull[-2], hull[-1]
    omega = (y2 - y1) / (x2 - x1)
    M = max(1.0, float(np.max(norms * np.exp(-omega * t_grid))))
    return M, float(omega)


@dataclass
class SemigroupModel:
    """T(t) = exp(-tA) avec sa borne de croissance ajustée"""
    generator_negative: np.ndarray
    t_grid: List[float] = field(default_factory=list)
    M: float = 1.0
    omega: float = 0.0

    @classmethod
    def fit(cls, A, t_grid: Sequence[float]) -> "SemigroupModel":
        M, omega = growth_bound_fit(A, t_grid)
        return cls(as_matrix(A), [float(t) for t in t_grid], M, omega)

    def operator(self, t: float) -> np.ndarray:
        return semigroup_operator(self.generator_negative, t)

    def bound_holds(self) -> bool:
        return all(
            spectral_norm(self.operator(t)) <= self.M * math.exp(self.omega * t) * (1 + 1e-12)
            for t in self.t_grid
        )


def sectoriality_constant(A, sigma: float, radii=None) -> float:
    """
    Max de ‖λR(λ,A)‖₂ sur des rayons hors du secteur fermé:
    estimation INFÉRIEURE du sup.
    """
    A = as_matrix(A)
    if not (0 < sigma < math.pi):
        raise InvalidParameters(f"sigma={sigma} must lie in (0, pi)")
    eigenvalues = np.linalg.eigvals(A)
    outside = (np.abs(eigenvalues) > 1e-14) & (np.abs(np.angle(eigenvalues)) >= sigma)
    if np.any(outside):
        raise SpectrumOutsideSector(
            f"eigenvalue {eigenvalues[outside][0]} lies outside the closed sector of angle {sigma}"
        )
    radii = np.geomspace(1e-4, 1e4, 161) if radii is None else np.asarray(radii, dtype=float)
    angles = [sigma + k * (math.pi - sigma) / 4 for k in (1, 2, 3)]
    angles = [math.pi] + angles + [-phi for phi in angles]
    lams = np.concatenate([radii * np.exp(1j * phi) for phi in angles])
    R = resolvent_batch(A, lams)
    values = np.abs(lams) * np.linalg.norm(R, ord=2, axis=(1, 2))
    return float(np.max(values))


def laplace_resolvent_check(A, lam: complex, tol: float = 1e-6) -> float:
    """
    Écart relatif entre ∫₀^∞ e^{λt}T(t)dt et (A-λ)^{-1}, pour Re λ sous
    l'abscisse spectrale de A.
    """
    A = as_matrix(A)
    gap = float(np.min(np.linalg.eigvals(A).real)) - complex(lam).real
    if gap <= 0:
        raise InvalidParameters("Re(lambda) must lie below every Re(eigenvalue) of A")
    _, V, cond = diagonalize(A)
    t_end = (math.log(1e16) + math.log1p(cond)) / gap
    d = A.shape[0]

    def integrand(t):
        E = np.exp(lam * t) * semigroup_operator(A, t)
        return np.concatenate([E.real.ravel(), E.imag.ravel()])

    flat, _ = quad_vec(integrand, 0.0, t_end, epsabs=tol * 1e-3, epsrel=tol * 1e-3)
    integral = (flat[: d * d] + 1j * flat[d * d:]).reshape(d, d)
    exact = resolvent(-A, -lam)
    deviation = spectral_norm(integral - exact) / spectral_norm(exact)
    logger.debug(f"Laplace check lambda={lam}: deviation {deviation:.3e}")
    return float(deviation)
