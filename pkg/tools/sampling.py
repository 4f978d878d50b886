"""
Générateurs aléatoires déterministes et modèles de test échantillonnés
"""
import numpy as np

from tools.operator_core import smallest_singular_value


def make_rng(seed: int) -> np.random.Generator:
    """Générateur PCG64 nommé: mêmes tirages sur toutes les plateformes"""
    return np.random.Generator(np.random.PCG64(int(seed)))


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_diagonalizable(rng: np.random.Generator, eigenvalues, cond_max: float = 1e3,
                          perturbation: float = 0.3) -> np.ndarray:
    """V diag(λ) V^{-1} avec cond(V) < cond_max"""
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    dim = eigenvalues.size
    for _ in range(100):
        V = np.eye(dim) + perturbation * complex_normal(rng, (dim, dim)) / np.sqrt(dim)
        if np.linalg.cond(V) < cond_max:
            return (V * eigenvalues) @ np.linalg.inv(V)
        perturbation *= 0.7
    return np.diag(eigenvalues)


def random_sector_spectrum(rng: np.random.Generator, dim: int, omega: float,
                           r_min: float = 0.2, r_max: float = 5.0) -> np.ndarray:
    radii = np.exp(rng.uniform(np.log(r_min), np.log(r_max), dim))
    angles = rng.uniform(-omega, omega, dim)
    return radii * np.exp(1j * angles)


def random_stable_generator(rng: np.random.Generator, dim: int) -> np.ndarray:
    """A avec Re σ(A) > 0, donc T(t) = exp(-tA) décroissant à terme"""
    spectrum = rng.uniform(0.1, 2.0, dim) + 1j * rng.uniform(-2.0, 2.0, dim)
    return random_diagonalizable(rng, spectrum, cond_max=50.0)


def random_lower_bounded(rng: np.random.Generator, dim: int):
    """(T, c) avec σ_min(T) >= c > 0"""
    T = np.eye(dim) + 0.5 * complex_normal(rng, (dim, dim)) / np.sqrt(dim)
    c = smallest_singular_value(T) * rng.uniform(0.5, 1.0)
    return T, float(c)


def random_admissible_pair(rng: np.random.Generator):
    """(α, p) avec α >= 2^{1-1/p}"""
    p = float(rng.uniform(1.2, 4.0))
    alpha = float(2 ** (1 - 1 / p) * (1.0 + rng.uniform(0.05, 0.6)))
    return alpha, p
