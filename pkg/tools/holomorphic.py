"""
Fonctions holomorphes manipulées par le calcul fonctionnel
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Any

import numpy as np
from numpy.polynomial import polynomial as P

logger = logging.getLogger(__name__)

ComplexFn = Callable[[Any], Any]


def central_difference(evaluator: ComplexFn, z):
    """Dérivée par différence centrée, pas h = 1e-6·(1+|z|)"""
    z = np.asarray(z, dtype=complex)
    h = 1e-6 * (1.0 + np.abs(z))
    return (evaluator(z + h) - evaluator(z - h)) / (2.0 * h)


@dataclass(frozen=True)
class HoloFunction:
    """
    Handle d'une fonction holomorphe: valeur, dérivée optionnelle,
    exposant de décroissance ε (0 = bornée seulement) et domaine.
    """
    evaluator: ComplexFn
    derivative_evaluator: Optional[ComplexFn] = None
    decay_exponent: float = 0.0
    domain: Optional[Any] = None
    name: str = "f"

    def __post_init__(self):
        if self.decay_exponent < 0:
            raise ValueError("decay_exponent must be >= 0")

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=complex)
        try:
            values = np.asarray(self.evaluator(z_arr), dtype=complex)
            if values.shape != z_arr.shape:
                values = np.broadcast_to(values, z_arr.shape).copy()
        except (TypeError, ValueError):
            # évaluateur scalaire seulement
            flat = [complex(self.evaluator(complex(w))) for w in z_arr.ravel()]
            values = np.asarray(flat, dtype=complex).reshape(z_arr.shape)
        if np.ndim(z) == 0:
            return complex(values)
        return values

    def derivative(self, z):
        if self.derivative_evaluator is not None:
            z_arr = np.asarray(z, dtype=complex)
            values = np.broadcast_to(
                np.asarray(self.derivative_evaluator(z_arr), dtype=complex), z_arr.shape
            )
            return complex(values) if np.ndim(z) == 0 else values.copy()
        values = central_difference(self.__call__, z)
        return complex(values) if np.ndim(z) == 0 else values

    def with_domain(self, domain) -> "HoloFunction":
        return replace(self, domain=domain)

    def __mul__(self, other: "HoloFunction") -> "HoloFunction":
        if not isinstance(other, HoloFunction):
            return NotImplemented
        f, g = self, other

        def product(z):
            return f(z) * g(z)

        def product_derivative(z):
            return f.derivative(z) * g(z) + f(z) * g.derivative(z)

        return HoloFunction(
            evaluator=product,
            derivative_evaluator=product_derivative,
            decay_exponent=f.decay_exponent + g.decay_exponent,
            domain=f.domain if f.domain is not None else g.domain,
            name=f"({f.name})*({g.name})",
        )


def constant(value: complex) -> HoloFunction:
    value = complex(value)
    return HoloFunction(
        evaluator=lambda z: np.full(np.shape(z), value, dtype=complex),
        derivative_evaluator=lambda z: np.zeros(np.shape(z), dtype=complex),
        decay_exponent=0.0,
        name=f"const({value})",
    )


def rational(num: Sequence[complex], den: Sequence[complex], name: str = "rational") -> HoloFunction:
    """
    Fraction rationnelle num/den, coefficients en puissances croissantes.
    L'exposant de décroissance est deg(den) - deg(num) (borné à 0).
    """
    num = np.trim_zeros(np.asarray(num, dtype=complex), "b")
    den = np.trim_zeros(np.asarray(den, dtype=complex), "b")
    if den.size == 0:
        raise ValueError("denominator is identically zero")
    if num.size == 0:
        return constant(0.0)
    dnum = P.polyder(num) if num.size > 1 else np.zeros(1, dtype=complex)
    dden = P.polyder(den) if den.size > 1 else np.zeros(1, dtype=complex)

    def evaluate(z):
        return P.polyval(z, num) / P.polyval(z, den)

    def evaluate_derivative(z):
        q = P.polyval(z, den)
        return (P.polyval(z, dnum) * q - P.polyval(z, num) * P.polyval(z, dden)) / q ** 2

    decay = float(max(0, (den.size - 1) - (num.size - 1)))
    return HoloFunction(evaluate, evaluate_derivative, decay, None, name)


def resolvent(mu: complex, power: int = 1) -> HoloFunction:
    """z -> (mu - z)^(-power)"""
    mu = complex(mu)
    if power < 1:
        raise ValueError("power must be >= 1")
    return HoloFunction(
        evaluator=lambda z: (mu - np.asarray(z, dtype=complex)) ** (-power),
        derivative_evaluator=lambda z: power * (mu - np.asarray(z, dtype=complex)) ** (-power - 1),
        decay_exponent=float(power),
        name=f"resolvent({mu}, {power})",
    )


def partial_fractions(poles: Sequence[complex], residues: Sequence[complex]) -> HoloFunction:
    """Σ r_k / (z - p_k): décroissance en |z|^-1"""
    poles = np.asarray(poles, dtype=complex)
    residues = np.asarray(residues, dtype=complex)
    if poles.shape != residues.shape or poles.ndim != 1 or poles.size == 0:
        raise ValueError("poles and residues must be non-empty vectors of equal length")

    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        return np.sum(residues / (z[..., None] - poles), axis=-1)

    def evaluate_derivative(z):
        z = np.asarray(z, dtype=complex)
        return -np.sum(residues / (z[..., None] - poles) ** 2, axis=-1)

    return HoloFunction(evaluate, evaluate_derivative, 1.0, None, f"partial_fractions[{poles.size}]")
