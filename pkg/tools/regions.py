"""
Géométrie des domaines complexes (secteurs, bandes, demi-plans, régions K)
et construction des contours de bord orientés.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union, Any

import numpy as np

from config.settings import config
from tools.errors import (
    DegenerateRegion,
    EvaluationFailure,
    InvalidAngles,
    InvalidParameters,
    InvalidRegion,
)
from tools.holomorphic import central_difference

logger = logging.getLogger(__name__)

JOIN_TOLERANCE = 1e-12


# ---------------------------------------------------------------------------
# Régions
# ---------------------------------------------------------------------------

def _check_angle(sigma: float):
    if not (0.0 < sigma < math.pi):
        raise InvalidRegion(f"angle sigma={sigma} must lie in (0, pi)")


@dataclass(frozen=True)
class Sector:
    """Sect_σ = {z ≠ 0 : |arg z| < σ}"""
    sigma: float
    kind = "sector"

    def __post_init__(self):
        _check_angle(self.sigma)

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return (z != 0) & (np.abs(np.angle(z)) < self.sigma)

    def params(self) -> dict:
        return {"sigma": self.sigma}


@dataclass(frozen=True)
class ShiftedSector:
    """a + Sect_σ"""
    a: float
    sigma: float
    kind = "shifted_sector"

    def __post_init__(self):
        _check_angle(self.sigma)

    def contains(self, z):
        return Sector(self.sigma).contains(np.asarray(z, dtype=complex) - self.a)

    def params(self) -> dict:
        return {"a": self.a, "sigma": self.sigma}


@dataclass(frozen=True)
class HalfPlane:
    """HP_α = {Re z > α}"""
    alpha: float
    kind = "half_plane"

    def contains(self, z):
        return np.real(np.asarray(z, dtype=complex)) > self.alpha

    def params(self) -> dict:
        return {"alpha": self.alpha}


@dataclass(frozen=True)
class Strip:
    """strip_β = {|Re z| < β}"""
    beta: float
    kind = "strip"

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidRegion(f"strip half-width beta={self.beta} must be > 0")

    def contains(self, z):
        return np.abs(np.real(np.asarray(z, dtype=complex))) < self.beta

    def params(self) -> dict:
        return {"beta": self.beta}


@dataclass(frozen=True)
class KRegion:
    """K_{σ,a,r} = (a + Sect_σ) ∪ {Re z > r}"""
    sigma: float
    a: float
    r: float
    kind = "k_region"

    def __post_init__(self):
        _check_angle(self.sigma)

    @property
    def degenerate(self) -> bool:
        # le demi-plan est absorbé par le secteur translaté
        return self.r >= self.a

    def contains(self, z):
        return ShiftedSector(self.a, self.sigma).contains(z) | HalfPlane(self.r).contains(z)

    def params(self) -> dict:
        return {"sigma": self.sigma, "a": self.a, "r": self.r}


Region = Union[Sector, ShiftedSector, HalfPlane, Strip, KRegion]
REGION_KINDS = {cls.kind: cls for cls in (Sector, ShiftedSector, HalfPlane, Strip, KRegion)}


def contains(region: Region, z) -> Any:
    """Appartenance à la région OUVERTE (scalaire ou vectorisée)"""
    result = region.contains(z)
    return bool(result) if np.ndim(result) == 0 else result


# ---------------------------------------------------------------------------
# Contours
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RaySegment:
    """vertex + t·e^{iθ}, t ∈ [t0, t1]; parcouru vers l'extérieur si outgoing"""
    vertex: complex
    angle: float
    t0: float
    t1: float
    outgoing: bool

    @property
    def unit(self) -> complex:
        return complex(np.exp(1j * self.angle))

    @property
    def direction(self) -> complex:
        return self.unit if self.outgoing else -self.unit

    def point(self, t):
        return self.vertex + np.asarray(t) * self.unit

    @property
    def start(self) -> complex:
        t = self.t0 if self.outgoing else self.t1
        return complex(self.point(t)) if math.isfinite(t) else complex(math.inf, math.inf)

    @property
    def end(self) -> complex:
        t = self.t1 if self.outgoing else self.t0
        return complex(self.point(t)) if math.isfinite(t) else complex(math.inf, math.inf)

    def clip(self, radius: float) -> Tuple[float, float]:
        """Intervalle de paramètres restreint au disque |z| <= radius"""
        b = (np.conj(self.vertex) * self.unit).real
        disc = b * b - abs(self.vertex) ** 2 + radius ** 2
        if disc <= 0:
            return self.t0, self.t0
        t_out = -b + math.sqrt(disc)
        return self.t0, max(self.t0, min(self.t1, t_out))

    def distance(self, z):
        z = np.asarray(z, dtype=complex)
        t = np.real((z - self.vertex) * np.conj(self.unit))
        t = np.clip(t, self.t0, self.t1)
        return np.abs(z - self.point(t))

    def traversal_points(self, lo: float, hi: float, count: int):
        t = np.linspace(lo, hi, count)
        return self.point(t if self.outgoing else t[::-1])


@dataclass(frozen=True)
class VerticalSegment:
    """x + iy, y ∈ [y0, y1]; parcouru vers le haut si upward"""
    x: float
    y0: float
    y1: float
    upward: bool

    @property
    def direction(self) -> complex:
        return 1j if self.upward else -1j

    def point(self, y):
        return self.x + 1j * np.asarray(y)

    @property
    def start(self) -> complex:
        y = self.y0 if self.upward else self.y1
        return complex(self.x, y) if math.isfinite(y) else complex(math.inf, math.inf)

    @property
    def end(self) -> complex:
        y = self.y1 if self.upward else self.y0
        return complex(self.x, y) if math.isfinite(y) else complex(math.inf, math.inf)

    def clip(self, radius: float) -> Tuple[float, float]:
        if abs(self.x) >= radius:
            return 0.0, 0.0
        h = math.sqrt(radius ** 2 - self.x ** 2)
        lo, hi = max(self.y0, -h), min(self.y1, h)
        return (lo, hi) if lo < hi else (lo, lo)

    def distance(self, z):
        z = np.asarray(z, dtype=complex)
        y = np.clip(np.imag(z), self.y0, self.y1)
        return np.abs(z - self.point(y))

    def traversal_points(self, lo: float, hi: float, count: int):
        y = np.linspace(lo, hi, count)
        return self.point(y if self.upward else y[::-1])


Segment = Union[RaySegment, VerticalSegment]


@dataclass
class Contour:
    """Bord orienté: la région est à GAUCHE du chemin"""
    segments: List[Segment]
    radius: float
    degenerate: bool = False
    region: Optional[Any] = field(default=None, repr=False)

    def distance(self, z):
        z = np.asarray(z, dtype=complex)
        d = np.min(np.stack([seg.distance(z) for seg in self.segments]), axis=0)
        return float(d) if d.ndim == 0 else d

    def sample(self, radius: Optional[float] = None, per_segment: int = 32) -> List[Tuple[complex, complex]]:
        """Points intérieurs (paramètres non extrêmes) et directions de parcours"""
        radius = radius or self.radius
        samples = []
        for seg in self.segments:
            lo, hi = seg.clip(radius)
            if hi <= lo:
                continue
            params = lo + (hi - lo) * (np.arange(per_segment) + 0.5) / per_segment
            for p in params:
                samples.append((complex(seg.point(p)), seg.direction))
        return samples

    def closed_polyline(self, radius: Optional[float] = None, per_segment: int = 4000) -> np.ndarray:
        """Contour tronqué à |z| = radius, refermé par des arcs anti-horaires"""
        radius = radius or self.radius
        pieces = []
        for seg in self.segments:
            lo, hi = seg.clip(radius)
            if hi > lo:
                pieces.append(seg.traversal_points(lo, hi, per_segment))
        if not pieces:
            raise InvalidParameters("truncation radius excludes the whole contour")
        path = []
        for k, piece in enumerate(pieces):
            path.append(piece)
            tail, head = piece[-1], pieces[(k + 1) % len(pieces)][0]
            if abs(tail - head) > 1e-9:
                phi0, phi1 = np.angle(tail), np.angle(head)
                sweep = (phi1 - phi0) % (2 * np.pi)
                arc = radius * np.exp(1j * (phi0 + sweep * np.linspace(0.0, 1.0, per_segment)))
                path.append(arc[1:-1])
        return np.concatenate(path)

    def winding_number(self, point: complex, radius: Optional[float] = None) -> float:
        poly = self.closed_polyline(radius) - point
        closed = np.append(poly, poly[0])
        return float(np.sum(np.angle(closed[1:] / closed[:-1])) / (2 * np.pi))


def boundary_contour(region: Region, truncation_radius: Optional[float] = None) -> Contour:
    """Bord orienté de la région (région à gauche)"""
    radius = truncation_radius if truncation_radius is not None else config.grid.radius
    if radius <= 0:
        raise InvalidParameters("truncation_radius must be > 0")
    inf = math.inf
    degenerate = False

    if isinstance(region, (Sector, ShiftedSector)):
        vertex = complex(getattr(region, "a", 0.0))
        segments = [
            RaySegment(vertex, region.sigma, 0.0, inf, outgoing=False),
            RaySegment(vertex, -region.sigma, 0.0, inf, outgoing=True),
        ]
    elif isinstance(region, HalfPlane):
        segments = [VerticalSegment(region.alpha, -inf, inf, upward=False)]
    elif isinstance(region, Strip):
        segments = [
            VerticalSegment(region.beta, -inf, inf, upward=True),
            VerticalSegment(-region.beta, -inf, inf, upward=False),
        ]
    elif isinstance(region, KRegion):
        if region.sigma <= math.pi / 2:
            raise DegenerateRegion(
                f"k_region needs sigma > pi/2, got {region.sigma}: rays never meet Re z = r"
            )
        vertex = complex(region.a)
        if region.degenerate:
            degenerate = True
            segments = [
                RaySegment(vertex, region.sigma, 0.0, inf, outgoing=False),
                RaySegment(vertex, -region.sigma, 0.0, inf, outgoing=True),
            ]
        else:
            t_star = (region.r - region.a) / math.cos(region.sigma)
            h = t_star * math.sin(region.sigma)
            segments = [
                RaySegment(vertex, region.sigma, t_star, inf, outgoing=False),
                VerticalSegment(region.r, -h, h, upward=False),
                RaySegment(vertex, -region.sigma, t_star, inf, outgoing=True),
            ]
    else:
        raise InvalidRegion(f"unknown region type {type(region).__name__}")

    for left, right in zip(segments, segments[1:]):
        if math.isfinite(left.end.real) and math.isfinite(right.start.real):
            if abs(left.end - right.start) > JOIN_TOLERANCE * (1 + abs(left.end)):
                raise InvalidRegion("contour segments do not join")
            if abs(left.end) >= radius:
                raise InvalidParameters(
                    f"truncation_radius {radius} does not contain the corner {left.end}"
                )

    return Contour(segments=segments, radius=radius, degenerate=degenerate, region=region)


def contour_distance(contour: Contour, z) -> Any:
    return contour.distance(z)


# ---------------------------------------------------------------------------
# Constantes du lemme "folklore"
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FolkloreConstants:
    zone_radius: float
    M: float
    delta: float
    C: float


def folklore_constants(eta: float, epsilon: float, a: float, sigma: float, sigma_prime: float) -> FolkloreConstants:
    """
    Constante C telle que ‖f‖_{H∞₁(HP_{-η})} ≤ C‖f‖_{H∞(K_{σ,a,-η-ε})}.
    δ est fixé au milieu de (0, sin(σ-σ')).
    """
    if not (math.pi / 2 < sigma_prime < sigma < math.pi):
        raise InvalidAngles(
            f"need pi/2 < sigma' < sigma < pi, got sigma={sigma}, sigma'={sigma_prime}"
        )
    if eta <= 0 or epsilon <= 0:
        raise InvalidParameters("eta and epsilon must be > 0")
    zone_radius = max(2 * a, (eta + a) / abs(math.cos(sigma_prime)))
    M = abs(a) + zone_radius
    delta = math.sin(sigma - sigma_prime) / 2
    C = max(4 * M / epsilon, 6 / delta)
    return FolkloreConstants(zone_radius=zone_radius, M=M, delta=delta, C=C)


# ---------------------------------------------------------------------------
# Estimations de normes par grille
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    radius: float = 1e3
    points: int = 512
    ratio: float = 1.1
    r_min: float = 1e-4

    @classmethod
    def from_config(cls) -> "GridSpec":
        return cls(config.grid.radius, config.grid.points, config.grid.ratio, config.grid.r_min)

    def geometric(self) -> np.ndarray:
        count = int(math.floor(math.log(self.radius / self.r_min) / math.log(self.ratio))) + 1
        return self.r_min * self.ratio ** np.arange(count)

    def heights(self) -> np.ndarray:
        geo = self.geometric()
        uniform = np.linspace(-self.radius, self.radius, self.points + 1)
        return np.unique(np.concatenate([-geo, [0.0], geo, uniform]))


def _sector_grid(vertex: float, sigma: float, spec: GridSpec) -> np.ndarray:
    radii = spec.geometric()
    angles = np.linspace(-sigma, sigma, spec.points + 3)[1:-1]
    return (vertex + radii[:, None] * np.exp(1j * angles[None, :])).ravel()


def _half_plane_grid(alpha: float, spec: GridSpec) -> np.ndarray:
    xs = alpha + spec.geometric()
    return (xs[:, None] + 1j * spec.heights()[None, :]).ravel()


def region_grid(region: Region, spec: Optional[GridSpec] = None) -> np.ndarray:
    """Grille déterministe de points de la région ouverte"""
    spec = spec or GridSpec.from_config()
    if isinstance(region, Sector):
        pts = _sector_grid(0.0, region.sigma, spec)
    elif isinstance(region, ShiftedSector):
        pts = _sector_grid(region.a, region.sigma, spec)
    elif isinstance(region, HalfPlane):
        pts = _half_plane_grid(region.alpha, spec)
    elif isinstance(region, Strip):
        xs = np.linspace(-region.beta, region.beta, spec.points + 3)[1:-1]
        pts = (xs[:, None] + 1j * spec.heights()[None, :]).ravel()
    elif isinstance(region, KRegion):
        pts = np.concatenate([_sector_grid(region.a, region.sigma, spec), _half_plane_grid(region.r, spec)])
    else:
        raise InvalidRegion(f"unknown region type {type(region).__name__}")
    return pts[region.contains(pts)]


def _evaluate_on(values_fn, points: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(values_fn(points), dtype=complex)
    except Exception as e:
        raise EvaluationFailure(f"function failed on region grid: {e}") from e
    bad = ~np.isfinite(values)
    if np.any(bad):
        raise EvaluationFailure(f"non-finite value at in-region point {points[bad][0]}")
    return values


def sup_norm_estimate(f, region: Region, grid_spec: Optional[GridSpec] = None, extra_points=None) -> float:
    """Max de |f| sur la grille: borne INFÉRIEURE du vrai sup"""
    points = region_grid(region, grid_spec)
    if extra_points is not None:
        extra = np.atleast_1d(np.asarray(extra_points, dtype=complex))
        points = np.concatenate([points, extra[region.contains(extra)]])
    with np.errstate(all="ignore"):
        values = _evaluate_on(f, points)
    return float(np.max(np.abs(values))) if values.size else 0.0


@dataclass(frozen=True)
class SeminormEstimate:
    value: float
    value_at_double_radius: float
    converged: bool

    def __float__(self) -> float:
        return self.value


def _z_derivative_sup(f, region: Region, spec: GridSpec) -> float:
    points = region_grid(region, spec)
    derivative = getattr(f, "derivative", None)
    with np.errstate(all="ignore"):
        if derivative is None:
            values = _evaluate_on(lambda z: central_difference(f, z), points)
        else:
            values = _evaluate_on(derivative, points)
    return float(np.max(np.abs(points * values))) if points.size else 0.0


def hinf1_seminorm_estimate(f, region: Region, grid_spec: Optional[GridSpec] = None) -> SeminormEstimate:
    """
    Max de |z·f'(z)| sur la grille. La convergence compare les rayons R et 2R
    (écart relatif < 1%); f(z)=z ne converge jamais.
    """
    spec = grid_spec or GridSpec.from_config()
    value = _z_derivative_sup(f, region, spec)
    doubled = _z_derivative_sup(
        f, region, GridSpec(spec.radius * 2, spec.points, spec.ratio, spec.r_min)
    )
    converged = abs(doubled - value) <= 0.01 * max(value, 1e-300) or doubled == value
    if not converged:
        logger.warning(f"⚠️ H∞₁ estimate not converged: {value:.6g} at R, {doubled:.6g} at 2R")
    return SeminormEstimate(value=value, value_at_double_radius=doubled, converged=converged)


# ---------------------------------------------------------------------------
# Échantillonnage hors région (placement des pôles)
# ---------------------------------------------------------------------------

def sample_exterior(region: Region, rng: np.random.Generator, count: int,
                    margin: float = 0.25, scale: float = 20.0) -> np.ndarray:
    """Points strictement hors de la région fermée, à distance >= margin du bord"""
    contour = boundary_contour(region, truncation_radius=max(1e3, 10 * scale))
    anchor = complex(getattr(region, "a", 0.0))
    found: List[complex] = []
    for _ in range(200):
        radii = np.exp(rng.uniform(np.log(0.2), np.log(scale), 4 * count))
        angles = rng.uniform(-np.pi, np.pi, 4 * count)
        candidates = anchor + radii * np.exp(1j * angles)
        keep = (~region.contains(candidates)) & (contour.distance(candidates) >= margin)
        found.extend(candidates[keep].tolist())
        if len(found) >= count:
            return np.asarray(found[:count], dtype=complex)
    raise InvalidRegion("could not place points outside the region")
