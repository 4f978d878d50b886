"""
Tests de la géométrie des régions et des contours
"""
import math

import numpy as np
import pytest

from tools.errors import DegenerateRegion, EvaluationFailure, InvalidAngles, InvalidRegion
from tools.holomorphic import HoloFunction, constant, rational
from tools.regions import (
    GridSpec,
    HalfPlane,
    KRegion,
    RaySegment,
    Sector,
    ShiftedSector,
    Strip,
    VerticalSegment,
    boundary_contour,
    contains,
    contour_distance,
    folklore_constants,
    hinf1_seminorm_estimate,
    sample_exterior,
    sup_norm_estimate,
)
from tools.sampling import make_rng

REGIONS = [
    Sector(math.pi / 4),
    Sector(0.9 * math.pi),
    ShiftedSector(-1.0, math.pi / 3),
    HalfPlane(-1.0),
    Strip(0.7),
    KRegion(0.75 * math.pi, 1.0, -2.0),
    KRegion(0.6 * math.pi, 0.0, 5.0),
]

COARSE = GridSpec(radius=1e3, points=128, ratio=1.2, r_min=1e-4)


def test_contains_examples():
    assert contains(Sector(math.pi / 2), 1.0)
    assert not contains(Sector(math.pi / 2), -1.0)
    assert not contains(KRegion(0.75 * math.pi, 0.0, 5.0), -1 + 0.5j)
    assert not contains(Sector(math.pi / 2), 0.0)
    assert contains(Strip(1.0), 0.5 + 100j)
    assert not contains(HalfPlane(0.0), 0.0)


def test_invalid_parameters_rejected():
    with pytest.raises(InvalidRegion):
        Sector(math.pi)
    with pytest.raises(InvalidRegion):
        Strip(0.0)


def test_kregion_membership_is_union():
    rng = make_rng(7)
    z = rng.uniform(-10, 10, 10_000) + 1j * rng.uniform(-10, 10, 10_000)
    region = KRegion(0.7 * math.pi, 1.5, -1.0)
    expected = ShiftedSector(1.5, 0.7 * math.pi).contains(z) | HalfPlane(-1.0).contains(z)
    assert np.array_equal(region.contains(z), expected)


def test_half_plane_contour_is_single_vertical_line():
    contour = boundary_contour(HalfPlane(-1.0))
    assert len(contour.segments) == 1
    seg = contour.segments[0]
    assert isinstance(seg, VerticalSegment)
    assert seg.x == -1.0
    # parcours vers le bas: le demi-plan reste à gauche
    assert not seg.upward


def test_sector_contour_orientation():
    contour = boundary_contour(Sector(math.pi / 4))
    upper, lower = contour.segments
    assert isinstance(upper, RaySegment) and isinstance(lower, RaySegment)
    assert upper.angle == pytest.approx(math.pi / 4) and not upper.outgoing
    assert lower.angle == pytest.approx(-math.pi / 4) and lower.outgoing
    assert upper.end == 0 and lower.start == 0


def test_kregion_intersection_parameter():
    contour = boundary_contour(KRegion(0.75 * math.pi, 1.0, -2.0))
    upper, vertical, lower = contour.segments
    t_star = 3 * math.sqrt(2)
    assert upper.t0 == pytest.approx(t_star)
    assert lower.t0 == pytest.approx(t_star)
    assert vertical.x == -2.0
    assert vertical.y1 == pytest.approx(3.0)
    assert not contour.degenerate


def test_kregion_degenerate_cases():
    contour = boundary_contour(KRegion(0.75 * math.pi, 0.0, 5.0))
    assert contour.degenerate
    assert len(contour.segments) == 2
    with pytest.raises(DegenerateRegion):
        boundary_contour(KRegion(math.pi / 3, 1.0, -2.0))


@pytest.mark.parametrize("region", REGIONS, ids=lambda r: r.kind)
def test_region_lies_left_of_contour(region):
    contour = boundary_contour(region, truncation_radius=200.0)
    for point, direction in contour.sample(per_segment=16):
        inward = 1j * direction
        eps = 1e-6 * (1 + abs(point))
        assert contains(region, point + eps * inward)
        assert not contains(region, point - eps * inward)


@pytest.mark.parametrize("region", REGIONS, ids=lambda r: r.kind)
def test_winding_number_is_one_inside(region):
    radius = 100.0
    contour = boundary_contour(region, truncation_radius=radius)
    rng = make_rng(3)
    z = rng.uniform(-50, 50, 4000) + 1j * rng.uniform(-50, 50, 4000)
    z = z[(np.abs(z) < radius / 2) & region.contains(z) & (contour.distance(z) > 1e-2)]
    assert z.size > 0
    for point in z[:10]:
        assert contour.winding_number(point) == pytest.approx(1.0, abs=1e-6)


def test_winding_number_is_zero_outside():
    region = Sector(math.pi / 4)
    contour = boundary_contour(region, truncation_radius=100.0)
    assert contour.winding_number(-5.0) == pytest.approx(0.0, abs=1e-6)


def test_folklore_constants_example():
    constants = folklore_constants(1.0, 0.5, 1.0, 0.75 * math.pi, 0.625 * math.pi)
    assert constants.zone_radius == pytest.approx(5.22625, rel=1e-5)
    assert constants.M == pytest.approx(6.22625, rel=1e-5)
    assert constants.delta == pytest.approx(0.19134, rel=1e-4)
    assert constants.C == pytest.approx(49.81, rel=1e-3)


def test_folklore_constants_monotone_in_epsilon():
    first = folklore_constants(1.0, 1.0, 0.0, 0.75 * math.pi, 0.6 * math.pi)
    doubled = folklore_constants(1.0, 2.0, 0.0, 0.75 * math.pi, 0.6 * math.pi)
    assert doubled.C <= first.C


def test_folklore_constants_nonpositive_a_branch():
    constants = folklore_constants(1.0, 0.5, -0.5, 0.75 * math.pi, 0.6 * math.pi)
    assert constants.zone_radius == pytest.approx(0.5 / abs(math.cos(0.6 * math.pi)))


def test_folklore_constants_angle_order():
    with pytest.raises(InvalidAngles):
        folklore_constants(1.0, 0.5, 1.0, 0.6 * math.pi, 0.7 * math.pi)


def test_sup_norm_estimates():
    assert sup_norm_estimate(constant(1.0), Sector(math.pi / 3), COARSE) == pytest.approx(1.0)
    f = rational([1.0], [1.0, 1.0])
    assert sup_norm_estimate(f, HalfPlane(0.0)) == pytest.approx(1.0, abs=1e-3)
    g = rational([0.0, 1.0], [1.0, 2.0, 1.0])
    assert sup_norm_estimate(g, Sector(math.pi / 4)) == pytest.approx(0.25, abs=1e-3)


def test_sup_norm_evaluation_failure():
    def broken(z):
        raise RuntimeError("boom")

    with pytest.raises(EvaluationFailure):
        sup_norm_estimate(HoloFunction(broken, decay_exponent=1.0), Strip(1.0), COARSE)


def test_hinf1_seminorm_estimates():
    const = hinf1_seminorm_estimate(constant(2.0), HalfPlane(0.0), COARSE)
    assert const.value == 0.0 and const.converged

    f = rational([1.0], [1.0, 1.0])
    estimate = hinf1_seminorm_estimate(f, HalfPlane(-0.5))
    assert estimate.value == pytest.approx(2.0, rel=1e-3)
    assert estimate.converged

    identity = hinf1_seminorm_estimate(rational([0.0, 1.0], [1.0]), HalfPlane(0.0), COARSE)
    assert not identity.converged
    assert identity.value_at_double_radius > identity.value


def test_sample_exterior_stays_outside():
    region = KRegion(0.75 * math.pi, 1.0, -1.5)
    points = sample_exterior(region, make_rng(11), 50)
    assert points.size == 50
    assert not np.any(region.contains(points))


def test_contour_distance():
    line = boundary_contour(HalfPlane(0.0), 100.0)
    assert contour_distance(line, 3 + 1j) == pytest.approx(3.0)
    sector = boundary_contour(Sector(math.pi / 4), 100.0)
    assert contour_distance(sector, 2.0) == pytest.approx(math.sqrt(2.0))
    assert contour_distance(sector, 0.0) == pytest.approx(0.0)
