"""
Tests du calcul fonctionnel par quadrature de contour
"""
import itertools
import math

import numpy as np
import pytest

import tools.funcalc as funcalc
from tools.errors import NoDecay, NonConvergenceError, SpectrumOnContour, SpectrumOutsideRegion
from tools.funcalc import (
    calculus_bound_probe,
    contour_integral,
    convergence_lemma_check,
    eigen_oracle,
    fc_halfplane,
    fc_kregion,
    fc_region,
    fc_sector,
    fc_strip,
    multiplicativity_check,
    regularizer_sequence,
    resolvent_shift_identity_check,
)
from tools.holomorphic import constant, partial_fractions, rational, resolvent
from tools.operator_core import resolvent as resolvent_matrix, spectral_norm
from tools.regions import HalfPlane, KRegion, Sector, ShiftedSector, Strip, boundary_contour, sup_norm_estimate
from tools.sampling import make_rng, random_diagonalizable, random_sector_spectrum


def inverse_square(shift):
    """z -> 1/(shift+z)²"""
    return rational([1.0], [shift * shift, 2 * shift, 1.0], name=f"1/({shift}+z)^2")


Z_OVER_ONE_PLUS_Z_SQUARED = rational([0.0, 1.0], [1.0, 2.0, 1.0])


def close(result, expected, atol=1e-8):
    return spectral_norm(np.asarray(result) - np.asarray(expected)) <= atol


def test_fc_sector_examples():
    result = fc_sector(Z_OVER_ONE_PLUS_Z_SQUARED, np.diag([1.0, 4.0]), math.pi / 4)
    assert result.converged
    assert close(result.value, np.diag([0.25, 0.16]))
    assert result.nodes_used > 0

    scalar = fc_sector(Z_OVER_ONE_PLUS_Z_SQUARED, [[2.0]], math.pi / 4)
    assert scalar.value[0, 0] == pytest.approx(2 / 9, abs=1e-9)


def test_fc_sector_reproduces_resolvent():
    A = np.diag([1.0, 4.0])
    result = fc_sector(resolvent(-1.0), A, math.pi / 4)
    assert close(result.value, np.diag([-0.5, -0.2]))
    assert close(result.value, resolvent_matrix(A, -1.0))


def test_fc_sector_contour_independence():
    A = random_diagonalizable(make_rng(5), random_sector_spectrum(make_rng(6), 3, math.pi / 6))
    first = fc_sector(Z_OVER_ONE_PLUS_Z_SQUARED, A, math.pi / 4).value
    second = fc_sector(Z_OVER_ONE_PLUS_Z_SQUARED, A, math.pi / 3).value
    assert spectral_norm(first - second) <= 2e-8


def test_fc_sector_matches_eigen_oracle():
    rng = make_rng(42)
    for _ in range(5):
        A = random_diagonalizable(rng, random_sector_spectrum(rng, 3, math.pi / 5))
        result = fc_sector(Z_OVER_ONE_PLUS_Z_SQUARED, A, math.pi / 3)
        cond = np.linalg.cond(np.linalg.eig(A)[1])
        assert close(result.value, eigen_oracle(Z_OVER_ONE_PLUS_Z_SQUARED, A), atol=max(1e-8, 1e-8 * cond))


def test_fc_requires_decay():
    with pytest.raises(NoDecay):
        fc_sector(constant(1.0), np.diag([1.0, 2.0]), math.pi / 4)


def test_fc_rejects_spectrum_on_contour():
    with pytest.raises(SpectrumOnContour):
        fc_halfplane(inverse_square(2.0), [[-0.5]], 0.5)
    with pytest.raises(SpectrumOnContour):
        fc_sector(Z_OVER_ONE_PLUS_Z_SQUARED, np.diag([0.0, 1.0]), math.pi / 4)


def test_fc_strip_examples():
    f = inverse_square(6.0)
    result = fc_strip(f, np.diag([0.1, -0.1]), 1.0)
    assert close(result.value, np.diag([f(0.1), f(-0.1)]))
    zero = fc_strip(f, [[0.0]], 1.0)
    assert zero.value[0, 0] == pytest.approx(1 / 36, abs=1e-10)


def test_fc_strip_rejects_spectrum_outside():
    with pytest.raises(SpectrumOutsideRegion):
        fc_strip(inverse_square(6.0), np.diag([2.0, -2.0]), 1.0)


def test_fc_halfplane_examples():
    scalar = fc_halfplane(inverse_square(2.0), [[1.0]], 0.5)
    assert scalar.value[0, 0] == pytest.approx(1 / 9, abs=1e-10)
    diagonal = fc_halfplane(inverse_square(3.0), np.diag([1.0, 2.0]), 0.5)
    assert close(diagonal.value, np.diag([1 / 16, 1 / 25]))


def test_strip_and_halfplane_agree():
    f = inverse_square(6.0)
    B = np.array([[0.1, 0.2], [0.0, 0.3]])
    strip = fc_strip(f, B, 1.0).value
    half_plane = fc_halfplane(f, B, 0.5).value
    assert spectral_norm(strip - half_plane) <= 2e-8


def test_fc_kregion_examples():
    f = inverse_square(5.0)
    A = np.diag([1.0, 2.0 + 3.0j])
    result = fc_kregion(f, A, 0.75 * math.pi, 0.0, 0.5)
    assert close(result.value, np.diag([1 / 36, 1 / (7 + 3j) ** 2]))

    mu = -3.0
    scalar = fc_kregion(resolvent(mu), [[1.0]], 0.75 * math.pi, 0.0, 0.5)
    assert scalar.value[0, 0] == pytest.approx(1 / (mu - 1), abs=1e-9)


def test_fc_kregion_degenerate_matches_shifted_sector():
    f = inverse_square(5.0)
    A = np.diag([1.0, 2.0])
    degenerate = fc_kregion(f, A, 0.75 * math.pi, -1.0, 0.5)
    shifted = fc_region(f, A, ShiftedSector(-1.0, 0.75 * math.pi))
    assert boundary_contour(KRegion(0.75 * math.pi, -1.0, -0.5)).degenerate
    assert spectral_norm(degenerate.value - shifted.value) <= 1e-12


def test_quadrature_gives_up_on_impossible_tolerance():
    with pytest.raises(NonConvergenceError):
        fc_sector(Z_OVER_ONE_PLUS_Z_SQUARED, np.diag([1.0, 4.0]), math.pi / 4, tol=1e-30)


def test_contour_integral_of_scalar_kernel():
    contour = boundary_contour(HalfPlane(0.0), truncation_radius=1e12)
    kernel = lambda lam: (1.0 / (lam - 1.0) ** 2 / (lam + 1.0))[:, None, None]
    result = contour_integral(kernel, contour, tol=1e-10)
    # résidu en 1 de 1/((λ-1)²(λ+1)): -1/4
    assert result.value[0, 0] == pytest.approx(-0.25, abs=1e-9)


def test_regularizer_values():
    assert regularizer_sequence(1, 1.0)(0.0) == pytest.approx(2 / 9)
    values = [abs(regularizer_sequence(n, 1.0)(0.0) - 1) for n in (1, 10, 100, 1000)]
    assert values == sorted(values, reverse=True)
    assert values[-1] < 1e-2
    assert abs(regularizer_sequence(1000, 1.0, verbatim=True)(1.0)) < 1e-2


def test_regularizer_is_uniformly_bounded():
    for n in (1, 8, 64):
        tau = regularizer_sequence(n, 0.5)
        assert sup_norm_estimate(tau, HalfPlane(-0.5)) <= 1 + 1e-12


def test_regularizer_derivative_matches_central_difference():
    tau = regularizer_sequence(4, 0.5)
    z = np.array([0.3 + 0.2j, 2.0 - 1.0j, -0.2 + 5.0j])
    h = 1e-6
    numeric = (tau(z + h) - tau(z - h)) / (2 * h)
    assert np.allclose(tau.derivative(z), numeric, atol=1e-6)


def test_convergence_lemma_identity_target():
    report = convergence_lemma_check(constant(1.0), np.diag([1.0, 2.0]), 0.5, tol=0.15)
    assert report.monotone
    assert report.passed
    assert math.isfinite(report.uniform_constant)


def test_convergence_lemma_bounded_function():
    f = rational([1.0, 1.0], [2.0, 1.0])
    report = convergence_lemma_check(f, [[1.0]], 0.5, tol=0.1)
    assert report.passed
    assert report.final_error < report.errors[0]


def test_multiplicativity_examples():
    A = np.diag([1.0, 4.0])
    f = resolvent(-1.0)
    assert multiplicativity_check(f, f, A, Sector(math.pi / 4)) <= 1e-8
    assert multiplicativity_check(inverse_square(3.0), resolvent(-2.0), [[1.5]], HalfPlane(-0.5)) <= 1e-9


def test_resolvent_shift_identity():
    f = inverse_square(5.0)
    report = resolvent_shift_identity_check(f, np.diag([1.0, 2.0]), 0.5)
    assert report.passed
    assert report.defect <= 1e-6
    trivial = resolvent_shift_identity_check(f, np.diag([1.0, 2.0]), 0.0)
    assert trivial.defect <= 1e-12
    scalar = resolvent_shift_identity_check(f, [[1.0]], 0.5)
    assert scalar.lhs[0, 0] == pytest.approx(1 / 36, abs=1e-8)
    assert scalar.rhs[0, 0] == pytest.approx(1 / 36, abs=1e-6)


def test_function_catalog_poles_lie_outside():
    region = Sector(math.pi / 2)
    catalog = funcalc.test_function_catalog(region, make_rng(9), count=20)
    assert len(catalog) == 20
    assert all(f.decay_exponent > 0 for f in catalog)
    inside = np.array([1.0, 1 + 1j, 5 - 2j])
    for f in catalog:
        assert np.all(np.isfinite(f(inside)))


def test_calculus_bound_probe_scalar_and_normal():
    scalar = calculus_bound_probe([[1.0]], Sector(math.pi / 2), rng=make_rng(1))
    assert scalar.value <= 1 + 1e-6
    assert len(scalar.ratios) == 20

    normal = calculus_bound_probe(np.diag([1.0, 2.0 + 1.0j]), Sector(0.75 * math.pi), rng=make_rng(2))
    assert normal.value <= 1 + 1e-6


def test_calculus_bound_probe_jordan_block():
    bound = calculus_bound_probe(np.array([[1.0, 10.0], [0.0, 1.0]]), Sector(math.pi / 2), rng=make_rng(3))
    assert math.isfinite(bound.value)
    assert bound.value > 0


def test_decay_constant_of_constant_function():
    assert funcalc.decay_constant(constant(1.0), Sector(math.pi / 2)) == pytest.approx(2.0)


def test_admissible_contour_region_sits_between():
    A = np.diag([1.0, 2 * np.exp(1j * math.pi / 4)])
    inner = funcalc.admissible_contour_region(A, Sector(3 * math.pi / 4))
    assert isinstance(inner, Sector)
    assert inner.sigma == pytest.approx(math.pi / 2)
    half = funcalc.admissible_contour_region(np.diag([1.0, 3.0]), HalfPlane(0.0))
    assert half.alpha == pytest.approx(0.5)


def sector_spectrum(rng, dim):
    return random_sector_spectrum(rng, dim, math.pi / 5)


def right_spectrum(rng, dim):
    return rng.uniform(0.2, 3.0, dim) + 1j * rng.uniform(-3.0, 3.0, dim)


def strip_spectrum(rng, dim):
    return rng.uniform(-0.5, 0.5, dim) + 1j * rng.uniform(-3.0, 3.0, dim)


# spectre, région du contour, calcul, μ hors région
FC_VARIANTS = {
    "sector": (sector_spectrum, Sector(math.pi / 3), lambda f, A: fc_sector(f, A, math.pi / 3), -1.0),
    "strip": (strip_spectrum, Strip(1.0), lambda f, A: fc_strip(f, A, 1.0), 3.0),
    "half_plane": (right_spectrum, HalfPlane(-0.5), lambda f, A: fc_halfplane(f, A, 0.5), -2.0),
    "k_region": (
        right_spectrum,
        KRegion(0.75 * math.pi, 0.0, -0.5),
        lambda f, A: fc_kregion(f, A, 0.75 * math.pi, 0.0, 0.5),
        -3.0,
    ),
}


@pytest.mark.parametrize("variant", sorted(FC_VARIANTS))
def test_fc_variants_match_eigen_oracle(variant):
    spectrum, region, compute, _ = FC_VARIANTS[variant]
    rng = make_rng(100)
    catalog = funcalc.test_function_catalog(region, rng, count=10)
    for k in range(50):
        A = random_diagonalizable(rng, spectrum(rng, 2 + k % 7))
        f = catalog[k % len(catalog)]
        oracle = eigen_oracle(f, A)
        result = compute(f, A)
        assert spectral_norm(result.value - oracle) <= 1e-6 * spectral_norm(oracle) + 1e-9, (variant, k, f.name)


@pytest.mark.parametrize("variant", sorted(FC_VARIANTS))
def test_fc_variants_reproduce_resolvent(variant):
    spectrum, _, compute, mu = FC_VARIANTS[variant]
    rng = make_rng(200)
    for k in range(20):
        A = random_diagonalizable(rng, spectrum(rng, 2 + k % 4))
        expected = resolvent_matrix(A, mu)
        result = compute(resolvent(mu), A)
        assert spectral_norm(result.value - expected) <= 1e-8 * max(1.0, spectral_norm(expected))


def test_strip_and_halfplane_agree_on_random_matrices():
    rng = make_rng(300)
    for k in range(20):
        B = random_diagonalizable(rng, rng.uniform(-0.3, 0.5, 3) + 1j * rng.uniform(-2.0, 2.0, 3))
        poles = -rng.uniform(1.5, 4.0, 2) + 1j * rng.uniform(-2.0, 2.0, 2)
        if k % 2:
            f = partial_fractions(poles, rng.normal(size=2) + 1j * rng.normal(size=2))
        else:
            f = resolvent(poles[0], power=1 + k % 3)
        strip = fc_strip(f, B, 1.0).value
        half_plane = fc_halfplane(f, B, 0.5).value
        assert spectral_norm(strip - half_plane) <= 1e-6


def test_resolvent_shift_identity_on_random_matrices():
    rng = make_rng(400)
    catalog = funcalc.test_function_catalog(KRegion(0.75 * math.pi, 0.0, -0.5), rng, count=10)
    for k in range(10):
        A = random_diagonalizable(rng, right_spectrum(rng, 2 + k % 3))
        report = resolvent_shift_identity_check(catalog[k], A, float(rng.uniform(0.1, 1.0)))
        assert report.passed, (k, report.defect)


@pytest.mark.parametrize("region", [Sector(math.pi / 3), HalfPlane(-0.5), KRegion(0.75 * math.pi, 0.0, -0.5)],
                         ids=["sector", "half_plane", "k_region"])
def test_multiplicativity_over_catalog_pairs(region):
    rng = make_rng(500)
    spectrum = sector_spectrum if isinstance(region, Sector) else right_spectrum
    A = random_diagonalizable(rng, spectrum(rng, 3))
    catalog = funcalc.test_function_catalog(region, rng, count=8)
    for f, g in itertools.combinations_with_replacement(catalog, 2):
        assert multiplicativity_check(f, g, A, region) <= 1e-8, (f.name, g.name)


@pytest.mark.parametrize("tol", [1e-4, 1e-6, 1e-8])
def test_halving_tolerance_stays_within_old_tolerance(tol):
    A = random_diagonalizable(make_rng(600), sector_spectrum(make_rng(601), 4))
    coarse = fc_sector(Z_OVER_ONE_PLUS_Z_SQUARED, A, math.pi / 3, tol=tol).value
    fine = fc_sector(Z_OVER_ONE_PLUS_Z_SQUARED, A, math.pi / 3, tol=tol / 2).value
    assert spectral_norm(coarse - fine) <= tol
