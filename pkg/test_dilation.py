"""
Tests de la dilatation sur ℓ_p quotienté
"""
import math

import numpy as np
import pytest

from tools.dilation import (
    BlockVector,
    DilationModel,
    admissibility_threshold,
    admissible_p_bound,
    alpha_p_admissibility,
    apply_G,
    g_lower_bound_check,
    inverse_action_check,
    iota_norm,
    phi_contraction_check,
    phi_image_norm,
    quotient_distance_at,
    quotient_norm,
    two_space_embed,
)
from tools.errors import InadmissibleModel, LowerBoundViolated, NotInCommutant
from tools.sampling import complex_normal, make_rng, random_admissible_pair, random_lower_bounded


def scalar_model(alpha, c=1.0, p=2.0):
    return DilationModel(T=[[c]], c=c, alpha=alpha, p=p)


def test_apply_G_examples():
    model = scalar_model(2.0, c=0.5)
    assert apply_G(model, BlockVector.embed([0.0], 2.0)).norm() == 0.0
    single = apply_G(model, BlockVector.embed([1.0], 2.0))
    assert np.allclose(single.flat(), [1.0, -2.0])
    double = apply_G(model, BlockVector(np.array([1.0, 1.0]), 2.0))
    assert np.allclose(double.flat(), [1.0, -1.0, -2.0])
    assert double.length == 3


@pytest.mark.parametrize("alpha", [math.sqrt(2), 2.0, 3.0])
def test_iota_norm_scalar_closed_form(alpha):
    value = iota_norm(scalar_model(alpha), [1.0])
    assert value == pytest.approx(math.sqrt(1 - alpha ** -2), abs=1e-4)
    assert 1 / alpha * (1 - 1e-4) <= value <= 1.0


def test_sandwich_is_tight_at_threshold():
    alpha = math.sqrt(2)
    assert iota_norm(scalar_model(alpha), [1.0]) == pytest.approx(1 / alpha, abs=1e-4)


def test_quotient_norm_basic_properties():
    model = DilationModel(T=np.diag([1.0, 2.0]), c=1.0, alpha=2.0, p=2.0)
    assert iota_norm(model, [0.0, 0.0]) == 0.0

    z0 = BlockVector(complex_normal(make_rng(0), (3, 2)), 2.0)
    assert quotient_norm(model, apply_G(model, z0)) <= 1e-6

    v = BlockVector(complex_normal(make_rng(1), (2, 2)), 2.0)
    value = quotient_norm(model, v)
    assert value <= v.norm()
    assert quotient_norm(model, v * (3 - 4j)) == pytest.approx(5 * value, rel=1e-8)


def random_models(seed, count, max_dim=3):
    rng = make_rng(seed)
    for _ in range(count):
        dim = int(rng.integers(1, max_dim + 1))
        T, c = random_lower_bounded(rng, dim)
        alpha, p = random_admissible_pair(rng)
        yield DilationModel(T=T, c=c, alpha=alpha, p=p), rng


def test_sandwich_on_random_models():
    for model, rng in random_models(2024, 100):
        x = complex_normal(rng, model.dim)
        value = iota_norm(model, x)
        norm_x = float(np.linalg.norm(x))
        assert value <= norm_x * (1 + 1e-8)
        assert norm_x <= model.alpha * value * (1 + 1e-4)


def test_inadmissible_model_is_refused():
    model = scalar_model(1.2, p=2.0)
    assert not model.admissible
    with pytest.raises(InadmissibleModel):
        iota_norm(model, [1.0])


def test_lower_bound_violation():
    with pytest.raises(LowerBoundViolated):
        DilationModel(T=np.diag([1.0, 0.1]), c=0.5, alpha=2.0, p=2.0)


def test_phi_image_norm_examples():
    model = scalar_model(2.0, c=0.5)
    identity = phi_image_norm(model, [[1.0]], [1.0])
    assert identity.value == pytest.approx(iota_norm(model, [1.0]))

    by_T = phi_image_norm(model, model.T, [1.0])
    assert by_T.value == pytest.approx(0.5 * math.sqrt(3) / 2, abs=1e-4)
    assert by_T.lower == pytest.approx(0.25) and by_T.upper == pytest.approx(0.5)
    assert by_T.passed

    doubled = phi_image_norm(model, [[2.0]], [1.0])
    assert doubled.value == pytest.approx(2 * identity.value, rel=1e-8)


def test_phi_image_norm_for_polynomials_in_T():
    T, c = random_lower_bounded(make_rng(8), 2)
    model = DilationModel(T=T, c=c, alpha=2.0, p=2.0)
    x = np.array([1.0, -0.5j])
    for U in (T, T @ T, np.eye(2) + 0.5 * T):
        assert phi_image_norm(model, U, x).passed


def test_phi_image_norm_for_powers_and_shift_of_T():
    for model, rng in random_models(77, 20):
        T = model.T
        x = complex_normal(rng, model.dim)
        for U in (T, T @ T, T @ T @ T, np.eye(model.dim) + T):
            report = phi_image_norm(model, U, x)
            assert report.passed, (model.p, report.value, report.lower, report.upper)


def test_phi_image_norm_requires_commutant():
    model = DilationModel(T=np.diag([1.0, 2.0]), c=1.0, alpha=2.0, p=2.0)
    with pytest.raises(NotInCommutant):
        phi_image_norm(model, [[0.0, 1.0], [0.0, 0.0]], [1.0, 0.0])


def test_g_lower_bound_examples():
    report = g_lower_bound_check(scalar_model(2.0), samples=10_000, rng=make_rng(4))
    assert report.passed and report.min_ratio >= 1.0
    tight = g_lower_bound_check(scalar_model(math.sqrt(2)), samples=10_000, rng=make_rng(5))
    assert tight.min_ratio >= math.sqrt(2) - 1


def test_inverse_action_check():
    model = scalar_model(2.0)
    report = inverse_action_check(model, BlockVector.embed([1.0], 2.0))
    assert report.passed
    assert report.range_defect <= 1e-6
    # ‖L[e₁]‖ = ‖[e₁]‖ pour le modèle scalaire
    assert report.l_norm == pytest.approx(math.sqrt(0.75), abs=1e-4)
    assert report.l_norm <= report.l_bound

    zero = inverse_action_check(model, BlockVector.embed([0.0], 2.0))
    assert zero.range_defect == zero.inverse_prep_defect == zero.l_norm == 0.0


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_inverse_action_on_seeded_vectors(p):
    rng = make_rng(int(10 * p))
    T, c = random_lower_bounded(rng, 2)
    model = DilationModel(T=T, c=c, alpha=1.2 * admissibility_threshold(p), p=p)
    for k in range(50):
        v = BlockVector(complex_normal(rng, (1 + k % 3, 2)), p)
        report = inverse_action_check(model, v)
        assert report.passed, (k, report)


def test_phi_contraction_check():
    T, c = random_lower_bounded(make_rng(12), 2)
    model = DilationModel(T=T, c=c, alpha=1.8, p=2.0)
    v = BlockVector(complex_normal(make_rng(13), (2, 2)), 2.0)
    assert phi_contraction_check(model, T, v).passed


def test_alpha_p_admissibility_examples():
    assert alpha_p_admissibility(math.sqrt(2), 2.0)
    refused = alpha_p_admissibility(1.3, 2.0)
    assert not refused and refused.agree
    assert refused.counterexample is not None
    assert admissibility_threshold(4.0) == pytest.approx(1.68179, abs=1e-5)


def test_admissible_p_bound():
    assert admissible_p_bound(math.sqrt(2)) == pytest.approx(2.0)
    assert admissible_p_bound(2.5) == math.inf


def test_block_vector_norms():
    blocks = complex_normal(make_rng(21), (4, 3))
    v = BlockVector(blocks, 2.0)
    assert v.norm() == pytest.approx(np.linalg.norm(v.flat()))
    w = BlockVector(blocks, 3.0)
    direct = np.sum(np.linalg.norm(blocks, axis=1) ** 3) ** (1 / 3)
    assert w.norm() == pytest.approx(direct)
    other = BlockVector(complex_normal(make_rng(22), (2, 3)), 3.0)
    assert (w + other).norm() <= w.norm() + other.norm() + 1e-12


def test_two_space_embed_isometric_shift():
    T, report = two_space_embed(0.5 * np.eye(2), 0.5, window=4, samples=100, rng=make_rng(30))
    assert report.passed
    assert report.samples_checked > 0
    assert all(r == pytest.approx(1.0) for r in report.ratios)


def test_two_space_embed_strict_when_crossing_origin():
    window = 3
    T, _ = two_space_embed(np.eye(2), 0.5, window=window, vectors=[])
    z = np.zeros(T.shape[0], dtype=complex)
    z[2 * window: 2 * window + 2] = [1.0, 1.0j]
    _, report = two_space_embed(np.eye(2), 0.5, window=window, vectors=[z])
    assert report.min_ratio == pytest.approx(2.0)


def test_two_space_embed_edge_and_violation():
    window = 3
    T, _ = two_space_embed(np.eye(2), 1.0, window=window, vectors=[])
    z = np.zeros(T.shape[0], dtype=complex)
    z[-2:] = [1.0, 0.0]
    _, report = two_space_embed(np.eye(2), 1.0, window=window, vectors=[z])
    assert report.edge_excluded == 1 and report.samples_checked == 0
    with pytest.raises(LowerBoundViolated):
        two_space_embed(np.diag([1.0, 0.1]), 0.5, window=window)


def test_quotient_distance_nonincreasing_in_support():
    model = scalar_model(2.0)
    v = BlockVector.embed([1.0], 2.0)
    values = [quotient_distance_at(model, v, n)[0] for n in (1, 2, 4, 8, 16)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    assert values[0] <= v.norm() + 1e-12
    assert values[-1] == pytest.approx(iota_norm(model, [1.0]), abs=1e-4)
