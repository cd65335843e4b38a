import numpy as np
import pytest

from src.errors import ConfigInvalid, NotOnManifold, OutsideHalfTubes, OutsideTube
from src.geometry.target_manifold import ManifoldPair


def test_signed_distance_sign_convention(spheres):
    assert spheres.signed_dist_component([2.0, 0.0], "+") == pytest.approx(1.0)
    assert spheres.signed_dist_component([1.0, 0.0], "+") == pytest.approx(0.0, abs=1e-15)
    assert spheres.signed_dist_component([0.0, 0.0], "-") == pytest.approx(-1.0)


def test_signed_dist_m_branches(spheres):
    side, value = spheres.signed_dist_m([0.5, 0.0])
    assert side == "+"
    assert value == pytest.approx(-0.5)

    side, value = spheres.signed_dist_m([-1.2, 0.0])
    assert side == "-"
    assert value == pytest.approx(0.2)

    with pytest.raises(OutsideHalfTubes):
        spheres.signed_dist_m([0.0, 5.0])


def test_midset_tie_goes_to_plus(spheres):
    side, value = spheres.signed_dist_m([0.0, 0.0])
    assert side == "+"
    assert value == pytest.approx(-1.0)


def test_project_m_spheres(spheres):
    spheres_wide = ManifoldPair.two_spheres([2.0, 0.0], 1.0, [-2.0, 0.0], 1.0, tube_radius=0.45)
    np.testing.assert_allclose(spheres_wide.project_m([0.5, 0.0]), [1.0, 0.0], atol=1e-12)
    on_m = np.array([2.0 + np.cos(0.3), np.sin(0.3)])
    np.testing.assert_allclose(spheres.project_m(on_m), on_m, atol=1e-12)


def test_project_m_requires_tube(spheres):
    # δ₀ por defecto = 0.25 → tubo de proyección 0.5
    with pytest.raises(OutsideTube):
        spheres.project_m([0.0, 0.0])


def test_project_m_capsule_flat_side(capsules):
    np.testing.assert_allclose(capsules.project_m([2.4, 0.3]), [2.5, 0.3], atol=1e-12)


def test_projection_is_idempotent(spheres):
    rng = np.random.default_rng(7)
    angles = rng.uniform(0, 2 * np.pi, 50)
    radii = rng.uniform(0.6, 1.4, 50)
    u = np.stack([2.0 + radii * np.cos(angles), radii * np.sin(angles)], axis=-1)
    p = spheres.project_m(u)
    np.testing.assert_allclose(spheres.project_m(p), p, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(u - p, axis=-1), spheres.dist_to_m(u), atol=1e-12)


def test_minimal_sets_spheres(spheres):
    minimal = spheres.minimal_sets()
    assert minimal.kind == "point"
    np.testing.assert_allclose(minimal.plus[0], [1.0, 0.0])
    np.testing.assert_allclose(minimal.minus[0], [-1.0, 0.0])
    assert spheres.gap == pytest.approx(2.0)


def test_minimal_sets_capsules(capsules):
    minimal = capsules.minimal_sets()
    assert minimal.kind == "segment"
    np.testing.assert_allclose(sorted(minimal.plus[:, 1]), [-1.0, 1.0])
    np.testing.assert_allclose(minimal.plus[:, 0], [2.5, 2.5])
    np.testing.assert_allclose(minimal.minus[:, 0], [-2.5, -2.5])
    assert capsules.gap == pytest.approx(5.0)


def test_minimal_sets_points():
    pair = ManifoldPair.two_points([1.0], [-1.0])
    minimal = pair.minimal_sets()
    np.testing.assert_allclose(minimal.plus[0], [1.0])
    np.testing.assert_allclose(minimal.minus[0], [-1.0])
    assert pair.gap == pytest.approx(2.0)
    # U± vacíos: distancia con signo siempre ≤ 0
    assert pair.signed_dist_component([0.5], "+") == pytest.approx(-0.5)


def test_is_minimal_pair(spheres, capsules):
    assert spheres.is_minimal_pair([1.0, 0.0], [-1.0, 0.0], tol=1e-9)
    assert capsules.is_minimal_pair([2.5, 0.4], [-2.5, 0.4], tol=1e-9)
    assert not capsules.is_minimal_pair([2.5, 0.4], [-2.5, -0.4], tol=1e-9)
    with pytest.raises(NotOnManifold):
        spheres.is_minimal_pair([1.5, 0.0], [-1.0, 0.0])


def test_distances_triangle_inequality_and_lipschitz(capsules):
    rng = np.random.default_rng(3)
    u = rng.uniform(-5, 5, size=(200, 2))
    v = rng.uniform(-5, 5, size=(200, 2))
    d_plus, d_minus = capsules.distances(u)
    assert np.all(np.abs(d_plus) + np.abs(d_minus) >= capsules.gap - 1e-12)
    gap = np.abs(capsules.signed_dist_component(u, "+") - capsules.signed_dist_component(v, "+"))
    assert np.all(gap <= np.linalg.norm(u - v, axis=-1) + 1e-12)


def test_rejects_invalid_pairs():
    with pytest.raises(ConfigInvalid):
        ManifoldPair.two_spheres([0.5, 0.0], 1.0, [-0.5, 0.0], 1.0)
    with pytest.raises(ConfigInvalid):
        # concéntricas: U₊ ∩ U₋ ≠ ∅
        ManifoldPair.two_spheres([0.0, 0.0], 2.0, [0.0, 0.0], 1.0)
    with pytest.raises(ConfigInvalid):
        ManifoldPair.two_spheres([2.0, 0.0], 1.0, [-2.0, 0.0], 1.0, tube_radius=0.6)


def test_default_tube_radius(spheres):
    assert spheres.tube_radius == pytest.approx(0.25)
    assert spheres.curvature_bound == pytest.approx(1.0)


def test_sample_component_lies_on_well(spheres):
    points = spheres.sample_component("-", 12)
    assert points.shape == (12, 2)
    np.testing.assert_allclose(spheres.signed_dist_component(points, "-"), 0.0, atol=1e-12)


def test_sample_component_beyond_three_dimensions():
    manifold = ManifoldPair.two_spheres([2.0, 0.0, 0.0, 0.0], 1.0, [-2.0, 0.0, 0.0, 0.0], 1.0)
    points = manifold.sample_component("+", 20)
    assert points.shape == (20, 4)
    np.testing.assert_allclose(manifold.signed_dist_component(points, "+"), 0.0, atol=1e-12)
    np.testing.assert_array_equal(points, manifold.sample_component("+", 20))


def test_minimal_partner(spheres, capsules):
    np.testing.assert_allclose(capsules.minimal_partner([2.5, 0.3]), [-2.5, 0.3])
    np.testing.assert_allclose(spheres.minimal_partner([1.0, 0.0]), [-1.0, 0.0])
    assert spheres.minimal_partner([2.0, 1.0]) is None
    # extremo redondeado de la cápsula, fuera de la cara plana
    assert capsules.minimal_partner([3.0, 1.5]) is None
    with pytest.raises(NotOnManifold):
        capsules.minimal_partner([2.0, 0.0])
