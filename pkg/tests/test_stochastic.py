import numpy as np
import pytest
from scipy import stats

import dimlab as dl
from dimlab.errors import SizeError
from dimlab.stochastic import GRAM_TOL


def test_gram_deviation_various_shapes():
    worst = 0.0
    for i, (d, m) in enumerate([(2, 1), (3, 2), (5, 5), (8, 3), (20, 7)]):
        basis = dl.sample_grassmannian(d, m, seed=1, index=(i,))
        worst = max(worst, basis.gram_deviation())
        assert basis.matrix.shape == (d, m)
    assert worst <= GRAM_TOL


def test_grassmannian_errors():
    with pytest.raises(ValueError):
        dl.sample_grassmannian(2, 3, seed=0)
    with pytest.raises(ValueError):
        dl.sample_grassmannian(2, 0, seed=0)


def test_grassmannian_reproducible():
    a = dl.sample_grassmannian(4, 2, seed=9, index=(3,))
    b = dl.sample_grassmannian(4, 2, seed=9, index=(3,))
    assert np.array_equal(a.matrix, b.matrix)
    c = dl.sample_grassmannian(4, 2, seed=9, index=(4,))
    assert not np.array_equal(a.matrix, c.matrix)


def test_full_space_projection_is_isometric(corners):
    basis = dl.sample_grassmannian(2, 2, seed=0)
    proj = dl.project(corners, basis)
    d0 = dl.diameter(corners)
    assert dl.diameter(proj) == pytest.approx(d0)


def test_direction_uniformity_chi_square():
    angles = np.empty(10_000)
    for i in range(10_000):
        v = dl.sample_grassmannian(2, 1, seed=42, index=(i,)).matrix[:, 0]
        angles[i] = np.arctan2(v[1], v[0]) % np.pi
    hist, _ = np.histogram(angles, bins=36, range=(0.0, np.pi))
    _, p = stats.chisquare(hist)
    assert p > 0.001


def test_project_examples():
    e = dl.PointCloud.from_array([[3.0, 4.0]], 1e-6)
    x_axis = dl.SubspaceBasis(matrix=np.array([[1.0], [0.0]]), seed_info=())
    proj = dl.project(e, x_axis)
    assert proj.points[0, 0] == 3.0
    assert proj.resolution == e.resolution
    # projecting the projected coordinates again with the same 1-d identity basis
    ident = dl.SubspaceBasis(matrix=np.array([[1.0]]), seed_info=())
    again = dl.project(proj, ident)
    assert np.array_equal(again.points, proj.points)


def test_projection_contracts_distances(cc5):
    rng = np.random.default_rng(0)
    basis = dl.sample_grassmannian(2, 1, seed=5)
    proj = dl.project(cc5, basis)
    idx = rng.integers(0, cc5.size, size=(50, 2))
    for i, j in idx:
        orig = np.linalg.norm(cc5.points[i] - cc5.points[j])
        new = np.linalg.norm(proj.points[i] - proj.points[j])
        assert new <= orig + 1e-12
    assert dl.diameter(proj) <= dl.diameter(cc5) + 1e-12


def test_project_dimension_mismatch(cc5):
    basis = dl.sample_grassmannian(3, 1, seed=0)
    with pytest.raises(ValueError):
        dl.project(cc5, basis)


def test_basis_validation():
    with pytest.raises(ValueError):
        dl.SubspaceBasis(matrix=np.array([[1.0], [1.0]]), seed_info=())


# ---------------------------------------------------------------------------
# Fractional Brownian images
# ---------------------------------------------------------------------------

def test_fbm_zero_is_pinned():
    cloud = dl.PointCloud.from_array([0.0, 0.3, 1.0], 0.3)
    sample = dl.sample_fbm(cloud, 0.5, 2, seed=3)
    assert np.all(sample.image.points[0] == 0.0)
    assert sample.image.size == cloud.size
    assert sample.image.dim == 2


def test_fbm_variance_at_unit_norm():
    cloud = dl.PointCloud.from_array([0.0, 1.0], 1.0)
    alpha = 0.7
    sampler = dl.FbmSampler(cloud, alpha)
    vals = np.array([sampler.sample(1, 17, index=(i,)).image.points[1, 0]
                     for i in range(4000)])
    assert abs(vals.var() - 1.0) < 0.08  # C(x,x) = |x|**(2a) = 1


def test_fbm_increment_variance():
    pts = np.array([0.0, 0.1, 0.35, 0.8])
    cloud = dl.PointCloud.from_array(pts, 0.1)
    alpha = 0.6
    sampler = dl.FbmSampler(cloud, alpha)
    vals = np.array([sampler.sample(1, 5, index=(i,)).image.points[:, 0]
                     for i in range(6000)])
    inc = vals[:, 1] - vals[:, 3]
    target = abs(pts[1] - pts[3]) ** (2 * alpha)
    assert abs(inc.var() / target - 1.0) < 0.06


def test_fbm_coordinates_independent():
    cloud = dl.PointCloud.from_array([0.0, 0.5, 1.0], 0.5)
    sampler = dl.FbmSampler(cloud, 0.5)
    vals = np.array([sampler.sample(2, 23, index=(i,)).image.points[2]
                     for i in range(10_000)])
    corr = np.corrcoef(vals[:, 0], vals[:, 1])[0, 1]
    assert abs(corr) <= 0.04


def test_fbm_caps_and_validation(interval14):
    with pytest.raises(SizeError):
        dl.FbmSampler(interval14, 0.5)  # 16385 points above the cap
    small = dl.PointCloud.from_array([0.0, 1.0], 1.0)
    with pytest.raises(ValueError):
        dl.FbmSampler(small, 1.5)
    with pytest.raises(ValueError):
        dl.sample_fbm(small, 0.5, 0, seed=0)


def test_fbm_reproducible_and_resolution_heuristic():
    cloud = dl.unit_interval_grid(2.0 ** -6)
    a = dl.sample_fbm(cloud, 0.5, 1, seed=11)
    b = dl.sample_fbm(cloud, 0.5, 1, seed=11)
    assert np.array_equal(a.image.points, b.image.points)
    assert a.image.resolution <= cloud.resolution ** 0.5 + 1e-15
