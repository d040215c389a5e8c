import json

import numpy as np
import pytest

import dimlab as dl
from dimlab.errors import SizeError


def test_sequence_set_small_values():
    cloud = dl.gen_sequence_set(1.0, 3)
    assert sorted(cloud.points[:, 0]) == pytest.approx([0.0, 1 / 3, 0.5, 1.0])
    cloud = dl.gen_sequence_set(2.0, 2)
    assert sorted(cloud.points[:, 0]) == pytest.approx([0.0, 0.25, 1.0])


def test_sequence_set_resolution_gap_formula():
    n = 10 ** 4
    cloud = dl.gen_sequence_set(1.0, n)
    assert cloud.size == n + 1
    # gap between the two smallest positive elements: 1/(n-1) - 1/n = 1/(n(n-1))
    expected = 1.0 / ((n - 1) * n)
    assert cloud.resolution == pytest.approx(expected, rel=1e-12)
    assert abs(cloud.resolution - 1.0e-8) < 2e-9


def test_sequence_set_sorted_structure():
    cloud = dl.gen_sequence_set(1.5, 50)
    vals = np.sort(cloud.points[:, 0])[::-1]
    assert np.all(np.diff(vals[:-1]) < 0)
    assert vals[-1] == 0.0


def test_log_set():
    cloud = dl.gen_log_set(3)
    assert sorted(cloud.points[:, 0]) == pytest.approx([0.0, 1 / np.log(3), 1 / np.log(2)])
    cloud = dl.gen_log_set(2)
    assert sorted(cloud.points[:, 0]) == pytest.approx([0.0, 1.4426950408889634])
    cloud = dl.gen_log_set(10 ** 5)
    assert cloud.size == 10 ** 5
    assert cloud.points[:, 0].max() == pytest.approx(1 / np.log(2))


def test_ifs_cantor_depth2():
    spec = dl.IfsSpec(maps=((1 / 3, (0.0,)), (1 / 3, (2 / 3,))), depth=2)
    cloud = dl.gen_ifs(spec)
    assert sorted(cloud.points[:, 0]) == pytest.approx([0.0, 2 / 9, 2 / 3, 8 / 9])


def test_ifs_single_map_fixed_point():
    spec = dl.IfsSpec(maps=((0.5, (0.0,)),), depth=3)
    cloud = dl.gen_ifs(spec)
    assert cloud.size == 1
    assert cloud.points[0, 0] == 0.0


def test_ifs_cantor_depth12_in_unit_interval(cantor12):
    assert cantor12.size == 4096
    assert cantor12.points.min() >= 0.0
    assert cantor12.points.max() <= 1.0
    # smallest gap of the depth-12 approximation
    assert cantor12.resolution == pytest.approx(2 * 3.0 ** -12, rel=1e-9)


def test_ifs_cap():
    spec = dl.IfsSpec(maps=((1 / 3, (0.0,)), (1 / 3, (2 / 3,))), depth=12)
    with pytest.raises(SizeError):
        dl.gen_ifs(spec, cap=1000)


def test_product_corners(corners):
    a = dl.PointCloud.from_array([0.0, 1.0], 1.0)
    prod = dl.product(a, a)
    got = sorted(map(tuple, prod.points))
    assert got == sorted(map(tuple, corners.points))


def test_product_with_point_embeds():
    b = dl.gen_sequence_set(1.0, 5)
    p = dl.single_point([2.0])
    prod = dl.product(p, b)
    assert prod.size == b.size
    assert np.all(prod.points[:, 0] == 2.0)
    assert sorted(prod.points[:, 1]) == sorted(b.points[:, 0])


def test_product_counts_and_cap(cc6):
    assert cc6.size == 64 * 64
    a = dl.unit_interval_grid(2.0 ** -10)
    with pytest.raises(SizeError):
        dl.product(a, a, cap=10 ** 6)


def test_product_diameter_pythagoras():
    a = dl.PointCloud.from_array([0.0, 1.0], 1.0)
    b = dl.PointCloud.from_array([0.0, 0.5], 0.5)
    prod = dl.product(a, b)
    assert dl.diameter(prod) ** 2 == pytest.approx(
        dl.diameter(a) ** 2 + dl.diameter(b) ** 2)


def test_diameter_examples(point, corners):
    assert dl.diameter(point) == 0.0
    assert dl.diameter(dl.PointCloud.from_array([0.0, 1.0], 1.0)) == 1.0
    assert dl.diameter(corners) == pytest.approx(np.sqrt(2.0))


def test_diameter_degenerate_embedding():
    line = dl.embed(dl.gen_sequence_set(1.0, 100), 2)
    assert dl.diameter(line) == pytest.approx(1.0)


def test_cloud_validation():
    with pytest.raises(ValueError):
        dl.PointCloud.from_array(np.array([[np.nan]]), 1.0)
    with pytest.raises(ValueError):
        dl.PointCloud.from_array(np.empty((0, 1)), 1.0)
    with pytest.raises(ValueError):
        dl.PointCloud.from_array([0.0, 1.0], 5.0)  # resolution above diameter
    with pytest.raises(ValueError):
        dl.PointCloud.from_array([0.0, 1.0], -1.0)
    with pytest.raises(ValueError):
        dl.IfsSpec(maps=((1.5, (0.0,)),), depth=2)
    with pytest.raises(ValueError):
        dl.IfsSpec(maps=(), depth=2)


def test_cloud_is_readonly(f1_small):
    with pytest.raises(ValueError):
        f1_small.points[0, 0] = 3.0


def test_csv_roundtrip(tmp_path, f1_small):
    stem = tmp_path / "cloud"
    csv_path, meta_path = dl.write_cloud_csv(f1_small, stem)
    assert csv_path.read_text().splitlines()[0] == "x1"
    meta = json.loads(meta_path.read_text())
    assert meta["dim"] == 1 and meta["resolution"] == f1_small.resolution
    back = dl.read_cloud_csv(csv_path)
    assert np.array_equal(back.points, f1_small.points)
    assert back.resolution == f1_small.resolution
    assert back.label == f1_small.label


def test_csv_read_without_meta(tmp_path):
    cloud = dl.unit_interval_grid(2.0 ** -4)
    csv_path, meta_path = dl.write_cloud_csv(cloud, tmp_path / "grid")
    meta_path.unlink()
    back = dl.read_cloud_csv(csv_path)
    assert np.array_equal(back.points, cloud.points)
    assert back.resolution == pytest.approx(2.0 ** -4)
