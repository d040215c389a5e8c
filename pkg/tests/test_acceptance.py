"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Tolerances and runtime budgets are asserted as stated; expensive artifacts
(the F_1 profile battery) are computed once and shared.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats
from scipy.spatial.distance import pdist, squareform

import dimlab as dl
from dimlab import cli
from dimlab.assouad import usable_alphas
from dimlab.covering import ScaleGrid
from dimlab.theorems import default_scale_pairs

from conftest import half_octave_grid
from test_capacity import exact_min_energy, random_params
from test_covering import brute_force_cover_sum

LOG23 = math.log(2) / math.log(3)


def _line(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def f1_profile_battery(f1_full):
    grid = ScaleGrid.dyadic(6, 16)
    jobs = [(1.0, 0.3), (1.0, 0.5), (1.0, 0.8), (1.0, 1.0), (0.5, 0.5)]
    t0 = time.perf_counter()
    values = {key: dl.estimate_profile(f1_full, key[0], key[1], grid).value for key in jobs}
    values["elapsed"] = time.perf_counter() - t0
    return values


def test_criterion_01_kernel_exactness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        kp = random_params(rng)
        for b in (kp.r, kp.r ** kp.theta):
            lo = dl.kernel_phi(kp, b * (1 - 1e-9))
            hi = dl.kernel_phi(kp, b * (1 + 1e-9))
            worst = max(worst, abs(lo - hi) / dl.kernel_phi(kp, b))
    kp = dl.KernelParams(s=1.0, t=2.0, r=0.01, theta=0.5)
    branch_ok = (abs(dl.kernel_phi(kp, 0.0) - 1.0) < 1e-12
                 and abs(dl.kernel_phi(kp, 0.05) - 0.2) < 1e-12
                 and abs(dl.kernel_phi(kp, 0.5) - 0.004) < 1e-12)
    elapsed = time.perf_counter() - t0
    _line("criterion 1 kernel exactness", worst <= 1e-6 and branch_ok and elapsed < 1.0,
          f"max breakpoint jump {worst:.2e} rel, branch values exact, {elapsed:.2f}s")


def test_criterion_02_energy_oracle(two_points):
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    worst = 0.0
    for trial in range(200):
        n = int(rng.integers(2, 13))
        d = 1 + trial % 2
        pts = rng.random((n, d))
        cloud = dl.PointCloud.from_array(pts, 1e-12)
        kp = random_params(rng)
        sol = dl.min_energy(cloud, kp, tol=1e-12)
        K = dl.kernel_phi(kp, squareform(pdist(pts)))
        np.fill_diagonal(K, 1.0)
        worst = max(worst, abs(sol.energy - exact_min_energy(K)))
    kp = dl.KernelParams(s=1.0, t=2.0, r=0.01, theta=0.5)
    k12 = dl.kernel_phi(kp, 0.5)
    two_err = abs(dl.min_energy(two_points, kp, tol=1e-12).energy - (1 + k12) / 2)
    elapsed = time.perf_counter() - t0
    _line("criterion 2 energy oracle",
          worst < 1e-8 and two_err < 1e-9 and elapsed < 30.0,
          f"max |FW - exact| {worst:.2e}, two-point err {two_err:.2e}, {elapsed:.1f}s")


def test_criterion_03_solver_certificate():
    rng = np.random.default_rng(303)
    cloud = dl.PointCloud.from_array(rng.random((500, 2)), 1e-9)
    t0 = time.perf_counter()
    sol = dl.min_energy(cloud, random_params(rng), tol=1e-6)
    elapsed = time.perf_counter() - t0
    _line("criterion 3 solver certificate", sol.gap <= 1e-6 and elapsed < 10.0,
          f"gap {sol.gap:.2e} in {elapsed:.1f}s at N=500")


def test_criterion_04_f1_profile_formula(f1_profile_battery):
    targets = {(1.0, 0.3): 0.3 / 1.3, (1.0, 0.5): 1 / 3, (1.0, 0.8): 0.8 / 1.8,
               (1.0, 1.0): 0.5, (0.5, 0.5): 0.25}
    worst = max(abs(f1_profile_battery[k] - v) for k, v in targets.items())
    elapsed = f1_profile_battery["elapsed"]
    detail = ", ".join(
        f"t={k[0]:g},th={k[1]:g}: {f1_profile_battery[k]:.4f} (want {v:.4f})"
        for k, v in targets.items())
    _line("criterion 4 F1 profile formula", worst <= 0.08 and elapsed < 300.0,
          f"{detail}; max dev {worst:.4f}, {elapsed:.0f}s")


def test_criterion_05_ratio_bound_sharpness(f1_profile_battery):
    prof_1 = f1_profile_battery[(1.0, 0.5)]
    prof_half = f1_profile_battery[(0.5, 0.5)]
    rhs = prof_1 / (1.0 + (1 / 0.5 - 1 / 1.0) * prof_1)
    gap = prof_half - rhs
    _line("criterion 5 ratio-bound sharpness", -0.05 <= gap <= 0.10,
          f"lhs - rhs = {gap:+.4f} (lhs {prof_half:.4f}, rhs {rhs:.4f})")


def test_criterion_06_covering_dp_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(606)
    mismatches = 0
    for trial in range(100):
        d = 1 + trial % 2
        n = int(rng.integers(2, 21))
        pts = rng.random((n, d))
        cloud = dl.PointCloud.from_array(pts, 2.0 ** -40)
        r = cloud.extent() * math.sqrt(d) / 8 * (1 + 1e-9)
        theta = float(rng.uniform(0.3, 0.95))
        s = float(rng.uniform(0.0, d))
        if dl.cover_sum(cloud, s, r, theta) != brute_force_cover_sum(pts, s, r, theta):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    _line("criterion 6 covering DP oracle", mismatches == 0 and elapsed < 30.0,
          f"{mismatches} mismatches in 100 clouds, {elapsed:.1f}s")


def test_criterion_07_known_dimensions(cantor12, interval14):
    t0 = time.perf_counter()
    results = []
    grid_c = ScaleGrid.dyadic(6, 16)
    results.append(("cantor box", dl.estimate_box_dim(cantor12, grid_c).value, LOG23, 0.07))
    results.append(("cantor dim_0.5",
                    dl.estimate_intermediate_dim(cantor12, 0.5, grid_c).value, LOG23, 0.07))
    results.append(("cantor assouad",
                    dl.estimate_assouad(cantor12, default_scale_pairs(cantor12)).value,
                    LOG23, 0.07))
    results.append(("cantor quasi",
                    dl.estimate_quasi_assouad(cantor12, usable_alphas(cantor12)).value,
                    LOG23, 0.07))
    grid_i = ScaleGrid.dyadic(6, 12)
    results.append(("interval box", dl.estimate_box_dim(interval14, grid_i).value, 1.0, 0.05))
    results.append(("interval dim_0.5",
                    dl.estimate_intermediate_dim(interval14, 0.5, grid_i).value, 1.0, 0.05))
    results.append(("interval assouad",
                    dl.estimate_assouad(interval14, default_scale_pairs(interval14)).value,
                    1.0, 0.05))
    results.append(("interval quasi",
                    dl.estimate_quasi_assouad(interval14, usable_alphas(interval14)).value,
                    1.0, 0.05))
    elapsed = time.perf_counter() - t0
    ok = all(abs(v - target) <= tol for _, v, target, tol in results) and elapsed < 120.0
    detail = "; ".join(f"{n}={v:.4f}" for n, v, _, _ in results)
    _line("criterion 7 known dimensions", ok, f"{detail}; {elapsed:.0f}s")


def test_criterion_08_projection_battery(cc6):
    t0 = time.perf_counter()
    mesh_grid = half_octave_grid(4.5, 7.5)
    profile_grid = half_octave_grid(6.0, 8.5)
    verdict = dl.check_projection_profile(cc6, m=1, theta=1.0, n_dirs=50,
                                          grid=mesh_grid, profile_grid=profile_grid,
                                          seed=11, slack=0.07)
    values = np.array([s["value"] for s in verdict.samples])
    frac = float(np.mean(np.abs(values - 1.0) <= 0.1))
    trend = dl.check_marstrand_quasi(cc6, m=1, theta_list=[1.0, 0.6, 0.3], n_dirs=20,
                                     seed=11, grid=mesh_grid)
    gaps = [row["gap"] for row in trend.samples]
    elapsed = time.perf_counter() - t0
    ok = (frac >= 0.9 and verdict.passed and trend.passed and elapsed < 600.0)
    _line("criterion 8 projection battery", ok,
          f"{frac:.0%} within 0.1 of 1.0, median {verdict.lhs:.4f} vs profile "
          f"{verdict.rhs:.4f}, trend gaps {['%.3f' % g for g in gaps]}, {elapsed:.0f}s")


def test_criterion_09_fbm_statistics(interval12):
    t0 = time.perf_counter()
    rng = np.random.default_rng(909)
    pts = np.sort(rng.random(16))
    cloud = dl.PointCloud.from_array(pts, float(np.diff(pts).min()))
    alpha = 0.6
    sampler = dl.FbmSampler(cloud, alpha)
    draws = np.empty((10_000, 16, 2))
    for i in range(10_000):
        draws[i] = sampler.sample(2, 99, index=(i,)).image.points
    worst_rel = 0.0
    for _ in range(10):
        i, j = rng.choice(16, size=2, replace=False)
        inc = draws[:, i, 0] - draws[:, j, 0]
        target = abs(pts[i] - pts[j]) ** (2 * alpha)
        worst_rel = max(worst_rel, abs(inc.var() / target - 1.0))
    cross = abs(float(np.corrcoef(draws[:, 8, 0], draws[:, 8, 1])[0, 1]))

    grid_img = ScaleGrid.dyadic(2, 6)
    vals = []
    for i in range(8):
        img = dl.FbmSampler(interval12, 0.5).sample(1, 77, index=(i,)).image
        vals.append(dl.estimate_box_dim(img, grid_img).value)
    median = float(np.median(vals))
    elapsed = time.perf_counter() - t0
    ok = worst_rel <= 0.05 and cross <= 0.04 and abs(median - 1.0) <= 0.12 and elapsed < 300.0
    _line("criterion 9 fbm statistics", ok,
          f"max increment-variance rel err {worst_rel:.3f}, cross-corr {cross:.3f}, "
          f"median image box dim {median:.3f}, {elapsed:.0f}s")


def test_criterion_10_haar_sanity():
    t0 = time.perf_counter()
    worst = 0.0
    for i, (d, m) in enumerate([(2, 1), (3, 1), (3, 2), (5, 3), (8, 4)] * 40):
        worst = max(worst, dl.sample_grassmannian(d, m, seed=10, index=(i,)).gram_deviation())
    angles = np.empty(10_000)
    for i in range(10_000):
        v = dl.sample_grassmannian(2, 1, seed=42, index=(i,)).matrix[:, 0]
        angles[i] = np.arctan2(v[1], v[0]) % np.pi
    hist, _ = np.histogram(angles, bins=36, range=(0.0, np.pi))
    _, p = stats.chisquare(hist)
    elapsed = time.perf_counter() - t0
    _line("criterion 10 Haar sanity", worst <= 1e-10 and p > 0.001 and elapsed < 10.0,
          f"max Gram deviation {worst:.2e}, chi-square p {p:.3f}, {elapsed:.1f}s")


def test_criterion_11_invariant_sweeps(point, interval14, cantor12, f1_full,
                                       f1_small, logset_small, cc6, f1_profile_battery):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1111)
    zoo_1d = [("interval", interval14, 12), ("cantor", cantor12, 16),
              ("f1", f1_full, 16), ("logset", logset_small, 16)]

    # exponent envelope, exact, every set and scale
    for name, cloud, k_max in zoo_1d:
        for theta in (0.4, 0.8):
            for _ in range(3):
                t = float(rng.uniform(0.0, 0.9))
                s = float(rng.uniform(t + 0.05, 1.0))
                for k in (7, 11):
                    r = 2.0 ** -k
                    es = math.log(dl.cover_sum(cloud, s, r, theta)) / (k * math.log(2))
                    et = math.log(dl.cover_sum(cloud, t, r, theta)) / (k * math.log(2))
                    assert -(s - t) - 1e-9 <= es - et <= -theta * (s - t) + 1e-9, name

    # profile sandwich (reusing the F1 battery artifacts where possible)
    grid_f1 = ScaleGrid.dyadic(6, 16)
    intdim_f1 = dl.estimate_intermediate_dim(f1_full, 0.5, grid_f1).value
    for t in (0.5, 1.0):
        prof = f1_profile_battery[(t, 0.5)]
        assert 0.0 <= prof <= min(t, intdim_f1) + 0.05
    grid_i = ScaleGrid.dyadic(6, 12, theta=0.5)
    intdim_i = dl.estimate_intermediate_dim(interval14, 0.5, grid_i).value
    prof_i = dl.estimate_profile(interval14, 0.5, 0.5, grid_i).value
    assert 0.0 <= prof_i <= min(0.5, intdim_i) + 0.05
    grid_cc = half_octave_grid(4.5, 7.5, theta=0.6)
    prof_cc = dl.estimate_profile(cc6, 1.0, 0.6, half_octave_grid(6.5, 8.5, theta=0.6)).value
    intdim_cc = dl.estimate_intermediate_dim(cc6, 0.6, grid_cc).value
    assert 0.0 <= prof_cc <= min(1.0, intdim_cc) + 0.05
    assert dl.estimate_profile(point, 1.0, 0.5, ScaleGrid.dyadic(6, 12)).value == 0.0

    # Lipschitz and monotonicity of the profile in t
    grid_small = ScaleGrid.dyadic(6, 12, theta=0.5)
    ts = (0.3, 0.5, 0.8, 1.0)
    profs = [dl.estimate_profile(f1_small, t, 0.5, grid_small).value for t in ts]
    for (t1, v1), (t2, v2) in zip(zip(ts, profs), zip(ts[1:], profs[1:])):
        assert abs(v2 - v1) <= (t2 - t1) + 0.02
        assert v1 <= v2 + 0.02

    # Assouad ordering chain (truncation sizes chosen for the center loops)
    chain_zoo = [("interval", interval14), ("cantor", cantor12),
                 ("f1", f1_small), ("logset", logset_small)]
    for name, cloud in chain_zoo:
        grid = ScaleGrid.dyadic(6, resolution=cloud.resolution)
        box = dl.estimate_box_dim(cloud, grid).value
        alphas = usable_alphas(cloud)
        spec = dl.estimate_assouad_spectrum(cloud, alphas[0]).value
        qa = dl.estimate_quasi_assouad(cloud, alphas).value
        ass = dl.estimate_assouad(cloud, default_scale_pairs(cloud)).value
        assert box <= spec + 0.05, name
        assert spec <= qa + 0.05, name
        assert qa <= ass + 0.05, name

    # Banaji lower bound with 0.07 slack, including the planar product set
    for name, cloud, k_max in zoo_1d + [("cc6", cc6, None)]:
        if name == "cc6":
            grid = half_octave_grid(4.5, 7.5)
        else:
            grid = ScaleGrid.dyadic(6, k_max)
        box = dl.estimate_box_dim(cloud, grid).value
        d = cloud.dim
        for theta in (0.3, 0.7):
            lhs = dl.estimate_intermediate_dim(cloud, theta, grid).value
            rhs = theta * d * box / (d - (1 - theta) * box)
            assert lhs >= rhs - 0.07, (name, theta)

    elapsed = time.perf_counter() - t0
    _line("criterion 11 invariant sweeps", elapsed < 600.0,
          f"envelope, sandwich, Lipschitz/monotone, chain, bound all green; {elapsed:.0f}s")


def test_criterion_12_reproducibility(tmp_path):
    cfg = cli.default_config()
    report_a, code_a = cli.run_battery(dict(cfg, out_dir=str(tmp_path / "a")), tmp_path / "a")
    report_b, code_b = cli.run_battery(dict(cfg, out_dir=str(tmp_path / "b")), tmp_path / "b")
    ok = (code_a == 0 and code_b == 0 and report_a["digest"] == report_b["digest"])
    _line("criterion 12 reproducibility", ok,
          f"battery exit codes ({code_a}, {code_b}), digests "
          f"{'match' if report_a['digest'] == report_b['digest'] else 'differ'}")
