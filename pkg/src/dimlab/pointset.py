"""Canonical test sets with known dimensions, plus geometric utilities.

Every generator records a `resolution`: the smallest inter-point scale the
finite cloud faithfully represents. Estimators refuse to work below it,
because counts at finer scales only see the truncation, not the set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import SizeError

POINT_CAP = 2 ** 22


@dataclass(frozen=True)
class PointCloud:
    """Finite approximation of a compact subset of R^d.

    points      (n, dim) float64 array, read-only after construction
    dim         ambient dimension d
    resolution  smallest faithful inter-point scale (> 0)
    label       free text for reports
    """

    points: np.ndarray
    dim: int
    resolution: float
    label: str = ""

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("points must be a non-empty (n, dim) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if pts.shape[1] != self.dim:
            raise ValueError(f"dim={self.dim} does not match point arity {pts.shape[1]}")
        if not (self.resolution > 0):
            raise ValueError("resolution must be positive")
        # Cheap upper bound on the diameter: the bounding-box diagonal.
        extent = pts.max(axis=0) - pts.min(axis=0)
        diag = float(np.linalg.norm(extent))
        if diag > 0 and self.resolution > diag * (1 + 1e-12):
            raise ValueError("resolution exceeds the cloud's diameter")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_array(cls, points, resolution: float, label: str = "") -> "PointCloud":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        return cls(points=pts, dim=pts.shape[1], resolution=float(resolution), label=label)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)

    def extent(self) -> float:
        """Largest side of the bounding box (0 for coincident clouds)."""
        lo, hi = self.bounds()
        return float(np.max(hi - lo))


@dataclass(frozen=True)
class IfsSpec:
    """Iterated function system of similarities x -> ratio*x + translation."""

    maps: tuple[tuple[float, tuple[float, ...]], ...]
    depth: int

    def __post_init__(self):
        if not self.maps:
            raise ValueError("maps must be non-empty")
        maps = tuple((float(r), tuple(float(c) for c in t)) for r, t in self.maps)
        arity = {len(t) for _, t in maps}
        if len(arity) != 1:
            raise ValueError("all translations must share a dimension")
        for r, _ in maps:
            if not (0.0 < r < 1.0):
                raise ValueError("contraction ratios must lie in (0,1)")
        if self.depth < 1:
            raise ValueError("depth must be positive")
        object.__setattr__(self, "maps", maps)

    @property
    def dim(self) -> int:
        return len(self.maps[0][1])


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise SizeError(f"would generate {n} points, above the cap of {cap}")


def gen_sequence_set(p: float, n_max: int, cap: int = POINT_CAP) -> PointCloud:
    """The set {1/n**p : 1 <= n <= n_max} together with 0, in R^1.

    Values are accumulated with n descending so the tiny gaps near 0 are
    formed from adjacent magnitudes. The resolution is the gap between the
    two smallest positive elements.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _check_cap(n_max + 1, cap)
    n = np.arange(n_max, 0, -1, dtype=float)
    vals = n ** (-float(p))
    pts = np.concatenate(([0.0], vals))
    if n_max >= 2:
        resolution = float(vals[1] - vals[0])
    else:
        resolution = 1.0
    return PointCloud.from_array(pts, resolution, label=f"F_{p:g}(n={n_max})")


def gen_log_set(n_max: int, cap: int = POINT_CAP) -> PointCloud:
    """The set {0} and {1/log(n) : 2 <= n <= n_max}, in R^1."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    _check_cap(n_max, cap)
    n = np.arange(n_max, 1, -1, dtype=float)
    vals = 1.0 / np.log(n)
    pts = np.concatenate(([0.0], vals))
    if n_max >= 3:
        resolution = float(vals[1] - vals[0])
    else:
        resolution = float(vals[0])
    return PointCloud.from_array(pts, resolution, label=f"logset(n={n_max})")


def gen_ifs(spec: IfsSpec, cap: int = POINT_CAP) -> PointCloud:
    """All depth-fold compositions of the system's maps applied to the origin.

    The resolution is the exact smallest nearest-neighbour gap when the
    cloud is small enough to measure it, and otherwise the conservative
    bound (min ratio)**depth times the diameter of the maps' fixed points.
    """
    count = len(spec.maps) ** spec.depth
    _check_cap(count, cap)
    d = spec.dim
    pts = np.zeros((1, d))
    ratios = np.array([r for r, _ in spec.maps])
    trans = np.array([t for _, t in spec.maps])
    for _ in range(spec.depth):
        pts = np.concatenate([r * pts + t for r, t in zip(ratios, trans)])
    if count <= 2 ** 17:
        resolution = _min_gap(pts)
    else:
        fixed = trans / (1.0 - ratios)[:, None]
        base_diam = 0.0
        if len(spec.maps) > 1:
            diffs = fixed[:, None, :] - fixed[None, :, :]
            base_diam = float(np.sqrt((diffs ** 2).sum(axis=-1)).max())
        scale = float(ratios.min()) ** spec.depth
        resolution = scale * base_diam if base_diam > 0 else scale
    return PointCloud.from_array(pts, resolution, label=f"ifs(depth={spec.depth})")


def middle_third_cantor(depth: int, cap: int = POINT_CAP) -> PointCloud:
    """Depth-level approximation of the middle-third Cantor set in [0,1]."""
    spec = IfsSpec(maps=((1 / 3, (0.0,)), (1 / 3, (2 / 3,))), depth=depth)
    cloud = gen_ifs(spec, cap=cap)
    return PointCloud.from_array(cloud.points, cloud.resolution, label=f"cantor(depth={depth})")


def unit_interval_grid(step: float, cap: int = POINT_CAP) -> PointCloud:
    """Regular grid on [0,1] with the given step; resolution equals the step."""
    if not (0 < step <= 1):
        raise ValueError("step must lie in (0,1]")
    n = int(round(1.0 / step))
    _check_cap(n + 1, cap)
    pts = np.linspace(0.0, 1.0, n + 1)
    return PointCloud.from_array(pts, step, label=f"interval(step={step:g})")


def single_point(coords: Sequence[float] = (0.0,)) -> PointCloud:
    # A lone point represents every scale faithfully, hence the tiny resolution.
    return PointCloud.from_array(np.asarray(coords, dtype=float)[None, :], 2.0 ** -40,
                                 label="point")


def product(a: PointCloud, b: PointCloud, cap: int = POINT_CAP) -> PointCloud:
    """Cartesian product of two clouds, in dimension dim(a)+dim(b)."""
    n = a.size * b.size
    _check_cap(n, cap)
    left = np.repeat(a.points, b.size, axis=0)
    right = np.tile(b.points, (a.size, 1))
    pts = np.hstack([left, right])
    resolution = min(a.resolution, b.resolution)
    label = f"{a.label or 'A'}x{b.label or 'B'}"
    return PointCloud.from_array(pts, resolution, label=label)


def embed(e: PointCloud, dim: int, offset: Sequence[float] | None = None) -> PointCloud:
    """Embed a cloud into a higher dimension by zero-padding coordinates."""
    if dim < e.dim:
        raise ValueError("target dimension must be >= cloud dimension")
    pts = np.zeros((e.size, dim))
    pts[:, : e.dim] = e.points
    if offset is not None:
        pts = pts + np.asarray(offset, dtype=float)
    return PointCloud.from_array(pts, e.resolution, label=f"{e.label}@R^{dim}")


def diameter(e: PointCloud) -> float:
    """Exact largest pairwise distance.

    Degenerate directions are removed first (so clouds sitting on a line or
    plane inside a larger space reduce to their intrinsic rank), then the
    maximum is taken over convex-hull vertices.
    """
    pts = e.points
    if pts.shape[0] == 1:
        return 0.0
    center = pts.mean(axis=0)
    x = pts - center
    if e.dim == 1:
        return float(x.max() - x.min())
    cov = x.T @ x
    w, v = np.linalg.eigh(cov)
    scale = max(float(w.max()), 1.0)
    keep = w > scale * 1e-24
    rank = int(keep.sum())
    if rank == 0:
        return 0.0
    y = x @ v[:, keep]
    if rank == 1:
        z = y[:, 0]
        return float(z.max() - z.min())
    verts = _hull_vertices(y)
    diffs = verts[:, None, :] - verts[None, :, :]
    return float(np.sqrt((diffs ** 2).sum(axis=-1)).max())


def _hull_vertices(y: np.ndarray) -> np.ndarray:
    from scipy.spatial import ConvexHull, QhullError

    uniq = np.unique(y, axis=0)
    if uniq.shape[0] <= y.shape[1] + 1:
        return uniq
    try:
        hull = ConvexHull(uniq)
        return uniq[hull.vertices]
    except QhullError:
        return uniq


# ---------------------------------------------------------------------------
# Serialization: CSV of coordinates plus a JSON metadata sidecar.
# ---------------------------------------------------------------------------

def cloud_paths(stem: str | Path) -> tuple[Path, Path]:
    stem = Path(stem)
    if stem.suffix == ".csv":
        stem = stem.with_suffix("")
    return stem.with_suffix(".csv"), Path(str(stem) + ".meta.json")


def write_cloud_csv(e: PointCloud, stem: str | Path) -> tuple[Path, Path]:
    """Write `<stem>.csv` (header x1..xd, one point per row) and `<stem>.meta.json`."""
    csv_path, meta_path = cloud_paths(stem)
    header = ",".join(f"x{i + 1}" for i in range(e.dim))
    np.savetxt(csv_path, e.points, delimiter=",", header=header, comments="", fmt="%.17g")
    meta = {"dim": e.dim, "resolution": e.resolution, "label": e.label}
    meta_path.write_text(json.dumps(meta, sort_keys=True) + "\n")
    return csv_path, meta_path


def read_cloud_csv(path: str | Path) -> PointCloud:
    """Read a cloud written by `write_cloud_csv`.

    If the metadata sidecar is missing, the resolution falls back to the
    smallest nearest-neighbour gap in the data.
    """
    csv_path, meta_path = cloud_paths(path)
    pts = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    if meta_path.exists():
        meta = json.loads(meta_path.read_text())
        if int(meta["dim"]) != pts.shape[1]:
            raise ValueError(f"metadata dim {meta['dim']} does not match CSV arity {pts.shape[1]}")
        return PointCloud.from_array(pts, float(meta["resolution"]), label=str(meta.get("label", "")))
    resolution = _min_gap(pts)
    return PointCloud.from_array(pts, resolution, label=Path(csv_path).stem)


def _min_gap(pts: np.ndarray) -> float:
    from scipy.spatial import cKDTree

    if pts.shape[0] == 1:
        return 1.0
    tree = cKDTree(pts)
    dist, _ = tree.query(pts, k=2)
    gaps = dist[:, 1]
    positive = gaps[gaps > 0]
    return float(positive.min()) if positive.size else 1.0
