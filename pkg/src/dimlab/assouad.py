"""Assouad dimension, upper Assouad spectrum, and quasi-Assouad extrapolation.

All three rest on the same primitive: for a scale pair r < R, the largest
r-mesh count of the cloud restricted to a ball B(x, R), maximized over all
cloud points x. The Assouad estimate is the least-squares slope of
log(max count) against log(R/r); the spectrum constrains the pairs to
r = R**(1/alpha); the quasi-Assouad value extrapolates the spectrum to
alpha -> 1 linearly in (1 - alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .covering import DimensionEstimate, EstimateDiagnostics, _cell_codes, _count_unique_rows
from .errors import DiagnosticsError, ScaleError
from .pointset import PointCloud, diameter

CENTER_CAP = 2 ** 16
CENTER_SUBSAMPLE = 4096


@dataclass(frozen=True)
class LocalCountSample:
    """One localized count: r-mesh boxes inside the ball B(center, R)."""

    center_index: int
    R: float
    r: float
    count: int

    def __post_init__(self):
        if not (0.0 < self.r < self.R):
            raise ValueError("need 0 < r < R")
        if self.count < 1:
            raise ValueError("count must be >= 1")


class _LocalCounter:
    """Shared machinery for max-over-centers localized mesh counts."""

    def __init__(self, e: PointCloud):
        self.dim = e.dim
        self.resolution = e.resolution
        pts = e.points
        if pts.shape[0] > CENTER_CAP:
            from .capacity import _farthest_point_subsample

            self.centers = _farthest_point_subsample(pts, CENTER_SUBSAMPLE)
            self.center_note = f"centers subsampled to {CENTER_SUBSAMPLE} by farthest point"
        else:
            self.centers = pts
            self.center_note = None
        if e.dim == 1:
            self.sorted_x = np.sort(pts[:, 0])
            self.tree = None
        else:
            self.sorted_x = None
            self.tree = cKDTree(pts)
            self.pts = pts
        # Points sitting at the truncation structure: nearest-neighbour gap
        # within twice the resolution. Maximizing centers near them are
        # flagged, since their counts can be truncation artifacts.
        tree_all = cKDTree(pts)
        d2, _ = tree_all.query(pts, k=min(2, pts.shape[0]))
        if pts.shape[0] > 1:
            gaps = d2[:, 1]
            self.fine_points = pts[gaps <= 2.0 * e.resolution]
        else:
            self.fine_points = pts[:0]
        self.fine_tree = cKDTree(self.fine_points) if len(self.fine_points) else None

    def max_count(self, R: float, r: float) -> LocalCountSample:
        side = r / math.sqrt(self.dim)
        best = 0
        best_idx = 0
        if self.sorted_x is not None:
            xs = self.sorted_x
            for idx in range(len(self.centers)):
                c = self.centers[idx, 0]
                lo = np.searchsorted(xs, c - R, side="right")
                hi = np.searchsorted(xs, c + R, side="left")
                seg = xs[lo:hi]
                if seg.size == 0:
                    continue
                codes = np.floor((seg - seg[0]) / side).astype(np.int64)
                n_cells = max(int(math.ceil((seg[-1] - seg[0]) / side - 1e-12)), 1)
                np.minimum(codes, n_cells - 1, out=codes)
                count = int(np.count_nonzero(np.diff(codes)) + 1)
                if count > best:
                    best, best_idx = count, idx
        else:
            balls = self.tree.query_ball_point(self.centers, R)
            for idx, members in enumerate(balls):
                if not members:
                    continue
                sub = self.pts[members]
                inside = np.linalg.norm(sub - self.centers[idx], axis=1) < R
                sub = sub[inside]
                if sub.shape[0] == 0:
                    continue
                codes = _cell_codes(sub, sub.min(axis=0), side)
                count = _count_unique_rows(codes)
                if count > best:
                    best, best_idx = count, idx
        return LocalCountSample(center_index=int(best_idx), R=R, r=r, count=max(best, 1))

    def artifact_flag(self, sample: LocalCountSample) -> bool:
        if self.fine_tree is None:
            return False
        center = self.centers[sample.center_index]
        d, _ = self.fine_tree.query(center)
        return bool(d <= 2.0 * sample.r)


def _fit_local_slope(samples: list[LocalCountSample], dim: int) -> tuple[float, float, list[float]]:
    ratios = np.array([math.log(s.R / s.r) for s in samples])
    counts = np.array([math.log(s.count) for s in samples])
    exponents = list(counts / ratios)
    if np.unique(ratios).size >= 2:
        slope, intercept = np.polyfit(ratios, counts, 1)
        resid = float(np.sqrt(np.mean((counts - (slope * ratios + intercept)) ** 2)))
    else:
        slope = float(np.mean(counts / ratios))
        resid = 0.0
    value = min(max(float(slope), 0.0), float(dim))
    return value, resid, exponents


def estimate_assouad(e: PointCloud, scale_pairs: list[tuple[float, float]]) -> DimensionEstimate:
    """Assouad dimension estimate from localized counts at the given (R, r) pairs.

    The max over centers is exact over all cloud points (subsampled above
    2**16 points); the headline value is the least-squares slope, with the
    per-pair upper envelope recorded in the diagnostics.
    """
    if not scale_pairs:
        raise ValueError("scale_pairs must be non-empty")
    diam = diameter(e)
    for R, r in scale_pairs:
        if not (r < R):
            raise ScaleError(f"need r < R, got ({R:g}, {r:g})")
        if r * (1 + 1e-9) < e.resolution:
            raise ScaleError(f"r={r:g} below resolution {e.resolution:g}")
        # Degenerate clouds (diameter 0) keep every ball at count 1, which
        # correctly drives the estimate to 0.
        if diam > 0 and R > diam * (1 + 1e-9):
            raise ScaleError(f"R={R:g} above the diameter {diam:g}")
    counter = _LocalCounter(e)
    samples = [counter.max_count(R, r) for R, r in scale_pairs]
    value, resid, exponents = _fit_local_slope(samples, e.dim)
    notes = []
    if counter.center_note:
        notes.append(counter.center_note)
    notes.append(f"envelope={max(exponents):.6g}")
    for s in samples:
        if counter.artifact_flag(s):
            notes.append(f"pair (R={s.R:g}, r={s.r:g}): maximizing center within 2r "
                         "of resolution-scale structure")
    table = [{"R": s.R, "r": s.r, "count": s.count, "exponent": exponents[i],
              "center_index": s.center_index} for i, s in enumerate(samples)]
    diag = EstimateDiagnostics(
        scales=[s.r for s in samples],
        quantities=[float(s.count) for s in samples],
        exponents=exponents,
        residual=resid,
        notes=notes,
        table=table,
    )
    rs = [s.r for s in samples] + [s.R for s in samples]
    return DimensionEstimate(value=value, mode="slope", window=(min(rs), max(rs)), diagnostics=diag)


def spectrum_pairs(e: PointCloud, alpha: float, k_min: int = 3,
                   k_max: int | None = None) -> list[tuple[float, float]]:
    """Dyadic R values with r = R**(1/alpha), kept above the cloud resolution.

    The ratio R/r equals 2**(k(1/alpha - 1)) and collapses toward 1 as alpha
    approaches 1, where integer-valued counts can no longer support a slope.
    The k range is therefore required to give a ratio of at least 2 at the
    top and at least two octaves of ratio span overall; when the resolution
    cannot accommodate that, the constrained pairs are unusable and a scale
    error is raised.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0,1)")
    gap = 1.0 / alpha - 1.0
    # Keep r two octaves above the resolution: counts at the truncation
    # scale saturate and drag the slope down.
    hard = alpha * (math.log2(1.0 / e.resolution) - 2.0)
    if k_max is None:
        k_max = hard
    # Small ratios R/r carry integer-quantized counts whose +-1 cell noise
    # biases the slope; demand at least 8x at the bottom, 64x at the top,
    # and a 4x span in between.
    k_lo = max(float(k_min), math.ceil(3.0 / gap))
    if k_max * gap < 6.0 or (k_max - k_lo) * gap < 2.0:
        raise ScaleError(
            f"alpha={alpha:g}: constrained pairs r=R**(1/alpha) fall below the "
            f"resolution before the ratio R/r spans enough octaves")
    pairs = []
    k = k_lo
    while k <= k_max + 1e-9:  # half-octave R grid averages log-periodic wobble
        R = 2.0 ** -k
        r = R ** (1.0 / alpha)
        if r * (1 + 1e-9) >= e.resolution and r < R:
            pairs.append((R, r))
        k += 0.5
    return pairs


def usable_alphas(e: PointCloud, count: int = 4, step: float = 0.05,
                  ceiling: float = 0.95) -> list[float]:
    """The `count` largest alphas on a step grid whose constrained pairs are usable.

    Desk-scale resolutions cannot support alpha arbitrarily close to 1; this
    picks the highest grid values where the spectrum estimator still has
    enough ratio span, for use as a quasi-Assouad extrapolation grid.
    """
    found: list[float] = []
    a = ceiling
    while a > step / 2 and len(found) < count:
        try:
            spectrum_pairs(e, a)
        except ScaleError:
            pass
        else:
            found.append(round(a, 10))
        a = round(a - step, 10)
    if len(found) < 3:
        raise ScaleError("resolution too coarse for a quasi-Assouad alpha grid")
    return sorted(found)


def estimate_assouad_spectrum(e: PointCloud, alpha: float,
                              grid=None) -> DimensionEstimate:
    """Upper Assouad spectrum at alpha: localized counts constrained to r = R**(1/alpha)."""
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0,1)")
    if grid is None:
        pairs = spectrum_pairs(e, alpha)
    else:
        r_values = grid.r_values if hasattr(grid, "r_values") else tuple(grid)
        pairs = [(float(R), float(R) ** (1.0 / alpha)) for R in r_values]
        for R, r in pairs:
            if r * (1 + 1e-9) < e.resolution:
                raise ScaleError(
                    f"constrained pair r=R**(1/alpha)={r:g} falls below resolution {e.resolution:g}")
    if len(pairs) < 2:
        raise ScaleError("not enough valid constrained pairs above the resolution")
    est = estimate_assouad(e, pairs)
    est.diagnostics.notes.append(f"alpha={alpha:g}")
    for row in est.diagnostics.table:
        row["alpha"] = alpha
    return est


def estimate_quasi_assouad(e: PointCloud, alphas: list[float]) -> DimensionEstimate:
    """Quasi-Assouad estimate: spectrum values extrapolated linearly in (1-alpha) to 1.

    The extrapolation uses the last 3 grid values; the raw spectrum curve is
    carried in the diagnostics.
    """
    alphas = [float(a) for a in alphas]
    if len(alphas) < 3:
        raise DiagnosticsError("need at least 3 alphas")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be increasing")
    if alphas[-1] >= 1.0:
        raise ValueError("alphas must stay below 1")
    values = [estimate_assouad_spectrum(e, a).value for a in alphas]
    tail_a = np.array(alphas[-3:])
    tail_v = np.array(values[-3:])
    coeffs = np.polyfit(1.0 - tail_a, tail_v, 1)
    # The spectrum is non-decreasing in alpha, so each observed value is a
    # true lower bound for its alpha -> 1 limit; flooring the extrapolation
    # with the best observed value guards it against single-alpha noise.
    value = max(float(coeffs[1]), max(values))
    value = min(max(value, 0.0), float(e.dim))
    diag = EstimateDiagnostics(
        scales=list(alphas),
        quantities=list(map(float, values)),
        exponents=list(map(float, values)),
        residual=0.0,
        notes=["scales field holds the alpha grid; quantities the raw spectrum curve"],
    )
    return DimensionEstimate(value=value, mode="slope", window=(alphas[0], alphas[-1]),
                             diagnostics=diag)
