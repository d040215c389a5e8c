"""Box counts, constrained covering sums, and covering-based dimension estimates.

The covering sum restricted to diameters in [r, r**theta] is evaluated by a
dynamic program over the dyadic cell tree of the cloud: every occupied cell
may either be covered by one set (priced at max(|cell|, r)**s, admissible
only while |cell| <= r**theta) or split into its occupied children. The
result is the exact optimum over such dyadic covers; the constant factor
separating it from the unrestricted infimum cancels in log-log exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DiagnosticsError, ScaleError
from .pointset import PointCloud

_REL_TOL = 1 + 1e-9  # slop for r-vs-resolution comparisons
_WINDOW = 3  # scales entering the liminf/limsup proxies
BISECT_TOL = 1e-3


@dataclass(frozen=True)
class ScaleGrid:
    """Strictly decreasing scales in (0,1) with the covering exponent theta."""

    r_values: tuple[float, ...]
    theta: float = 1.0

    def __post_init__(self):
        rs = tuple(float(r) for r in self.r_values)
        if len(rs) == 0:
            raise ValueError("grid must contain at least one scale")
        if any(not (0.0 < r < 1.0) for r in rs):
            raise ValueError("scales must lie in (0,1)")
        if any(a <= b for a, b in zip(rs, rs[1:])):
            raise ValueError("scales must be strictly decreasing")
        if not (0.0 < self.theta <= 1.0):
            raise ValueError("theta must lie in (0,1]")
        object.__setattr__(self, "r_values", rs)

    def __len__(self) -> int:
        return len(self.r_values)

    @classmethod
    def dyadic(cls, k_min: int = 6, k_max: int | None = None, theta: float = 1.0,
               resolution: float | None = None, margin: int = 2) -> "ScaleGrid":
        """Grid r_k = 2**-k for k_min..k_max.

        Without an explicit k_max, the grid runs down to
        floor(log2(1/resolution)) - margin; if that leaves fewer than 4
        scales the margin is reduced (to 0 at worst) so estimators still
        have a usable grid on coarse clouds.
        """
        if k_max is None:
            if resolution is None:
                raise ValueError("need k_max or a resolution")
            hard_max = int(math.floor(math.log2(1.0 / resolution)))
            k_max = hard_max - margin
            if k_max < k_min + 3:
                k_max = min(hard_max, k_min + 3)
        if k_max < k_min:
            raise ValueError("empty grid")
        return cls(tuple(2.0 ** -k for k in range(k_min, k_max + 1)), theta=theta)

    @classmethod
    def dyadic_window(cls, resolution: float, theta: float = 1.0, length: int = 8,
                      margin: int = 2) -> "ScaleGrid":
        """Window of up to `length` dyadic scales ending just above the resolution.

        Useful for coarse clouds (e.g. random images) whose faithful scales
        do not reach the standard k_min = 6 grid.
        """
        hard = int(math.floor(math.log2(1.0 / resolution)))
        for m in (margin, 0):
            k_max = hard - m
            k_min = max(1, k_max - length + 1)
            if k_max - k_min + 1 >= 4:
                return cls(tuple(2.0 ** -k for k in range(k_min, k_max + 1)), theta=theta)
        raise ValueError(f"resolution {resolution:g} too coarse for a usable dyadic window")

    def validate_for(self, e: PointCloud) -> None:
        smallest = self.r_values[-1]
        if smallest * _REL_TOL < e.resolution:
            raise ScaleError(
                f"scale {smallest:g} is below the cloud resolution {e.resolution:g}")


@dataclass
class EstimateDiagnostics:
    """Per-scale evidence behind a dimension estimate."""

    scales: list[float] = field(default_factory=list)
    quantities: list[float] = field(default_factory=list)  # cover sums or capacities
    exponents: list[float] = field(default_factory=list)
    gaps: list[float] = field(default_factory=list)  # solver gaps (capacity path)
    residual: float = 0.0
    bracket: tuple[float, float] = (0.0, 0.0)
    notes: list[str] = field(default_factory=list)
    table: list[dict] = field(default_factory=list)  # estimator-specific rows

    def to_dict(self) -> dict:
        return {
            "scales": list(self.scales),
            "quantities": list(self.quantities),
            "exponents": list(self.exponents),
            "gaps": list(self.gaps),
            "residual": self.residual,
            "bracket": list(self.bracket),
            "notes": list(self.notes),
            "table": list(self.table),
        }


@dataclass
class DimensionEstimate:
    """A dimension value plus the regression evidence that produced it."""

    value: float
    mode: str
    window: tuple[float, float]
    diagnostics: EstimateDiagnostics

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "mode": self.mode,
            "window": list(self.window),
            "diagnostics": self.diagnostics.to_dict(),
        }


# ---------------------------------------------------------------------------
# Mesh box counting
# ---------------------------------------------------------------------------

def _cell_codes(points: np.ndarray, anchor: np.ndarray, side: float) -> np.ndarray:
    """Integer mesh coordinates, clamping top-edge points into the last cell."""
    rel = (points - anchor) / side
    codes = np.floor(rel).astype(np.int64)
    extent = points.max(axis=0) - anchor
    n_cells = np.maximum(np.ceil(extent / side - 1e-12).astype(np.int64), 1)
    np.minimum(codes, n_cells - 1, out=codes)
    np.maximum(codes, 0, out=codes)
    return codes


def _count_unique_rows(codes: np.ndarray) -> int:
    if codes.shape[1] == 1:
        return int(np.unique(codes[:, 0]).size)
    key = _row_key(codes)
    if key is not None:
        return int(np.unique(key).size)
    return int(np.unique(codes, axis=0).shape[0])


def _row_key(codes: np.ndarray) -> np.ndarray | None:
    """Pack integer rows into a single int64 key when the range permits."""
    spans = codes.max(axis=0) - codes.min(axis=0) + 1
    total_bits = float(np.sum(np.ceil(np.log2(np.maximum(spans, 2)))))
    if total_bits > 62:
        return None
    key = (codes[:, 0] - codes[:, 0].min()).astype(np.int64)
    for j in range(1, codes.shape[1]):
        col = codes[:, j] - codes[:, j].min()
        key = key * int(spans[j]) + col
    return key


def box_count(e: PointCloud, r: float) -> int:
    """Occupied cells of the axis-aligned mesh with side r/sqrt(d).

    Each cell then has diameter at most r, so the count upper-bounds the
    minimal number of diameter-r sets within a dimension-dependent factor
    that cancels in log-log regressions.
    """
    if not (0.0 < r < 1.0):
        raise ScaleError("r must lie in (0,1)")
    if r * _REL_TOL < e.resolution:
        raise ScaleError(f"r={r:g} is below the cloud resolution {e.resolution:g}")
    side = r / math.sqrt(e.dim)
    anchor = e.points.min(axis=0)
    codes = _cell_codes(e.points, anchor, side)
    return _count_unique_rows(codes)


# ---------------------------------------------------------------------------
# Dyadic cover dynamic program
# ---------------------------------------------------------------------------

class _DyadicTree:
    """Occupied dyadic cells of a cloud, grouped level by level.

    The structure depends only on the cloud and the leaf level, so one tree
    serves every s during a bisection. Levels run from the leaves (index 0)
    up to the root; `splits[k]` gives reduceat boundaries grouping level-k
    cells under their level-(k+1) parents.
    """

    def __init__(self, e: PointCloud, leaf_level: int):
        self.dim = e.dim
        pts = e.points
        anchor = pts.min(axis=0)
        self.root_side = max(float(np.max(pts.max(axis=0) - anchor)), 0.0)
        self.leaf_level = leaf_level
        if self.root_side == 0.0 or leaf_level == 0:
            self.leaf_count = 1
            self.splits: list[np.ndarray] = []
            self.level_sizes = [1]
            return
        side = self.root_side / (2 ** leaf_level)
        codes = _cell_codes(pts, anchor, side)
        codes = np.unique(codes, axis=0)
        order = None
        self.splits = []
        self.level_sizes = []
        current = codes
        self.level_sizes.append(current.shape[0])
        for _ in range(leaf_level):
            parents = current >> 1
            key = _row_key(parents)
            if key is None:
                _, inverse = np.unique(parents, axis=0, return_inverse=True)
                order = np.argsort(inverse, kind="stable")
                inv_sorted = inverse[order]
            else:
                order = np.argsort(key, kind="stable")
                inv_sorted = key[order]
            boundaries = np.flatnonzero(np.diff(inv_sorted)) + 1
            starts = np.concatenate(([0], boundaries))
            self.splits.append((order, starts))
            current = parents[order][starts]
            self.level_sizes.append(current.shape[0])
        self.leaf_count = self.level_sizes[0]

    def cost(self, s: float, r: float, r_upper: float) -> float:
        """Optimal dyadic cover cost for exponent s and window [r, r_upper]."""
        sqrt_d = math.sqrt(self.dim)
        if self.root_side == 0.0:
            return r ** s
        diam_leaf = self.root_side * sqrt_d / (2 ** self.leaf_level)
        costs = np.full(self.leaf_count, max(diam_leaf, r) ** s)
        level = self.leaf_level
        for order, starts in self.splits:
            level -= 1
            diam = self.root_side * sqrt_d / (2 ** level)
            summed = _group_sums(costs[order], starts)
            if diam <= r_upper * _REL_TOL:
                direct = max(diam, r) ** s
                costs = np.minimum(summed, direct)
            else:
                costs = summed
        return float(costs[0])


def _group_sums(values: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Per-group sums in strict left-to-right order within each group.

    Groups here have at most 2**dim members, so a few vectorized passes
    suffice; the canonical order keeps results bit-reproducible against a
    naive sequential reference.
    """
    ends = np.concatenate((starts[1:], [len(values)]))
    counts = ends - starts
    out = values[starts].copy()
    for j in range(1, int(counts.max())):
        mask = counts > j
        out[mask] += values[starts[mask] + j]
    return out


def _leaf_level(e: PointCloud, r: float) -> int:
    root_diam = e.extent() * math.sqrt(e.dim)
    if root_diam <= r:
        return 0
    return int(math.ceil(math.log2(root_diam / r) - 1e-12))


def cover_sum(e: PointCloud, s: float, r: float, theta: float) -> float:
    """Optimal-by-dyadic-covers value of the constrained covering sum.

    Upper-bounds the infimum of sum(|U_i|**s) over covers with diameters in
    [r, r**theta]; exact among covers by dyadic cells padded to diameter at
    least r.
    """
    _validate_scale_args(e, s, r, theta)
    tree = _DyadicTree(e, _leaf_level(e, r))
    return tree.cost(s, r, r ** theta)


def _validate_scale_args(e: PointCloud, s: float, r: float, theta: float) -> None:
    if not (0.0 < r < 1.0):
        raise ScaleError("r must lie in (0,1)")
    if r * _REL_TOL < e.resolution:
        raise ScaleError(f"r={r:g} is below the cloud resolution {e.resolution:g}")
    if not (0.0 < theta <= 1.0):
        raise ValueError("theta must lie in (0,1]")
    if not (-1e-12 <= s <= e.dim + 1e-12):
        raise ValueError(f"s={s:g} outside [0, {e.dim}]")


# ---------------------------------------------------------------------------
# Exponent aggregation and bisection, shared with the capacity module.
# ---------------------------------------------------------------------------

def aggregate_exponents(exponents: np.ndarray, scales: np.ndarray, mode: str,
                        curvature: bool = False) -> tuple[float, float]:
    """Collapse per-scale exponents into one number plus a fit residual.

    slope: least-squares extrapolation of the underlying log-quantity to
    r -> 0 (the slope of exponent*(-log r) against -log r). With
    `curvature` and six or more scales the fit carries a log(-log r) term
    and returns the leading coefficient: capacity-type quantities pick up
    exactly such slowly varying corrections near boundary kernel orders,
    while plain covering counts do not and keep the straight-line fit.
    lower/upper: min / max of the exponents over the window of the 3 finest
    scales, the finite stand-ins for liminf and limsup as r -> 0.
    """
    x = -np.log(scales)
    y = exponents * x
    if mode == "slope":
        if curvature and len(x) >= 6:
            design = np.column_stack([x, np.log(x), np.ones_like(x)])
            coef, *_ = np.linalg.lstsq(design, y, rcond=None)
            slope = coef[0]
            resid = float(np.sqrt(np.mean((y - design @ coef) ** 2)))
        else:
            slope, intercept = np.polyfit(x, y, 1)
            resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
        return float(slope), resid
    if mode not in ("lower", "upper"):
        raise ValueError(f"unknown mode {mode!r}")
    idx = np.argsort(scales)[:_WINDOW]
    vals = exponents[idx]
    agg = float(vals.min() if mode == "lower" else vals.max())
    return agg, float(vals.max() - vals.min())


def bisect_crossing(aggregate, lo: float, hi: float, tol: float = BISECT_TOL) -> tuple[float, tuple[float, float]]:
    """Find where a decreasing aggregate crosses zero on [lo, hi].

    Returns the midpoint of the final bracket plus the bracket itself; the
    endpoints are clamped when the aggregate never changes sign.
    """
    f_lo = aggregate(lo)
    if f_lo <= 0.0:
        return lo, (lo, lo)
    f_hi = aggregate(hi)
    if f_hi >= 0.0:
        return hi, (hi, hi)
    a, b = lo, hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        if aggregate(mid) >= 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b), (a, b)


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------

def estimate_intermediate_dim(e: PointCloud, theta: float | None, grid: ScaleGrid,
                              mode: str = "slope") -> DimensionEstimate:
    """Estimate the theta-intermediate dimension from constrained cover sums.

    For each candidate s the per-scale exponents log S / (-log r) aggregate
    into a single number that is strictly decreasing in s (its slope lies
    between -1 and -theta), so bisection pins the crossing to 1e-3.
    """
    th = grid.theta if theta is None else float(theta)
    if not (0.0 < th <= 1.0):
        raise ValueError("theta must lie in (0,1]")
    if len(grid) < 4:
        raise DiagnosticsError("grid too short: need at least 4 scales")
    grid.validate_for(e)

    notes: list[str] = []
    if theta is not None and abs(th - grid.theta) > 1e-12 and grid.theta != 1.0:
        notes.append(f"explicit theta={th:g} overrides grid theta={grid.theta:g}")
    diam = e.extent() * math.sqrt(e.dim)
    for r in grid.r_values:
        if th < 1.0 and diam > 0 and r ** th > diam * _REL_TOL:
            notes.append(f"upper window r**theta={r ** th:g} exceeds the diameter at r={r:g}")

    scales = np.asarray(grid.r_values)
    trees = [_DyadicTree(e, _leaf_level(e, r)) for r in scales]
    neg_log_r = -np.log(scales)

    def exponents_at(s: float) -> tuple[np.ndarray, np.ndarray]:
        sums = np.array([t.cost(s, r, r ** th) for t, r in zip(trees, scales)])
        return np.log(sums) / neg_log_r, sums

    def aggregate(s: float) -> float:
        exps, _ = exponents_at(s)
        agg, _ = aggregate_exponents(exps, scales, mode)
        return agg

    value, bracket = bisect_crossing(aggregate, 0.0, float(e.dim))
    exps, sums = exponents_at(value)
    _, resid = aggregate_exponents(exps, scales, mode)
    diag = EstimateDiagnostics(
        scales=list(map(float, scales)),
        quantities=list(map(float, sums)),
        exponents=list(map(float, exps)),
        residual=resid,
        bracket=bracket,
        notes=notes,
    )
    window = (float(scales.min()), float(scales.max()))
    return DimensionEstimate(value=float(value), mode=mode, window=window, diagnostics=diag)


def estimate_box_dim(e: PointCloud, grid: ScaleGrid, mode: str = "slope") -> DimensionEstimate:
    """Box-counting dimension estimate: the theta = 1 covering estimate."""
    return estimate_intermediate_dim(e, 1.0, grid, mode)
