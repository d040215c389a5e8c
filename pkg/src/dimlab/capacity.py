"""Kernel energies, capacities, and dimension profile estimates.

The profile of a cloud at exponent pair (s, t) is driven by the reciprocal
of the minimal quadratic energy w.T K w over the probability simplex, where
K holds pairwise values of a piecewise power-law kernel: flat at 1 inside
radius r, decaying like (r/d)**s up to r**theta, and like d**-t beyond.
The minimizer is found by Frank-Wolfe with away steps; every iteration
touches a single kernel column, so no full matrix is required above the
dense cap, and the duality gap certifies the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.spatial.distance import pdist, squareform

from .covering import (
    BISECT_TOL,
    DimensionEstimate,
    EstimateDiagnostics,
    ScaleGrid,
    aggregate_exponents,
    bisect_crossing,
)
from .errors import DiagnosticsError, ScaleError, SizeError
from .pointset import PointCloud
from .rng import stream

DENSE_CAP = 4096          # full kernel matrices up to this many points
SUBSAMPLE_CAP = 2 ** 14   # farthest-point cap for working point sets
MERGE_EXP = 7             # per-scale merge width is r * 2**-MERGE_EXP
RITZ_TOL_FACTOR = 1e-8    # "materially negative" threshold is -factor * n
_RESTART_SEED = 0x0D1A7AB  # fixed stream for indefinite-kernel restarts


@dataclass(frozen=True)
class KernelParams:
    """Exponent pair (s, t) and scale pair (r, theta) of the kernel."""

    s: float
    t: float
    r: float
    theta: float

    def __post_init__(self):
        if not (0.0 <= self.s <= self.t + 1e-12):
            raise ValueError("need 0 <= s <= t")
        if not (0.0 < self.r < 1.0):
            raise ValueError("need 0 < r < 1")
        if not (0.0 < self.theta <= 1.0):
            raise ValueError("need theta in (0,1]")


def kernel_phi(params: KernelParams, dist):
    """Piecewise kernel: 1 below r, (r/d)**s up to r**theta, then decay of order t.

    Continuous at both breakpoints; dist may be a scalar or an array.
    """
    d = np.asarray(dist, dtype=float)
    scalar = d.ndim == 0
    d = np.atleast_1d(d)
    r, th, s, t = params.r, params.theta, params.s, params.t
    ru = r ** th
    out = np.ones_like(d)
    mid = (d >= r) & (d <= ru)
    far = d > ru
    out[mid] = (r / d[mid]) ** s
    out[far] = r ** (th * (t - s) + s) / d[far] ** t
    return float(out[0]) if scalar else out


def kernel_phi_trunc(s: float, r: float, theta: float, dist):
    """Truncated kernel: as kernel_phi inside radius r**theta, zero at and beyond it."""
    if s < 0:
        raise ValueError("need s >= 0")
    if not (0.0 < r < 1.0):
        raise ValueError("need 0 < r < 1")
    if not (0.0 < theta <= 1.0):
        raise ValueError("need theta in (0,1]")
    d = np.asarray(dist, dtype=float)
    scalar = d.ndim == 0
    d = np.atleast_1d(d)
    ru = r ** theta
    out = np.ones_like(d)
    mid = (d >= r) & (d < ru)
    out[mid] = (r / d[mid]) ** s
    out[d >= ru] = 0.0
    return float(out[0]) if scalar else out


@dataclass
class SimplexMeasure:
    """Probability weights over the points of a cloud."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty vector")
        if np.any(w < -1e-15):
            raise ValueError("weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")
        self.weights = w

    @classmethod
    def uniform(cls, n: int) -> "SimplexMeasure":
        return cls(np.full(n, 1.0 / n))


@dataclass
class EnergySolution:
    """Outcome of one simplex energy minimization."""

    measure: SimplexMeasure
    energy: float
    gap: float
    iterations: int
    ritz_min: float | None = None
    notes: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Kernel matrix access
# ---------------------------------------------------------------------------

class _KernelColumns:
    """Column access to the kernel matrix of a point set.

    Dense when n is small enough; otherwise columns are computed from the
    points on demand and memoized.
    """

    def __init__(self, points: np.ndarray, params: KernelParams, dense_cap: int = DENSE_CAP,
                 matrix: np.ndarray | None = None):
        self.points = points
        self.params = params
        self.n = points.shape[0]
        if matrix is not None:
            self.K = matrix
        elif self.n <= dense_cap:
            try:
                dists = squareform(pdist(points))
            except MemoryError as exc:  # pragma: no cover
                raise SizeError(f"kernel matrix for n={self.n} does not fit") from exc
            self.K = kernel_phi(params, dists)
        else:
            self.K = None
            self._cache: dict[int, np.ndarray] = {}

    def col(self, i: int) -> np.ndarray:
        if self.K is not None:
            return self.K[:, i]
        cached = self._cache.get(i)
        if cached is None:
            d = np.linalg.norm(self.points - self.points[i], axis=1)
            cached = kernel_phi(self.params, d)
            if len(self._cache) < 4096:
                self._cache[i] = cached
        return cached

    def matvec(self, w: np.ndarray) -> np.ndarray:
        if self.K is not None:
            return self.K @ w
        out = np.zeros(self.n)
        for i in np.flatnonzero(w):
            out += w[i] * self.col(i)
        return out


# ---------------------------------------------------------------------------
# Frank-Wolfe with away steps
# ---------------------------------------------------------------------------

def _afw_minimize(op: _KernelColumns, tol: float, max_iter: int,
                  w0: np.ndarray | None = None, rel_tol: float = 0.0):
    """Minimize w.T K w over the simplex; stop when the duality gap is small.

    Steps use exact line search for the quadratic; away steps may drop a
    support atom entirely. The running gradient 2*K*w is updated from one
    kernel column per iteration and refreshed periodically against drift.
    """
    n = op.n
    if w0 is not None:
        w = w0.copy()
    else:
        w = np.full(n, 1.0 / n)
    Kw = op.matvec(w)
    energy = float(w @ Kw)
    it = 0
    gap = math.inf
    for it in range(1, max_iter + 1):
        i_fw = int(np.argmin(Kw))
        gap = 2.0 * (energy - Kw[i_fw])
        if gap <= max(tol, rel_tol * energy):
            break
        support = np.flatnonzero(w > 0)
        j_aw = int(support[np.argmax(Kw[support])])
        fw_descent = energy - Kw[i_fw]
        aw_descent = Kw[j_aw] - energy
        use_fw = fw_descent >= aw_descent or w[j_aw] >= 1.0 - 1e-15
        if use_fw:
            Kd = op.col(i_fw) - Kw
            dKd = float(Kd[i_fw] - w @ Kd)
            g_d = 2.0 * (Kw[i_fw] - energy)
            gamma_max = 1.0
        else:
            Kd = Kw - op.col(j_aw)
            dKd = float(w @ Kd - Kd[j_aw])
            g_d = 2.0 * (energy - Kw[j_aw])
            gamma_max = w[j_aw] / (1.0 - w[j_aw])
        if dKd > 0.0:
            gamma = min(gamma_max, -g_d / (2.0 * dKd))
        else:
            gamma = gamma_max
        if gamma <= 0.0:
            break
        if use_fw:
            w *= 1.0 - gamma
            w[i_fw] += gamma
        else:
            w *= 1.0 + gamma
            w[j_aw] -= gamma
            if gamma >= gamma_max * (1.0 - 1e-12):
                w[j_aw] = 0.0
        np.maximum(w, 0.0, out=w)
        Kw += gamma * Kd
        energy += gamma * g_d + gamma * gamma * dKd
        if it % 256 == 0:
            w /= w.sum()
            Kw = op.matvec(w)
            energy = float(w @ Kw)
    w /= w.sum()
    Kw = op.matvec(w)
    energy = float(w @ Kw)
    gap = 2.0 * (energy - float(Kw.min()))
    return w, energy, max(gap, 0.0), it


def _lanczos_min_ritz(matvec, n: int, iters: int = 16) -> float:
    """Smallest Ritz value from a short Lanczos run with a fixed start vector."""
    iters = min(iters, n)
    v = 1.0 + 0.5 * np.cos(np.arange(n, dtype=float))
    v /= np.linalg.norm(v)
    basis = [v]
    alphas: list[float] = []
    betas: list[float] = []
    for k in range(iters):
        hv = matvec(basis[k])
        alpha = float(basis[k] @ hv)
        alphas.append(alpha)
        hv = hv - alpha * basis[k]
        if k > 0:
            hv = hv - betas[-1] * basis[k - 1]
        for b in basis:  # full reorthogonalization; the basis stays tiny
            hv -= (b @ hv) * b
        beta = float(np.linalg.norm(hv))
        if beta < 1e-14 or k == iters - 1:
            break
        betas.append(beta)
        basis.append(hv / beta)
    if len(alphas) == 1:
        return alphas[0]
    return float(eigvalsh_tridiagonal(np.array(alphas), np.array(betas)).min())


def _probe_ritz(op: _KernelColumns, probe_cap: int = 2048) -> float:
    """Smallest Ritz value of the kernel matrix (or of a principal minor).

    Above the cap a deterministic evenly spaced minor is probed; a negative
    Ritz value of a minor still certifies indefiniteness of the full matrix.
    """
    if op.K is not None and op.n <= probe_cap:
        return _lanczos_min_ritz(lambda v: op.K @ v, op.n)
    idx = np.linspace(0, op.n - 1, num=min(op.n, probe_cap), dtype=int)
    idx = np.unique(idx)
    sub = op.points[idx]
    d = squareform(pdist(sub))
    K = kernel_phi(op.params, d)
    return _lanczos_min_ritz(lambda v: K @ v, len(idx))


def min_energy(e: PointCloud, params: KernelParams, tol: float = 1e-9,
               max_iter: int = 200_000, probe: bool = True,
               dense_cap: int = DENSE_CAP) -> EnergySolution:
    """Approximately minimal kernel energy over probability measures on the cloud.

    The returned gap is the Frank-Wolfe duality certificate: for a convex
    (positive semidefinite) kernel matrix it bounds the distance to the true
    minimum. Since discrete kernel matrices need not be semidefinite, a short
    Lanczos probe reports the smallest Ritz value; when it is materially
    negative the solve restarts from 8 fixed random vertices and keeps the
    best energy found.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = e.size
    if n == 1:
        return EnergySolution(SimplexMeasure(np.array([1.0])), 1.0, 0.0, 0, ritz_min=None)
    op = _KernelColumns(e.points, params, dense_cap=dense_cap)
    w, energy, gap, iters = _afw_minimize(op, tol, max_iter)
    notes: list[str] = []
    ritz = None
    if probe:
        ritz = _probe_ritz(op)
        if ritz < -RITZ_TOL_FACTOR * n:
            notes.append(f"kernel matrix indefinite (min ritz {ritz:.3e}); multistart applied")
            rng = stream(_RESTART_SEED, n)
            starts = rng.integers(0, n, size=8)
            for i0 in starts:
                w0 = np.zeros(n)
                w0[int(i0)] = 1.0
                w2, e2, g2, it2 = _afw_minimize(op, tol, max_iter, w0=w0)
                iters += it2
                if e2 < energy:
                    w, energy, gap = w2, e2, g2
    return EnergySolution(SimplexMeasure(w), energy, gap, iters, ritz_min=ritz,
                          notes=tuple(notes))


def capacity(e: PointCloud, params: KernelParams, **kwargs) -> float:
    """Reciprocal minimal energy; lies in [1, number of points]."""
    return 1.0 / min_energy(e, params, **kwargs).energy


# ---------------------------------------------------------------------------
# Working point sets per scale
# ---------------------------------------------------------------------------

def _consolidate(points: np.ndarray, h: float) -> np.ndarray:
    """Merge points indistinguishable below h: mean of each occupied h-cell."""
    anchor = points.min(axis=0)
    codes = np.floor((points - anchor) / h).astype(np.int64)
    if codes.shape[1] == 1:
        key = codes[:, 0]
    else:
        spans = codes.max(axis=0) + 1
        if float(np.sum(np.ceil(np.log2(np.maximum(spans, 2))))) > 62:
            _, inverse = np.unique(codes, axis=0, return_inverse=True)
            key = inverse.reshape(-1)
        else:
            key = codes[:, 0].astype(np.int64)
            for j in range(1, codes.shape[1]):
                key = key * int(spans[j]) + codes[:, j]
    order = np.argsort(key, kind="stable")
    sorted_key = key[order]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(sorted_key)) + 1))
    sums = np.add.reduceat(points[order], starts, axis=0)
    counts = np.diff(np.concatenate((starts, [len(points)])))
    return sums / counts[:, None]


def _farthest_point_subsample(points: np.ndarray, k: int) -> np.ndarray:
    """Greedy farthest-point selection of k representatives (start at index 0)."""
    n = points.shape[0]
    if n <= k:
        return points
    chosen = np.empty(k, dtype=int)
    chosen[0] = 0
    dist = np.linalg.norm(points - points[0], axis=1)
    for i in range(1, k):
        nxt = int(np.argmax(dist))
        chosen[i] = nxt
        np.minimum(dist, np.linalg.norm(points - points[nxt], axis=1), out=dist)
    return points[np.sort(chosen)]


class _ScaleWorkspace:
    """Per-scale state for profile estimation: merged points and kernel parts.

    Merging uses cells of side r * 2**-MERGE_EXP, so positions move by less
    than r/128 and kernel entries by under one percent relative; the merged
    set is shared by every s during the bisection, as are the cached
    log-distance and far-branch arrays in the dense regime.
    """

    def __init__(self, points: np.ndarray, r: float, theta: float, t: float,
                 dense_cap: int = DENSE_CAP, subsample_cap: int = SUBSAMPLE_CAP):
        self.r = r
        self.theta = theta
        self.t = t
        self.notes: list[str] = []
        h = r * 2.0 ** -MERGE_EXP
        work = _consolidate(points, h)
        if work.shape[0] < points.shape[0]:
            self.notes.append(
                f"r={r:g}: merged {points.shape[0]} points into {work.shape[0]} "
                f"representatives at width {h:g}")
        if work.shape[0] > subsample_cap:
            work = _farthest_point_subsample(work, subsample_cap)
            self.notes.append(f"r={r:g}: farthest-point subsample to {subsample_cap} points")
        self.points = work
        self.n = work.shape[0]
        self.dense = self.n <= dense_cap
        self.w_prev: np.ndarray | None = None
        if self.dense and self.n > 1:
            dists = squareform(pdist(work))
            np.maximum(dists, 1e-300, out=dists)
            self._logratio = math.log(r) - np.log(dists)
            far = dists > r ** theta
            self._far = far
            self._far_pow = dists[far] ** (-t)
        else:
            self._logratio = None

    def operator(self, s: float) -> _KernelColumns:
        params = KernelParams(s=s, t=self.t, r=self.r, theta=self.theta)
        if self._logratio is not None:
            K = np.exp(np.minimum(s * self._logratio, 0.0))
            K[self._far] = self.r ** (self.theta * (self.t - s) + s) * self._far_pow
            return _KernelColumns(self.points, params, matrix=K)
        return _KernelColumns(self.points, params)

    def solve(self, s: float, tol: float, rel_tol: float, max_iter: int):
        if self.n == 1:
            return 1.0, 0.0
        op = self.operator(s)
        w0 = self.w_prev
        w, energy, gap, _ = _afw_minimize(op, tol, max_iter, w0=w0, rel_tol=rel_tol)
        self.w_prev = w
        return energy, gap

    def probe(self, s: float) -> float | None:
        if self.n == 1:
            return None
        return _probe_ritz(self.operator(s))


def estimate_profile(e: PointCloud, t: float, theta: float, grid: ScaleGrid,
                     mode: str = "slope", solver_rel_gap: float = 1e-4,
                     solver_gap: float = 1e-9, max_iter: int = 100_000,
                     dense_cap: int = DENSE_CAP,
                     probe: bool = True) -> DimensionEstimate:
    """Dimension profile at parameter t: the exponent s where capacity growth matches s.

    Bisection on s in [0, t] locates the zero of the aggregated value of
    log(capacity)/(-log r) - s, which decreases in s; tolerance 1e-3. Solver
    gaps above tolerance and materially indefinite kernel matrices mark the
    affected scale in the diagnostics rather than aborting.
    """
    if not (0.0 < t <= e.dim + 1e-12):
        raise ValueError(f"t={t:g} outside (0, {e.dim}]")
    if not (0.0 < theta <= 1.0):
        raise ValueError("theta must lie in (0,1]")
    if len(grid) < 4:
        raise DiagnosticsError("grid too short: need at least 4 scales")
    grid.validate_for(e)

    scales = np.asarray(grid.r_values)
    neg_log_r = -np.log(scales)
    workspaces = [_ScaleWorkspace(e.points, float(r), theta, float(t), dense_cap=dense_cap)
                  for r in scales]
    notes: list[str] = []
    for ws in workspaces:
        notes.extend(ws.notes)

    def capacities_at(s: float) -> tuple[np.ndarray, np.ndarray]:
        caps = np.empty(len(scales))
        gaps = np.empty(len(scales))
        for k, ws in enumerate(workspaces):
            energy, gap = ws.solve(s, solver_gap, solver_rel_gap, max_iter)
            caps[k] = 1.0 / energy
            gaps[k] = gap
        return caps, gaps

    def aggregate(s: float) -> float:
        caps, _ = capacities_at(s)
        exps = np.log(caps) / neg_log_r
        agg, _ = aggregate_exponents(exps, scales, mode, curvature=True)
        return agg - s

    value, bracket = bisect_crossing(aggregate, 0.0, float(t))
    caps, gaps = capacities_at(value)
    exps = np.log(caps) / neg_log_r
    _, resid = aggregate_exponents(exps, scales, mode, curvature=True)

    for k, ws in enumerate(workspaces):
        rel = gaps[k] * caps[k]  # gap relative to the energy level
        if rel > 10 * solver_rel_gap:
            notes.append(f"r={scales[k]:g}: solver gap {gaps[k]:.3e} above tolerance")
        if probe:
            ritz = ws.probe(value)
            if ritz is not None and ritz < -RITZ_TOL_FACTOR * ws.n:
                notes.append(f"r={scales[k]:g}: untrusted scale, min ritz {ritz:.3e}")

    diag = EstimateDiagnostics(
        scales=list(map(float, scales)),
        quantities=list(map(float, caps)),
        exponents=list(map(float, exps)),
        gaps=list(map(float, gaps)),
        residual=resid,
        bracket=bracket,
        notes=notes,
    )
    window = (float(scales.min()), float(scales.max()))
    return DimensionEstimate(value=float(value), mode=mode, window=window, diagnostics=diag)
