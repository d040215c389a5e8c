"""Desk-scale checkers turning asymptotic dimension theorems into verdicts.

Equality statements that hold for almost every direction are tested as
median-plus-quantile statements over sampled directions, with every raw
per-direction value recorded so a reviewer can re-judge under different
slacks. Checks never abort the process; the CLI aggregates verdicts.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import assouad as asd
from .capacity import estimate_profile
from .covering import ScaleGrid, estimate_box_dim, estimate_intermediate_dim
from .errors import ScaleError
from .pointset import PointCloud, diameter
from .stochastic import FbmSampler, project, sample_grassmannian


@dataclass
class CheckVerdict:
    """Outcome of one theorem check.

    For plain checks `passed` follows the headline rule: lhs >= rhs - slack
    (inequality) or |lhs - rhs| <= slack (equality). Composite checks fold
    extra conditions (recorded in samples/notes) into `passed` as well.
    Checks whose hypotheses fail are reported with applicable=False and do
    not count as failures.
    """

    name: str
    inputs: dict
    digest: str
    kind: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    applicable: bool = True
    samples: list[dict] = field(default_factory=list)
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "digest": self.digest,
            "kind": self.kind,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "passed": self.passed,
            "applicable": self.applicable,
            "samples": self.samples,
            "notes": list(self.notes),
        }


def cloud_digest(e: PointCloud) -> str:
    h = hashlib.sha256()
    h.update(e.points.tobytes())
    h.update(repr((e.dim, e.resolution)).encode())
    return h.hexdigest()[:16]


def _digest(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=repr).encode()).hexdigest()[:16]


def _make_verdict(name: str, inputs: dict, kind: str, lhs: float, rhs: float, slack: float,
                  samples: list[dict] | None = None, notes: tuple[str, ...] = (),
                  applicable: bool = True, extra_ok: bool = True) -> CheckVerdict:
    if not applicable:
        passed = True
    elif kind == "inequality":
        passed = (lhs >= rhs - slack) and extra_ok
    elif kind == "equality":
        passed = (abs(lhs - rhs) <= slack) and extra_ok
    else:
        raise ValueError(f"unknown verdict kind {kind!r}")
    return CheckVerdict(name=name, inputs=inputs, digest=_digest(inputs), kind=kind,
                        lhs=float(lhs), rhs=float(rhs), slack=float(slack), passed=passed,
                        applicable=applicable, samples=samples or [], notes=notes)


def _inputs(name: str, e: PointCloud, seed: int | None = None, **params) -> dict:
    rec = {"check": name, "cloud": e.label, "cloud_sha": cloud_digest(e), "params": params}
    if seed is not None:
        rec["seed"] = int(seed)
    return rec


def _default_grid(e: PointCloud, theta: float = 1.0) -> ScaleGrid:
    return ScaleGrid.dyadic(resolution=e.resolution, theta=theta)


def _parallel_map(fn, n: int, jobs: int) -> list:
    if jobs <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, range(n)))


def default_scale_pairs(e: PointCloud, max_pairs: int = 12) -> list[tuple[float, float]]:
    """Dyadic (R, r) pairs probing localized thickness at shrinking anchors.

    The gap g = log2(R/r) grows together with the anchor exponent a of
    R = 2**-a, so sets whose worst-case local structure lives near small
    accumulation scales (for which large counts require small R) are probed
    as well as homogeneous ones. r stays one octave above the resolution.
    """
    diam = diameter(e)
    if diam <= 0:
        raise ScaleError("cloud has no extent; localized counting is trivial")
    base = max(3, int(math.ceil(-math.log2(diam))) + 1)
    r_exp_max = math.floor(math.log2(1.0 / e.resolution)) - 1
    pairs = []
    for g in range(2, 2 + max_pairs):
        a = max(base, g)
        if a + g > r_exp_max:
            break
        pairs.append((2.0 ** -a, 2.0 ** -(a + g)))
    if len(pairs) < 2:
        raise ScaleError("resolution too coarse for localized scale pairs")
    return pairs


# ---------------------------------------------------------------------------
# Projection checks
# ---------------------------------------------------------------------------

def _projection_estimates(e: PointCloud, m: int, theta: float, n_dirs: int, seed: int,
                          grid: ScaleGrid, jobs: int = 1) -> list[float]:
    def one(i: int) -> float:
        basis = sample_grassmannian(e.dim, m, seed, index=(i,))
        return estimate_intermediate_dim(project(e, basis), theta, grid).value

    return _parallel_map(one, n_dirs, jobs)


def check_projection_profile(e: PointCloud, m: int, theta: float, n_dirs: int,
                             grid: ScaleGrid | None = None, seed: int = 0,
                             slack: float = 0.1, jobs: int = 1,
                             profile_grid: ScaleGrid | None = None) -> CheckVerdict:
    """Almost-sure projected dimension against the profile at t = m.

    Passes when (a) no sampled direction estimates above profile + slack and
    (b) the median estimate sits within slack of the profile. The profile
    side may use its own (typically finer) grid: kernel energies stay
    informative below the scale where mesh counts saturate.
    """
    if not (1 <= m < e.dim):
        raise ValueError("need 1 <= m < dim")
    grid = grid or _default_grid(e, theta)
    prof = estimate_profile(e, float(m), theta, profile_grid or grid).value
    values = _projection_estimates(e, m, theta, n_dirs, seed, grid, jobs)
    arr = np.asarray(values)
    median = float(np.median(arr))
    n_over = int(np.sum(arr > prof + slack))
    p90 = float(np.quantile(np.abs(arr - prof), 0.9))
    samples = [{"direction": i, "value": float(v)} for i, v in enumerate(values)]
    notes = (f"p90 |estimate - profile| = {p90:.4g}", f"directions above bound: {n_over}")
    inputs = _inputs("projection_profile", e, seed=seed, m=m, theta=theta, n_dirs=n_dirs,
                     slack=slack, grid=list(grid.r_values))
    return _make_verdict("projection_profile", inputs, "equality", lhs=median, rhs=prof,
                         slack=slack, samples=samples, notes=notes, extra_ok=n_over == 0)


def check_marstrand_quasi(e: PointCloud, m: int, theta_list: list[float], n_dirs: int,
                          seed: int = 0, grid: ScaleGrid | None = None,
                          final_slack: float = 0.15, mono_slack: float = 0.02,
                          jobs: int = 1) -> CheckVerdict:
    """Finite-theta proxy for the quasi-Hausdorff projection law.

    Tracks gap(theta) = max(0, min(m, dim_theta(E)) - median projected
    dim_theta) along a decreasing theta list; passes when the gap does not
    increase (within a small tolerance for estimator noise) and the final
    gap is at most final_slack. The theta -> 0 limit itself is out of
    numerical reach.
    """
    if not (1 <= m < e.dim):
        raise ValueError("need 1 <= m < dim")
    thetas = [float(t) for t in theta_list]
    if any(b >= a for a, b in zip(thetas, thetas[1:])):
        raise ValueError("theta_list must be strictly decreasing")
    gaps = []
    samples = []
    for k, th in enumerate(thetas):
        g = grid or _default_grid(e, th)
        ref = min(float(m), estimate_intermediate_dim(e, th, g).value)
        values = _projection_estimates(e, m, th, n_dirs, seed, g, jobs)
        median = float(np.median(values))
        gap = max(0.0, ref - median)
        gaps.append(gap)
        samples.append({"theta": th, "reference": ref, "median": median, "gap": gap,
                        "values": [float(v) for v in values]})
    monotone = all(b <= a + mono_slack for a, b in zip(gaps, gaps[1:]))
    inputs = _inputs("marstrand_quasi", e, seed=seed, m=m, theta_list=thetas, n_dirs=n_dirs,
                     final_slack=final_slack, mono_slack=mono_slack)
    notes = ("finite-theta trend proxy; the theta->0 limit is not numerically reachable",
             f"gaps={['%.4f' % g for g in gaps]}")
    return _make_verdict("marstrand_quasi", inputs, "equality", lhs=gaps[-1], rhs=0.0,
                         slack=final_slack, samples=samples, notes=notes, extra_ok=monotone)


def exceptional_frequency(e: PointCloud, m: int, theta: float, lam: float, n_dirs: int,
                          seed: int = 0, grid: ScaleGrid | None = None,
                          jobs: int = 1) -> float:
    """Fraction of sampled directions whose projected estimate falls below lam."""
    if not (1 <= m < e.dim):
        raise ValueError("need 1 <= m < dim")
    grid = grid or _default_grid(e, theta)
    values = _projection_estimates(e, m, theta, n_dirs, seed, grid, jobs)
    return float(np.mean(np.asarray(values) < lam))


# ---------------------------------------------------------------------------
# Inequality checks
# ---------------------------------------------------------------------------

def check_profile_assouad_bound(e: PointCloud, t: float, theta: float, alpha: float,
                                grid: ScaleGrid | None = None, slack: float = 0.1,
                                skip_margin: float = 0.02,
                                scale_pairs: list[tuple[float, float]] | None = None) -> CheckVerdict:
    """Profile lower bound via Assouad quantities.

    Checks profile_t >= dim_theta - max(0, spectrum(alpha) - t,
    (assouad - t)(1 - alpha)). Skipped (reported, not failed) when the
    profile estimate is at or above t, matching the bound's hypothesis.
    """
    grid = grid or _default_grid(e, theta)
    prof_t = estimate_profile(e, t, theta, grid).value
    inputs = _inputs("profile_assouad_bound", e, t=t, theta=theta, alpha=alpha, slack=slack)
    if prof_t >= t - skip_margin:
        return _make_verdict("profile_assouad_bound", inputs, "inequality", lhs=prof_t, rhs=0.0,
                             slack=slack, applicable=False,
                             notes=(f"hypothesis profile < t not met (profile={prof_t:.4f}, t={t:g})",))
    dim_th = estimate_intermediate_dim(e, theta, grid).value
    spec = asd.estimate_assouad_spectrum(e, alpha).value
    adim = asd.estimate_assouad(e, scale_pairs or default_scale_pairs(e)).value
    rhs = dim_th - max(0.0, spec - t, (adim - t) * (1.0 - alpha))
    samples = [{"profile_t": prof_t, "dim_theta": dim_th, "spectrum": spec, "assouad": adim}]
    return _make_verdict("profile_assouad_bound", inputs, "inequality", lhs=prof_t, rhs=rhs,
                         slack=slack, samples=samples)


def check_profile_ratio_bound(e: PointCloud, s: float, t: float, theta: float,
                              grid: ScaleGrid | None = None,
                              slack: float = 0.07) -> CheckVerdict:
    """Profile self-consistency: profile_t >= profile_s / (1 + (1/t - 1/s) profile_s), t <= s."""
    if not (0.0 < t <= s <= e.dim + 1e-12):
        raise ValueError("need 0 < t <= s <= dim")
    grid = grid or _default_grid(e, theta)
    est_s = estimate_profile(e, s, theta, grid)
    est_t = est_s if t == s else estimate_profile(e, t, theta, grid)
    denom = 1.0 + (1.0 / t - 1.0 / s) * est_s.value
    rhs = est_s.value / denom if est_s.value > 0 else 0.0
    inputs = _inputs("profile_ratio_bound", e, s=s, t=t, theta=theta, slack=slack)
    samples = [{"profile_s": est_s.value, "profile_t": est_t.value}]
    return _make_verdict("profile_ratio_bound", inputs, "inequality", lhs=est_t.value, rhs=rhs,
                         slack=slack, samples=samples)


def check_banaji(e: PointCloud, theta: float, grid: ScaleGrid | None = None,
                 slack: float = 0.07) -> CheckVerdict:
    """Lower bound of the intermediate dimension in terms of the box dimension."""
    grid = grid or _default_grid(e, theta)
    lhs = estimate_intermediate_dim(e, theta, grid).value
    box = estimate_box_dim(e, grid).value
    d = float(e.dim)
    denom = d - (1.0 - theta) * box
    rhs = theta * d * box / denom if denom > 1e-12 else box
    inputs = _inputs("banaji_bound", e, theta=theta, slack=slack)
    samples = [{"dim_theta": lhs, "box": box}]
    return _make_verdict("banaji_bound", inputs, "inequality", lhs=lhs, rhs=rhs, slack=slack,
                         samples=samples)


def check_fbm(e: PointCloud, alpha: float, m: int, theta: float, n_seeds: int,
              grid: ScaleGrid | None = None, seed: int = 0, slack: float = 0.12,
              image_grid: ScaleGrid | None = None, jobs: int = 1) -> CheckVerdict:
    """Median dimension of fractional Brownian images against the rescaled profile."""
    t = m * alpha
    if t > e.dim + 1e-12:
        raise ValueError("need m * alpha <= dim")
    grid = grid or _default_grid(e, theta)
    prof = estimate_profile(e, t, theta, grid).value
    rhs = prof / alpha
    if image_grid is None:
        image_res = e.resolution ** alpha
        image_grid = ScaleGrid.dyadic_window(image_res, theta=theta)
    sampler = FbmSampler(e, alpha)

    def one(i: int) -> float:
        img = sampler.sample(m, seed, index=(i,)).image
        return estimate_intermediate_dim(img, theta, image_grid).value

    values = _parallel_map(one, n_seeds, jobs)
    lhs = float(np.median(values))
    samples = [{"seed_index": i, "value": float(v)} for i, v in enumerate(values)]
    inputs = _inputs("fbm_image", e, seed=seed, alpha=alpha, m=m, theta=theta,
                     n_seeds=n_seeds, slack=slack)
    notes = (f"profile at t={t:g}: {prof:.4f}",)
    return _make_verdict("fbm_image", inputs, "equality", lhs=lhs, rhs=rhs, slack=slack,
                         samples=samples, notes=notes)


def check_angelini(e: PointCloud, theta_list: list[float], grid: ScaleGrid | None = None,
                   slack: float = 0.08, precondition: float = 0.05,
                   alphas: tuple[float, ...] | None = None) -> CheckVerdict:
    """Constancy of the intermediate dimensions when box and quasi-Assouad agree.

    Not applicable (reported, not failed) unless the box and quasi-Assouad
    estimates agree within the precondition slack. Without an explicit
    alpha grid, the largest alphas the cloud's resolution can support are
    used for the quasi-Assouad extrapolation.
    """
    thetas = [float(t) for t in theta_list]
    box_grid = grid or _default_grid(e, 1.0)
    box = estimate_box_dim(e, box_grid).value
    alpha_grid = list(alphas) if alphas is not None else asd.usable_alphas(e)
    qa = asd.estimate_quasi_assouad(e, alpha_grid).value
    inputs = _inputs("angelini_constancy", e, theta_list=thetas, slack=slack,
                     precondition=precondition)
    samples = [{"box": box, "quasi_assouad": qa}]
    if abs(box - qa) > precondition:
        return _make_verdict("angelini_constancy", inputs, "equality", lhs=box, rhs=qa,
                             slack=slack, applicable=False, samples=samples,
                             notes=(f"hypothesis |box - quasi_assouad| <= {precondition:g} not met",))
    devs = []
    for th in thetas:
        g = grid or _default_grid(e, th)
        val = estimate_intermediate_dim(e, th, g).value
        devs.append(abs(val - box))
        samples.append({"theta": th, "dim_theta": val, "deviation": devs[-1]})
    lhs = max(devs)
    return _make_verdict("angelini_constancy", inputs, "equality", lhs=lhs, rhs=0.0,
                         slack=slack, samples=samples)
