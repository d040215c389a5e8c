"""Haar-random subspaces, orthogonal projections, and fractional Brownian images.

Randomness is counter-based (Philox) and keyed by (seed, task indices), so
any sample can be reproduced in isolation regardless of loop scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import NumericError, SizeError
from .pointset import PointCloud
from .rng import stream

FBM_CAP = 2 ** 13
GRAM_TOL = 1e-10
_JITTERS = tuple(1e-12 * 10.0 ** k for k in range(4))


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis (columns) of an m-dimensional subspace of R^d."""

    matrix: np.ndarray
    seed_info: tuple

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError("matrix must be d x m")
        gram = m.T @ m
        dev = float(np.abs(gram - np.eye(m.shape[1])).max())
        if dev > GRAM_TOL:
            raise ValueError(f"columns not orthonormal: Gram deviation {dev:.3e}")
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def m(self) -> int:
        return self.matrix.shape[1]

    def gram_deviation(self) -> float:
        g = self.matrix.T @ self.matrix
        return float(np.abs(g - np.eye(self.m)).max())


def sample_grassmannian(d: int, m: int, seed: int, index: tuple = ()) -> SubspaceBasis:
    """Haar-distributed m-dimensional subspace of R^d.

    QR of a standard Gaussian matrix with the R diagonal forced positive;
    this makes the column span exactly rotation invariant.
    """
    if not (1 <= m <= d):
        raise ValueError(f"need 1 <= m <= d, got m={m}, d={d}")
    rng = stream(seed, *index)
    g = rng.standard_normal((d, m))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    return SubspaceBasis(matrix=q, seed_info=(int(seed), *index))


def project(e: PointCloud, v: SubspaceBasis) -> PointCloud:
    """Coordinates of the cloud in the basis: an m-dimensional isometric copy
    of the orthogonal projection. The resolution carries over."""
    if e.dim != v.d:
        raise ValueError(f"cloud dimension {e.dim} does not match basis dimension {v.d}")
    coords = e.points @ v.matrix
    return PointCloud.from_array(coords, e.resolution, label=f"{e.label}|proj{v.m}")


@dataclass(frozen=True)
class FbmSample:
    """One fractional Brownian image of a cloud, aligned index-wise with it."""

    alpha: float
    m: int
    image: PointCloud
    seed_info: tuple


class FbmSampler:
    """Reusable sampler for index-alpha fractional Brownian images of one cloud.

    The Gaussian field has increments of variance |x-y|**(2*alpha) and is
    pinned to zero at the origin, giving the covariance
    C(x, y) = (|x|**(2a) + |y|**(2a) - |x-y|**(2a)) / 2.
    The Cholesky factor is computed once (with an escalating diagonal jitter
    against rounding; the matrix is semidefinite in exact arithmetic) and
    shared by all seeds. Points exactly at the origin have zero variance and
    map to zero by construction.
    """

    def __init__(self, e: PointCloud, alpha: float):
        if not (0.0 < alpha < 1.0):
            raise ValueError("alpha must lie in (0,1)")
        if e.size > FBM_CAP:
            raise SizeError(f"cloud of {e.size} points above the fBm cap {FBM_CAP}")
        self.source = e
        self.alpha = float(alpha)
        norms = np.linalg.norm(e.points, axis=1)
        self.zero_mask = norms == 0.0
        nz = ~self.zero_mask
        pts = e.points[nz]
        self.nz_index = np.flatnonzero(nz)
        if pts.shape[0] == 0:
            self.chol = None
            return
        a2 = 2.0 * self.alpha
        pair = squareform(pdist(pts)) ** a2 if pts.shape[0] > 1 else np.zeros((1, 1))
        pow_norms = norms[nz] ** a2
        cov = 0.5 * (pow_norms[:, None] + pow_norms[None, :] - pair)
        self.chol = _jittered_cholesky(cov)

    def sample(self, m: int, seed: int, index: tuple = ()) -> FbmSample:
        if m < 1:
            raise ValueError("m must be >= 1")
        rng = stream(seed, *index)
        n = self.source.size
        image = np.zeros((n, m))
        if self.chol is not None:
            z = rng.standard_normal((self.chol.shape[0], m))
            image[self.nz_index] = self.chol @ z
        res = self.source.resolution ** self.alpha
        extent = image.max(axis=0) - image.min(axis=0)
        diag = float(np.linalg.norm(extent))
        if diag > 0:
            res = min(res, diag)
        cloud = PointCloud.from_array(image, res,
                                      label=f"{self.source.label}|fbm(a={self.alpha:g},m={m})")
        return FbmSample(alpha=self.alpha, m=m, image=cloud, seed_info=(int(seed), *index))


def _jittered_cholesky(cov: np.ndarray) -> np.ndarray:
    n = cov.shape[0]
    for jit in _JITTERS:
        try:
            return np.linalg.cholesky(cov + jit * np.eye(n))
        except np.linalg.LinAlgError:
            continue
    raise NumericError("fBm covariance Cholesky failed at maximal jitter")


def sample_fbm(e: PointCloud, alpha: float, m: int, seed: int, index: tuple = ()) -> FbmSample:
    """One index-alpha fractional Brownian image with m independent coordinates.

    The image cloud's resolution is set heuristically to
    (source resolution)**alpha, since Hoelder roughness rescales which
    scales the image represents faithfully.
    """
    return FbmSampler(e, alpha).sample(m, seed, index)
