"""Margin-maximizing linear projections.

The objective is ``trace(W^T (S_b - gamma * S_w) W)`` over orthonormal W.
Two routes reach the same subspace:

* the direct route eigendecomposes the d x d margin matrix and keeps the
  leading r eigenvectors;
* the kernelized route works entirely with inner products. It solves the
  Gram-weighted eigenproblem for the sample-space margin form (so the
  expansion coefficients are Gram-orthonormal), rescales the expanded
  vectors to unit length and orthonormalizes through an SVD whose last r
  left singular vectors, read in reverse, are the leading directions.

The kernelized route is exact, not approximate: for anchors spanning the
data the two routes agree to machine precision, which the acceptance suite
checks. The same sample-space solver is reused by the randomized,
layered and bilinear variants with their own anchor sets.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (InsufficientPositiveSpectrum, NegativeGamma,
                     RankDeficient, RTooLarge, ShapeMismatch)
from .numerics import svd, sym_eig
from .scatter import class_stats, laplacians, scatters

# relative floor separating "positive" margin eigenvalues from noise
EPS_POSITIVE = 1e-10
# relative floor for the Gram spectrum kept during whitening
EPS_GRAM = 1e-12


@dataclass(frozen=True)
class MmcParams:
    """Target dimension, within-class weight, branch threshold.

    ``theta`` is the feature-dimension threshold: `fit` takes the direct
    route below it and the kernelized route at or above it.
    ``branch_override`` forces "direct" or "kernel" regardless.
    """

    r: int
    gamma: float = 1.0
    theta: int = 1000
    branch_override: str = None


@dataclass(frozen=True)
class LinearModel:
    """Orthonormal projection ``w`` (d x r) with its per-direction margins."""

    w: np.ndarray
    params: MmcParams
    objective: np.ndarray
    branch: str

    @property
    def d(self):
        return self.w.shape[0]

    @property
    def r(self):
        return self.w.shape[1]


def _validate(ds, params):
    if params.r < 1:
        raise RTooLarge(f"r = {params.r} must be at least 1")
    if params.r > ds.d:
        raise RTooLarge(f"r = {params.r} exceeds feature dimension {ds.d}")
    if params.gamma < 0:
        raise NegativeGamma(f"gamma = {params.gamma}")


def anchored_directions(anchors, m, weight, gram, r):
    """Leading margin directions restricted to the span of `anchors`.

    `m` holds anchor-vs-data inner products in the operative space, `gram`
    the anchor Gram matrix there, and `weight` the sample-space margin
    form: either a dense n x n matrix (a Laplacian) or a length-N vector
    of diagonal weights on deviation columns. Solves the Gram-weighted
    eigenproblem by whitening the Gram, drops the nonpositive part of the
    spectrum, and orthonormalizes the expanded directions via SVD. The
    last r left singular vectors in reverse order are the directions in
    descending margin order.

    Returns ``(w, margins)`` where w has orthonormal columns in anchor
    space and margins are the kept positive eigenvalues (length >= r).
    """
    if weight.ndim == 2:
        mjm = m @ (weight @ m.T)
    else:
        mjm = (m * weight) @ m.T
    mjm = (mjm + mjm.T) / 2.0
    gram = (gram + gram.T) / 2.0

    gvals, gvecs = np.linalg.eigh(gram)
    keep = gvals > EPS_GRAM * max(1.0, float(gvals[-1]))
    if not np.any(keep):
        raise InsufficientPositiveSpectrum("anchor Gram matrix is zero")
    white = gvecs[:, keep] * gvals[keep] ** -0.5

    core = sym_eig(white.T @ mjm @ white)
    pos = core.values > EPS_POSITIVE * max(1.0, float(core.values[0]))
    n_pos = int(np.count_nonzero(pos))
    if n_pos < r:
        raise InsufficientPositiveSpectrum(
            f"{n_pos} positive directions available, {r} requested")
    margins = core.values[:n_pos]
    coeffs = white @ core.vectors[:, :n_pos]

    expanded = anchors @ (coeffs * margins ** -0.5)
    dec = svd(expanded)
    w = np.ascontiguousarray(dec.u[:, -r:][:, ::-1])
    if not np.all(np.isfinite(w)):
        raise RankDeficient("non-finite directions")
    return w, margins


def _margin_objective(w, x, lap):
    """Per-direction margins ``diag(w^T X L X^T w)`` via the Laplacian."""
    y = x.T @ w
    return np.einsum("ij,ij->j", y, lap @ y)


def fit_direct(ds, params):
    """Eigendecompose the d x d margin matrix and keep the top r columns."""
    _validate(ds, params)
    stats = class_stats(ds)
    pair = scatters(ds, stats)
    eig = sym_eig(pair.s_b - params.gamma * pair.s_w)
    w = np.ascontiguousarray(eig.vectors[:, :params.r])
    if not np.all(np.isfinite(w)):
        raise RankDeficient("non-finite directions")
    return LinearModel(w=w, params=params,
                       objective=eig.values[:params.r].copy(),
                       branch="direct")


def fit_kernel(ds, params):
    """Same subspace as `fit_direct`, computed from inner products only.

    Requires the leading r margin eigenvalues to be strictly positive
    (they live in the span of the data, which is all the kernel route can
    see); raises InsufficientPositiveSpectrum otherwise.
    """
    _validate(ds, params)
    class_stats(ds)  # class structure checks
    lap = laplacians(ds.labels, params.gamma)
    k = ds.x.T @ ds.x
    w, _ = anchored_directions(ds.x, k, lap.l, k, params.r)
    objective = _margin_objective(w, ds.x, lap.l)
    return LinearModel(w=w, params=params, objective=objective,
                       branch="kernel")


def fit(ds, params):
    """Dispatch on feature dimension: direct below theta, kernel at or above."""
    branch = params.branch_override
    if branch is None:
        branch = "direct" if ds.d < params.theta else "kernel"
    if branch == "direct":
        return fit_direct(ds, params)
    if branch == "kernel":
        return fit_kernel(ds, params)
    raise ValueError(f"unknown branch {branch!r}")


def transform(model, x):
    """Project columns of x; a 1-D input is treated as one sample."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[:, None]
    if x.shape[0] != model.d:
        raise ShapeMismatch(
            f"model expects {model.d} features, got {x.shape[0]}")
    y = model.w.T @ x
    return y[:, 0] if single else y
