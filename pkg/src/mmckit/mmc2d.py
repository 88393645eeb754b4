"""Bilinear margin projections for image data.

Images are reduced from both sides at once: ``y = P^T x Q`` with P found
from the row-side (left) scatters and Q from the column-side (right)
scatters. The two sides are solved independently, no alternation. Each
side takes the direct eigendecomposition below the dimension threshold and
an anchored sample-space solve at or above it, mirroring the vector code.

The layered variant expands images through a seeded random bilinear map
before fitting, then composes the expansion back into projections on the
original image shape.

All scatter accumulation runs in canonical sample order (see
`scatter.canonical_order`), so fitted models are byte-identical under any
permutation of the input samples.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (InsufficientSamples, NegativeGamma, RTooLarge,
                     ShapeMismatch, SingleClass)
from .mmc import anchored_directions
from .numerics import svd, sym_eig
from .rng import derive_seed, make_rng
from .scatter import canonical_order

# side tags for seed derivation
_LEFT, _RIGHT = 0, 1


@dataclass(frozen=True)
class Mmc2dParams:
    """Row-side target l, column-side target r, weight, branch threshold."""

    l: int
    r: int
    gamma: float = 1.0
    theta: int = 1000
    seed: int = 0


@dataclass(frozen=True)
class BilinearModel:
    """Projections ``p`` (d1 x l), ``q`` (d2 x r) and per-side margins."""

    p: np.ndarray
    q: np.ndarray
    params: Mmc2dParams
    objective_left: np.ndarray
    objective_right: np.ndarray

    @property
    def d1(self):
        return self.p.shape[0]

    @property
    def d2(self):
        return self.q.shape[0]


@dataclass(frozen=True)
class L2d2Params:
    """Layered bilinear fit: base params plus expanded shape (h1, h2)."""

    base: Mmc2dParams
    h1: int
    h2: int


def _check_classes(labels, counts):
    if len(counts) < 2:
        raise SingleClass("need at least two classes")
    for cls, count in enumerate(counts):
        if count == 0:
            raise InsufficientSamples(cls, "class absent from dataset")


def _side_stack(images, labels, gamma):
    """Factor the left-side margin form into weighted deviation columns.

    Returns ``(hat, weights)`` with hat of shape (h, N): class-mean
    deviations weighted by class size, then sample deviations weighted by
    ``-gamma``. Then ``S_bl - gamma * S_wl = hat @ diag(weights) @ hat.T``
    without ever forming an h x h matrix here. Input must already be in
    canonical order.
    """
    n, h, wdim = images.shape
    counts = np.bincount(labels)
    means = np.zeros((len(counts), h, wdim))
    np.add.at(means, labels, images)
    means /= counts[:, None, None]
    gmean = images.mean(axis=0)

    dev_b = (means - gmean).transpose(1, 0, 2).reshape(h, -1)
    dev_w = (images - means[labels]).transpose(1, 0, 2).reshape(h, -1)
    hat = np.hstack([dev_b, dev_w])
    weights = np.concatenate([
        np.repeat(counts.astype(float), wdim),
        np.full(n * wdim, -float(gamma)),
    ])
    return hat, weights


def _side_direct(images, labels, gamma, target):
    """Dense left-side solve: eigendecompose the h x h margin matrix."""
    hat, weights = _side_stack(images, labels, gamma)
    margin = (hat * weights) @ hat.T
    eig = sym_eig((margin + margin.T) / 2.0)
    basis = np.ascontiguousarray(eig.vectors[:, :target])
    return basis, eig.values[:target].copy()


def _side_anchored(images, labels, gamma, target, seed):
    """Sample-space left-side solve for tall sides.

    Anchors are 2 * target seeded columns of the global-deviation stack;
    the margin objective is recomputed for the returned basis.
    """
    n, h, wdim = images.shape
    hat, weights = _side_stack(images, labels, gamma)
    scale = float(np.abs(hat).max()) if hat.size else 0.0
    if scale <= 1e-12 * max(1.0, float(np.abs(images).max())):
        # every sample identical: nothing to separate, fall back to the
        # canonical basis with zero margins
        return np.eye(h)[:, :target].copy(), np.zeros(target)

    dev_g = (images - images.mean(axis=0)).transpose(1, 0, 2).reshape(h, -1)
    t = min(2 * target, dev_g.shape[1])
    idx = make_rng(seed).permutation(dev_g.shape[1])[:t]
    anchors = dev_g[:, idx]
    m = anchors.T @ hat
    gram = anchors.T @ anchors
    basis, _ = anchored_directions(anchors, m, weights, gram, target)
    proj = hat.T @ basis
    objective = np.einsum("ij,ij->j", proj, proj * weights[:, None])
    return basis, objective


def _align_to_margin(basis, images, labels, gamma):
    """Diagonalize the side margin form restricted to span(basis).

    Rotates the orthonormal columns so each one is an eigendirection of
    the restricted form; returns the rotated basis and its descending
    per-direction margins. An orthonormal composition has all-equal
    singular values, so without this step the column order is whatever
    the SVD happened to emit.
    """
    hat, weights = _side_stack(images, labels, gamma)
    proj = hat.T @ basis
    small = proj.T @ (proj * weights[:, None])
    eig = sym_eig((small + small.T) / 2.0)
    return np.ascontiguousarray(basis @ eig.vectors), eig.values.copy()


def _fit_side(images, labels, gamma, target, theta, seed):
    h = images.shape[1]
    if not 1 <= target <= h:
        raise RTooLarge(f"side target {target} outside 1..{h}")
    if h < theta:
        return _side_direct(images, labels, gamma, target)
    return _side_anchored(images, labels, gamma, target, seed)


def fit_2d2(ds, params):
    """Fit both side projections of a bilinear model independently.

    The right side reuses the left-side machinery on transposed images:
    column-side scatters of x are row-side scatters of x^T.
    """
    if params.gamma < 0:
        raise NegativeGamma(f"gamma = {params.gamma}")
    _check_classes(ds.labels, ds.class_counts)
    order = canonical_order(ds.images, ds.labels)
    images = ds.images[order]
    labels = ds.labels[order]

    p, obj_l = _fit_side(images, labels, params.gamma, params.l,
                         params.theta, derive_seed(params.seed, _LEFT))
    q, obj_r = _fit_side(images.transpose(0, 2, 1), labels, params.gamma,
                         params.r, params.theta,
                         derive_seed(params.seed, _RIGHT))
    return BilinearModel(p=p, q=q, params=params,
                         objective_left=obj_l, objective_right=obj_r)


def transform_2d(model, x):
    """Reduce one image or a stack of images to ``P^T x Q``."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 2
    if single:
        x = x[None]
    if x.ndim != 3 or x.shape[1] != model.d1 or x.shape[2] != model.d2:
        raise ShapeMismatch(
            f"model expects {model.d1} x {model.d2} images, got {x.shape}")
    y = np.einsum("ab,nbc,cd->nad", model.p.T, x, model.q)
    return y[0] if single else y


def fit_l2d2(ds, params, rand_p=None, rand_q=None):
    """Layered bilinear fit through a seeded random expansion.

    Expands every image to h1 x h2 through random factors, fits both sides
    there, then composes the expansion back into original-shape
    projections and re-orthonormalizes them. Side margins are recomputed
    against the original-space scatters. `rand_p` / `rand_q` inject fixed
    expansion factors for testing.
    """
    base = params.base
    if params.h1 < base.l or params.h2 < base.r:
        raise RTooLarge(
            f"expanded shape {params.h1} x {params.h2} below targets "
            f"{base.l} x {base.r}")
    if base.l > ds.d1 or base.r > ds.d2:
        raise RTooLarge(
            f"targets {base.l} x {base.r} exceed image shape "
            f"{ds.d1} x {ds.d2}")
    if base.gamma < 0:
        raise NegativeGamma(f"gamma = {base.gamma}")
    _check_classes(ds.labels, ds.class_counts)
    order = canonical_order(ds.images, ds.labels)
    images = ds.images[order]
    labels = ds.labels[order]

    if rand_p is None:
        rand_p = make_rng(base.seed, 2).standard_normal((params.h1, ds.d1))
    if rand_q is None:
        rand_q = make_rng(base.seed, 3).standard_normal((params.h2, ds.d2))
    expanded = np.einsum("ab,nbc,dc->nad", rand_p, images, rand_q)

    p_exp, _ = _fit_side(expanded, labels, base.gamma, base.l, base.theta,
                         derive_seed(base.seed, _LEFT))
    q_exp, _ = _fit_side(expanded.transpose(0, 2, 1), labels, base.gamma,
                         base.r, base.theta, derive_seed(base.seed, _RIGHT))

    p = svd(rand_p.T @ p_exp).u[:, :base.l]
    q = svd(rand_q.T @ q_exp).u[:, :base.r]

    # rotate each composed basis to diagonalize the original-space margin
    # form on its span: orders directions by descending margin and pins
    # the within-span rotation the SVD leaves free
    p, obj_l = _align_to_margin(p, images, labels, base.gamma)
    q, obj_r = _align_to_margin(q, images.transpose(0, 2, 1), labels,
                                base.gamma)
    return BilinearModel(p=p, q=q, params=base,
                         objective_left=obj_l, objective_right=obj_r)
