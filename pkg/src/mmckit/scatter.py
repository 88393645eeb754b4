"""Class statistics, scatter matrices and their graph-Laplacian twins.

Scatters follow the unnormalized convention: the between-class scatter
weights each class deviation by its sample count, and the within-class
scatter sums squared deviations without dividing by anything. With that
convention the identities ``X L_b X^T = S_b`` and ``X L_w X^T = S_w`` hold
exactly for the Laplacians built here, which is what lets large-dimension
code paths work in sample space instead of feature space.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSamples, NegativeGamma, SingleClass


@dataclass(frozen=True)
class ClassStats:
    """Per-class means (one column each), overall mean, class sizes."""

    means: np.ndarray
    global_mean: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class ScatterPair:
    s_b: np.ndarray
    s_w: np.ndarray


@dataclass(frozen=True)
class Laplacians:
    """Sample-space Laplacians and their weighted difference.

    ``l = l_b - gamma * l_w``; all three are n x n and symmetric.
    """

    l_b: np.ndarray
    l_w: np.ndarray
    l: np.ndarray
    gamma: float


@dataclass(frozen=True)
class Scatter2D:
    """Directional image scatters: row-side (left) and column-side (right)."""

    s_bl: np.ndarray
    s_wl: np.ndarray
    s_br: np.ndarray
    s_wr: np.ndarray


def _sym(a):
    return (a + a.T) / 2.0


def class_stats(ds):
    """Class means, global mean and class counts of a vector dataset."""
    if ds.c < 2:
        raise SingleClass("need at least two classes")
    counts = ds.class_counts
    for cls, count in enumerate(counts):
        if count == 0:
            raise InsufficientSamples(cls, "class absent from dataset")
    means = np.zeros((ds.d, ds.c))
    np.add.at(means.T, ds.labels, ds.x.T)
    means /= counts
    return ClassStats(means=means, global_mean=ds.x.mean(axis=1),
                      counts=counts.astype(np.int64))


def scatters(ds, stats):
    """Between- and within-class scatter matrices (d x d).

    `stats` must come from `class_stats` on the same dataset.
    """
    dev_b = stats.means - stats.global_mean[:, None]
    s_b = (dev_b * stats.counts) @ dev_b.T
    dev_w = ds.x - stats.means[:, ds.labels]
    s_w = dev_w @ dev_w.T
    return ScatterPair(s_b=_sym(s_b), s_w=_sym(s_w))


def laplacians(labels, gamma):
    """Sample-space Laplacians for the margin objective.

    The affinity gives weight 1/n_k to every same-class pair inside class
    k. ``l_w = I - W`` and ``l_b = W - 1/n`` then reproduce the scatters
    through ``X L X^T``.
    """
    if gamma < 0:
        raise NegativeGamma(f"gamma = {gamma}")
    labels = np.asarray(labels, dtype=np.int64)
    n = len(labels)
    counts = np.bincount(labels)
    same = labels[:, None] == labels[None, :]
    w = np.where(same, 1.0 / counts[labels][:, None], 0.0)
    l_w = np.eye(n) - w
    l_b = w - 1.0 / n
    return Laplacians(l_b=_sym(l_b), l_w=_sym(l_w),
                      l=_sym(l_b - gamma * l_w), gamma=float(gamma))


def canonical_order(images, labels):
    """Sample order that depends only on content, not input order.

    Sorts by label, then lexicographically by pixel values. Accumulating
    image scatters in this order makes them bitwise invariant under any
    permutation of the input samples (duplicates commute exactly).
    """
    flat = images.reshape(images.shape[0], -1)
    keys = [flat[:, j] for j in range(flat.shape[1] - 1, -1, -1)]
    keys.append(labels)
    return np.lexsort(tuple(keys))


def scatters_2d(ds):
    """The four directional scatters of an image dataset.

    Left-side scatters contract over columns (``D D^T``), right-side over
    rows (``D^T D``); between-class deviations are weighted by class size.
    Accumulation runs in canonical sample order, so the result is
    byte-identical for any permutation of the input.
    """
    if ds.c < 2:
        raise SingleClass("need at least two classes")
    counts = ds.class_counts
    for cls, count in enumerate(counts):
        if count == 0:
            raise InsufficientSamples(cls, "class absent from dataset")
    order = canonical_order(ds.images, ds.labels)
    images = ds.images[order]
    labels = ds.labels[order]

    means = np.zeros((ds.c, ds.d1, ds.d2))
    np.add.at(means, labels, images)
    means /= counts[:, None, None]
    gmean = images.mean(axis=0)

    dev_b = means - gmean
    weights = counts.astype(float)
    s_bl = np.einsum("k,kab,kcb->ac", weights, dev_b, dev_b)
    s_br = np.einsum("k,kba,kbc->ac", weights, dev_b, dev_b)
    dev_w = images - means[labels]
    s_wl = np.einsum("iab,icb->ac", dev_w, dev_w)
    s_wr = np.einsum("iba,ibc->ac", dev_w, dev_w)
    return Scatter2D(s_bl=_sym(s_bl), s_wl=_sym(s_wl),
                     s_br=_sym(s_br), s_wr=_sym(s_wr))
