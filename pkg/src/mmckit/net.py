"""Cascaded margin filter banks with binary hashing and block histograms.

Each stage learns a small bank of convolution filters from patch-level
scatters: the between-class patch scatter minus gamma times the pooled
within-class patch scatter, eigendecomposed, top eigenvectors kept as
filters. Stage outputs (one response map per input map per filter) feed
the next stage. After the last stage, every group of last-stage maps that
shares a parent is collapsed into one integer hash map (filter order gives
bit significance, first filter = most significant bit) and summarized by
concatenated block histograms.

Patch extraction anchors a k1 x k2 window at (k1 // 2, k2 // 2), which
centers odd kernels and puts even kernels half a pixel up-left of center;
borders are zero padded so every pixel yields a patch.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (BadKernel, BlockTooLarge, InsufficientSamples,
                     ShapeMismatch, SingleClass, TooManyFilters)
from .numerics import sym_eig

_MAX_LAST_FILTERS = 30  # hash values must fit comfortably in an int32 range


@dataclass(frozen=True)
class NetParams:
    """Architecture of the cascade.

    ``filters_per_stage`` has one entry per stage; the last entry bounds
    the hash alphabet (2 ** last) and must stay small. ``block_overlap``
    is the fraction of a block shared with its neighbour, in [0, 1).
    """

    k1: int = 3
    k2: int = 3
    num_stages: int = 3
    filters_per_stage: tuple = (8, 8, 8)
    gamma: float = 1.0
    block_h: int = 7
    block_w: int = 7
    block_overlap: float = 0.5
    seed: int = 0


@dataclass(frozen=True)
class PatchScatters:
    """Patch-level scatter pair plus the statistics behind it."""

    s_psi: np.ndarray
    s_phi: np.ndarray
    class_means: np.ndarray
    grand_mean: np.ndarray


@dataclass(frozen=True)
class MmcNetModel:
    """Learned banks plus the geometry needed to featurize new images."""

    params: NetParams
    banks: tuple
    stage_objectives: tuple
    input_shape: tuple
    num_blocks: int
    output_length: int


def _check_kernel(k1, k2):
    if k1 < 1 or k2 < 1:
        raise BadKernel(f"kernel {k1} x {k2}")


def extract_patches(image, k1, k2):
    """All dense k1 x k2 patches of an image, one column per pixel.

    The window for pixel (i, j) is anchored at offset (k1 // 2, k2 // 2);
    out-of-range pixels read as zero. Patches are vectorized column-major
    and each patch has its mean removed, so columns sum to zero.
    """
    _check_kernel(k1, k2)
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ShapeMismatch(f"expected an image, got shape {image.shape}")
    c1, c2 = k1 // 2, k2 // 2
    padded = np.pad(image, ((c1, k1 - 1 - c1), (c2, k2 - 1 - c2)))
    windows = sliding_window_view(padded, (k1, k2))
    m, n = image.shape
    patches = windows.reshape(m * n, k1, k2).transpose(0, 2, 1)
    x = patches.reshape(m * n, k1 * k2).T.astype(float)
    return x - x.mean(axis=0, keepdims=True)


def _patch_tensor(images, k1, k2):
    return np.stack([extract_patches(im, k1, k2) for im in images])


def patch_scatters(images, labels, k1, k2):
    """Between- and pooled within-class scatters of patch matrices.

    Treats each image's patch matrix as one point. The within part pools
    per-class scatters normalized by class size; the between part scatters
    class means around their unweighted average, normalized by the class
    count.
    """
    _check_kernel(k1, k2)
    images = np.asarray(images, dtype=float)
    if images.ndim != 3:
        raise ShapeMismatch(f"expected an image stack, got {images.shape}")
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != images.shape[0]:
        raise ShapeMismatch(
            f"{images.shape[0]} images vs {len(labels)} labels")
    counts = np.bincount(labels)
    if len(counts) < 2:
        raise SingleClass("need at least two classes")
    for cls, count in enumerate(counts):
        if count == 0:
            raise InsufficientSamples(cls, "class absent from dataset")

    patches = _patch_tensor(images, k1, k2)
    c = len(counts)
    class_means = np.zeros((c,) + patches.shape[1:])
    np.add.at(class_means, labels, patches)
    class_means /= counts[:, None, None]

    inv = 1.0 / counts[labels]
    dev_w = patches - class_means[labels]
    s_phi = np.einsum("i,iap,ibp->ab", inv, dev_w, dev_w)

    grand_mean = class_means.mean(axis=0)
    dev_b = class_means - grand_mean
    s_psi = np.einsum("kap,kbp->ab", dev_b, dev_b) / c
    return PatchScatters(s_psi=(s_psi + s_psi.T) / 2.0,
                         s_phi=(s_phi + s_phi.T) / 2.0,
                         class_means=class_means, grand_mean=grand_mean)


def learn_stage_filters(ps, num_filters, gamma):
    """Top margin eigenvectors of the patch scatter difference.

    Returns ``(bank, objective)``: the k1*k2 x L filter bank and the
    eigenvalues the kept filters attain.
    """
    dim = ps.s_psi.shape[0]
    if not 1 <= num_filters <= dim:
        raise TooManyFilters(f"{num_filters} filters from {dim}-dim patches")
    eig = sym_eig(ps.s_psi - gamma * ps.s_phi)
    bank = np.ascontiguousarray(eig.vectors[:, :num_filters])
    return bank, eig.values[:num_filters].copy()


def stage_forward(images, bank, k1, k2):
    """Filter responses of every image, flattened image-major.

    Output row ``i * L + f`` is filter f applied across image i; callers
    expand labels with ``np.repeat(labels, L)``.
    """
    images = np.asarray(images, dtype=float)
    patches = _patch_tensor(images, k1, k2)
    maps = np.einsum("kf,ikp->ifp", bank, patches)
    n, num_filters = maps.shape[:2]
    m, w = images.shape[1:]
    return maps.reshape(n * num_filters, m, w)


def binary_hash(maps):
    """Collapse a stack of L maps into one integer map.

    Positive responses set bits; map 0 carries the most significant bit.
    Values lie in [0, 2**L).
    """
    maps = np.asarray(maps, dtype=float)
    if maps.ndim != 3:
        raise ShapeMismatch(f"expected a map stack, got {maps.shape}")
    num_maps = maps.shape[0]
    if num_maps > _MAX_LAST_FILTERS:
        raise TooManyFilters(f"{num_maps} maps exceed hash capacity")
    weights = (2 ** np.arange(num_maps - 1, -1, -1)).astype(np.int64)
    bits = (maps > 0).astype(np.int64)
    return np.einsum("f,fmn->mn", weights, bits)


def _block_starts(extent, block, overlap):
    stride = max(1, int(block * (1.0 - overlap)))
    return range(0, extent, stride)


def block_histogram(hash_map, params):
    """Concatenated per-block histograms of a hash map.

    Blocks of block_h x block_w slide with a stride derived from the
    overlap fraction; partial blocks at the edges are clipped, not
    dropped. Blocks are visited in row-major order and each contributes a
    fixed-width histogram over the full hash alphabet.
    """
    hash_map = np.asarray(hash_map)
    m, n = hash_map.shape
    if params.block_h > m or params.block_w > n:
        raise BlockTooLarge(
            f"block {params.block_h} x {params.block_w} on {m} x {n} map")
    bins = 2 ** params.filters_per_stage[-1]
    pieces = []
    for top in _block_starts(m, params.block_h, params.block_overlap):
        for left in _block_starts(n, params.block_w, params.block_overlap):
            block = hash_map[top:top + params.block_h,
                             left:left + params.block_w]
            pieces.append(np.bincount(block.ravel(), minlength=bins))
    return np.concatenate(pieces).astype(float)


def count_blocks(shape, params):
    """Number of histogram blocks a hash map of `shape` yields."""
    rows = len(_block_starts(shape[0], params.block_h, params.block_overlap))
    cols = len(_block_starts(shape[1], params.block_w, params.block_overlap))
    return rows * cols


def _validate_params(params, input_shape):
    _check_kernel(params.k1, params.k2)
    if params.num_stages < 1:
        raise TooManyFilters(f"num_stages = {params.num_stages}")
    if len(params.filters_per_stage) != params.num_stages:
        raise ShapeMismatch(
            f"{len(params.filters_per_stage)} filter counts for "
            f"{params.num_stages} stages")
    if params.filters_per_stage[-1] > _MAX_LAST_FILTERS:
        raise TooManyFilters(
            f"last stage has {params.filters_per_stage[-1]} filters, "
            f"hash capacity is {_MAX_LAST_FILTERS}")
    if not 0.0 <= params.block_overlap < 1.0:
        raise BlockTooLarge(f"overlap {params.block_overlap} outside [0, 1)")
    if params.block_h > input_shape[0] or params.block_w > input_shape[1]:
        raise BlockTooLarge(
            f"block {params.block_h} x {params.block_w} on "
            f"{input_shape[0]} x {input_shape[1]} images")


def fit_net(ds, params):
    """Learn every stage's filter bank from a 2-D training set."""
    _validate_params(params, (ds.d1, ds.d2))
    images = ds.images
    labels = ds.labels
    banks = []
    objectives = []
    for stage, num_filters in enumerate(params.filters_per_stage):
        ps = patch_scatters(images, labels, params.k1, params.k2)
        bank, objective = learn_stage_filters(ps, num_filters, params.gamma)
        banks.append(bank)
        objectives.append(objective)
        if stage + 1 < params.num_stages:
            images = stage_forward(images, bank, params.k1, params.k2)
            labels = np.repeat(labels, num_filters)

    num_blocks = count_blocks((ds.d1, ds.d2), params)
    groups = 1
    for num_filters in params.filters_per_stage[:-1]:
        groups *= num_filters
    output_length = groups * num_blocks * 2 ** params.filters_per_stage[-1]
    return MmcNetModel(params=params, banks=tuple(banks),
                       stage_objectives=tuple(objectives),
                       input_shape=(ds.d1, ds.d2), num_blocks=num_blocks,
                       output_length=output_length)


def transform_net(model, images):
    """Featurize images: one row of concatenated histograms per image."""
    images = np.asarray(images, dtype=float)
    single = images.ndim == 2
    if single:
        images = images[None]
    if images.ndim != 3 or images.shape[1:] != model.input_shape:
        raise ShapeMismatch(
            f"model expects {model.input_shape} images, got {images.shape}")
    params = model.params
    n = images.shape[0]
    maps = images
    for bank in model.banks:
        maps = stage_forward(maps, bank, params.k1, params.k2)

    last = params.filters_per_stage[-1]
    groups = maps.shape[0] // (n * last)
    maps = maps.reshape(n, groups, last, *model.input_shape)
    features = np.empty((n, model.output_length))
    for i in range(n):
        pieces = [block_histogram(binary_hash(maps[i, g]), params)
                  for g in range(groups)]
        features[i] = np.concatenate(pieces)
    return features[0] if single else features
