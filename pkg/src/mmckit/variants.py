"""Randomized and layered margin projections.

The randomized variant restricts the expansion to t seeded anchor samples
instead of all n, cutting the sample-space solve from n x n to t x t. With
t = n it reproduces the full kernelized fit exactly. The layered variant
sends the data through a seeded random rank-g symmetric expansion
``B = P P^T`` before each randomized fit and stacks such layers; only P is
ever materialized, never the d x d matrix B.
"""

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset
from .errors import DimensionCollapse, RTooLarge, ShapeMismatch, TTooLarge
from .mmc import (LinearModel, MmcParams, anchored_directions,
                  _margin_objective)
from .rng import derive_seed, make_rng
from .scatter import class_stats, laplacians


@dataclass(frozen=True)
class RmmcParams:
    """Randomized fit: base margin params, anchor count t, seed.

    ``t = None`` resolves to twice the target dimension.
    """

    base: MmcParams
    seed: int
    t: int = None

    def resolved_t(self):
        return self.t if self.t is not None else 2 * self.base.r


@dataclass(frozen=True)
class LmmcParams:
    """Layered fit: randomized params, expansion rank g, layer count."""

    rmmc: RmmcParams
    g: int
    layers: int = 1


@dataclass(frozen=True)
class LmmcLayer:
    """One layer: expansion factor ``p`` (d_in x g), projection ``w``."""

    p: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class LayeredModel:
    layers: tuple
    params: LmmcParams

    @property
    def d(self):
        return self.layers[0].p.shape[0]

    @property
    def r(self):
        return self.layers[-1].w.shape[1]


def _anchor_indices(rng, n, t):
    """t distinct sample indices, uniform over the dataset."""
    return rng.permutation(n)[:t]


def fit_rmmc(ds, params):
    """Randomized margin fit on t seeded anchors.

    Anchors are t distinct samples chosen uniformly; directions are the
    leading margin directions within their span, and the reported
    objective is recomputed against the full dataset. Like every
    sample-space solve here, it can only return directions with strictly
    positive margin, of which there are at most c - 1.
    """
    base = params.base
    t = params.resolved_t()
    if t > ds.n:
        raise TTooLarge(f"t = {t} exceeds sample count {ds.n}")
    if base.r > t:
        raise RTooLarge(f"r = {base.r} exceeds anchor count {t}")
    if base.r > ds.d:
        raise RTooLarge(f"r = {base.r} exceeds feature dimension {ds.d}")
    class_stats(ds)  # class structure checks
    lap = laplacians(ds.labels, base.gamma)

    idx = _anchor_indices(make_rng(params.seed), ds.n, t)
    anchors = ds.x[:, idx]
    m = anchors.T @ ds.x
    gram = anchors.T @ anchors
    w, _ = anchored_directions(anchors, m, lap.l, gram, base.r)
    objective = _margin_objective(w, ds.x, lap.l)
    return LinearModel(w=w, params=base, objective=objective, branch="rmmc")


def fit_lmmc_layer(ds, params, seed):
    """One expansion-plus-projection layer.

    Draws a d x g standard normal P from one derived stream and the anchor
    subset from another, solves the randomized fit in the expanded space
    ``B X`` with ``B = P P^T``, and returns the layer together with the
    projected dataset feeding the next layer. B itself is never formed;
    every product applies P then P^T.
    """
    base = params.rmmc.base
    if base.r > ds.d:
        raise DimensionCollapse(
            f"layer input has {ds.d} dimensions, r = {base.r} requested")
    if params.g < 1:
        raise DimensionCollapse(f"expansion rank g = {params.g}")
    t = params.rmmc.resolved_t()
    if t > ds.n:
        raise TTooLarge(f"t = {t} exceeds sample count {ds.n}")
    if base.r > t:
        raise RTooLarge(f"r = {base.r} exceeds anchor count {t}")
    class_stats(ds)
    lap = laplacians(ds.labels, base.gamma)

    p = make_rng(seed, 0).standard_normal((ds.d, params.g))
    idx = _anchor_indices(make_rng(seed, 1), ds.n, t)
    px = p.T @ ds.x          # g x n, the only expanded-space factor needed
    pa = px[:, idx]
    anchors = ds.x[:, idx]
    m = pa.T @ px            # anchors vs data in the expanded metric
    gram = pa.T @ pa
    w, _ = anchored_directions(anchors, m, lap.l, gram, base.r)

    out = w.T @ (p @ px)     # project B X without forming B
    projected = LabeledDataset(x=out, labels=ds.labels.copy(),
                               label_names=ds.label_names)
    return LmmcLayer(p=p, w=np.ascontiguousarray(w)), projected


def fit_lmmc(ds, params):
    """Stack layers; each layer gets a seed derived from (master, index)."""
    if params.layers < 1:
        raise DimensionCollapse(f"layers = {params.layers}")
    records = []
    current = ds
    for layer_index in range(params.layers):
        seed = derive_seed(params.rmmc.seed, layer_index)
        record, current = fit_lmmc_layer(current, params, seed)
        records.append(record)
    return LayeredModel(layers=tuple(records), params=params)


def transform_layered(model, x):
    """Apply every layer in order; 1-D input is one sample."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[:, None]
    if x.shape[0] != model.d:
        raise ShapeMismatch(
            f"model expects {model.d} features, got {x.shape[0]}")
    for layer in model.layers:
        x = layer.w.T @ (layer.p @ (layer.p.T @ x))
    return x[:, 0] if single else x
