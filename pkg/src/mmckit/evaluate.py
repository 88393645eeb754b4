"""Nearest-neighbour evaluation and the experiment report record.

Classification is plain k-NN on Euclidean distance with a fixed,
deterministic tie policy: the k nearest training points vote; vote ties go
to the candidate label with the smaller summed distance over its voters,
and a remaining tie goes to the smaller label id. Training order never
changes predictions.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import KTooLarge, LengthMismatch, RTooLarge, ShapeMismatch
from .mmc import LinearModel, MmcParams
from .numerics import sym_eig


@dataclass
class EvalReport:
    """One experiment's outcome: what ran, on what, and how well."""

    method: str
    seed: int
    params: dict
    accuracy: float
    per_dim: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    branch: str = None

    def to_json(self):
        record = {
            "method": self.method,
            "seed": self.seed,
            "params": self.params,
            "accuracy": self.accuracy,
            "per_dim": [[int(r), float(a)] for r, a in self.per_dim],
            "branch": self.branch,
            "timing": self.timing,
        }
        return json.dumps(record, sort_keys=True, indent=2) + "\n"

    def csv_rows(self):
        """Flat rows (method, seed, dim, accuracy), one per sweep point."""
        points = self.per_dim or [(0, self.accuracy)]
        return [(self.method, self.seed, int(r), float(a))
                for r, a in points]


def knn_predict(train_x, train_labels, test_x, k=1):
    """Labels of the k nearest training columns for every test column."""
    train_x = np.asarray(train_x, dtype=float)
    test_x = np.asarray(test_x, dtype=float)
    if train_x.ndim != 2 or test_x.ndim != 2:
        raise ShapeMismatch("feature matrices must be 2-D, columns = samples")
    if train_x.shape[0] != test_x.shape[0]:
        raise ShapeMismatch(
            f"{train_x.shape[0]} train features vs {test_x.shape[0]} test")
    train_labels = np.asarray(train_labels, dtype=np.int64)
    if len(train_labels) != train_x.shape[1]:
        raise LengthMismatch(
            f"{train_x.shape[1]} columns vs {len(train_labels)} labels")
    n_train = train_x.shape[1]
    if not 1 <= k <= n_train:
        raise KTooLarge(f"k = {k} with {n_train} training points")

    # squared distances via the expansion; clip the tiny negatives it leaves
    sq = (np.sum(test_x ** 2, axis=0)[:, None]
          + np.sum(train_x ** 2, axis=0)[None, :]
          - 2.0 * test_x.T @ train_x)
    dists = np.sqrt(np.clip(sq, 0.0, None))

    out = np.empty(test_x.shape[1], dtype=np.int64)
    for i in range(test_x.shape[1]):
        # distance first, label second: equidistant neighbours rank the
        # same way no matter how the training set is ordered
        order = np.lexsort((train_labels, dists[i]))[:k]
        votes = train_labels[order]
        counts = np.bincount(votes)
        best = counts.max()
        candidates = np.flatnonzero(counts == best)
        if len(candidates) == 1:
            out[i] = candidates[0]
            continue
        sums = np.array([dists[i, order[votes == cand]].sum()
                         for cand in candidates])
        out[i] = candidates[np.argmin(sums)]  # argmin ties -> lowest id
    return out


def accuracy(predicted, truth):
    """Fraction of agreeing entries."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise LengthMismatch(
            f"{predicted.shape} predictions vs {truth.shape} truth")
    if predicted.size == 0:
        raise LengthMismatch("nothing to score")
    return float(np.mean(predicted == truth))


def fit_pca_baseline(ds, r):
    """Unsupervised baseline: top principal directions as a LinearModel."""
    if not 1 <= r <= min(ds.d, ds.n):
        raise RTooLarge(f"r = {r} outside 1..{min(ds.d, ds.n)}")
    centered = ds.x - ds.x.mean(axis=1, keepdims=True)
    cov = centered @ centered.T / max(1, ds.n - 1)
    eig = sym_eig((cov + cov.T) / 2.0)
    w = np.ascontiguousarray(eig.vectors[:, :r])
    return LinearModel(w=w, params=MmcParams(r=r, gamma=0.0),
                       objective=eig.values[:r].copy(), branch="pca")
