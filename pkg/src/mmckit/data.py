"""Labeled datasets, file loaders, seeded splitting.

Vector data keeps one sample per COLUMN (a ``d x n`` matrix), matching the
scatter algebra downstream. Image data keeps samples stacked along the
first axis of one contiguous array. Labels are always dense integers
``0..c-1``; the original label of each encoded id is kept in
``label_names`` so reports can echo what the user wrote in the file.
"""

import csv
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (BadMagic, CountMismatch, EmptyDataset,
                     InsufficientSamples, Io, NonFinite, Parse, ShapeMismatch,
                     SingleClass, Truncated)
from .rng import make_rng

_IDX_IMAGES_MAGIC = 0x00000803
_IDX_LABELS_MAGIC = 0x00000801


def _encode_labels(raw):
    """Map raw labels to dense ids 0..c-1 in order of first appearance."""
    names = []
    seen = {}
    ids = np.empty(len(raw), dtype=np.int64)
    for i, value in enumerate(raw):
        if value not in seen:
            seen[value] = len(names)
            names.append(str(value))
        ids[i] = seen[value]
    return ids, tuple(names)


def _check_labels(labels, n):
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (n,):
        raise ShapeMismatch(f"expected {n} labels, got shape {labels.shape}")
    if n and labels.min() < 0:
        raise ShapeMismatch("negative class id")
    return labels


@dataclass(frozen=True)
class LabeledDataset:
    """Vector samples as columns of ``x`` plus dense integer labels."""

    x: np.ndarray
    labels: np.ndarray
    label_names: tuple = ()

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 2:
            raise ShapeMismatch(f"expected d x n matrix, got shape {x.shape}")
        if x.shape[1] == 0:
            raise EmptyDataset("no samples")
        if not np.all(np.isfinite(x)):
            raise NonFinite("samples contain NaN or inf")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "labels", _check_labels(self.labels, x.shape[1]))

    @property
    def d(self):
        return self.x.shape[0]

    @property
    def n(self):
        return self.x.shape[1]

    @property
    def c(self):
        return int(self.labels.max()) + 1

    @property
    def class_counts(self):
        return np.bincount(self.labels, minlength=self.c)

    def take(self, indices):
        """Subset by sample index, keeping label ids and names."""
        return LabeledDataset(x=self.x[:, indices].copy(),
                              labels=self.labels[indices].copy(),
                              label_names=self.label_names)


@dataclass(frozen=True)
class Dataset2D:
    """Image samples stacked as ``images[i]`` (all the same shape)."""

    images: np.ndarray
    labels: np.ndarray
    label_names: tuple = ()

    def __post_init__(self):
        images = np.asarray(self.images, dtype=float)
        if images.ndim != 3:
            raise ShapeMismatch(
                f"expected n x d1 x d2 stack, got shape {images.shape}")
        if images.shape[0] == 0:
            raise EmptyDataset("no samples")
        if not np.all(np.isfinite(images)):
            raise NonFinite("samples contain NaN or inf")
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "labels",
                           _check_labels(self.labels, images.shape[0]))

    @property
    def n(self):
        return self.images.shape[0]

    @property
    def d1(self):
        return self.images.shape[1]

    @property
    def d2(self):
        return self.images.shape[2]

    @property
    def c(self):
        return int(self.labels.max()) + 1

    @property
    def class_counts(self):
        return np.bincount(self.labels, minlength=self.c)

    def take(self, indices):
        return Dataset2D(images=self.images[indices].copy(),
                         labels=self.labels[indices].copy(),
                         label_names=self.label_names)


@dataclass(frozen=True)
class SplitSpec:
    """Per-class train/test sizes, either absolute counts or fractions."""

    seed: int
    train_per_class: object = 0.5
    test_per_class: object = 0.5


def load_csv(path, has_header=False, label_column=-1):
    """Load a delimited text file into a LabeledDataset.

    One row per sample; every cell except the label column must parse as a
    finite float. Labels may be arbitrary strings and are encoded in order
    of first appearance. Parse errors report 1-based file coordinates.
    """
    try:
        with open(path, "r", newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise Io(f"cannot read {path}: {exc}") from exc

    start = 1 if has_header else 0
    features = []
    raw_labels = []
    width = None
    for line_no, row in enumerate(rows[start:], start=start + 1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        if width is None:
            width = len(row)
            if width < 2:
                raise Parse(line_no, 1, "need at least one feature and a label")
        elif len(row) != width:
            raise Parse(line_no, len(row), f"expected {width} columns")
        col = label_column if label_column >= 0 else width + label_column
        if not 0 <= col < width:
            raise Parse(line_no, width, "label column out of range")
        raw_labels.append(row[col].strip())
        sample = []
        for j, cell in enumerate(row):
            if j == col:
                continue
            try:
                value = float(cell)
            except ValueError as exc:
                raise Parse(line_no, j + 1, f"not a number: {cell!r}") from exc
            if not np.isfinite(value):
                raise Parse(line_no, j + 1, f"not finite: {cell!r}")
            sample.append(value)
        features.append(sample)

    if not features:
        raise EmptyDataset(f"no data rows in {path}")
    labels, names = _encode_labels(raw_labels)
    if len(names) < 2:
        raise SingleClass(f"only one class in {path}")
    x = np.asarray(features, dtype=float).T
    return LabeledDataset(x=x, labels=labels, label_names=names)


def _read_idx_header(blob, magic, n_dims, path):
    head = 4 * (1 + n_dims)
    if len(blob) < head:
        raise Truncated(f"{path}: header cut short")
    got = struct.unpack(">I", blob[:4])[0]
    if got != magic:
        raise BadMagic(f"{path}: magic {got:#010x}, expected {magic:#010x}")
    dims = struct.unpack(f">{n_dims}I", blob[4:head])
    return dims, blob[head:]


def load_idx(images_path, labels_path):
    """Load an IDX image/label file pair into a Dataset2D.

    Big-endian headers, unsigned byte payloads; pixel values are scaled to
    [0, 1]. The two files must agree on the sample count.
    """
    blobs = []
    for path in (images_path, labels_path):
        try:
            with open(path, "rb") as fh:
                blobs.append(fh.read())
        except OSError as exc:
            raise Io(f"cannot read {path}: {exc}") from exc

    (n, d1, d2), pixels = _read_idx_header(blobs[0], _IDX_IMAGES_MAGIC, 3,
                                           images_path)
    (n_labels,), label_bytes = _read_idx_header(blobs[1], _IDX_LABELS_MAGIC, 1,
                                                labels_path)
    if n != n_labels:
        raise CountMismatch(f"{n} images vs {n_labels} labels")
    if n == 0:
        raise EmptyDataset(f"no samples in {images_path}")
    if len(pixels) < n * d1 * d2:
        raise Truncated(f"{images_path}: payload cut short")
    if len(label_bytes) < n:
        raise Truncated(f"{labels_path}: payload cut short")

    images = np.frombuffer(pixels[:n * d1 * d2], dtype=np.uint8)
    images = images.reshape(n, d1, d2).astype(float) / 255.0
    raw = np.frombuffer(label_bytes[:n], dtype=np.uint8)
    labels, names = _encode_labels(raw.tolist())
    if len(names) < 2:
        raise SingleClass(f"only one class in {labels_path}")
    return Dataset2D(images=images, labels=labels, label_names=names)


def _resolve_count(request, available, label):
    if isinstance(request, float):
        if not 0.0 < request <= 1.0:
            raise InsufficientSamples(label, f"bad fraction {request}")
        return int(request * available)
    count = int(request)
    if count < 0:
        raise InsufficientSamples(label, f"negative count {count}")
    return count


def split(ds, spec):
    """Seeded per-class split into (train, test) datasets.

    Each class is permuted independently with the spec seed; the first
    train_per_class indices go to train, the next test_per_class to test.
    Requests larger than the class raise InsufficientSamples.
    """
    rng = make_rng(spec.seed)
    train_idx = []
    test_idx = []
    counts = ds.class_counts
    for cls in range(ds.c):
        n_cls = int(counts[cls])
        k_train = _resolve_count(spec.train_per_class, n_cls, cls)
        k_test = _resolve_count(spec.test_per_class, n_cls, cls)
        if k_train + k_test > n_cls:
            raise InsufficientSamples(
                cls, f"requested {k_train}+{k_test} of {n_cls}")
        members = np.flatnonzero(ds.labels == cls)
        perm = rng.permutation(members)
        train_idx.append(perm[:k_train])
        test_idx.append(perm[k_train:k_train + k_test])
    train = ds.take(np.concatenate(train_idx))
    test = ds.take(np.concatenate(test_idx))
    return train, test


def flatten(ds):
    """Vectorize a Dataset2D column-major per sample (columns stacked)."""
    n = ds.n
    x = ds.images.transpose(0, 2, 1).reshape(n, ds.d1 * ds.d2).T
    return LabeledDataset(x=np.ascontiguousarray(x), labels=ds.labels.copy(),
                          label_names=ds.label_names)
