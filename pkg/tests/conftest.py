"""Shared helpers for the test suite."""

import numpy as np

from mmckit.data import Dataset2D, LabeledDataset


def random_labels(rng, n, c):
    """Labels covering every class at least once."""
    labels = np.concatenate([np.arange(c), rng.integers(0, c, n - c)])
    rng.shuffle(labels)
    return labels


def random_dataset(rng, d, n, c, separation=4.0):
    """Gaussian classes around well-separated random means."""
    labels = random_labels(rng, n, c)
    means = separation * rng.standard_normal((d, c))
    x = means[:, labels] + rng.standard_normal((d, n))
    return LabeledDataset(x=x, labels=labels)


def random_dataset_2d(rng, n, d1, d2, c, separation=2.0):
    labels = random_labels(rng, n, c)
    means = separation * rng.standard_normal((c, d1, d2))
    images = means[labels] + rng.standard_normal((n, d1, d2))
    return Dataset2D(images=images, labels=labels)


def random_orthonormal(rng, d, r):
    q, _ = np.linalg.qr(rng.standard_normal((d, r)))
    return q
