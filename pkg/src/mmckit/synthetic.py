"""Bundled synthetic datasets and loader-format writers.

Three families cover the experiment floors: a two-class Gaussian vector
set, a three-class structured-image set, and a ten-class noisy glyph set.
Every generator is a pure function of its seed, and the writers emit the
exact formats the loaders read (delimited text for vectors, IDX pairs for
images), so `gen-synthetic` output feeds straight back into the CLI.
"""

import os

import numpy as np

from .data import Dataset2D, LabeledDataset
from .errors import ConfigInvalid, Io
from .rng import make_rng

DEFAULT_SEEDS = {
    "tiny": 0,
    "gauss2": 101,
    "images3": 202,
    "glyphs10": 303,
}


def make_tiny():
    """Four points on a line, two classes; small enough to check by hand."""
    x = np.array([[-2.0, -1.0, 1.0, 2.0]])
    labels = np.array([0, 0, 1, 1])
    return LabeledDataset(x=x, labels=labels, label_names=("a", "b"))


def make_gauss2(seed=DEFAULT_SEEDS["gauss2"], n_per_class=100, d=50,
                separation=4.0):
    """Two unit-covariance Gaussians with means at +-(separation/2) e1."""
    rng = make_rng(seed)
    offset = np.zeros(d)
    offset[0] = separation / 2.0
    a = rng.standard_normal((d, n_per_class)) - offset[:, None]
    b = rng.standard_normal((d, n_per_class)) + offset[:, None]
    x = np.hstack([a, b])
    labels = np.repeat([0, 1], n_per_class)
    return LabeledDataset(x=x, labels=labels, label_names=("0", "1"))


def _stripe_image(freq, axis, phase, size):
    coords = np.arange(size) / size
    wave = 0.5 + 0.5 * np.sin(2.0 * np.pi * freq * coords + phase)
    if axis == 0:
        return np.tile(wave[:, None], (1, size))
    return np.tile(wave[None, :], (size, 1))


def make_images3(seed=DEFAULT_SEEDS["images3"], n_per_class=40, size=16,
                 noise=0.15):
    """Three image classes: horizontal waves, vertical waves, a disk.

    Each class keeps a fixed template; samples vary in contrast and carry
    pixel noise, so class means stay far apart while classes overlap a
    little sample to sample.
    """
    rng = make_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size]
    radius = np.hypot(yy - (size - 1) / 2.0, xx - (size - 1) / 2.0)
    templates = (
        _stripe_image(2.0, 0, 0.0, size),
        _stripe_image(2.0, 1, 0.0, size),
        (radius <= size / 3.0).astype(float),
    )

    images = []
    labels = []
    for cls, base in enumerate(templates):
        for _ in range(n_per_class):
            contrast = rng.uniform(0.7, 1.0)
            sample = contrast * base + noise * rng.standard_normal((size, size))
            images.append(sample)
            labels.append(cls)
    images = np.clip(np.stack(images), 0.0, 1.0)
    return Dataset2D(images=images, labels=np.array(labels),
                     label_names=("0", "1", "2"))


# seven-segment layout on a 16 x 16 canvas: (row slice, column slice)
_SEGMENTS = {
    "top": (slice(2, 4), slice(4, 12)),
    "mid": (slice(7, 9), slice(4, 12)),
    "bot": (slice(12, 14), slice(4, 12)),
    "tl": (slice(2, 9), slice(2, 4)),
    "tr": (slice(2, 9), slice(12, 14)),
    "bl": (slice(7, 14), slice(2, 4)),
    "br": (slice(7, 14), slice(12, 14)),
}

_DIGIT_SEGMENTS = (
    ("top", "bot", "tl", "tr", "bl", "br"),           # 0
    ("tr", "br"),                                     # 1
    ("top", "tr", "mid", "bl", "bot"),                # 2
    ("top", "tr", "mid", "br", "bot"),                # 3
    ("tl", "tr", "mid", "br"),                        # 4
    ("top", "tl", "mid", "br", "bot"),                # 5
    ("top", "tl", "mid", "bl", "br", "bot"),          # 6
    ("top", "tr", "br"),                              # 7
    ("top", "mid", "bot", "tl", "tr", "bl", "br"),    # 8
    ("top", "mid", "bot", "tl", "tr", "br"),          # 9
)


def _glyph(digit, size=16):
    canvas = np.zeros((size, size))
    for name in _DIGIT_SEGMENTS[digit]:
        rows, cols = _SEGMENTS[name]
        canvas[rows, cols] = 1.0
    return canvas


def make_glyphs10(seed=DEFAULT_SEEDS["glyphs10"], n_per_class=20,
                  noise=0.05, jitter=0):
    """Ten noisy seven-segment digit glyphs, optional position jitter."""
    rng = make_rng(seed)
    images = []
    labels = []
    for digit in range(10):
        base = _glyph(digit)
        for _ in range(n_per_class):
            sample = base
            if jitter:
                shift = rng.integers(-jitter, jitter + 1, size=2)
                sample = np.roll(sample, tuple(shift), axis=(0, 1))
            sample = sample + noise * rng.standard_normal(base.shape)
            images.append(np.clip(sample, 0.0, 1.0))
            labels.append(digit)
    return Dataset2D(images=np.stack(images), labels=np.array(labels),
                     label_names=tuple(str(d) for d in range(10)))


def write_csv(ds, path):
    """Write a vector dataset the way `load_csv` reads it back."""
    lines = ["".join(f"f{j}," for j in range(ds.d)) + "label"]
    for i in range(ds.n):
        cells = [repr(float(v)) for v in ds.x[:, i]]
        cells.append(ds.label_names[ds.labels[i]] if ds.label_names
                     else str(int(ds.labels[i])))
        lines.append(",".join(cells))
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise Io(f"cannot write {path}: {exc}") from exc


def write_idx(ds, images_path, labels_path):
    """Write an image dataset as an IDX pair, pixels quantized to bytes."""
    pixels = np.round(np.clip(ds.images, 0.0, 1.0) * 255.0).astype(np.uint8)
    header = (int(0x00000803).to_bytes(4, "big")
              + ds.n.to_bytes(4, "big") + ds.d1.to_bytes(4, "big")
              + ds.d2.to_bytes(4, "big"))
    labels = np.asarray(ds.labels, dtype=np.uint8)
    label_header = (int(0x00000801).to_bytes(4, "big")
                    + ds.n.to_bytes(4, "big"))
    try:
        with open(images_path, "wb") as fh:
            fh.write(header + pixels.tobytes())
        with open(labels_path, "wb") as fh:
            fh.write(label_header + labels.tobytes())
    except OSError as exc:
        raise Io(f"cannot write {images_path} / {labels_path}: {exc}") from exc


def generate(name, out_dir, seed=None):
    """Materialize a named dataset under `out_dir`; returns written paths."""
    if name not in DEFAULT_SEEDS:
        raise ConfigInvalid("name", f"unknown dataset {name!r}")
    if seed is None:
        seed = DEFAULT_SEEDS[name]
    os.makedirs(out_dir, exist_ok=True)
    if name == "tiny":
        ds = make_tiny()
        path = os.path.join(out_dir, "tiny.csv")
        write_csv(ds, path)
        return [path]
    if name == "gauss2":
        ds = make_gauss2(seed=seed)
        path = os.path.join(out_dir, "gauss2.csv")
        write_csv(ds, path)
        return [path]
    maker = make_images3 if name == "images3" else make_glyphs10
    ds = maker(seed=seed)
    images_path = os.path.join(out_dir, f"{name}-images.idx")
    labels_path = os.path.join(out_dir, f"{name}-labels.idx")
    write_idx(ds, images_path, labels_path)
    return [images_path, labels_path]
