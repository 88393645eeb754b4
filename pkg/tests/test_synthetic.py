import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from mmckit.data import load_csv, load_idx
from mmckit.errors import ConfigInvalid
from mmckit.synthetic import (DEFAULT_SEEDS, generate, make_gauss2,
                              make_glyphs10, make_images3, make_tiny,
                              write_csv, write_idx)


class TestGenerators:
    def test_tiny_hand_values(self):
        ds = make_tiny()
        assert_allclose(ds.x, [[-2.0, -1.0, 1.0, 2.0]])
        assert_array_equal(ds.labels, [0, 0, 1, 1])
        assert ds.label_names == ("a", "b")

    def test_gauss2_shape_and_determinism(self):
        a = make_gauss2(seed=7, n_per_class=30, d=10)
        b = make_gauss2(seed=7, n_per_class=30, d=10)
        assert a.x.shape == (10, 60)
        assert_array_equal(a.labels, np.repeat([0, 1], 30))
        assert a.x.tobytes() == b.x.tobytes()
        assert make_gauss2(seed=8, n_per_class=30, d=10).x.tobytes() \
            != a.x.tobytes()

    def test_gauss2_classes_separated_along_first_axis(self):
        ds = make_gauss2(seed=7)
        gap = ds.x[:, ds.labels == 1].mean(axis=1) \
            - ds.x[:, ds.labels == 0].mean(axis=1)
        # means sit at -+2 e1: the gap is ~4 on axis 0, noise elsewhere
        assert abs(gap[0] - 4.0) < 0.6
        assert np.abs(gap[1:]).max() < 1.0

    def test_images3_shape_and_range(self):
        ds = make_images3(seed=3, n_per_class=5)
        assert ds.images.shape == (15, 16, 16)
        assert ds.images.min() >= 0.0 and ds.images.max() <= 1.0
        assert_array_equal(np.bincount(ds.labels), [5, 5, 5])
        again = make_images3(seed=3, n_per_class=5)
        assert ds.images.tobytes() == again.images.tobytes()

    def test_images3_class_means_distinct(self):
        ds = make_images3(seed=3)
        means = [ds.images[ds.labels == k].mean(axis=0) for k in range(3)]
        for i in range(3):
            for j in range(i + 1, 3):
                assert np.linalg.norm(means[i] - means[j]) > 1.0

    def test_glyphs10_shape_and_determinism(self):
        ds = make_glyphs10(seed=5, n_per_class=3)
        assert ds.images.shape == (30, 16, 16)
        assert_array_equal(np.bincount(ds.labels), np.full(10, 3))
        again = make_glyphs10(seed=5, n_per_class=3)
        assert ds.images.tobytes() == again.images.tobytes()

    def test_glyphs10_jitter_moves_glyphs(self):
        still = make_glyphs10(seed=5, n_per_class=4, noise=0.0)
        moved = make_glyphs10(seed=5, n_per_class=4, noise=0.0, jitter=2)
        # without noise every still sample equals its template
        per_class = [still.images[still.labels == k] for k in range(10)]
        for stack in per_class:
            assert np.ptp(stack, axis=0).max() == 0.0
        assert moved.images.tobytes() != still.images.tobytes()


class TestWriters:
    def test_csv_round_trip(self, tmp_path):
        ds = make_gauss2(seed=11, n_per_class=8, d=5)
        path = tmp_path / "g.csv"
        write_csv(ds, path)
        loaded = load_csv(path, has_header=True)
        # repr round-trips doubles, so the reload is bit exact
        assert loaded.x.tobytes() == ds.x.tobytes()
        assert_array_equal(loaded.labels, ds.labels)
        assert loaded.label_names == ds.label_names

    def test_idx_round_trip(self, tmp_path):
        ds = make_glyphs10(seed=12, n_per_class=2)
        write_idx(ds, tmp_path / "im.idx", tmp_path / "lb.idx")
        loaded = load_idx(tmp_path / "im.idx", tmp_path / "lb.idx")
        assert loaded.images.shape == ds.images.shape
        assert_array_equal(loaded.labels, ds.labels)
        # bytes quantize to 1/255 steps; reload matches within half a step
        assert np.abs(loaded.images - ds.images).max() <= 0.5 / 255.0


class TestGenerate:
    def test_named_sets_written_and_loadable(self, tmp_path):
        for name in DEFAULT_SEEDS:
            paths = generate(name, tmp_path / name)
            if name in ("tiny", "gauss2"):
                assert len(paths) == 1
                load_csv(paths[0], has_header=True)
            else:
                assert len(paths) == 2
                load_idx(paths[0], paths[1])

    def test_seed_override_changes_content(self, tmp_path):
        a = generate("gauss2", tmp_path / "a", seed=1)[0]
        b = generate("gauss2", tmp_path / "b", seed=2)[0]
        base = generate("gauss2", tmp_path / "c")[0]
        with open(a) as fh_a, open(b) as fh_b, open(base) as fh_c:
            text_a, text_b, text_c = fh_a.read(), fh_b.read(), fh_c.read()
        assert text_a != text_b
        assert text_c != text_a  # default seed is 101, not 1

    def test_unknown_name(self, tmp_path):
        with pytest.raises(ConfigInvalid):
            generate("nope", tmp_path)
