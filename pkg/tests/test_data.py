import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from mmckit.data import (Dataset2D, LabeledDataset, SplitSpec, flatten,
                         load_csv, load_idx, split)
from mmckit.errors import (BadMagic, CountMismatch, EmptyDataset,
                           InsufficientSamples, Io, NonFinite, Parse,
                           ShapeMismatch, SingleClass, Truncated)
from mmckit.synthetic import make_glyphs10, write_idx

from conftest import random_dataset


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestLoadCsv:
    def test_basic(self, tmp_path):
        path = _write(tmp_path, "a.csv",
                      "1.0,2.0,x\n3.0,4.0,y\n5.0,6.0,x\n")
        ds = load_csv(path)
        assert ds.d == 2 and ds.n == 3 and ds.c == 2
        assert_array_equal(ds.x, [[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]])
        assert_array_equal(ds.labels, [0, 1, 0])
        assert ds.label_names == ("x", "y")

    def test_header_and_label_column(self, tmp_path):
        path = _write(tmp_path, "b.csv",
                      "label,f0\nfoo,1.5\nbar,2.5\n")
        ds = load_csv(path, has_header=True, label_column=0)
        assert_array_equal(ds.x, [[1.5, 2.5]])
        assert ds.label_names == ("foo", "bar")

    def test_float_values_roundtrip_exactly(self, tmp_path):
        value = 0.1 + 0.2  # not representable prettily
        path = _write(tmp_path, "c.csv", f"{value!r},a\n1.0,b\n")
        ds = load_csv(path)
        assert ds.x[0, 0] == value

    def test_parse_error_coordinates(self, tmp_path):
        path = _write(tmp_path, "d.csv", "1.0,a\noops,b\n")
        with pytest.raises(Parse) as err:
            load_csv(path)
        assert err.value.row == 2 and err.value.col == 1

    def test_header_skipped_in_row_numbers(self, tmp_path):
        path = _write(tmp_path, "e.csv", "f0,label\n1.0,a\nbad,b\n")
        with pytest.raises(Parse) as err:
            load_csv(path, has_header=True)
        assert err.value.row == 3

    def test_ragged_rows_rejected(self, tmp_path):
        path = _write(tmp_path, "f.csv", "1.0,2.0,a\n1.0,b\n")
        with pytest.raises(Parse) as err:
            load_csv(path)
        assert err.value.row == 2

    def test_nonfinite_cell_rejected(self, tmp_path):
        path = _write(tmp_path, "g.csv", "inf,a\n1.0,b\n")
        with pytest.raises(Parse):
            load_csv(path)

    def test_empty_rejected(self, tmp_path):
        path = _write(tmp_path, "h.csv", "")
        with pytest.raises(EmptyDataset):
            load_csv(path)

    def test_single_class_rejected(self, tmp_path):
        path = _write(tmp_path, "i.csv", "1.0,a\n2.0,a\n")
        with pytest.raises(SingleClass):
            load_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(Io):
            load_csv(str(tmp_path / "nope.csv"))


class TestLoadIdx:
    def _paths(self, tmp_path):
        ds = make_glyphs10(n_per_class=3)
        ip = str(tmp_path / "im.idx")
        lp = str(tmp_path / "lb.idx")
        write_idx(ds, ip, lp)
        return ds, ip, lp

    def test_roundtrip_within_quantization(self, tmp_path):
        ds, ip, lp = self._paths(tmp_path)
        loaded = load_idx(ip, lp)
        assert loaded.n == ds.n
        assert (loaded.d1, loaded.d2) == (ds.d1, ds.d2)
        assert_array_equal(loaded.labels, ds.labels)
        assert_allclose(loaded.images, ds.images, atol=0.5 / 255.0)

    def test_bad_magic(self, tmp_path):
        _, ip, lp = self._paths(tmp_path)
        blob = bytearray(open(ip, "rb").read())
        blob[3] = 0x99
        open(ip, "wb").write(bytes(blob))
        with pytest.raises(BadMagic):
            load_idx(ip, lp)

    def test_swapped_files_bad_magic(self, tmp_path):
        _, ip, lp = self._paths(tmp_path)
        with pytest.raises(BadMagic):
            load_idx(lp, ip)

    def test_count_mismatch(self, tmp_path):
        _, ip, lp = self._paths(tmp_path)
        blob = bytearray(open(lp, "rb").read())
        blob[7] -= 1  # one fewer label promised
        blob = blob[:-1]
        open(lp, "wb").write(bytes(blob))
        with pytest.raises(CountMismatch):
            load_idx(ip, lp)

    def test_truncated_payload(self, tmp_path):
        _, ip, lp = self._paths(tmp_path)
        blob = open(ip, "rb").read()
        open(ip, "wb").write(blob[:-10])
        with pytest.raises(Truncated):
            load_idx(ip, lp)

    def test_truncated_header(self, tmp_path):
        _, ip, lp = self._paths(tmp_path)
        open(ip, "wb").write(b"\x00\x00")
        with pytest.raises(Truncated):
            load_idx(ip, lp)

    def test_missing_file(self, tmp_path):
        with pytest.raises(Io):
            load_idx(str(tmp_path / "a"), str(tmp_path / "b"))


class TestDatasets:
    def test_rejects_nan(self):
        with pytest.raises(NonFinite):
            LabeledDataset(x=np.array([[np.nan, 1.0]]), labels=[0, 1])

    def test_rejects_empty(self):
        with pytest.raises(EmptyDataset):
            LabeledDataset(x=np.empty((3, 0)), labels=[])

    def test_rejects_bad_label_length(self):
        with pytest.raises(ShapeMismatch):
            LabeledDataset(x=np.ones((2, 3)), labels=[0, 1])

    def test_class_counts(self):
        ds = LabeledDataset(x=np.ones((1, 4)), labels=[0, 1, 1, 2])
        assert_array_equal(ds.class_counts, [1, 2, 1])
        assert ds.c == 3

    def test_2d_shape_guard(self):
        with pytest.raises(ShapeMismatch):
            Dataset2D(images=np.ones((4, 4)), labels=[0])


class TestSplit:
    def test_counts_and_disjointness(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            c = int(rng.integers(2, 5))
            n = int(rng.integers(4 * c, 60))
            # at least three members per class so the request always fits
            labels = np.concatenate([np.tile(np.arange(c), 3),
                                     rng.integers(0, c, n - 3 * c)])
            rng.shuffle(labels)
            ds = LabeledDataset(x=rng.standard_normal((5, n)), labels=labels)
            spec = SplitSpec(seed=int(rng.integers(1 << 30)),
                             train_per_class=2, test_per_class=1)
            train, test = split(ds, spec)
            assert_array_equal(train.class_counts, np.full(c, 2))
            assert_array_equal(test.class_counts, np.full(c, 1))
            # disjoint: no column of test equals a column of train
            for j in range(test.n):
                diffs = np.abs(train.x - test.x[:, j][:, None]).sum(axis=0)
                assert diffs.min() > 0

    def test_fractions(self):
        rng = np.random.default_rng(1)
        ds = random_dataset(rng, 3, 40, 2)
        train, test = split(ds, SplitSpec(seed=3, train_per_class=0.5,
                                          test_per_class=0.25))
        counts = ds.class_counts
        assert_array_equal(train.class_counts, counts // 2)
        assert_array_equal(test.class_counts, counts // 4)

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        ds = random_dataset(rng, 4, 30, 3)
        a = split(ds, SplitSpec(seed=9, train_per_class=3, test_per_class=3))
        b = split(ds, SplitSpec(seed=9, train_per_class=3, test_per_class=3))
        assert a[0].x.tobytes() == b[0].x.tobytes()
        assert a[1].x.tobytes() == b[1].x.tobytes()
        c = split(ds, SplitSpec(seed=10, train_per_class=3, test_per_class=3))
        assert a[0].x.tobytes() != c[0].x.tobytes()

    def test_insufficient(self):
        rng = np.random.default_rng(3)
        ds = random_dataset(rng, 3, 10, 2)
        small = int(ds.class_counts.min())
        with pytest.raises(InsufficientSamples):
            split(ds, SplitSpec(seed=1, train_per_class=small,
                                test_per_class=1))

    def test_2d_split(self):
        ds = make_glyphs10(n_per_class=4)
        train, test = split(ds, SplitSpec(seed=5, train_per_class=2,
                                          test_per_class=2))
        assert train.n == 20 and test.n == 20
        assert train.images.shape[1:] == (16, 16)


class TestFlatten:
    def test_column_major_per_sample(self):
        images = np.array([[[1.0, 2.0], [3.0, 4.0]]])
        ds = Dataset2D(images=images, labels=[0],
                       label_names=("a",))
        # column-major: walk down each column first
        flat = flatten(ds)
        assert_array_equal(flat.x[:, 0], [1.0, 3.0, 2.0, 4.0])

    def test_shapes(self):
        ds = make_glyphs10(n_per_class=2)
        flat = flatten(ds)
        assert flat.x.shape == (256, ds.n)
        assert_array_equal(flat.labels, ds.labels)
