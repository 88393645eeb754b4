import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from mmckit.errors import Io, Parse
from mmckit.mmc import MmcParams, fit, transform
from mmckit.mmc2d import Mmc2dParams, fit_2d2, transform_2d
from mmckit.net import NetParams, fit_net, transform_net
from mmckit.serialize import (dumps_model, from_record, load_model,
                              save_model, to_record)
from mmckit.variants import LmmcParams, RmmcParams, fit_lmmc, transform_layered

from conftest import random_dataset, random_dataset_2d


def _fitted_models(rng):
    ds = random_dataset(rng, 6, 24, 3, separation=4.0)
    ds2 = random_dataset_2d(rng, 16, 6, 5, 3, separation=3.0)
    linear = fit(ds, MmcParams(r=2))
    layered = fit_lmmc(ds, LmmcParams(
        rmmc=RmmcParams(base=MmcParams(r=2), seed=5, t=10), g=8, layers=2))
    bilinear = fit_2d2(ds2, Mmc2dParams(l=2, r=2, seed=3))
    net = fit_net(ds2, NetParams(num_stages=2, filters_per_stage=(2, 2),
                                 block_h=3, block_w=3))
    return ds, ds2, {"linear": linear, "layered": layered,
                     "bilinear": bilinear, "net": net}


class TestRoundTrip:
    def test_save_load_save_byte_identical(self, tmp_path):
        rng = np.random.default_rng(110)
        _, _, models = _fitted_models(rng)
        for kind, model in models.items():
            path = tmp_path / f"{kind}.json"
            save_model(model, path)
            first = path.read_bytes()
            save_model(load_model(path), path)
            assert path.read_bytes() == first

    def test_arrays_bit_exact(self, tmp_path):
        rng = np.random.default_rng(111)
        _, _, models = _fitted_models(rng)
        for kind, model in models.items():
            loaded = from_record(json.loads(dumps_model(model)))
            if kind == "linear":
                assert loaded.w.tobytes() == model.w.tobytes()
                assert loaded.objective.tobytes() == model.objective.tobytes()
                assert loaded.branch == model.branch
            elif kind == "layered":
                for a, b in zip(loaded.layers, model.layers):
                    assert a.p.tobytes() == b.p.tobytes()
                    assert a.w.tobytes() == b.w.tobytes()
            elif kind == "bilinear":
                assert loaded.p.tobytes() == model.p.tobytes()
                assert loaded.q.tobytes() == model.q.tobytes()
            else:
                for a, b in zip(loaded.banks, model.banks):
                    assert a.tobytes() == b.tobytes()
                assert loaded.output_length == model.output_length

    def test_loaded_models_transform_identically(self, tmp_path):
        rng = np.random.default_rng(112)
        ds, ds2, models = _fitted_models(rng)
        for kind, model in models.items():
            path = tmp_path / f"{kind}.json"
            save_model(model, path)
            loaded = load_model(path)
            if kind == "linear":
                assert_array_equal(transform(loaded, ds.x),
                                   transform(model, ds.x))
            elif kind == "layered":
                assert_array_equal(transform_layered(loaded, ds.x),
                                   transform_layered(model, ds.x))
            elif kind == "bilinear":
                assert_array_equal(transform_2d(loaded, ds2.images),
                                   transform_2d(model, ds2.images))
            else:
                assert_array_equal(transform_net(loaded, ds2.images[:3]),
                                   transform_net(model, ds2.images[:3]))


class TestErrors:
    def test_unknown_kind(self):
        with pytest.raises(Parse):
            from_record({"kind": "mystery"})

    def test_unserializable_type(self):
        with pytest.raises(TypeError):
            to_record(object())

    def test_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(Parse):
            load_model(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(Io):
            load_model(tmp_path / "absent.json")

    def test_unwritable_path(self, tmp_path):
        rng = np.random.default_rng(113)
        _, _, models = _fitted_models(rng)
        with pytest.raises(Io):
            save_model(models["linear"], tmp_path / "no" / "dir" / "m.json")
