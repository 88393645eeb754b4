"""Model persistence as flat JSON records.

Python renders doubles with the shortest representation that round-trips,
so plain JSON numbers reproduce the exact IEEE-754 values on reload;
arrays are stored as nested row-major lists. Saving, loading and saving
again yields byte-identical files, which the tests rely on.
"""

import json

import numpy as np

from .errors import Io, Parse
from .mmc import LinearModel, MmcParams
from .mmc2d import BilinearModel, Mmc2dParams
from .net import MmcNetModel, NetParams
from .variants import LayeredModel, LmmcLayer, LmmcParams, RmmcParams


def _rows(a):
    return np.asarray(a, dtype=float).tolist()


def to_record(model):
    """Plain-dict form of any fitted model, keyed by "kind"."""
    if isinstance(model, LinearModel):
        return {
            "kind": "linear",
            "d": model.d,
            "r": model.r,
            "gamma": model.params.gamma,
            "theta": model.params.theta,
            "branch": model.branch,
            "w": _rows(model.w),
            "objective": _rows(model.objective),
        }
    if isinstance(model, LayeredModel):
        p = model.params
        return {
            "kind": "layered",
            "r": p.rmmc.base.r,
            "gamma": p.rmmc.base.gamma,
            "theta": p.rmmc.base.theta,
            "t": p.rmmc.t,
            "seed": p.rmmc.seed,
            "g": p.g,
            "layers": [{"p": _rows(rec.p), "w": _rows(rec.w)}
                       for rec in model.layers],
        }
    if isinstance(model, BilinearModel):
        p = model.params
        return {
            "kind": "bilinear",
            "d1": model.d1,
            "d2": model.d2,
            "l": p.l,
            "r": p.r,
            "gamma": p.gamma,
            "theta": p.theta,
            "seed": p.seed,
            "p": _rows(model.p),
            "q": _rows(model.q),
            "objective_left": _rows(model.objective_left),
            "objective_right": _rows(model.objective_right),
        }
    if isinstance(model, MmcNetModel):
        p = model.params
        return {
            "kind": "net",
            "k1": p.k1,
            "k2": p.k2,
            "num_stages": p.num_stages,
            "filters_per_stage": list(p.filters_per_stage),
            "gamma": p.gamma,
            "block_h": p.block_h,
            "block_w": p.block_w,
            "block_overlap": p.block_overlap,
            "seed": p.seed,
            "input_shape": list(model.input_shape),
            "num_blocks": model.num_blocks,
            "output_length": model.output_length,
            "banks": [_rows(bank) for bank in model.banks],
            "stage_objectives": [_rows(obj) for obj in model.stage_objectives],
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def from_record(record):
    """Inverse of `to_record`."""
    kind = record.get("kind")
    if kind == "linear":
        params = MmcParams(r=record["r"], gamma=record["gamma"],
                           theta=record["theta"])
        return LinearModel(w=np.array(record["w"], dtype=float),
                           params=params,
                           objective=np.array(record["objective"],
                                              dtype=float),
                           branch=record["branch"])
    if kind == "layered":
        rmmc = RmmcParams(base=MmcParams(r=record["r"],
                                         gamma=record["gamma"],
                                         theta=record["theta"]),
                          seed=record["seed"], t=record["t"])
        params = LmmcParams(rmmc=rmmc, g=record["g"],
                            layers=len(record["layers"]))
        layers = tuple(LmmcLayer(p=np.array(rec["p"], dtype=float),
                                 w=np.array(rec["w"], dtype=float))
                       for rec in record["layers"])
        return LayeredModel(layers=layers, params=params)
    if kind == "bilinear":
        params = Mmc2dParams(l=record["l"], r=record["r"],
                             gamma=record["gamma"], theta=record["theta"],
                             seed=record["seed"])
        return BilinearModel(
            p=np.array(record["p"], dtype=float),
            q=np.array(record["q"], dtype=float),
            params=params,
            objective_left=np.array(record["objective_left"], dtype=float),
            objective_right=np.array(record["objective_right"], dtype=float))
    if kind == "net":
        params = NetParams(k1=record["k1"], k2=record["k2"],
                           num_stages=record["num_stages"],
                           filters_per_stage=tuple(
                               record["filters_per_stage"]),
                           gamma=record["gamma"], block_h=record["block_h"],
                           block_w=record["block_w"],
                           block_overlap=record["block_overlap"],
                           seed=record["seed"])
        return MmcNetModel(
            params=params,
            banks=tuple(np.array(b, dtype=float) for b in record["banks"]),
            stage_objectives=tuple(np.array(o, dtype=float)
                                   for o in record["stage_objectives"]),
            input_shape=tuple(record["input_shape"]),
            num_blocks=record["num_blocks"],
            output_length=record["output_length"])
    raise Parse(1, 1, f"unknown model kind {kind!r}")


def dumps_model(model):
    return json.dumps(to_record(model), sort_keys=True, indent=2) + "\n"


def save_model(model, path):
    try:
        with open(path, "w") as fh:
            fh.write(dumps_model(model))
    except OSError as exc:
        raise Io(f"cannot write {path}: {exc}") from exc


def load_model(path):
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise Io(f"cannot read {path}: {exc}") from exc
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise Parse(exc.lineno, exc.colno, "bad JSON") from exc
    return from_record(record)
