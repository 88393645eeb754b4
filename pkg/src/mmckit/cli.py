"""Command-line front end.

Subcommands cover the whole experiment loop: `gen-synthetic` writes the
bundled datasets to disk, `fit` / `net-fit` train a model from a JSON
config and save it, `transform` pushes a dataset through a saved model,
`eval` / `net-eval` run the split-fit-predict pipeline and emit a JSON
report, and `sweep` repeats the evaluation over a list of target
dimensions, writing the report, a flat CSV of (method, seed, dim,
accuracy) rows and, unless asked not to, a rendered accuracy curve next
to them.

Every run is a pure function of its config plus the seed: rerunning a
command reproduces its outputs byte for byte apart from the timing block.
"""

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import serialize, synthetic
from .data import LabeledDataset, SplitSpec, flatten, load_csv, load_idx, split
from .errors import ConfigInvalid, Io, MmcError
from .evaluate import EvalReport, accuracy, fit_pca_baseline, knn_predict
from .mmc import LinearModel, MmcParams, fit, transform
from .mmc2d import BilinearModel, L2d2Params, Mmc2dParams, fit_2d2, fit_l2d2, \
    transform_2d
from .net import MmcNetModel, NetParams, fit_net, transform_net
from .rng import derive_seed
from .variants import (LayeredModel, LmmcParams, RmmcParams, fit_lmmc,
                       fit_rmmc, transform_layered)

_METHODS = ("mmc", "pca", "rmmc", "lmmc", "2d2mmc", "l2d2mmc", "mmcnet")
_VECTOR_METHODS = ("mmc", "pca", "rmmc", "lmmc")
# tags for deriving sub-seeds from the master seed
_SPLIT_TAG = 100
_METHOD_TAG = 200


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated run description: dataset, method, params, seed, k."""

    seed: int
    dataset: dict
    method: str
    params: dict
    knn_k: int
    sweep_dims: tuple

    @staticmethod
    def from_dict(raw):
        if not isinstance(raw, dict):
            raise ConfigInvalid("config", "expected a JSON object")
        seed = raw.get("seed", 0)
        if not isinstance(seed, int):
            raise ConfigInvalid("seed", f"expected an integer, got {seed!r}")
        dataset = raw.get("dataset")
        if not isinstance(dataset, dict):
            raise ConfigInvalid("dataset", "missing dataset section")
        fmt = dataset.get("format")
        if fmt not in ("csv", "idx", "synthetic"):
            raise ConfigInvalid("dataset.format", f"got {fmt!r}")
        if fmt == "csv" and "path" not in dataset:
            raise ConfigInvalid("dataset.path", "csv needs a path")
        if fmt == "idx" and ("images" not in dataset
                             or "labels" not in dataset):
            raise ConfigInvalid("dataset.images",
                                "idx needs images and labels paths")
        if fmt == "synthetic" and "name" not in dataset:
            raise ConfigInvalid("dataset.name", "synthetic needs a name")
        method = raw.get("method")
        if method not in _METHODS:
            raise ConfigInvalid("method",
                                f"got {method!r}, know {list(_METHODS)}")
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise ConfigInvalid("params", "expected an object")
        knn_k = raw.get("knn_k", 1)
        if not isinstance(knn_k, int) or knn_k < 1:
            raise ConfigInvalid("knn_k", f"got {knn_k!r}")
        dims = raw.get("sweep", {}).get("dims") if "sweep" in raw else None
        if dims is not None:
            if (not isinstance(dims, list) or not dims
                    or any(not isinstance(v, int) or v < 1 for v in dims)):
                raise ConfigInvalid("sweep.dims",
                                    "expected a list of positive integers")
            dims = tuple(dims)
        return ExperimentConfig(seed=seed, dataset=dataset, method=method,
                                params=dict(params), knn_k=knn_k,
                                sweep_dims=dims)


def _apply_override(raw, assignment):
    if "=" not in assignment:
        raise ConfigInvalid("--set", f"expected key=value, got {assignment!r}")
    key, text = assignment.split("=", 1)
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    node = raw
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigInvalid(key, "path crosses a non-object")
    node[parts[-1]] = value


def load_config(path, overrides=(), seed=None):
    """Read a config file, apply --set overrides, then --seed."""
    try:
        with open(path, "r") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise Io(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid("config", f"bad JSON: {exc}") from exc
    for assignment in overrides:
        _apply_override(raw, assignment)
    if seed is not None:
        raw["seed"] = seed
    return ExperimentConfig.from_dict(raw)


def _load_dataset(config):
    section = config.dataset
    fmt = section["format"]
    if fmt == "csv":
        return load_csv(section["path"],
                        has_header=section.get("has_header", False),
                        label_column=section.get("label_column", -1))
    if fmt == "idx":
        return load_idx(section["images"], section["labels"])
    name = section["name"]
    gen_seed = section.get("gen_seed")
    if name == "tiny":
        return synthetic.make_tiny()
    if name == "gauss2":
        kwargs = {} if gen_seed is None else {"seed": gen_seed}
        return synthetic.make_gauss2(**kwargs)
    if name == "images3":
        kwargs = {} if gen_seed is None else {"seed": gen_seed}
        return synthetic.make_images3(**kwargs)
    if name == "glyphs10":
        kwargs = {} if gen_seed is None else {"seed": gen_seed}
        return synthetic.make_glyphs10(**kwargs)
    raise ConfigInvalid("dataset.name", f"unknown dataset {name!r}")


def _split_dataset(config, ds):
    section = config.dataset.get("split") or {}
    seed = section.get("seed")
    if seed is None:
        seed = derive_seed(config.seed, _SPLIT_TAG)
    spec = SplitSpec(seed=seed,
                     train_per_class=section.get("train_per_class", 0.5),
                     test_per_class=section.get("test_per_class", 0.5))
    return split(ds, spec)


def _as_vector(ds):
    if isinstance(ds, LabeledDataset):
        return ds
    return flatten(ds)


def _require_2d(ds, method):
    if isinstance(ds, LabeledDataset):
        raise ConfigInvalid("dataset.format",
                            f"method {method} needs image data")
    return ds


def _fit_model(config, train, dim=None):
    """Fit the configured method; `dim` overrides the target dimension."""
    method = config.method
    p = dict(config.params)
    seed = p.get("seed")
    if seed is None:
        seed = derive_seed(config.seed, _METHOD_TAG)
    gamma = float(p.get("gamma", 1.0))
    theta = int(p.get("theta", 1000))

    if method in _VECTOR_METHODS:
        ds = _as_vector(train)
        r = int(dim if dim is not None else p.get("r", 1))
        if method == "pca":
            return fit_pca_baseline(ds, r), ds
        base = MmcParams(r=r, gamma=gamma, theta=theta,
                         branch_override=p.get("branch"))
        if method == "mmc":
            return fit(ds, base), ds
        rmmc = RmmcParams(base=base, seed=seed, t=p.get("t"))
        if method == "rmmc":
            return fit_rmmc(ds, rmmc), ds
        g = int(p.get("g", 2 * ds.d))
        layers = int(p.get("layers", 1))
        return fit_lmmc(ds, LmmcParams(rmmc=rmmc, g=g, layers=layers)), ds

    ds = _require_2d(train, method)
    if method in ("2d2mmc", "l2d2mmc"):
        l = int(dim if dim is not None else p.get("l", 1))
        r = int(dim if dim is not None else p.get("r", 1))
        base = Mmc2dParams(l=l, r=r, gamma=gamma, theta=theta, seed=seed)
        if method == "2d2mmc":
            return fit_2d2(ds, base), ds
        h1 = int(p.get("h1", 2 * ds.d1))
        h2 = int(p.get("h2", 2 * ds.d2))
        return fit_l2d2(ds, L2d2Params(base=base, h1=h1, h2=h2)), ds

    filters = p.get("filters_per_stage", [8, 8, 8])
    params = NetParams(k1=int(p.get("k1", 3)), k2=int(p.get("k2", 3)),
                       num_stages=int(p.get("num_stages", len(filters))),
                       filters_per_stage=tuple(int(f) for f in filters),
                       gamma=gamma, block_h=int(p.get("block_h", 7)),
                       block_w=int(p.get("block_w", 7)),
                       block_overlap=float(p.get("block_overlap", 0.5)),
                       seed=seed)
    return fit_net(ds, params), ds


def _features(model, ds):
    """Feature columns of a dataset under any fitted model."""
    if isinstance(model, LinearModel):
        return transform(model, _as_vector(ds).x)
    if isinstance(model, LayeredModel):
        return transform_layered(model, _as_vector(ds).x)
    if isinstance(model, BilinearModel):
        y = transform_2d(model, ds.images)
        return y.reshape(y.shape[0], -1).T
    if isinstance(model, MmcNetModel):
        return transform_net(model, ds.images).T
    raise TypeError(f"cannot featurize with {type(model).__name__}")


def _echo_params(config, model):
    """Resolved parameter values for the report."""
    echo = dict(config.params)
    if isinstance(model, LinearModel):
        echo.update(r=model.r, gamma=model.params.gamma,
                    theta=model.params.theta)
    elif isinstance(model, LayeredModel):
        p = model.params
        echo.update(r=p.rmmc.base.r, gamma=p.rmmc.base.gamma,
                    t=p.rmmc.resolved_t(), g=p.g, layers=p.layers)
    elif isinstance(model, BilinearModel):
        p = model.params
        echo.update(l=p.l, r=p.r, gamma=p.gamma, theta=p.theta)
    elif isinstance(model, MmcNetModel):
        p = model.params
        echo.update(k1=p.k1, k2=p.k2, num_stages=p.num_stages,
                    filters_per_stage=list(p.filters_per_stage),
                    gamma=p.gamma, block_h=p.block_h, block_w=p.block_w,
                    block_overlap=p.block_overlap,
                    output_length=model.output_length)
    return echo


def run(config):
    """Split, fit, featurize, classify; returns the filled-in report."""
    t_total = time.perf_counter()
    full = _load_dataset(config)
    train, test = _split_dataset(config, full)

    dims = config.sweep_dims
    per_dim = []
    last_model = None
    timing = {}
    t_fit = 0.0
    t_eval = 0.0
    for dim in (dims if dims else (None,)):
        t0 = time.perf_counter()
        model, train_ds = _fit_model(config, train, dim=dim)
        t_fit += time.perf_counter() - t0
        t0 = time.perf_counter()
        train_feats = _features(model, train_ds)
        test_feats = _features(model, test)
        predicted = knn_predict(train_feats, train_ds.labels, test_feats,
                                k=config.knn_k)
        acc = accuracy(predicted, test.labels)
        t_eval += time.perf_counter() - t0
        last_model = model
        if dims:
            per_dim.append((dim, acc))

    timing["fit_seconds"] = t_fit
    timing["eval_seconds"] = t_eval
    timing["total_seconds"] = time.perf_counter() - t_total
    return EvalReport(
        method=config.method,
        seed=config.seed,
        params=_echo_params(config, last_model),
        accuracy=acc,
        per_dim=per_dim,
        timing=timing,
        branch=getattr(last_model, "branch", None),
    ), last_model


def _ensure_parent(path):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def emit_sweep_csv(report, path):
    """Write (method, seed, dim, accuracy) rows; floats keep full precision."""
    lines = ["method,seed,dim,accuracy"]
    for method, seed, dim, acc in report.csv_rows():
        lines.append(f"{method},{seed},{dim},{acc!r}")
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path, text):
    _ensure_parent(path)
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise Io(f"cannot write {path}: {exc}") from exc


def _cmd_fit(args, forced_method=None):
    config = load_config(args.config, args.set or (), args.seed)
    if forced_method and config.method != forced_method:
        raise ConfigInvalid("method", f"this subcommand runs {forced_method}")
    full = _load_dataset(config)
    if config.dataset.get("split"):
        train, _ = _split_dataset(config, full)
    else:
        train = full
    model, _ = _fit_model(config, train)
    _ensure_parent(args.out)
    serialize.save_model(model, args.out)
    print(args.out)
    return 0


def _cmd_transform(args):
    config = load_config(args.config, args.set or (), args.seed)
    model = serialize.load_model(args.model)
    ds = _load_dataset(config)
    feats = _features(model, ds)
    out = LabeledDataset(x=feats, labels=ds.labels,
                         label_names=ds.label_names)
    _ensure_parent(args.out)
    synthetic.write_csv(out, args.out)
    print(args.out)
    return 0


def _cmd_eval(args, forced_method=None):
    config = load_config(args.config, args.set or (), args.seed)
    if forced_method and config.method != forced_method:
        raise ConfigInvalid("method", f"this subcommand runs {forced_method}")
    report, _ = run(config)
    text = report.to_json()
    if args.out:
        _write_text(args.out, text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sweep(args):
    config = load_config(args.config, args.set or (), args.seed)
    if not config.sweep_dims:
        raise ConfigInvalid("sweep.dims", "sweep needs a dims list")
    report, _ = run(config)
    stem, _ext = os.path.splitext(args.out)
    _write_text(args.out, report.to_json())
    emit_sweep_csv(report, stem + ".csv")
    written = [args.out, stem + ".csv"]
    if not args.no_plot:
        from .plots import render_sweep_figure
        render_sweep_figure([report], stem + ".png")
        written.append(stem + ".png")
    print("\n".join(written))
    return 0


def _cmd_gen(args):
    paths = synthetic.generate(args.name, args.out_dir, seed=args.seed)
    print("\n".join(paths))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mmckit",
        description="margin-criterion dimensionality reduction experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True,
                           help="JSON experiment config")
            p.add_argument("--set", action="append", metavar="KEY=VALUE",
                           help="override a config entry (dotted path)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the master seed")

    p = sub.add_parser("fit", help="train a model and save it")
    common(p)
    p.add_argument("--out", default="model.json")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("transform", help="featurize a dataset with a model")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", default="features.csv")
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("eval", help="split, fit, classify, report")
    common(p)
    p.add_argument("--out", default=None,
                   help="report path (stdout when omitted)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="evaluate over a list of dimensions")
    common(p)
    p.add_argument("--out", default="sweep.json")
    p.add_argument("--no-plot", action="store_true",
                   help="skip the rendered accuracy curve")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("net-fit", help="train the filter-bank network")
    common(p)
    p.add_argument("--out", default="model.json")
    p.set_defaults(func=lambda a: _cmd_fit(a, forced_method="mmcnet"))

    p = sub.add_parser("net-eval", help="evaluate the filter-bank network")
    common(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=lambda a: _cmd_eval(a, forced_method="mmcnet"))

    p = sub.add_parser("gen-synthetic", help="write a bundled dataset")
    p.add_argument("--name", required=True,
                   choices=sorted(synthetic.DEFAULT_SEEDS))
    p.add_argument("--out-dir", default=".")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_gen)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MmcError as exc:
        payload = {"error": type(exc).__name__, "detail": str(exc)}
        print(json.dumps(payload), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
