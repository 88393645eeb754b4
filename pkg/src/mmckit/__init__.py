"""Margin-criterion dimensionality reduction toolkit.

Supervised linear reduction that maximizes between-class scatter minus a
weighted within-class scatter, with no matrix inversion anywhere: the
direct solve, an exact inner-product (kernelized) solve for tall data, a
randomized anchor variant, stacked random-expansion layers, two-sided
projections for image data, a cascaded filter-bank featurizer, and a
seeded k-NN evaluation harness behind one CLI.
"""

from .data import (Dataset2D, LabeledDataset, SplitSpec, flatten, load_csv,
                   load_idx, split)
from .errors import MmcError
from .evaluate import EvalReport, accuracy, fit_pca_baseline, knn_predict
from .mmc import (LinearModel, MmcParams, fit, fit_direct, fit_kernel,
                  transform)
from .mmc2d import (BilinearModel, L2d2Params, Mmc2dParams, fit_2d2,
                    fit_l2d2, transform_2d)
from .net import (MmcNetModel, NetParams, binary_hash, block_histogram,
                  extract_patches, fit_net, learn_stage_filters,
                  patch_scatters, stage_forward, transform_net)
from .numerics import principal_angles, svd, sym_eig
from .scatter import (ClassStats, Laplacians, ScatterPair, Scatter2D,
                      class_stats, laplacians, scatters, scatters_2d)
from .serialize import load_model, save_model
from .variants import (LayeredModel, LmmcParams, RmmcParams, fit_lmmc,
                       fit_lmmc_layer, fit_rmmc, transform_layered)

__version__ = "0.1.0"

__all__ = [
    "BilinearModel", "ClassStats", "Dataset2D", "EvalReport", "L2d2Params",
    "LabeledDataset", "Laplacians", "LayeredModel", "LinearModel",
    "LmmcParams", "MmcError", "MmcNetModel", "MmcParams", "Mmc2dParams",
    "NetParams", "RmmcParams", "Scatter2D", "ScatterPair", "SplitSpec",
    "accuracy", "binary_hash", "block_histogram", "class_stats",
    "extract_patches", "fit", "fit_2d2", "fit_direct", "fit_kernel",
    "fit_l2d2", "fit_lmmc", "fit_lmmc_layer", "fit_net", "fit_pca_baseline",
    "fit_rmmc", "flatten", "knn_predict", "laplacians", "learn_stage_filters",
    "load_csv", "load_idx", "load_model", "patch_scatters",
    "principal_angles", "save_model", "scatters", "scatters_2d", "split",
    "stage_forward", "svd", "sym_eig", "transform", "transform_2d",
    "transform_layered", "transform_net",
]
