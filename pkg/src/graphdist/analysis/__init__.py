"""Downstream tools for distance matrices: kernels, clustering, MDS,
classification, ranking and synthetic benchmarks."""
from .classify import CVResult, LabelSet, propagate_1nn, stratified_folds, stratified_sample, tune_by_cv
from .clustering import Partition, canonical, kernel_kmeans, nmi
from .curves import ratio_curve
from .evaluate import EvalResult, evaluate
from .kernels import Embedding, KernelMatrix, center_kernel, cmds_coordinates, psd_clip, sigmoid_ct_kernel
from .sbm import gen_sbm
from .stats import RankedMethod, copeland_rank, copeland_scores

__all__ = [
    "CVResult", "EvalResult", "Embedding", "KernelMatrix", "LabelSet", "Partition", "RankedMethod",
    "canonical", "center_kernel", "cmds_coordinates", "copeland_rank", "copeland_scores", "evaluate",
    "gen_sbm", "kernel_kmeans", "nmi", "propagate_1nn", "psd_clip", "ratio_curve", "sigmoid_ct_kernel",
    "stratified_folds", "stratified_sample", "tune_by_cv",
]
