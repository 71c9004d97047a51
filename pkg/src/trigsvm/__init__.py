"""Support vector machines with a trigonometric kernel."""

__version__ = "0.1.0"

from .audit import (
    PsdVerdict,
    SurveyReport,
    eigen_audit,
    jacobi_eigenvalues,
    jitter_regularize,
    leading_minor_audit,
    leading_minors,
    randomized_psd_survey,
)
from .datasets import Dataset, gen_circles, gen_svr_sine, load_csv, standardize, write_csv
from .errors import TrigSVMError
from .kernels import GramMatrix, KernelSpec, cross_gram, eval_h, eval_kernel, eval_psi, gram
from .persistence import load_model, save_model
from .selection import (
    GridReport,
    class_distance_stats,
    grid_search,
    holdout_split,
    recommend_sigma_range,
    stratified_folds,
)
from .svc import SolverConfig, SvcModel, decision_function, fit_svc, kkt_violation, predict
from .svr import SvrModel, fit_svr, predict_svr, svr_rmse

__all__ = [
    "Dataset",
    "GramMatrix",
    "GridReport",
    "KernelSpec",
    "PsdVerdict",
    "SolverConfig",
    "SurveyReport",
    "SvcModel",
    "SvrModel",
    "TrigSVMError",
    "class_distance_stats",
    "cross_gram",
    "decision_function",
    "eigen_audit",
    "eval_h",
    "eval_kernel",
    "eval_psi",
    "fit_svc",
    "fit_svr",
    "gen_circles",
    "gen_svr_sine",
    "gram",
    "grid_search",
    "holdout_split",
    "jacobi_eigenvalues",
    "jitter_regularize",
    "kkt_violation",
    "leading_minor_audit",
    "leading_minors",
    "load_csv",
    "load_model",
    "predict",
    "predict_svr",
    "randomized_psd_survey",
    "recommend_sigma_range",
    "save_model",
    "standardize",
    "stratified_folds",
    "svr_rmse",
    "write_csv",
]
