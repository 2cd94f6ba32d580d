from ._kernels import KernelError, backend_name, get_kernel
from .forest import ForestModel, fit_forest, resolve_mtry
from .gbt import GbtModel, fit_gbt, log_loss_from_margin, logistic_gh
from .gridsearch import (CvRow, GridSearchResult, GridSearchSpec,
                         grid_search_cv, fit_learner, stratified_kfold)
from .serialize import (load_model, model_from_dict, model_to_dict,
                        model_to_json, save_model)
from .tree import (FeatureSampler, LearnerError, TreeModel, TreeParams,
                   fit_tree, splitmix64)

__all__ = [
    "KernelError", "backend_name", "get_kernel",
    "ForestModel", "fit_forest", "resolve_mtry",
    "GbtModel", "fit_gbt", "log_loss_from_margin", "logistic_gh",
    "CvRow", "GridSearchResult", "GridSearchSpec", "grid_search_cv",
    "fit_learner", "stratified_kfold",
    "load_model", "model_from_dict", "model_to_dict", "model_to_json",
    "save_model",
    "FeatureSampler", "LearnerError", "TreeModel", "TreeParams",
    "fit_tree", "splitmix64",
]
