from .evaluate import MetricsReport, ModelSpec, RepeatResult, SplitPlan, evaluate
from .kmeans import kmeans
from .metrics import confusion, mann_whitney_u, precision, roc_auc, true_positive_rate
from .mlp import MlpModel, train_mlp
from .rbf import RbfModel, train_rbf
from .svm import SvmModel, train_svm

__all__ = [
    "MetricsReport", "ModelSpec", "RepeatResult", "SplitPlan", "evaluate", "kmeans",
    "confusion", "mann_whitney_u", "precision", "roc_auc", "true_positive_rate",
    "MlpModel", "train_mlp", "RbfModel", "train_rbf", "SvmModel", "train_svm",
]
