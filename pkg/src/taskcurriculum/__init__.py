"""Correlation-clustered curriculum training of multi-task classifier heads."""

__version__ = "0.1.0"

from .clustering import Dendrogram, TaskClusterSet, auto_tau, cut_dendrogram, ward_linkage
from .correlation import CorrelationMatrix, pearson_matrix
from .curriculum import Curriculum, learning_sequence
from .dataset import FeatureMatrix, LabelMatrix, SynthSpec, load_dataset, split_dataset, synth_generate
from .model import ModelState, load_checkpoint, save_checkpoint
from .training import TrainConfig, compare_paradigms, plan_curriculum, run_curriculum

__all__ = [
    "__version__",
    "CorrelationMatrix",
    "Curriculum",
    "Dendrogram",
    "FeatureMatrix",
    "LabelMatrix",
    "ModelState",
    "SynthSpec",
    "TaskClusterSet",
    "TrainConfig",
    "auto_tau",
    "compare_paradigms",
    "cut_dendrogram",
    "learning_sequence",
    "load_checkpoint",
    "load_dataset",
    "pearson_matrix",
    "plan_curriculum",
    "run_curriculum",
    "save_checkpoint",
    "split_dataset",
    "synth_generate",
    "ward_linkage",
]
