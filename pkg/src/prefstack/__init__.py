"""Learning and predicting human action-ordering preferences at two resolutions.

Offline, demonstrations are segmented into events and clustered twice: over
event-identity sequences (high level) and, per event, over secondary-action
sequences (low level). Online, a session infers which clusters a new user
belongs to and predicts the next assistive action set.
"""

from .cluster import Dendrogram, Partition, agglomerate, select_partition, vrc
from .distance import distance_matrix, levenshtein, modified_levenshtein
from .errors import PrefstackError
from .evaluation import AccuracyReport, export_report, loocv, paired_t_test
from .events import Event, EventSequence, identities, segment, segment_prefix
from .inference import Session, commit_high, posterior_high, posterior_low
from .model import (
    NOOP,
    Action,
    ActionKind,
    Demonstration,
    SecondaryActionSet,
    TaskDefinition,
    TimeStep,
    ValidationReport,
    canonicalize,
    secondary_set,
    to_timesteps,
    validate,
)
from .storage import load_demos, load_model, load_task, save_demos, save_model, save_task
from .synth import SynthPreset, bookcase_task, fig4_preset, generate
from .training import (
    HighLevelCluster,
    LowLevelCluster,
    PreferenceModel,
    TrainingConfig,
    train,
    train_high,
    train_low,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ActionKind",
    "AccuracyReport",
    "Demonstration",
    "Dendrogram",
    "Event",
    "EventSequence",
    "HighLevelCluster",
    "LowLevelCluster",
    "NOOP",
    "Partition",
    "PreferenceModel",
    "PrefstackError",
    "SecondaryActionSet",
    "Session",
    "SynthPreset",
    "TaskDefinition",
    "TimeStep",
    "TrainingConfig",
    "ValidationReport",
    "agglomerate",
    "bookcase_task",
    "canonicalize",
    "commit_high",
    "distance_matrix",
    "export_report",
    "fig4_preset",
    "generate",
    "identities",
    "levenshtein",
    "load_demos",
    "load_model",
    "load_task",
    "loocv",
    "modified_levenshtein",
    "paired_t_test",
    "posterior_high",
    "posterior_low",
    "save_demos",
    "save_model",
    "save_task",
    "secondary_set",
    "segment",
    "segment_prefix",
    "select_partition",
    "to_timesteps",
    "train",
    "train_high",
    "train_low",
    "validate",
    "vrc",
]
