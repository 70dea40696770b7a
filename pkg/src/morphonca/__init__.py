"""Evolving two-channel neural cellular automata for shape growth and empowerment."""
from ._validation import ConfigError, DataError, EstimatorError, EvaluationError
from .ca import CaState, DevelopmentTrace, Genome, SimParams, develop, seed_state, step
from .estimator import GenomeScorer, NCAEvolver
from .evolution import TREATMENTS, EvoParams, Individual, RunLog, dominates, evolve, mutate
from .infotheory import JointHistogram, entropy, mutual_information, pointwise_mi
from .objectives import LocalEmpowermentMap, empowerment, local_empowerment, loss
from .shapes import SHAPE_NAMES, TargetShape, make_shape

__version__ = "0.1.0"

__all__ = [
    "CaState", "ConfigError", "DataError", "DevelopmentTrace", "EstimatorError",
    "EvaluationError", "EvoParams", "Genome", "GenomeScorer", "Individual", "JointHistogram",
    "LocalEmpowermentMap", "NCAEvolver", "RunLog", "SHAPE_NAMES", "SimParams", "TREATMENTS",
    "TargetShape", "develop", "dominates", "empowerment", "entropy", "evolve",
    "local_empowerment", "loss", "make_shape", "mutate", "mutual_information", "pointwise_mi",
    "seed_state", "step",
]
