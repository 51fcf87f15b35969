"""N-gram language modelling and insertion-point prediction."""

from .kneser_ney import (
    BOS,
    EOS,
    UNK,
    ConstantScorer,
    EmptyCorpusError,
    NGramModel,
    Scorer,
    UniformModel,
    log_prob,
    perplexity,
    train,
)
from .locate import AccuracyReport, LocatePrediction, candidates, eval_accuracy, locate
from .model_io import ModelFormatError, load_model, save_model, write_arpa

__all__ = [
    "BOS",
    "EOS",
    "UNK",
    "AccuracyReport",
    "ConstantScorer",
    "EmptyCorpusError",
    "LocatePrediction",
    "ModelFormatError",
    "NGramModel",
    "Scorer",
    "UniformModel",
    "candidates",
    "eval_accuracy",
    "load_model",
    "locate",
    "log_prob",
    "perplexity",
    "save_model",
    "train",
    "write_arpa",
]
