"""Continual learning for temporal-sensitive question answering."""

import json

from . import _core
from ._core import (
    Error,
    NumericalError,
    UsageError,
    ValidationError,
    combined_loss,
    cross_entropy,
    exact_match,
    extract_years,
    forgetting,
    normalize_answer,
    parse_range,
    token_f1,
    triplet_margin_loss,
)

__all__ = [
    "Error", "NumericalError", "UsageError", "ValidationError",
    "combined_loss", "cross_entropy", "exact_match", "extract_years", "forgetting",
    "normalize_answer", "parse_range", "token_f1", "triplet_margin_loss",
    "default_config", "config_hash", "build", "train", "evaluate", "report", "gradcheck",
]


def _dump(config):
    return json.dumps(config or {})


def default_config():
    return json.loads(_core.default_config())


def config_hash(config=None):
    return _core.config_hash(_dump(config))


def build(out_dir, config=None):
    """Synthesize a corpus into out_dir; returns the build log."""
    return _core.build(_dump(config), str(out_dir))


def train(data_dir, runs_dir, config=None, resume=False, stop_after_stage=0):
    """Train every stage of config["arm"]; returns the run directory."""
    return _core.train(_dump(config), str(data_dir), str(runs_dir), resume, stop_after_stage)


def evaluate(checkpoint, data_dir, config=None, split="test"):
    return _core.evaluate(_dump(config), str(checkpoint), str(data_dir), split)


def report(run_dirs, split="test"):
    return _core.report([str(d) for d in run_dirs], split)


def gradcheck(seed=1, instances=100, inject_sign_flip=False):
    return _core.gradcheck(seed, instances, inject_sign_flip)
