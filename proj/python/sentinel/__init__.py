"""Python access to the sentinel detection pipeline and scenario simulator."""

import json
import os

from . import _core
from ._core import ConfigError, IntegrityFailure, TraceMismatch

__all__ = [
    "ConfigError",
    "IntegrityFailure",
    "TraceMismatch",
    "validate_config",
    "config_hash",
    "assess_state",
    "dedupe",
    "transition_probabilities",
    "react",
    "seal",
    "unseal",
    "run_scenario",
    "score",
    "replay",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def validate_config(config):
    """Returns the normalized config dict or raises ConfigError."""
    return json.loads(_core.validate_config(_text(config)))


def config_hash(config):
    return _core.config_hash(_text(config))


def assess_state(count, theta_s, theta_m):
    return _core.assess_state(count, theta_s, theta_m)


def dedupe(records):
    return json.loads(_core.dedupe(json.dumps(records)))


def transition_probabilities(transitions, from_state, alpha=1.0):
    return _core.transition_probabilities(list(transitions), from_state, alpha)


def react(activity, state, observed_since_ms, holding_ms, now_ms):
    return _core.react(activity, state, observed_since_ms, holding_ms, now_ms)


def seal(record, key_hex):
    return _core.seal(json.dumps(record), key_hex)


def unseal(sealed, key_hex):
    return json.loads(_core.unseal(sealed, key_hex))


def run_scenario(config, out_dir=None, parallel=False):
    """Runs a scenario and returns the metrics report; writes traces if out_dir is given."""
    if out_dir is not None:
        out_dir = os.fspath(out_dir)
    return json.loads(_core.run_scenario(_text(config), out_dir, parallel))


def score(trace_dir):
    return json.loads(_core.score(os.fspath(trace_dir)))


def replay(trace_dir):
    """(identical, divergence)"""
    return _core.replay(os.fspath(trace_dir))
