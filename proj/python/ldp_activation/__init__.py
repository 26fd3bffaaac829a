"""Sharp large-deviation activation probabilities.

Thin Python layer over the compiled ``_core`` module. Model, distribution and
config objects can be built from plain dicts using the same JSON layout as the
command-line configs.
"""

import json

from . import _core
from ._core import (
    Distribution,
    DomainError,
    Environment,
    LdpError,
    ModelParams,
    NumericError,
    SchemaError,
    decompose_rate,
    derived_constants,
    exact_tail,
    moments_annealed,
    moments_quenched_R,
    moments_quenched_Z,
    naive_mc,
    normal_interval,
    probability_annealed,
    probability_quenched,
    product_law,
    rate_annealed,
    rate_quenched,
    ratio_annealed,
    ratio_quenched_R,
    ratio_quenched_Z,
    sample_environment,
    sample_G,
    simulate_fluctuation,
    stimulation_rate_from_dissociation,
    tilted_is,
)

__version__ = _core.__version__


def distribution(spec):
    """Distribution from a dict such as {"kind": "discrete", "support": [...], "probs": [...]}."""
    return Distribution.from_json(json.dumps(spec))


def model(spec):
    """ModelParams from a dict with n_c, n_v, z_f, law_Zc, law_Zv, law_W."""
    return ModelParams.from_json(json.dumps(spec))


def model_dict(params):
    return json.loads(params.to_json())


def check_config(config):
    """Raise SchemaError if the config dict is malformed."""
    _core.validate_config_json(json.dumps(config))


def run_config(config):
    """Run an experiment config dict; returns (exit_code, summary dict)."""
    code, summary = _core.run_config_json(json.dumps(config))
    return code, json.loads(summary)


def config_schema():
    return json.loads(_core.config_schema_json())


def summary_schema():
    return json.loads(_core.summary_schema_json())
