"""Python front end to the excitrans simulation core.

Overrides are passed as keyword arguments and forwarded as ``key=value``
assignments, exactly like ``--set`` on the command line::

    import excitrans
    excitrans.transmit(N=50, g=10, Delta=69, Jprime=10)["T_ts"]
"""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    CsvSchemaError,
    csv_columns,
    fit_scaling,
    polariton_energies,
    scenario_ids,
    transmission_q,
    validate,
)
from .schema import CSV_COLUMNS, SchemaError, read_table

__version__ = _core.__version__

__all__ = [
    "CSV_COLUMNS",
    "ConfigError",
    "CsvSchemaError",
    "SchemaError",
    "csv_columns",
    "fit_scaling",
    "polariton_energies",
    "read_table",
    "scenario",
    "scenario_ids",
    "steady",
    "transmission_q",
    "transmit",
    "validate",
]


def _assignments(overrides):
    return [f"{key}={_json.dumps(value)}" for key, value in overrides.items()]


def transmit(seed=None, **overrides):
    """Wave-packet run; returns T at t_s and t_l with the resolved geometry."""
    return _core.transmit(_assignments(overrides), seed)


def steady(seed=None, **overrides):
    """Steady-state current of the pumped chain."""
    return _core.steady(_assignments(overrides), seed)


def scenario(scenario_id, out, seed=None, deep=False, threads=1, **overrides):
    """Run a figure scenario into ``out``; returns paths and the summary."""
    return _core.scenario(scenario_id, str(out), _assignments(overrides), seed, deep, threads)
