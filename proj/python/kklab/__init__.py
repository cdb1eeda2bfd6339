"""Perturbed Kaup-Kupershmidt soliton laboratory."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, _default_config, _run

COMMANDS = ("soliton", "audit", "ode", "ensemble", "pde", "pii")


def default_config(command):
    """Every config key accepted by ``command`` with its default value."""
    return _json.loads(_default_config(command))


def run(command, config=None, *, out=None, seed=None, format=None):
    """Run a CLI subcommand in-process; returns the written file paths.

    ``config`` is a dict (or a manifest dict from an earlier run). Raises
    UsageError for bad configuration and the numerical error types on
    divergence, mirroring the command-line exit codes.
    """
    return _run(command, _json.dumps(config or {}), out, seed, format)
