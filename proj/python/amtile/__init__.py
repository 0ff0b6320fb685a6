"""Quasitilings, exact tilings and tiling hierarchies on finite windows of amenable groups."""

import json

from ._core import (
    AmtileError,
    Group,
    ball,
    folner_set,
    invariance_ratio,
    k_core,
    set_threads,
    threads,
)
from . import _core

__all__ = [
    "AmtileError",
    "Group",
    "Result",
    "ball",
    "folner_set",
    "invariance_ratio",
    "k_core",
    "render",
    "run",
    "set_threads",
    "threads",
    "verify",
]


class Result:
    def __init__(self, ok, report, artifacts):
        self.ok = ok
        self.report = report
        self.artifacts = artifacts

    def artifact(self, name):
        return json.loads(self.artifacts[name])


def run(config):
    """Run a pipeline from YAML text or a dict with the same structure."""
    if not isinstance(config, str):
        config = json.dumps(config)
    ok, report, artifacts = _core.run(config)
    return Result(ok, json.loads(report), artifacts)


def verify(artifact):
    if not isinstance(artifact, str):
        artifact = json.dumps(artifact)
    return json.loads(_core.verify(artifact))


def render(artifact, fmt="ascii", level=1):
    if not isinstance(artifact, str):
        artifact = json.dumps(artifact)
    return _core.render(artifact, fmt, level)
