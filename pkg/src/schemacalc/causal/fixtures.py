"""Reference three-variable models used by the examples and checks."""

from __future__ import annotations

from ..syntax import SpaceSpec
from .graph import Dag
from .model import CausalSchema

BINARY = (0, 1)


def _vars(*names) -> tuple:
    return tuple((n, SpaceSpec(n, BINARY)) for n in names)


def chain_model() -> CausalSchema:
    """X → Y → Z, each step copying its parent with probability 0.9."""
    copy = [[0.9, 0.1], [0.1, 0.9]]
    return CausalSchema(
        _vars("X", "Y", "Z"),
        Dag(("X", "Y", "Z"), {("X", "Y"), ("Y", "Z")}),
        {"X": [0.5, 0.5], "Y": copy, "Z": copy},
    )


def collider_model() -> CausalSchema:
    """X → Z ← Y with independent fair causes and a noisy-or effect."""
    z = [[[0.9, 0.1], [0.2, 0.8]], [[0.2, 0.8], [0.05, 0.95]]]
    return CausalSchema(
        _vars("X", "Y", "Z"),
        Dag(("X", "Y", "Z"), {("X", "Z"), ("Y", "Z")}),
        {"X": [0.5, 0.5], "Y": [0.5, 0.5], "Z": z},
    )
