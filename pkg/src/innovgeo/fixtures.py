"""Named parameter sets that reproduce the reference bifurcation diagrams."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from innovgeo.core import InnovationSpec, ModelParams, spec_from_name


@dataclass(frozen=True)
class Fixture:
    name: str
    spec: InnovationSpec
    params: ModelParams  # phi is a placeholder; sweeps override it
    expected: str


@lru_cache(maxsize=1)
def _raw() -> dict:
    text = resources.files("innovgeo").joinpath("data/scenarios.json").read_text(encoding="utf-8")
    return json.loads(text)


def names() -> list[str]:
    return list(_raw())


def fixture(name: str) -> Fixture:
    try:
        entry = _raw()[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(names())}") from None
    params = ModelParams.from_dict({"phi": 0.5, **entry["params"]})
    return Fixture(name, spec_from_name(entry["spec"]), params, entry["expected"])
