"""Built-in example polytopes, shipped as JSON data files.

The base names cover the standard smooth toric surfaces plus an interval and
a cube; every Fano entry also has a ``<name>-reflexive`` variant translated
so the origin is interior and all facet offsets equal one (the normalisation
used by the soliton solver).
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .polytope import DelzantPolytope

BASE_NAMES = ("cp1", "cp2", "cp1xcp1", "bl1cp2", "bl2cp2", "bl3cp2",
              "hirzebruch-a", "cube")
REFLEXIVE_NAMES = ("cp1-reflexive", "cp2-reflexive", "cp1xcp1-reflexive",
                   "bl1cp2-reflexive", "bl2cp2-reflexive", "bl3cp2-reflexive")


def names():
    return BASE_NAMES + REFLEXIVE_NAMES


@lru_cache(maxsize=None)
def load(name):
    """Load a catalog polytope by name."""
    if name not in names():
        raise KeyError(f"unknown catalog polytope {name!r}; "
                       f"available: {', '.join(names())}")
    text = resources.files("toricstab.data").joinpath(f"{name}.json").read_text()
    return DelzantPolytope.from_json(json.loads(text))
