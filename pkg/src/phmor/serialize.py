"""Deterministic JSON serialization of pHDAE systems.

Matrices are stored dense, row-major, with shortest round-trip float
formatting; writing the same system twice yields byte-identical files.
"""

import json

import numpy as np

from .errors import ConfigError, DimensionError
from .model import PHDAESystem

__all__ = ["system_to_dict", "system_from_dict", "save_system", "load_system"]

_FIELDS = ("E", "J", "R", "Q", "B", "P", "S", "N")


def system_to_dict(sys, meta=None):
    d = {"n": sys.n, "m": sys.m}
    for name in _FIELDS:
        d[name] = [[float(v) for v in row] for row in getattr(sys, name)]
    if meta:
        d["meta"] = meta
    return d


def system_from_dict(d):
    try:
        kwargs = {name: np.asarray(d[name], dtype=float) for name in _FIELDS if name in d}
        sys = PHDAESystem(**kwargs)
    except (KeyError, TypeError, ValueError, DimensionError) as exc:
        raise ConfigError("invalid system document: %s" % exc) from exc
    if "n" in d and sys.n != int(d["n"]):
        raise ConfigError("system document: stated n=%s does not match matrices" % d["n"])
    if "m" in d and sys.m != int(d["m"]):
        raise ConfigError("system document: stated m=%s does not match matrices" % d["m"])
    return sys


def dump_json(obj, path):
    """Write a JSON document deterministically (sorted keys, fixed
    separators, trailing newline, LF line endings)."""
    text = json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": "))
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
        fh.write("\n")


def save_system(sys, path, meta=None):
    dump_json(system_to_dict(sys, meta=meta), path)


def load_system(path):
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read system file %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("cannot parse system file %s: %s" % (path, exc)) from exc
    return system_from_dict(d)
