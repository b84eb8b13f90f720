"""Deterministic JSON emission at 17 significant digits.

The stdlib encoder formats floats with shortest-roundtrip repr and cannot
be overridden from the C fast path, so reproducibility-sensitive outputs
(result.json, config.json) go through this small writer instead. Parsing
still uses the stdlib ``json`` module.
"""

import json

import numpy as np

__all__ = ["format_float", "dumps", "dump"]


def format_float(value):
    """Render a float with 17 significant digits (round-trips exactly)."""
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"non-finite value {value!r} is not representable in JSON")
    return format(value, ".17g")


def _is_scalar(obj):
    return not isinstance(obj, (list, tuple, dict, np.ndarray))


def _encode(obj, indent, level):
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        items = list(obj)
        if not items:
            return "[]"
        if all(_is_scalar(item) for item in items):
            return "[" + ", ".join(_encode(item, indent, 0) for item in items) + "]"
        body = ",\n".join(inner + _encode(item, indent, level + 1) for item in items)
        return "[\n" + body + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = []
        for key, value in obj.items():
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            parts.append(
                inner + json.dumps(key, ensure_ascii=False) + ": "
                + _encode(value, indent, level + 1)
            )
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(obj, indent=2):
    return _encode(obj, indent, 0) + "\n"


def dump(obj, path, indent=2):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(dumps(obj, indent=indent))
