"""Versioned JSON schemas for every report the command line writes."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

NAMES = ("field-meta", "besov-analysis", "scale-scan", "defect-scan", "helicity",
         "trajectory", "regularity-summary", "report")


@lru_cache(maxsize=None)
def load(name: str) -> dict:
    if name not in NAMES:
        raise KeyError(f"unknown schema {name!r}")
    text = resources.files(__name__).joinpath(f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def schema_name(obj) -> str | None:
    """``"scale-scan"`` for an object tagged ``"schema": "scale-scan/1"``."""
    tag = obj.get("schema") if isinstance(obj, dict) else None
    if not isinstance(tag, str) or "/" not in tag:
        return None
    name = tag.split("/", 1)[0]
    return name if name in NAMES else None


def validate(obj: dict):
    """Raise ``jsonschema.ValidationError`` unless ``obj`` matches its declared schema."""
    name = schema_name(obj)
    if name is None:
        raise jsonschema.ValidationError(f"missing or unknown schema tag {obj.get('schema')!r}")
    jsonschema.validate(obj, load(name), cls=jsonschema.Draft202012Validator)
