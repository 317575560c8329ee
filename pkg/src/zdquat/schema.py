"""The versioned JSON report schema shipped with the package."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib.resources import files
from typing import Any

import jsonschema

SCHEMA_FILE = "report-v1.json"


@lru_cache(maxsize=1)
def load_schema() -> dict[str, Any]:
    return json.loads(files("zdquat").joinpath("schemas", SCHEMA_FILE).read_text(encoding="utf-8"))


def validate_report(payload: Any) -> None:
    """Raise ``jsonschema.ValidationError`` if ``payload`` is not a valid report."""
    jsonschema.validate(payload, load_schema(), cls=jsonschema.Draft202012Validator)
