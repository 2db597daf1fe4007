from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, cast

from .models import InputError

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "schemas"


def load_schema(name: str) -> Dict[str, Any]:
    schema_dir = SCHEMA_DIR.resolve()
    path = (SCHEMA_DIR / name).resolve()
    if not path.is_relative_to(schema_dir):
        raise InputError(f"Schema name is not allowed: {name}")
    try:
        with path.open("r", encoding="utf-8") as handle:
            return cast(Dict[str, Any], json.load(handle))
    except FileNotFoundError as exc:
        raise InputError(f"Schema file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"Invalid JSON in schema file: {path}") from exc


def validate_required_fields(payload: Dict[str, Any], schema: Dict[str, Any]) -> List[str]:
    errors: List[str] = []
    for field in schema.get("required", []):
        if field not in payload:
            errors.append(f"Missing required field: {field}")
    any_of = schema.get("anyOf")
    if any_of and not any(all(f in payload for f in option.get("required", [])) for option in any_of):
        options = [" + ".join(option.get("required", [])) for option in any_of]
        errors.append(f"Expected one of: {', '.join(options)}")
    properties = schema.get("properties", {})
    for field, rules in properties.items():
        if field not in payload:
            continue
        value = payload[field]
        expected_type = rules.get("type")
        if expected_type and not _matches_type(value, expected_type):
            errors.append(f"Field {field} expected {expected_type}")
            continue
        if "enum" in rules and value not in rules["enum"]:
            errors.append(f"Field {field} must be one of {rules['enum']}")
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            minimum = rules.get("minimum")
            if minimum is not None and value < minimum:
                errors.append(f"Field {field} must be >= {minimum}")
        if isinstance(value, list):
            item_type = rules.get("items", {}).get("type")
            for index, item in enumerate(value):
                if item_type and not _matches_type(item, item_type):
                    errors.append(f"Field {field}[{index}] expected {item_type}")
                elif item_type == "object":
                    nested = validate_required_fields(item, rules["items"])
                    errors.extend(f"{field}[{index}]: {e}" for e in nested)
        extra = rules.get("additionalProperties")
        if isinstance(value, dict) and isinstance(extra, dict):
            value_type = extra.get("type")
            for key in sorted(value):
                if value_type and not _matches_type(value[key], value_type):
                    errors.append(f"Field {field}.{key} expected {value_type}")
                elif value_type == "object":
                    nested = validate_required_fields(value[key], extra)
                    errors.extend(f"{field}.{key}: {e}" for e in nested)
    return errors


def validate_document(payload: Dict[str, Any], kind: str) -> List[str]:
    """Check a document against ``schemas/<kind>.schema.json``."""
    return validate_required_fields(payload, load_schema(f"{kind}.schema.json"))


def _matches_type(value: Any, expected_type: Any) -> bool:
    if isinstance(expected_type, list):
        return any(_matches_type(value, t) for t in expected_type)
    if expected_type == "string":
        return isinstance(value, str)
    if expected_type == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if expected_type == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if expected_type == "object":
        return isinstance(value, dict)
    if expected_type == "array":
        return isinstance(value, list)
    if expected_type == "boolean":
        return isinstance(value, bool)
    if expected_type == "null":
        return value is None
    return True
