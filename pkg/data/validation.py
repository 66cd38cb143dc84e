# data/validation.py

import json
import logging
import os
from functools import lru_cache

from jsonschema import Draft202012Validator

from errors import ModelValidationError

logger = logging.getLogger(__name__)

SCHEMA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "schemas")

MODEL_SCHEMA = "model.schema.json"
REPORT_SCHEMA = "report.schema.json"


@lru_cache(maxsize=None)
def load_schema(name: str) -> Draft202012Validator:
    with open(os.path.join(SCHEMA_DIR, name), "r", encoding="utf-8") as f:
        schema = json.load(f)
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema)


def _where(error) -> str:
    path = "".join(f"[{p!r}]" if isinstance(p, int) else f".{p}" for p in error.absolute_path)
    return path or "<document>"


def schema_errors(document, name: str) -> list[str]:
    """Every violation as '<path>: <message>', in document order."""
    validator = load_schema(name)
    errors = sorted(validator.iter_errors(document), key=lambda e: list(map(str, e.absolute_path)))
    return [f"{_where(e)}: {e.message}" for e in errors]


def validate_document(document, name: str, error_cls=ModelValidationError) -> None:
    problems = schema_errors(document, name)
    if problems:
        logger.debug(f"SCHEMA INVALID | schema={name} | errors={len(problems)}")
        raise error_cls(f"{name}: {problems[0]}")
