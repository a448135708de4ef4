"""Shipped JSON schemas for every emitted document."""
from __future__ import annotations

import json
from importlib import resources

_cache: dict[str, dict] = {}

NAMES = (
    "subset_spec",
    "meta",
    "posterior_tau",
    "project_response",
    "stepwise_response",
    "fit_summary",
    "project_result",
    "verify_report",
)


def load_schema(name: str) -> dict:
    if name not in NAMES:
        raise KeyError(f"unknown schema {name!r}; have {NAMES}")
    if name not in _cache:
        text = resources.files(__package__).joinpath(f"{name}.schema.json").read_text(
            encoding="utf-8"
        )
        _cache[name] = json.loads(text)
    return _cache[name]
