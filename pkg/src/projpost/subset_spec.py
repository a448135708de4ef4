"""Named control-subset files.

A subset spec is a JSON array of {"label", "include"} entries; labels must
be unique and include lists name controls. Resolution against a dataset's
control names happens separately so one spec file can be validated without
data in hand.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import jsonschema

from .data import ControlSubset
from .errors import SchemaError
from .schemas import load_schema


@dataclass(frozen=True)
class SubsetSpecEntry:
    label: str
    include: tuple[str, ...]


@dataclass(frozen=True)
class SubsetSpecFile:
    entries: tuple[SubsetSpecEntry, ...]

    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.entries)


def load_subset_spec(source) -> SubsetSpecFile:
    """Parse and structurally validate a subset spec."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise SchemaError(f"no such subset spec file: {path}")
        text = path.read_text(encoding="utf-8")
    elif isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8")
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"subset spec is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(doc, load_schema("subset_spec"))
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"subset spec failed validation: {exc.message}") from exc
    labels = [entry["label"] for entry in doc]
    dups = {l for l in labels if labels.count(l) > 1}
    if dups:
        raise SchemaError(f"duplicate subset label(s): {sorted(dups)}")
    entries = tuple(
        SubsetSpecEntry(label=e["label"], include=tuple(e["include"])) for e in doc
    )
    return SubsetSpecFile(entries=entries)


def resolve_entry(entry: SubsetSpecEntry, control_names: Sequence[str]) -> ControlSubset:
    """Turn one entry's name list into a mask over a dataset's controls."""
    return ControlSubset.from_names(entry.include, control_names)
