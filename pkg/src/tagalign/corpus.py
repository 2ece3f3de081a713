"""Dataset records and the file formats the command line speaks.

Two on-disk formats: CoNLL-style two-column text (token and tag per line,
blank line between sentences) and JSONL with one record object per line.
All output is UTF-8 with one canonical, byte-stable JSON rendering so runs
diff cleanly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable


class DataError(Exception):
    """Fatal input problem, pointing at the offending location."""


@dataclass
class InstanceRecord:
    id: str
    tokens: list[str]
    label_set: list[str]
    generation: str | None = None
    gold_tags: list[str] | None = None

    def to_dict(self) -> dict:
        d: dict = {"id": self.id, "tokens": self.tokens, "label_set": self.label_set}
        if self.generation is not None:
            d["generation"] = self.generation
        if self.gold_tags is not None:
            d["gold_tags"] = self.gold_tags
        return d


def json_line(obj) -> str:
    """Canonical single-line JSON: compact separators, raw UTF-8."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _tag_type(tag: str) -> str | None:
    # type name of an entity tag string, None for "O" or malformed
    if tag == "O":
        return None
    if len(tag) >= 3 and tag[0] in "BIES" and tag[1] == "-":
        return tag[2:]
    return None


def load_conll(path: str) -> tuple[list[InstanceRecord], list[str]]:
    """Read CoNLL-style sentences; returns (records, warnings).

    Each non-blank line is ``token<whitespace>tag``; blank lines separate
    sentences.  Lines with other shapes are fatal.  Tags that do not look
    like "O" or ``<prefix>-<type>`` are treated as outside and reported as
    warnings with their line numbers.  Every record receives the dataset-wide
    label set, in order of first appearance.
    """
    records: list[InstanceRecord] = []
    warnings: list[str] = []
    label_order: dict[str, None] = {}
    tokens: list[str] = []
    tags: list[str] = []

    def flush() -> None:
        if tokens:
            records.append(
                InstanceRecord(
                    id=str(len(records)),
                    tokens=list(tokens),
                    label_set=[],
                    gold_tags=list(tags),
                )
            )
            tokens.clear()
            tags.clear()

    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip():
                    flush()
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise DataError(
                        f"{path}:{lineno}: expected 'token tag', got {line!r}"
                    )
                token, tag = parts
                etype = _tag_type(tag)
                if etype is None and tag != "O":
                    warnings.append(f"{path}:{lineno}: unknown tag {tag!r}, using O")
                    tag = "O"
                elif etype is not None:
                    label_order.setdefault(etype, None)
                tokens.append(token)
                tags.append(tag)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    flush()
    labels = list(label_order)
    for rec in records:
        rec.label_set = list(labels)
    return records, warnings


def load_jsonl(path: str) -> list[InstanceRecord]:
    """Read one record object per line; ids default to the record index."""
    records: list[InstanceRecord] = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
                if not isinstance(obj, dict):
                    raise DataError(f"{path}:{lineno}: record must be an object")
                if "tokens" not in obj:
                    raise DataError(f"{path}:{lineno}: record missing 'tokens'")
                tokens = obj["tokens"]
                if not isinstance(tokens, list) or not all(
                    isinstance(t, str) for t in tokens
                ):
                    raise DataError(f"{path}:{lineno}: 'tokens' must be a string list")
                gold = obj.get("gold_tags")
                if gold is not None and len(gold) != len(tokens):
                    raise DataError(
                        f"{path}:{lineno}: gold_tags length {len(gold)}"
                        f" != tokens length {len(tokens)}"
                    )
                records.append(
                    InstanceRecord(
                        id=str(obj.get("id", len(records))),
                        tokens=tokens,
                        label_set=list(obj.get("label_set", [])),
                        generation=obj.get("generation"),
                        gold_tags=gold,
                    )
                )
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return records


def load_dataset(path: str, fmt: str = "jsonl") -> tuple[list[InstanceRecord], list[str]]:
    """Load a dataset in the named format; returns (records, warnings)."""
    if fmt == "conll":
        return load_conll(path)
    if fmt == "jsonl":
        return load_jsonl(path), []
    raise DataError(f"unknown dataset format: {fmt!r}")


def write_jsonl(path: str, objects: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json_line(obj))
            fh.write("\n")


def write_records(path: str, records: Iterable[InstanceRecord]) -> None:
    write_jsonl(path, (r.to_dict() for r in records))
