"""The record-level structuring pipeline shared by the service and the CLI.

One record goes generation string -> parsed pairs -> alignment -> projected
tags -> entity spans.  Records are independent, so a corpus can be processed
by a worker pool; results are always emitted in input order, making output
byte-identical regardless of the worker count.
"""

from __future__ import annotations

import concurrent.futures
import multiprocessing
from dataclasses import dataclass

from .align import (
    IDENTITY,
    Chain,
    Identity,
    Normalizer,
    UnicodeFold,
    VocabFilter,
    align_hierarchical,
    project_labels,
)
from .core import LabelSet, TaggingScheme, TokenSequence, render_tag
from .corpus import DataError, InstanceRecord
from .decode import RepairPolicy, decode_entities
from .genparse import ParsedPrediction, parse_generation
from .metrics import micro_prf


@dataclass(frozen=True)
class ProcessOptions:
    scheme: TaggingScheme = TaggingScheme.BIO
    normalizer: Normalizer = IDENTITY
    repair: RepairPolicy = RepairPolicy.CONSERVATIVE
    jobs: int = 1
    # generations from context-window-trained models may echo the gap
    # marker as a unit; when set, such units are dropped before alignment
    gap_marker: str | None = None


def build_normalizer(kind: str, alphabet: str | None = None) -> Normalizer:
    """Normalizer from its wire/flag spelling: identity, unicode or vocab."""
    if kind == "identity":
        return Identity()
    if kind == "unicode":
        return UnicodeFold()
    if kind == "vocab":
        if alphabet is None:
            raise DataError("vocab normalizer requires an alphabet")
        return VocabFilter(frozenset(alphabet))
    if kind == "unicode+vocab":
        if alphabet is None:
            raise DataError("vocab normalizer requires an alphabet")
        return Chain((UnicodeFold(), VocabFilter(frozenset(alphabet))))
    raise DataError(f"unknown normalizer: {kind!r}")


def process_record(record: InstanceRecord, options: ProcessOptions) -> dict:
    """Structure one record; soft failures come back as a diagnostic field.

    The result dict is the canonical output shape: id, tags, entities and
    stats, plus an ``error`` key only when the record could not be processed.
    """
    base = {
        "id": record.id,
        "tags": ["O"] * len(record.tokens),
        "entities": [],
        "stats": {
            "tier": None,
            "lcs_length": 0,
            "unmatched_pred": 0,
            "unmatched_orig": len(record.tokens),
            "unknown_labels": 0,
            "malformed": 0,
        },
    }
    try:
        if record.generation is None:
            raise ValueError("record carries no generation string")
        orig = TokenSequence(record.tokens)
        labels = LabelSet(record.label_set)
        parsed = parse_generation(record.generation)
        if options.gap_marker is not None:
            kept = tuple(
                item for item in parsed.items if item[0] != options.gap_marker
            )
            if len(kept) != len(parsed.items):
                parsed = ParsedPrediction(kept, parsed.malformed)
        alignment, stats = align_hierarchical(orig, parsed, options.normalizer)
        tagged, unknown = project_labels(
            orig, parsed, alignment, labels, options.scheme
        )
        spans = decode_entities(tagged, options.scheme, options.repair)
    except ValueError as exc:
        base["error"] = str(exc)
        return base
    return {
        "id": record.id,
        "tags": [render_tag(t) for t in tagged.tags],
        "entities": [
            {"start": s.start, "end": s.end, "type": s.type, "text": s.text}
            for s in spans
        ],
        "stats": {
            "tier": stats.tier_used,
            "lcs_length": stats.lcs_length,
            "unmatched_pred": stats.unmatched_pred,
            "unmatched_orig": stats.unmatched_orig,
            "unknown_labels": unknown,
            "malformed": parsed.malformed,
        },
    }


def _worker(payload: tuple[InstanceRecord, ProcessOptions]) -> dict:
    record, options = payload
    return process_record(record, options)


def process_records(
    records: list[InstanceRecord], options: ProcessOptions
) -> list[dict]:
    """Process a corpus, in parallel when options.jobs > 1.

    Results are returned in input order; output is byte-identical for any
    job count because each record's result depends only on the record.
    """
    if options.jobs <= 1 or len(records) < 2:
        return [process_record(r, options) for r in records]
    payloads = [(r, options) for r in records]
    chunk = max(1, len(payloads) // (options.jobs * 8))
    with concurrent.futures.ProcessPoolExecutor(
        max_workers=options.jobs,
        mp_context=multiprocessing.get_context("spawn"),
    ) as pool:
        return list(pool.map(_worker, payloads, chunksize=chunk))


def evaluate_corpora(
    gold: list[list], pred: list[list], per_type: bool = False
) -> dict:
    """Micro scores for parallel span corpora, as the canonical report dict."""
    return micro_prf(gold, pred, per_type=per_type).to_dict()
