"""Convert tag sequences into entity spans and back, repairing illegal runs."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import OUTSIDE, Tag, TaggedSequence, TaggingScheme


@dataclass(frozen=True)
class EntitySpan:
    """Half-open token span ``[start, end)`` carrying an entity type."""

    start: int
    end: int
    type: str
    text: str = ""

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.end):
            raise ValueError(f"bad span bounds [{self.start}, {self.end})")

    def key(self) -> tuple[int, int, str]:
        return (self.start, self.end, self.type)


class RepairPolicy(Enum):
    # Conservative salvages orphan/unterminated runs as entities, which keeps
    # recall when alignment gaps decapitate an entity; Strict drops them.
    CONSERVATIVE = "conservative"
    STRICT = "strict"


def _close(spans, tokens, start, end, etype):
    spans.append(EntitySpan(start, end, etype, " ".join(tokens[start:end])))


def decode_entities(
    seq: TaggedSequence,
    scheme: TaggingScheme,
    policy: RepairPolicy = RepairPolicy.CONSERVATIVE,
) -> list[EntitySpan]:
    """Extract entity spans from a tagged sequence.

    BIO: maximal ``B-t (I-t)*`` runs become spans.  An orphan I-t (after O,
    sequence start, or a different type) is treated as B-t under
    CONSERVATIVE and dropped under STRICT.

    BIOES: ``S-t`` is a singleton span; ``B-t I-t* E-t`` a complete span.
    CONSERVATIVE salvages unterminated B/I runs and orphan I/E tags; STRICT
    drops everything that is not a complete run.

    Output spans never overlap and are sorted by start.
    """
    for t in seq.tags:
        if not t.is_outside and t.prefix not in scheme.prefixes:
            raise ValueError(
                f"tag prefix {t.prefix!r} invalid under scheme {scheme.value}"
            )
    salvage = policy is RepairPolicy.CONSERVATIVE
    tokens = list(seq.tokens)
    spans: list[EntitySpan] = []

    if scheme is TaggingScheme.BIO:
        start = None
        etype = None
        dropping = False  # inside an orphan I run being discarded (STRICT)
        for i, tag in enumerate(seq.tags):
            if tag.is_outside:
                if start is not None:
                    _close(spans, tokens, start, i, etype)
                start, etype, dropping = None, None, False
            elif tag.prefix == "B":
                if start is not None:
                    _close(spans, tokens, start, i, etype)
                start, etype, dropping = i, tag.type, False
            else:  # I
                if start is not None and tag.type == etype:
                    continue
                if dropping and tag.type == etype:
                    continue
                if start is not None:
                    _close(spans, tokens, start, i, etype)
                if salvage:
                    start, etype, dropping = i, tag.type, False
                else:
                    start, etype, dropping = None, tag.type, True
        if start is not None:
            _close(spans, tokens, start, len(tokens), etype)
        return spans

    # BIOES
    start = None
    etype = None
    for i, tag in enumerate(seq.tags):
        if tag.is_outside:
            if start is not None and salvage:
                _close(spans, tokens, start, i, etype)
            start, etype = None, None
        elif tag.prefix == "S":
            if start is not None and salvage:
                _close(spans, tokens, start, i, etype)
            start, etype = None, None
            _close(spans, tokens, i, i + 1, tag.type)
        elif tag.prefix == "B":
            if start is not None and salvage:
                _close(spans, tokens, start, i, etype)
            start, etype = i, tag.type
        elif tag.prefix == "I":
            if start is not None and tag.type == etype:
                continue
            if start is not None and salvage:
                _close(spans, tokens, start, i, etype)
            start, etype = (i, tag.type) if salvage else (None, None)
        else:  # E
            if start is not None and tag.type == etype:
                _close(spans, tokens, start, i + 1, etype)
                start, etype = None, None
            else:
                if start is not None and salvage:
                    _close(spans, tokens, start, i, etype)
                if salvage:
                    _close(spans, tokens, i, i + 1, tag.type)
                start, etype = None, None
    if start is not None and salvage:
        _close(spans, tokens, start, len(tokens), etype)
    return spans


def spans_to_tags(
    spans: list[EntitySpan], n: int, scheme: TaggingScheme
) -> list[Tag]:
    """Render spans as a legal tag sequence; exact inverse of decode_entities.

    Raises on overlapping or out-of-range spans.
    """
    tags: list[Tag] = [OUTSIDE] * n
    prev_end = 0
    for span in sorted(spans, key=lambda s: s.start):
        if span.start < prev_end:
            raise ValueError(f"overlapping span at {span.start}")
        if span.end > n:
            raise ValueError(f"span [{span.start}, {span.end}) exceeds length {n}")
        prev_end = span.end
        if scheme is TaggingScheme.BIO:
            tags[span.start] = Tag("B", span.type)
            for i in range(span.start + 1, span.end):
                tags[i] = Tag("I", span.type)
        else:
            if span.end - span.start == 1:
                tags[span.start] = Tag("S", span.type)
            else:
                tags[span.start] = Tag("B", span.type)
                for i in range(span.start + 1, span.end - 1):
                    tags[i] = Tag("I", span.type)
                tags[span.end - 1] = Tag("E", span.type)
    return tags


def spans_from_tags_lenient(seq: TaggedSequence) -> list[EntitySpan]:
    """Entity spans from tags in either scheme, salvaging incomplete runs.

    BIOES conservative decoding subsumes BIO conservative decoding (B/I runs
    without a closing E are salvaged with the same extents), so this is safe
    for inputs tagged under either scheme.
    """
    return decode_entities(seq, TaggingScheme.BIOES, RepairPolicy.CONSERVATIVE)
