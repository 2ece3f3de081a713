"""Build instruction-tuning instances: prompts, target strings, label sampling."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import LabelSet, TaggedSequence, TaggingScheme, render_tag
from .decode import spans_from_tags_lenient, spans_to_tags

#: Default marker standing in for tokens elided between context windows.
GAP_MARKER = "..."


@dataclass(frozen=True)
class EntityCentric:
    """Target listing entities with up to ``context_len`` neighbors per side.

    ``context_len=0`` is the pure entity listing; ``context_len=None`` means
    the full sentence with entities bracketed.
    """

    context_len: int | None = 0

    def __post_init__(self) -> None:
        if self.context_len is not None and self.context_len < 0:
            raise ValueError("context_len must be >= 0 or None for full context")


@dataclass(frozen=True)
class TokenByToken:
    """Target annotating every token as ``token(TAG)`` under a scheme."""

    scheme: TaggingScheme = TaggingScheme.BIO


TargetVariant = EntityCentric | TokenByToken


@dataclass(frozen=True)
class PromptInstance:
    instruction: str
    input_line: str
    target_line: str
    labels_used: LabelSet


@dataclass(frozen=True)
class SamplerConfig:
    """Seeded label-list regularization: class-order shuffling plus sampling
    of distractor types absent from the sentence."""

    shuffle_seed: int
    external_pool: LabelSet
    external_count: int = 0

    def __post_init__(self) -> None:
        if self.external_count < 0:
            raise ValueError("external_count must be >= 0")


def _check_renderable(seq: TaggedSequence) -> None:
    for i, tok in enumerate(seq.tokens):
        if "(" in tok or ")" in tok:
            raise ValueError(f"token {i} contains a parenthesis: {tok!r}")
    for t in seq.tags:
        if t.type and ("(" in t.type or ")" in t.type):
            raise ValueError(f"entity type contains a parenthesis: {t.type!r}")


def build_target(
    seq: TaggedSequence,
    variant: TargetVariant,
    gap_marker: str = GAP_MARKER,
) -> str:
    """Render the training target string for one tagged sentence.

    Entity-centric targets derive their spans from the tags of ``seq``
    regardless of which scheme those tags use; token-by-token targets are
    re-rendered under the requested scheme, so a BIO-tagged sequence can
    produce a BIOES target and vice versa.
    """
    _check_renderable(seq)
    tokens = list(seq.tokens)
    n = len(tokens)
    spans = spans_from_tags_lenient(seq)

    if isinstance(variant, TokenByToken):
        tags = spans_to_tags(spans, n, variant.scheme)
        return " ".join(
            f"{tok}({render_tag(tag)})" for tok, tag in zip(tokens, tags)
        )

    if variant.context_len == 0:
        return " ".join(f"[{s.text}]({s.type})" for s in spans)

    # context windows around each entity, truncated at sentence bounds
    if variant.context_len is None:
        windows = [(0, n)] if n else []
    else:
        k = variant.context_len
        windows = [(max(0, s.start - k), min(n, s.end + k)) for s in spans]
    merged: list[list[int]] = []
    for lo, hi in windows:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])

    starts = {s.start: s for s in spans}
    covered = {i for s in spans for i in range(s.start, s.end)}
    parts: list[str] = []
    pos = 0
    for lo, hi in merged:
        if lo > pos:
            parts.append(gap_marker)
        i = lo
        while i < hi:
            span = starts.get(i)
            if span is not None:
                parts.append(f"[{span.text}]({span.type})")
                i = span.end
            elif i in covered:
                i += 1  # mid-span position, already rendered
            else:
                parts.append(tokens[i])
                i += 1
        pos = hi
    if pos < n:
        parts.append(gap_marker)
    return " ".join(parts)


_TASK_LINES = (
    "Task Description:",
    "Please analyze the sentence provided, identifying the entity type for"
    " each word on a token-by-token basis.",
    "Output format is: word_1(label_1), word_2(label_2), ...",
)

_GUIDELINE_BIO = (
    "Guideline:",
    "We'll use the BIO-format to label the entities, where:",
    "1. B- (Begin) indicates the start of a named entity.",
    "2. I- (Inside) is used for words within a named entity but are not the"
    " first word.",
    "3. O (Outside) denotes words not part of a named entity.",
)

_GUIDELINE_BIOES = (
    "Guideline:",
    "We'll use the BIOES-format to label the entities, where:",
    "1. B- (Begin) indicates the start of a multi-word named entity.",
    "2. I- (Inside) is used for words within a named entity but are not the"
    " first or last word.",
    "3. O (Outside) denotes words not part of a named entity.",
    "4. E- (End) marks the last word of a multi-word named entity.",
    "5. S- (Single) marks a named entity consisting of a single word.",
)


def build_instruction(labels: LabelSet, scheme: TaggingScheme) -> str:
    """Emit the task description and guideline with the label list inlined.

    Byte-stable for fixed inputs: two calls with the same labels in the same
    order produce identical strings.
    """
    if not len(labels):
        raise ValueError("labels must be non-empty")
    guideline = (
        _GUIDELINE_BIO if scheme is TaggingScheme.BIO else _GUIDELINE_BIOES
    )
    tag_list = ", ".join(labels)
    lines = (
        *_TASK_LINES,
        *guideline,
        f"Use the specific entity tags: {tag_list} and O.",
    )
    return "\n".join(lines)


def sample_label_set(present: LabelSet, cfg: SamplerConfig) -> LabelSet:
    """Augment ``present`` with sampled external types, then shuffle.

    Draws ``min(cfg.external_count, |pool - present|)`` distractors from the
    pool (never duplicating a present type) and permutes the combined list.
    Deterministic for a fixed seed; every present type always survives.
    """
    rng = random.Random(cfg.shuffle_seed)
    candidates = [t for t in cfg.external_pool if t not in present]
    k = min(cfg.external_count, len(candidates))
    extras = rng.sample(candidates, k) if k else []
    combined = list(present) + extras
    rng.shuffle(combined)
    return LabelSet(combined)


def default_external_count(n_present: int, cap: int = 10) -> int:
    """Twice the number of present types, capped so the total stays <= cap."""
    return max(0, min(2 * n_present, cap - n_present))


def build_instance(
    seq: TaggedSequence,
    labels: LabelSet,
    variant: TargetVariant,
    gap_marker: str = GAP_MARKER,
) -> PromptInstance:
    """Assemble instruction, input line and target line for one sentence."""
    scheme = variant.scheme if isinstance(variant, TokenByToken) else TaggingScheme.BIO
    return PromptInstance(
        instruction=build_instruction(labels, scheme),
        input_line=" ".join(seq.tokens),
        target_line=build_target(seq, variant, gap_marker),
        labels_used=labels,
    )
