"""Shared corpus generators for the test suite.

The synthetic sentences keep one property the alignment guarantees rely on:
an entity-covered token string never appears twice in its sentence (outside
fillers may repeat freely).  Without it, deleting an outside duplicate of an
entity token can make any label-agnostic matcher re-anchor the entity at the
earlier position, so exact-recovery claims only hold on corpora shaped like
real NER data, where mention tokens rarely duplicate as non-entity text.
"""

from __future__ import annotations

import random

import pytest

from tagalign.core import LabelSet, Tag, TaggedSequence, TaggingScheme
from tagalign.decode import spans_to_tags
from tagalign.decode import EntitySpan

O_WORDS = (
    "the of to and a in for on with at by from up about into over after "
    "time year way day man thing life child world school state family "
    "group country problem hand part place case week company system "
    "question work night point home water room mother area money story"
).split()

ENTITY_STEMS = (
    "Alvora Brenik Caldra Dorvin Elpara Fenwol Gartho Helvin Ixora Jelkan "
    "Korvat Lumera Mandel Norvik Opalia Prenta Quorin Ravelo Sintra Tovaro "
    "Ulvane Vestra Wenlok Xandir Yovela Zentar Ablon Berik Celto Drona"
).split()

TYPES = ("Person", "Location", "Org", "Product", "Event")


def random_tagged_sentence(
    rng: random.Random,
    min_len: int = 4,
    max_len: int = 30,
    max_entities: int = 3,
    types: tuple[str, ...] = TYPES,
) -> tuple[TaggedSequence, list[EntitySpan], LabelSet]:
    """One synthetic sentence with BIO tags, its gold spans and label set."""
    n = rng.randint(min_len, max_len)
    tokens = [rng.choice(O_WORDS) for _ in range(n)]
    spans: list[EntitySpan] = []
    surface_pool = rng.sample(ENTITY_STEMS, min(len(ENTITY_STEMS), 12))
    cursor = 0
    pool_i = 0
    for _ in range(rng.randint(0, max_entities)):
        length = rng.randint(1, 3)
        if cursor + length + 1 > n or pool_i + length > len(surface_pool):
            break
        start = rng.randint(cursor, min(cursor + 4, n - length))
        if start + length > n:
            break
        etype = rng.choice(types)
        for k in range(length):
            tokens[start + k] = surface_pool[pool_i]
            pool_i += 1
        text = " ".join(tokens[start : start + length])
        spans.append(EntitySpan(start, start + length, etype, text))
        cursor = start + length + 1
    tags = spans_to_tags(spans, n, TaggingScheme.BIO)
    seq = TaggedSequence(tokens, tags)
    return seq, spans, LabelSet(types)


def corpus_of(
    seed: int, size: int, **kwargs
) -> list[tuple[TaggedSequence, list[EntitySpan], LabelSet]]:
    rng = random.Random(seed)
    return [random_tagged_sentence(rng, **kwargs) for _ in range(size)]


def to_conll(sentences) -> str:
    from tagalign.core import render_tag

    blocks = []
    for seq, _, _ in sentences:
        lines = [
            f"{tok}\t{render_tag(tag)}" for tok, tag in zip(seq.tokens, seq.tags)
        ]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)


@pytest.fixture
def small_corpus():
    return corpus_of(11, 25)
