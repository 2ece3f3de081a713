"""Simulate generation pathologies: word omission, addition, substitution.

Produces corrupted generation strings from gold instances so the alignment
pipeline can be stress-tested and benchmarked without a model in the loop.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import TaggedSequence, TaggingScheme, render_tag
from .decode import spans_from_tags_lenient, spans_to_tags

# default mixture follows the observed omission:addition:substitution
# imbalance (39:3:58) at a 10% overall corruption rate
DEFAULT_P_OMIT = 0.039
DEFAULT_P_ADD = 0.003
DEFAULT_P_SUB = 0.058


@dataclass(frozen=True)
class NoiseConfig:
    p_omit: float = DEFAULT_P_OMIT
    p_add: float = DEFAULT_P_ADD
    p_sub: float = DEFAULT_P_SUB
    entity_safe: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("p_omit", "p_add", "p_sub"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.p_omit + self.p_add + self.p_sub > 1.0:
            raise ValueError("p_omit + p_add + p_sub must be <= 1")


def _perturb_word(word: str, rng: random.Random) -> str:
    """Character-level corruption: drop one character or swap two adjacent
    ones; single-character words double instead so the token stays non-empty."""
    if len(word) < 2:
        return word + word
    if rng.random() < 0.5:
        i = rng.randrange(len(word))
        return word[:i] + word[i + 1 :]
    i = rng.randrange(len(word) - 1)
    return word[:i] + word[i + 1] + word[i] + word[i + 2 :]


def corrupt(seq: TaggedSequence, cfg: NoiseConfig) -> str:
    """Render the token-by-token BIO target, then corrupt it token-wise.

    Per token one uniform draw decides omit / substitute / duplicate / keep,
    so output is deterministic for a fixed (sequence, config) and all-zero
    probabilities reproduce the clean target byte for byte.  With
    ``entity_safe`` only outside-tagged tokens may be omitted or substituted.
    """
    rng = random.Random(cfg.seed)
    spans = spans_from_tags_lenient(seq)
    tags = spans_to_tags(spans, len(seq), TaggingScheme.BIO)
    units: list[str] = []
    for token, tag in zip(seq.tokens, tags):
        rendered = f"{token}({render_tag(tag)})"
        protected = cfg.entity_safe and not tag.is_outside
        u = rng.random()
        if u < cfg.p_omit:
            if protected:
                units.append(rendered)
            continue
        if u < cfg.p_omit + cfg.p_sub:
            if protected:
                units.append(rendered)
            else:
                units.append(f"{_perturb_word(token, rng)}({render_tag(tag)})")
            continue
        if u < cfg.p_omit + cfg.p_sub + cfg.p_add:
            units.append(rendered)
            units.append(rendered)
            continue
        units.append(rendered)
    return " ".join(units)
