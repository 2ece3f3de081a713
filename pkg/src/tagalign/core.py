"""Domain types and the tag algebra shared by every other module.

Everything here is immutable after construction and all functions are pure,
so the types are safe to share across threads and processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence


class TaggingScheme(Enum):
    BIO = "bio"
    BIOES = "bioes"

    @property
    def prefixes(self) -> frozenset[str]:
        if self is TaggingScheme.BIO:
            return frozenset({"B", "I"})
        return frozenset({"B", "I", "E", "S"})


@dataclass(frozen=True)
class Tag:
    """A single token tag: either outside ("O") or ``<prefix>-<type>``."""

    prefix: str | None
    type: str | None

    def __post_init__(self) -> None:
        if (self.prefix is None) != (self.type is None):
            raise ValueError("prefix and type must both be set or both be None")
        if self.prefix is not None and self.prefix not in {"B", "I", "E", "S"}:
            raise ValueError(f"unknown tag prefix: {self.prefix!r}")

    @property
    def is_outside(self) -> bool:
        return self.prefix is None


OUTSIDE = Tag(None, None)


@dataclass(frozen=True)
class UnknownLabel:
    """Marker returned when a raw label does not parse; callers decide policy."""

    text: str


def split_tokens(text: str) -> list[str]:
    """Split raw text on whitespace.

    Provided as a convenience for callers holding raw sentences; the library
    itself never re-tokenizes and assumes pre-split token-level input.
    """
    return text.split()


class TokenSequence:
    """An ordered list of tokens; each token is non-empty and whitespace-free."""

    __slots__ = ("tokens",)

    def __init__(self, tokens: Sequence[str]):
        toks = tuple(tokens)
        for i, t in enumerate(toks):
            if not t:
                raise ValueError(f"token {i} is empty")
            if any(c.isspace() for c in t):
                raise ValueError(f"token {i} contains whitespace: {t!r}")
        object.__setattr__(self, "tokens", toks)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("TokenSequence is immutable")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, TokenSequence) and self.tokens == other.tokens

    def __hash__(self) -> int:
        return hash(self.tokens)

    def __repr__(self) -> str:
        return f"TokenSequence({list(self.tokens)!r})"


class LabelSet:
    """Ordered set of entity type names.

    Order is significant: it is exactly what class-order shuffling permutes.
    Names must be unique, non-empty, must not be "O", and must not contain
    parentheses or whitespace (both would make the ``word(TAG)`` target
    grammar ambiguous).
    """

    __slots__ = ("types",)

    def __init__(self, types: Sequence[str]):
        names = tuple(types)
        seen = set()
        for name in names:
            if not name:
                raise ValueError("label names must be non-empty")
            if name == "O":
                raise ValueError('"O" is reserved for the outside tag')
            if "(" in name or ")" in name:
                raise ValueError(f"label name contains parenthesis: {name!r}")
            if any(c.isspace() for c in name):
                raise ValueError(f"label name contains whitespace: {name!r}")
            if name in seen:
                raise ValueError(f"duplicate label name: {name!r}")
            seen.add(name)
        object.__setattr__(self, "types", names)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("LabelSet is immutable")

    def __len__(self) -> int:
        return len(self.types)

    def __iter__(self) -> Iterator[str]:
        return iter(self.types)

    def __contains__(self, name: str) -> bool:
        return name in self.types

    def __getitem__(self, i):
        return self.types[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelSet) and self.types == other.types

    def __hash__(self) -> int:
        return hash(self.types)

    def __repr__(self) -> str:
        return f"LabelSet({list(self.types)!r})"


class TaggedSequence:
    """Tokens plus one tag per token."""

    __slots__ = ("tokens", "tags")

    def __init__(self, tokens: TokenSequence | Sequence[str], tags: Sequence[Tag]):
        if not isinstance(tokens, TokenSequence):
            tokens = TokenSequence(tokens)
        tag_tuple = tuple(tags)
        if len(tag_tuple) != len(tokens):
            raise ValueError(
                f"{len(tokens)} tokens but {len(tag_tuple)} tags"
            )
        for t in tag_tuple:
            if not isinstance(t, Tag):
                raise TypeError(f"expected Tag, got {type(t).__name__}")
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "tags", tag_tuple)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("TaggedSequence is immutable")

    def __len__(self) -> int:
        return len(self.tokens)

    def positive_indices(self) -> list[int]:
        """Indices of tokens tagged with an entity type."""
        return [i for i, t in enumerate(self.tags) if not t.is_outside]

    def negative_indices(self) -> list[int]:
        """Indices of tokens tagged outside; disjoint complement of positives."""
        return [i for i, t in enumerate(self.tags) if t.is_outside]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TaggedSequence)
            and self.tokens == other.tokens
            and self.tags == other.tags
        )

    def __repr__(self) -> str:
        return f"TaggedSequence({list(self.tokens)!r}, {[render_tag(t) for t in self.tags]!r})"


def parse_tag(text: str, labels: LabelSet, scheme: TaggingScheme) -> Tag | UnknownLabel:
    """Parse a rendered tag string.

    "O" maps to the outside tag; ``<prefix>-<type>`` maps to an entity tag
    when the prefix belongs to the scheme and the type is in ``labels``.
    Anything else yields an :class:`UnknownLabel` value rather than an error,
    so callers choose the policy for bad labels.
    """
    if text == "O":
        return OUTSIDE
    if len(text) >= 3 and text[1] == "-":
        prefix, name = text[0], text[2:]
        if prefix in scheme.prefixes and name in labels:
            return Tag(prefix, name)
    return UnknownLabel(text)


def render_tag(tag: Tag) -> str:
    """Render a tag to its string form; inverse of :func:`parse_tag`."""
    if tag.is_outside:
        return "O"
    return f"{tag.prefix}-{tag.type}"


def check_transition(
    prev: Tag | None, nxt: Tag | None, scheme: TaggingScheme
) -> str | None:
    """Validate one tag transition; returns None when legal, else a reason.

    ``prev=None`` marks the start of the sequence and ``nxt=None`` its end,
    so finalization ("must not end mid-entity" under BIOES) is the
    ``nxt=None`` case.
    """
    bioes = scheme is TaggingScheme.BIOES

    if nxt is not None and not nxt.is_outside:
        if nxt.prefix not in scheme.prefixes:
            return f"prefix {nxt.prefix!r} not in scheme {scheme.value}"
        if nxt.prefix in ("I", "E"):
            # continuations need a same-type opener immediately before
            if prev is None or prev.is_outside or prev.prefix not in ("B", "I"):
                return f"{nxt.prefix}- without opener"
            if prev.type != nxt.type:
                return f"{nxt.prefix}-{nxt.type} after {prev.prefix}-{prev.type}"
    if prev is not None and not prev.is_outside and prev.prefix not in scheme.prefixes:
        return f"prefix {prev.prefix!r} not in scheme {scheme.value}"
    if bioes and prev is not None and prev.prefix in ("B", "I"):
        # an open entity must be continued or closed, even at sequence end
        if nxt is None:
            return "sequence ends mid-entity"
        if nxt.prefix not in ("I", "E") or nxt.type != prev.type:
            return f"unterminated entity before {render_tag(nxt)}"
    return None
