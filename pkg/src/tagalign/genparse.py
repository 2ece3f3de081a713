"""Recover (token, label) pairs from a raw model generation string."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ParsedPrediction:
    """Token/raw-label pairs scraped from a generation, in generation order.

    ``malformed`` counts whitespace-separated segments that did not carry a
    trailing ``(label)`` group; equal segment and malformed counts with empty
    items signal total generation failure.
    """

    items: tuple[tuple[str, str], ...] = field(default=())
    malformed: int = 0

    def tokens(self) -> list[str]:
        return [tok for tok, _ in self.items]

    def labels(self) -> list[str]:
        return [lab for _, lab in self.items]

    def __len__(self) -> int:
        return len(self.items)


def _split_segment(segment: str) -> tuple[str, str] | None:
    """Split ``word(label)`` where the label is the content of the last
    balanced parenthesis group ending the segment.

    The backward scan lets the word itself contain parentheses, e.g.
    ``foo(bar)(O)`` splits into word ``foo(bar)`` and label ``O``.
    Returns None when the segment has no such group or either part is empty.
    """
    if not segment.endswith(")"):
        return None
    depth = 0
    for i in range(len(segment) - 1, -1, -1):
        c = segment[i]
        if c == ")":
            depth += 1
        elif c == "(":
            depth -= 1
            if depth == 0:
                word = segment[:i]
                label = segment[i + 1 : -1]
                if word and label:
                    return word, label
                return None
    return None


def parse_generation(text: str) -> ParsedPrediction:
    """Scan a generation for ``word(label)`` units; never throws on garbage.

    Segments are maximal whitespace-separated chunks; ones that do not parse
    are skipped and counted, since the aligner downstream absorbs gaps.
    """
    items: list[tuple[str, str]] = []
    malformed = 0
    for segment in text.split():
        parsed = _split_segment(segment)
        if parsed is None:
            malformed += 1
        else:
            items.append(parsed)
    return ParsedPrediction(tuple(items), malformed)
