"""Map predicted tokens one-to-one onto original tokens and project labels.

The matcher runs in three tiers: identical sequences short-circuit in O(N);
predictions that are a subsequence of the original (the omission case) are
matched greedily in O(N); everything else falls through to a sparse
longest-common-subsequence pass in O((N + R) log N), where R is the number
of matching position pairs.

Both the quadratic reference and the sparse algorithm resolve ties with the
same leftmost rule: among all maximum-length alignments, the sequence of
original-side indices is lexicographically smallest, and among those the
predicted-side indices are smallest.  That makes every alignment in this
module deterministic and lets the two implementations be compared pair for
pair.
"""

from __future__ import annotations

import unicodedata
from bisect import bisect_left
from dataclasses import dataclass

from .core import OUTSIDE, LabelSet, TaggedSequence, TaggingScheme, TokenSequence, UnknownLabel, parse_tag
from .genparse import ParsedPrediction


# ---------------------------------------------------------------------------
# normalizers


class Normalizer:
    """Base class for token normalizers; implementations are deterministic
    and idempotent."""

    def apply(self, token: str) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(Normalizer):
    def apply(self, token: str) -> str:
        return token


@dataclass(frozen=True)
class UnicodeFold(Normalizer):
    """Canonical-compatibility decomposition, combining marks stripped,
    case-folded.  Makes "antropología" match "antropologia"."""

    def apply(self, token: str) -> str:
        decomposed = unicodedata.normalize("NFKD", token)
        stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
        return stripped.casefold()


@dataclass(frozen=True)
class VocabFilter(Normalizer):
    """Drop characters outside a fixed alphabet.

    Stands in for a model-vocabulary round trip: characters the model cannot
    emit disappear from both sides, so "brontë" under an ASCII alphabet
    matches the model's "bront".
    """

    alphabet: frozenset[str]

    def apply(self, token: str) -> str:
        return "".join(c for c in token if c in self.alphabet)


@dataclass(frozen=True)
class Chain(Normalizer):
    """Left-to-right composition of normalizers."""

    parts: tuple[Normalizer, ...]

    def apply(self, token: str) -> str:
        for part in self.parts:
            token = part.apply(token)
        return token


IDENTITY = Identity()


def normalize_token(token: str, norm: Normalizer) -> str:
    return norm.apply(token)


# ---------------------------------------------------------------------------
# alignments


@dataclass(frozen=True)
class Alignment:
    """Pairs (pred_index, orig_index), strictly increasing in both streams."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __len__(self) -> int:
        return len(self.pairs)


#: Dispatch tiers, in the order they are tried.
TIER_EXACT = "exact"
TIER_SUBSEQUENCE = "subsequence"
TIER_LCS = "lcs"


@dataclass(frozen=True)
class AlignStats:
    tier_used: str
    lcs_length: int
    unmatched_pred: int
    unmatched_orig: int


def _intern(a, b) -> tuple[list[int], list[int]]:
    # token identity as small ints; b-only tokens share -1, which never
    # equals an interned a token
    ids: dict = {}
    ia = [ids.setdefault(t, len(ids)) for t in a]
    ib = [ids.get(t, -1) for t in b]
    return ia, ib


def lcs_dp_oracle(a, b) -> Alignment:
    """Reference maximum alignment via the classic quadratic table.

    Kept independent of the sparse implementation so the two can check each
    other; do not share reconstruction logic between them.
    """
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return Alignment(())
    ia, ib = _intern(a, b)

    # suffix table: best[i][j] = maximum alignment size of a[i:], b[j:]
    best = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        ai = ia[i]
        row_below = best[i + 1]
        row = best[i]
        for j in range(m - 1, -1, -1):
            if ai == ib[j]:
                row[j] = row_below[j + 1] + 1
            else:
                down = row_below[j]
                right = row[j + 1]
                row[j] = down if down >= right else right

    # occurrences of each token in a, ascending
    occ: dict[int, list[int]] = {}
    for idx, t in enumerate(ia):
        occ.setdefault(t, []).append(idx)

    # walk: for the smallest usable b-index, the smallest a-occurrence at or
    # after the cursor is usable iff it preserves the remaining length
    pairs: list[tuple[int, int]] = []
    i = j = 0
    remaining = best[0][0]
    while remaining:
        lst = occ.get(ib[j])
        if lst:
            p = bisect_left(lst, i)
            if p < len(lst):
                ii = lst[p]
                if best[ii + 1][j + 1] == remaining - 1:
                    pairs.append((ii, j))
                    i = ii + 1
                    j += 1
                    remaining -= 1
                    continue
        j += 1
    return Alignment(tuple(pairs))


def lcs_hunt_szymanski(a, b) -> Alignment:
    """Sparse maximum alignment; same contract and tie-break as the oracle.

    Match positions run through binary-searched threshold stacks on the
    reversed sequences, which yields for every matching pair the length of
    the best alignment starting there; a forward greedy walk over those
    ranks then reproduces the leftmost alignment.  Expected cost is
    O((N + R) log N) for R matching position pairs.
    """
    if len(a) == 0 or len(b) == 0:
        return Alignment(())
    ia, ib = _intern(a, b)
    return Alignment(_sparse_leftmost(ia, ib))


def _sparse_leftmost(ia: list[int], ib: list[int]) -> tuple[tuple[int, int], ...]:
    """Leftmost maximum alignment of two interned sequences (see
    lcs_hunt_szymanski); token identity is plain integer equality."""
    n, m = len(ia), len(ib)

    # a shared prefix is always part of the leftmost maximum alignment, so
    # match it outright and run the sparse pass on the remainders
    pre = 0
    limit = min(n, m)
    while pre < limit and ia[pre] == ib[pre]:
        pre += 1
    pairs: list[tuple[int, int]] = [(k, k) for k in range(pre)]
    if pre:
        ia = ia[pre:]
        ib = ib[pre:]
        n -= pre
        m -= pre
    if not n or not m:
        return tuple(pairs)

    # occurrence lists of b tokens in reversed-b coordinates, descending,
    # keeping only tokens that occur in a at all
    a_tokens = set(ia)
    occ: dict[int, list[int]] = {}
    m1 = m - 1
    for j in range(m):
        t = ib[j]
        if t in a_tokens:
            lst = occ.get(t)
            if lst is None:
                occ[t] = [m1 - j]
            else:
                lst.append(m1 - j)

    # Threshold pass over the reversed sequences.  The rank of a match in
    # reversed space is the length of the best alignment that starts at that
    # match in forward space; matches land in one flat bucket per rank.
    thresh = [-1]
    bucket_fi: list[list[int]] = [[]]
    bucket_fj: list[list[int]] = [[]]
    bl = bisect_left
    n1 = n - 1
    for i2 in range(n):
        lst = occ.get(ia[n1 - i2])
        if not lst:
            continue
        fi = n1 - i2
        size = len(thresh)
        for j2 in lst:  # descending within the row
            t = bl(thresh, j2, 1)
            if t == size:
                thresh.append(j2)
                bucket_fi.append([fi])
                bucket_fj.append([m1 - j2])
                size += 1
            else:
                if j2 < thresh[t]:
                    thresh[t] = j2
                bucket_fi[t].append(fi)
                bucket_fj[t].append(m1 - j2)

    total = len(thresh) - 1
    if not total:
        return tuple(pairs)

    # Walk ranks downward; each bucket is consulted exactly once, so a
    # linear scan for the smallest usable (orig, pred) pair is cheapest.
    i = j = 0
    for rank in range(total, 0, -1):
        fis = bucket_fi[rank]
        fjs = bucket_fj[rank]
        best_i = -1
        best_j = -1
        for idx in range(len(fjs)):
            fj = fjs[idx]
            if fj < j:
                continue
            fi = fis[idx]
            if fi < i:
                continue
            if best_j < 0 or fj < best_j or (fj == best_j and fi < best_i):
                best_j = fj
                best_i = fi
        if best_j < 0:  # cannot happen for a sound rank table
            raise RuntimeError("sparse alignment walk lost its chain")
        pairs.append((best_i + pre, best_j + pre))
        i = best_i + 1
        j = best_j + 1
    return tuple(pairs)


# ---------------------------------------------------------------------------
# hierarchical dispatch


def _greedy_subsequence(a, b) -> list[tuple[int, int]] | None:
    """Earliest-match embedding of a into b, or None when a is not a
    subsequence of b.  Earliest matching makes the result identical to the
    leftmost LCS alignment for this case."""
    pairs = []
    j = 0
    limit = len(b)
    for i, t in enumerate(a):
        while j < limit and b[j] != t:
            j += 1
        if j == limit:
            return None
        pairs.append((i, j))
        j += 1
    return pairs


def _interned_sides(pred_tokens, orig_tokens, norm: Normalizer):
    """Normalize both sides and intern tokens as ints in one pass.

    Tokens the normalizer filters down to nothing must never match anything,
    so each gets a position-unique negative id; real tokens get ids >= 0.
    """
    ids: dict = {}
    if isinstance(norm, Identity):
        ia = [ids.setdefault(t, len(ids)) for t in pred_tokens]
        ib = [ids.setdefault(t, len(ids)) for t in orig_tokens]
        return ia, ib
    ia = []
    for i, tok in enumerate(pred_tokens):
        t = norm.apply(tok)
        ia.append(ids.setdefault(t, len(ids)) if t else -2 - 2 * i)
    ib = []
    for j, tok in enumerate(orig_tokens):
        t = norm.apply(tok)
        ib.append(ids.setdefault(t, len(ids)) if t else -3 - 2 * j)
    return ia, ib


def align_hierarchical(
    orig: TokenSequence,
    pred: ParsedPrediction,
    norm: Normalizer = IDENTITY,
) -> tuple[Alignment, AlignStats]:
    """Three-tier alignment of predicted tokens onto original tokens.

    Both sides are normalized before matching.  Tier 1 returns the identity
    when the sequences are equal; tier 2 greedily embeds a prediction that
    is a subsequence of the original; tier 3 runs the sparse LCS.  All three
    produce the same maximum-length leftmost alignment, so the fast paths
    never lose matches and never change the result, only the cost.
    """
    pred_tokens = pred.tokens()
    a, b = _interned_sides(pred_tokens, list(orig), norm)

    if a == b:
        tier = TIER_EXACT
        pairs = tuple((i, i) for i in range(len(a)))
    else:
        greedy = _greedy_subsequence(a, b)
        if greedy is not None:
            tier = TIER_SUBSEQUENCE
            pairs = tuple(greedy)
        else:
            tier = TIER_LCS
            pairs = _sparse_leftmost(a, b)

    alignment = Alignment(pairs)
    stats = AlignStats(
        tier_used=tier,
        lcs_length=len(pairs),
        unmatched_pred=len(a) - len(pairs),
        unmatched_orig=len(b) - len(pairs),
    )
    return alignment, stats


def project_labels(
    orig: TokenSequence,
    pred: ParsedPrediction,
    alignment: Alignment,
    labels: LabelSet,
    scheme: TaggingScheme,
) -> tuple[TaggedSequence, int]:
    """Carry predicted labels across the alignment onto the original tokens.

    Unmatched original tokens stay outside; labels that do not parse under
    the scheme and label set also become outside and are counted in the
    returned unknown-label tally.
    """
    tags = [OUTSIDE] * len(orig)
    unknown = 0
    items = pred.items
    for pi, oi in alignment.pairs:
        parsed = parse_tag(items[pi][1], labels, scheme)
        if isinstance(parsed, UnknownLabel):
            unknown += 1
        else:
            tags[oi] = parsed
    return TaggedSequence(orig, tags), unknown
