import itertools
import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tagalign.align import (
    IDENTITY,
    Chain,
    Identity,
    TIER_EXACT,
    TIER_LCS,
    TIER_SUBSEQUENCE,
    UnicodeFold,
    VocabFilter,
    align_hierarchical,
    lcs_dp_oracle,
    lcs_hunt_szymanski,
    normalize_token,
    project_labels,
)
from tagalign.core import LabelSet, TaggingScheme, TokenSequence, render_tag
from tagalign.decode import RepairPolicy, decode_entities
from tagalign.genparse import ParsedPrediction, parse_generation
from tagalign.noise import NoiseConfig, corrupt
from tagalign.schema import TokenByToken, build_target

from conftest import corpus_of

ASCII_LETTERS = VocabFilter(frozenset(string.ascii_letters))


def pred_of(tokens, labels=None) -> ParsedPrediction:
    labels = labels or ["O"] * len(tokens)
    return ParsedPrediction(tuple(zip(tokens, labels)))


# -- normalizers ------------------------------------------------------------


def test_vocab_filter_drops_foreign_chars():
    assert normalize_token("brontë", ASCII_LETTERS) == "bront"


def test_identity():
    assert normalize_token("Tokyo", IDENTITY) == "Tokyo"


def test_unicode_fold():
    fold = UnicodeFold()
    assert normalize_token("antropología", fold) == "antropologia"
    assert normalize_token("Brontë", fold) == "bronte"
    assert normalize_token("ﬁne", fold) == "fine"


def test_chain_composes_left_to_right():
    chain = Chain((UnicodeFold(), ASCII_LETTERS))
    assert normalize_token("Brontë,", chain) == "bronte"


@settings(max_examples=300)
@given(st.text(min_size=0, max_size=30))
def test_normalizers_idempotent(token):
    for norm in (IDENTITY, UnicodeFold(), ASCII_LETTERS,
                 Chain((UnicodeFold(), ASCII_LETTERS))):
        once = normalize_token(token, norm)
        assert normalize_token(once, norm) == once


# -- the two matchers agree -------------------------------------------------


def test_dp_oracle_examples():
    got = lcs_dp_oracle(list("ABCBDAB"), list("BDCABA"))
    assert len(got) == 4
    s = ["x", "y", "z"]
    assert lcs_dp_oracle(s, s).pairs == ((0, 0), (1, 1), (2, 2))
    assert lcs_dp_oracle(["a"], ["b"]).pairs == ()


def test_hunt_szymanski_examples():
    s = ["x", "y", "z"]
    assert lcs_hunt_szymanski(s, s).pairs == ((0, 0), (1, 1), (2, 2))
    distinct = ["a", "b", "c", "d"]
    assert len(lcs_hunt_szymanski(distinct, distinct[::-1])) == 1
    assert lcs_hunt_szymanski([], ["a"]).pairs == ()


def test_leftmost_tie_break():
    # two maximum alignments of length 1: matching "A" uses orig index 1,
    # matching "B" uses orig index 0; leftmost picks the smaller orig index
    assert lcs_dp_oracle(["A", "B"], ["B", "A"]).pairs == ((1, 0),)
    assert lcs_hunt_szymanski(["A", "B"], ["B", "A"]).pairs == ((1, 0),)
    # same orig choices, differing pred index: smaller pred index wins
    assert lcs_dp_oracle(["x", "x"], ["x"]).pairs == ((0, 0),)
    assert lcs_hunt_szymanski(["x", "x"], ["x"]).pairs == ((0, 0),)


def test_equivalence_exhaustive_tiny():
    pool = [
        "".join(p)
        for n in range(0, 4)
        for p in itertools.product("xyz", repeat=n)
    ]
    for sa in pool:
        for sb in pool:
            a, b = list(sa), list(sb)
            assert lcs_dp_oracle(a, b).pairs == lcs_hunt_szymanski(a, b).pairs


@pytest.mark.parametrize("vocab", [2, 5, 50])
def test_equivalence_random(vocab):
    rng = random.Random(1000 + vocab)
    for _ in range(400):
        a = [str(rng.randrange(vocab)) for _ in range(rng.randrange(0, 40))]
        b = [str(rng.randrange(vocab)) for _ in range(rng.randrange(0, 40))]
        assert lcs_dp_oracle(a, b).pairs == lcs_hunt_szymanski(a, b).pairs


@settings(max_examples=200)
@given(
    st.lists(st.sampled_from("abc"), max_size=12),
    st.lists(st.sampled_from("abc"), max_size=12),
)
def test_equivalence_property(a, b):
    assert lcs_dp_oracle(a, b).pairs == lcs_hunt_szymanski(a, b).pairs


@settings(max_examples=200)
@given(
    st.lists(st.sampled_from("abcde"), max_size=25),
    st.lists(st.sampled_from("abcde"), max_size=25),
)
def test_monotone_pairs(a, b):
    for fn in (lcs_dp_oracle, lcs_hunt_szymanski):
        pairs = fn(a, b).pairs
        for (i1, j1), (i2, j2) in zip(pairs, pairs[1:]):
            assert i1 < i2 and j1 < j2
        for i, j in pairs:
            assert a[i] == b[j]


# -- hierarchical dispatch --------------------------------------------------


def test_tier_exact():
    orig = TokenSequence(["a", "b", "c"])
    alignment, stats = align_hierarchical(orig, pred_of(["a", "b", "c"]))
    assert stats.tier_used == TIER_EXACT
    assert alignment.pairs == ((0, 0), (1, 1), (2, 2))
    assert stats.unmatched_pred == stats.unmatched_orig == 0


def test_tier_subsequence_omission_case():
    orig = TokenSequence("who directed the film the lorax".split())
    pred = pred_of("who directed the lorax".split())
    alignment, stats = align_hierarchical(orig, pred)
    assert stats.tier_used == TIER_SUBSEQUENCE
    assert alignment.pairs == ((0, 0), (1, 1), (2, 2), (3, 5))
    assert stats.unmatched_orig == 2  # "film" and the second "the"
    assert stats.unmatched_pred == 0


def test_tier_lcs_substitution_case():
    orig = TokenSequence("restaurants in manattan with reviews".split())
    pred = pred_of("restaurants in manhattan with reviews".split())
    alignment, stats = align_hierarchical(orig, pred)
    assert stats.tier_used == TIER_LCS
    assert stats.unmatched_orig == 1
    assert (2, 2) not in alignment.pairs


def test_fully_filtered_tokens_never_match():
    norm = VocabFilter(frozenset("abc"))
    orig = TokenSequence(["aa", "xyz", "bb"])
    pred = pred_of(["aa", "123", "bb"])
    alignment, stats = align_hierarchical(orig, pred, norm)
    # "xyz" and "123" both normalize to "", which must not count as a match
    assert alignment.pairs == ((0, 0), (2, 2))
    assert stats.tier_used == TIER_LCS


def test_empty_prediction():
    orig = TokenSequence(["a", "b"])
    alignment, stats = align_hierarchical(orig, ParsedPrediction())
    assert alignment.pairs == ()
    assert stats.tier_used == TIER_SUBSEQUENCE
    assert stats.unmatched_orig == 2


def test_tier_soundness_matches_oracle_length():
    rng = random.Random(5)
    for _ in range(200):
        vocab = rng.choice([3, 8, 30])
        orig_tokens = [f"w{rng.randrange(vocab)}" for _ in range(rng.randrange(1, 30))]
        # derive pred by random omissions and substitutions
        pred_tokens = []
        for t in orig_tokens:
            r = rng.random()
            if r < 0.2:
                continue
            if r < 0.35:
                pred_tokens.append(t + "x")
            else:
                pred_tokens.append(t)
        orig = TokenSequence(orig_tokens)
        alignment, stats = align_hierarchical(orig, pred_of(pred_tokens))
        oracle = lcs_dp_oracle(pred_tokens, orig_tokens)
        assert len(alignment) == len(oracle)
        assert alignment.pairs == oracle.pairs


# -- projection -------------------------------------------------------------


def test_project_identity_alignment():
    labels = LabelSet(["title"])
    orig = TokenSequence("what was the fog rated ?".split())
    parsed = parse_generation(
        "what(O) was(O) the(B-title) fog(I-title) rated(O) ?(O)"
    )
    alignment, _ = align_hierarchical(orig, parsed)
    tagged, unknown = project_labels(
        orig, parsed, alignment, labels, TaggingScheme.BIO
    )
    assert unknown == 0
    assert [render_tag(t) for t in tagged.tags] == [
        "O", "O", "B-title", "I-title", "O", "O",
    ]


def test_project_unknown_label_becomes_outside():
    labels = LabelSet(["Person", "Location"])
    orig = TokenSequence(["x"])
    parsed = parse_generation("x(B-Gene)")
    alignment, _ = align_hierarchical(orig, parsed)
    tagged, unknown = project_labels(
        orig, parsed, alignment, labels, TaggingScheme.BIO
    )
    assert unknown == 1
    assert tagged.tags[0].is_outside


def test_project_omission_leaves_unmatched_outside():
    labels = LabelSet(["title"])
    orig = TokenSequence("who directed the film the lorax".split())
    parsed = parse_generation("who(O) directed(O) the(B-title) lorax(I-title)")
    alignment, stats = align_hierarchical(orig, parsed)
    tagged, _ = project_labels(orig, parsed, alignment, labels, TaggingScheme.BIO)
    assert render_tag(tagged.tags[3]) == "O"  # "film" unmatched
    assert render_tag(tagged.tags[2]) == "B-title"
    assert render_tag(tagged.tags[5]) == "I-title"
    spans = decode_entities(tagged, TaggingScheme.BIO, RepairPolicy.CONSERVATIVE)
    assert [(s.start, s.end, s.type) for s in spans] == [
        (2, 3, "title"),
        (5, 6, "title"),
    ]


# -- omission recovery ------------------------------------------------------


def test_omission_recovery_property():
    """Deleting only outside tokens must leave every entity recoverable."""
    rng = random.Random(77)
    for seq, spans, labels in corpus_of(13, 120):
        kept = [
            (tok, render_tag(tag))
            for tok, tag in zip(seq.tokens, seq.tags)
            if not tag.is_outside or rng.random() > 0.4
        ]
        parsed = ParsedPrediction(tuple(kept))
        alignment, stats = align_hierarchical(seq.tokens, parsed)
        assert stats.tier_used in (TIER_EXACT, TIER_SUBSEQUENCE)
        tagged, unknown = project_labels(
            seq.tokens, parsed, alignment, labels, TaggingScheme.BIO
        )
        assert unknown == 0
        got = decode_entities(tagged, TaggingScheme.BIO, RepairPolicy.CONSERVATIVE)
        assert [(s.start, s.end, s.type) for s in got] == [
            (s.start, s.end, s.type) for s in spans
        ]


def test_noise_omission_recovery_end_to_end():
    for p in (0.1, 0.3, 0.5):
        for seq, spans, labels in corpus_of(int(p * 100), 40):
            cfg = NoiseConfig(p_omit=p, p_add=0, p_sub=0, entity_safe=True, seed=5)
            generation = corrupt(seq, cfg)
            parsed = parse_generation(generation)
            alignment, _ = align_hierarchical(seq.tokens, parsed)
            tagged, _ = project_labels(
                seq.tokens, parsed, alignment, labels, TaggingScheme.BIO
            )
            got = decode_entities(
                tagged, TaggingScheme.BIO, RepairPolicy.CONSERVATIVE
            )
            assert [(s.start, s.end, s.type) for s in got] == [
                (s.start, s.end, s.type) for s in spans
            ]
