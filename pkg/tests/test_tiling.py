"""Tiling engine vs. the exhaustive oracle, plus structural invariants."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coinlineage.corpus import RepoDocument
from coinlineage.tiling import DocumentIndex, Tile, rkr_gst, rkr_gst_indexed, tiling_oracle


def both(a, b, min_len):
    fast = rkr_gst(a, b, min_len)
    slow = tiling_oracle(a, b, min_len)
    assert fast == slow
    return fast


def test_identity_single_file():
    result = both("abcdefgh", "abcdefgh", 4)
    assert result.tiles == (Tile(0, 0, 8),)
    assert result.matched_chars == 8


def test_shifted_block():
    result = both("aaaabbbbcccc", "bbbbccccdddd", 4)
    assert result.tiles == (Tile(4, 0, 8),)
    assert result.matched_chars == 8


def test_disjoint_alphabets():
    result = both("aaaa", "bbbb", 4)
    assert result.tiles == ()
    assert result.matched_chars == 0


def test_tie_goes_to_smallest_offsets():
    # Two length-3 candidates; (0,1) beats (1,0) on offset_a.
    result = both("xyxy", "yxyx", 2)
    assert result.tiles == (Tile(0, 1, 3),)
    assert result.matched_chars == 3


def test_minimal_match_length_one():
    result = both("a", "a", 1)
    assert result.tiles == (Tile(0, 0, 1),)


def test_empty_documents():
    assert rkr_gst("", "abc", 1).tiles == ()
    assert rkr_gst("abc", "", 1).matched_chars == 0
    assert rkr_gst("", "", 1).tiles == ()


def test_min_match_len_must_be_positive():
    with pytest.raises(ValueError):
        rkr_gst("ab", "ab", 0)
    with pytest.raises(ValueError):
        tiling_oracle("ab", "ab", -1)


def test_file_boundary_blocks_long_match():
    # The 8-char match exists only in B; A's file split caps tiles at 4.
    result = both(["abcd", "efgh"], "abcdefgh", 4)
    assert result.tiles == (Tile(0, 0, 4), Tile(4, 4, 4))
    assert result.matched_chars == 8


def test_empty_middle_file_does_not_shift_offsets():
    result = both(["ab", "", "cd"], "abcd", 2)
    assert result.tiles == (Tile(0, 0, 2), Tile(2, 2, 2))


def test_repo_document_input_matches_plain_text():
    doc = RepoDocument.build("c1", "main", [("src/a.c", "int main(void)")])
    assert rkr_gst(doc, "int main(void)", 5) == rkr_gst("int main(void)", "int main(void)", 5)


def test_self_similarity_covers_everything():
    files = [
        ("a.c", "static int counter = 0;"),
        ("b.c", "void bump(void) { counter++; }"),
    ]
    doc = RepoDocument.build("c1", "main", files)
    result = rkr_gst(doc, doc, 4)
    assert result.matched_chars == doc.total_chars


def test_index_reuse_matches_fresh_run():
    ix_a = DocumentIndex.build("aaaabbbbcccc", 4)
    ix_b = DocumentIndex.build("bbbbccccdddd", 4)
    assert rkr_gst_indexed(ix_a, ix_b) == rkr_gst("aaaabbbbcccc", "bbbbccccdddd", 4)
    with pytest.raises(ValueError):
        rkr_gst_indexed(ix_a, DocumentIndex.build("x", 5))


def assert_well_formed(result, len_a, len_b, min_len):
    assert result.matched_chars == sum(t.length for t in result.tiles)
    for axis, limit in (("offset_a", len_a), ("offset_b", len_b)):
        spans = sorted((getattr(t, axis), getattr(t, axis) + t.length) for t in result.tiles)
        for (s1, e1), (s2, _) in zip(spans, spans[1:]):
            assert e1 <= s2, "tiles overlap"
        for s, e in spans:
            assert 0 <= s and e <= limit
    assert all(t.length >= min_len for t in result.tiles)


@settings(max_examples=150, deadline=None)
@given(st.text(alphabet="abcd", max_size=60), st.text(alphabet="abcd", max_size=60))
def test_engine_equals_oracle_on_short_strings(a, b):
    fast = rkr_gst(a, b, 4)
    assert fast == tiling_oracle(a, b, 4)
    assert_well_formed(fast, len(a), len(b), 4)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.text(alphabet="ab", max_size=15), max_size=4),
    st.lists(st.text(alphabet="ab", max_size=15), max_size=4),
)
def test_engine_equals_oracle_on_multi_file_documents(files_a, files_b):
    fast = rkr_gst(files_a, files_b, 3)
    assert fast == tiling_oracle(files_a, files_b, 3)


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="abc", min_size=1, max_size=50))
def test_monotone_in_min_match_len(text):
    rng = random.Random(len(text))
    other = "".join(rng.choice("abc") for _ in range(40))
    matched = [rkr_gst(text, other, m).matched_chars for m in (1, 2, 4, 8)]
    assert matched == sorted(matched, reverse=True)


def test_repeated_calls_are_identical():
    a, b = "abab" * 7, "baba" * 7
    first = rkr_gst(a, b, 3)
    assert all(rkr_gst(a, b, 3) == first for _ in range(5))
