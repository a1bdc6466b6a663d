"""Greedy string tiling between two repository documents.

``rkr_gst`` repeatedly takes the longest common substring of the still
unmatched regions (never crossing a file boundary, never shorter than
``min_match_len``), marks it in both documents and repeats.  Ties go to the
smallest offset in A, then in B.  Karp-Rabin rolling hashes only accelerate
the search; the result is defined purely by that greedy rule, and
``tiling_oracle`` re-derives it by exhaustive scan for validation.

The fast path hashes every window of length ``min_match_len`` once, joins
the two documents' window tables, merges hits into maximal diagonal runs,
and replays the greedy order through a max-heap whose entries are lazily
re-validated against the mark arrays.  All hash hits are verified by direct
character comparison, so hash collisions cannot change the output.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .corpus import RepoDocument

__all__ = ["Tile", "TilingResult", "DocumentIndex", "rkr_gst", "tiling_oracle"]

_MOD1 = 2147483629  # prime < 2^31
_MOD2 = 2147483587
_BASE1 = 1000003
_BASE2 = 999983
_SENTINEL = 0x110000  # above any Unicode code point

Doclike = Union[str, RepoDocument, Sequence[str]]


@dataclass(frozen=True, order=True)
class Tile:
    """One matched substring pair; offsets count characters, skipping no files."""

    offset_a: int
    offset_b: int
    length: int


@dataclass(frozen=True)
class TilingResult:
    tiles: tuple[Tile, ...]
    matched_chars: int


def _segments(doc: Doclike) -> list[str]:
    if isinstance(doc, str):
        return [doc]
    if isinstance(doc, RepoDocument):
        return [text for _, text in doc.files]
    return list(doc)


# Powers of the hash bases grow on demand and are shared by every index.
_POW_CACHE: dict[tuple[int, int], list[int]] = {}


def _powers(base: int, mod: int, n: int) -> np.ndarray:
    cache = _POW_CACHE.setdefault((base, mod), [1])
    while len(cache) < n:
        cache.append(cache[-1] * base % mod)
    return np.asarray(cache[:n], dtype=np.uint64)


def _window_keys(codes: np.ndarray, width: int) -> np.ndarray:
    """Combined double hash for every window start; windows may straddle
    sentinels here, validity is filtered separately."""
    n = len(codes)
    count = n - width + 1
    codes64 = codes.astype(np.uint64)
    out = np.zeros(count, dtype=np.uint64)
    for shift, base, mod in ((31, _BASE1, _MOD1), (0, _BASE2, _MOD2)):
        pw = _powers(base, mod, n)
        inv = _powers(pow(base, -1, mod), mod, count)
        weighted = codes64 * pw % np.uint64(mod)
        prefix = np.zeros(n + 1, dtype=np.uint64)
        np.cumsum(weighted, out=prefix[1:])
        window = (prefix[width:] - prefix[:-width]) % np.uint64(mod)
        out |= (window * inv % np.uint64(mod)) << np.uint64(shift)
    return out


class DocumentIndex:
    """Per-document window table, reusable across many pairings."""

    def __init__(self, segments: list[str], min_match_len: int):
        if min_match_len < 1:
            raise ValueError("min_match_len must be >= 1")
        self.min_match_len = min_match_len
        codes_parts: list[np.ndarray] = []
        sentinels: list[int] = []
        pos = 0
        for i, seg in enumerate(segments):
            if i > 0:
                sentinels.append(pos)
                codes_parts.append(np.asarray([_SENTINEL], dtype=np.uint32))
                pos += 1
            arr = np.frombuffer(seg.encode("utf-32-le"), dtype=np.uint32)
            codes_parts.append(arr)
            pos += len(arr)
        self.codes = (
            np.concatenate(codes_parts) if codes_parts else np.zeros(0, dtype=np.uint32)
        )
        self.sentinels = np.asarray(sentinels, dtype=np.int64)
        self.total_chars = len(self.codes) - len(sentinels)

        n = len(self.codes)
        width = min_match_len
        if n < width:
            starts = np.zeros(0, dtype=np.int64)
            keys = np.zeros(0, dtype=np.uint64)
        else:
            keys_all = _window_keys(self.codes, width)
            is_sentinel = (self.codes == _SENTINEL).astype(np.int64)
            prefix = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(is_sentinel, out=prefix[1:])
            valid = (prefix[width:] - prefix[:-width]) == 0
            starts = np.flatnonzero(valid)
            keys = keys_all[starts]
        order = np.argsort(keys, kind="stable")
        self.sorted_keys = keys[order]
        self.sorted_starts = starts[order]
        self.unique_keys, self.group_start, self.group_count = (
            np.unique(self.sorted_keys, return_index=True, return_counts=True)
            if len(keys)
            else (np.zeros(0, np.uint64), np.zeros(0, np.int64), np.zeros(0, np.int64))
        )

    @classmethod
    def build(cls, doc: Doclike, min_match_len: int) -> "DocumentIndex":
        return cls(_segments(doc), min_match_len)

    def clean_offset(self, raw: int) -> int:
        return int(raw - np.searchsorted(self.sentinels, raw, side="left"))


def _candidate_pairs(ix_a: DocumentIndex, ix_b: DocumentIndex) -> tuple[np.ndarray, np.ndarray]:
    common, in_a, in_b = np.intersect1d(
        ix_a.unique_keys, ix_b.unique_keys, assume_unique=True, return_indices=True
    )
    if not len(common):
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    ca, cb = ix_a.group_count[in_a], ix_b.group_count[in_b]
    sa, sb = ix_a.group_start[in_a], ix_b.group_start[in_b]
    single = (ca == 1) & (cb == 1)
    parts_i = [ix_a.sorted_starts[sa[single]]]
    parts_j = [ix_b.sorted_starts[sb[single]]]
    for g in np.flatnonzero(~single):
        pos_a = ix_a.sorted_starts[sa[g] : sa[g] + ca[g]]
        pos_b = ix_b.sorted_starts[sb[g] : sb[g] + cb[g]]
        parts_i.append(np.repeat(pos_a, len(pos_b)))
        parts_j.append(np.tile(pos_b, len(pos_a)))
    return np.concatenate(parts_i), np.concatenate(parts_j)


def _maximal_runs(
    ix_a: DocumentIndex, ix_b: DocumentIndex, i: np.ndarray, j: np.ndarray
) -> list[tuple[int, int, int]]:
    """Merge window hits into maximal diagonal runs, verified char-exact."""
    width = ix_a.min_match_len
    diag = i - j
    order = np.lexsort((i, diag))
    i, j, diag = i[order], j[order], diag[order]
    breaks = np.flatnonzero((diag[1:] != diag[:-1]) | (i[1:] != i[:-1] + 1))
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [len(i) - 1]))
    runs: list[tuple[int, int, int]] = []
    for s_idx, e_idx in zip(starts, ends):
        a0, b0 = int(i[s_idx]), int(j[s_idx])
        length = int(i[e_idx]) - a0 + width
        if np.array_equal(ix_a.codes[a0 : a0 + length], ix_b.codes[b0 : b0 + length]):
            runs.append((a0, b0, length))
            continue
        # Hash collision: keep only stretches whose windows verify char-exact.
        run_members = [
            k
            for k in range(s_idx, e_idx + 1)
            if np.array_equal(
                ix_a.codes[i[k] : i[k] + width], ix_b.codes[j[k] : j[k] + width]
            )
        ]
        stretch_start = prev_k = None
        for k in [*run_members, None]:
            if prev_k is not None and k != prev_k + 1:
                runs.append(
                    (
                        int(i[stretch_start]),
                        int(j[stretch_start]),
                        int(i[prev_k]) - int(i[stretch_start]) + width,
                    )
                )
                stretch_start = k
            elif prev_k is None:
                stretch_start = k
            prev_k = k
    return runs


def _unmarked_subruns(bad: np.ndarray) -> list[tuple[int, int]]:
    """(start, length) of each maximal False run in a boolean mask."""
    padded = np.empty(len(bad) + 2, dtype=np.int8)
    padded[0] = padded[-1] = 1
    padded[1:-1] = bad
    delta = np.diff(padded)
    starts = np.flatnonzero(delta == -1)
    ends = np.flatnonzero(delta == 1)
    return [(int(s), int(e - s)) for s, e in zip(starts, ends)]


def rkr_gst_indexed(ix_a: DocumentIndex, ix_b: DocumentIndex) -> TilingResult:
    if ix_a.min_match_len != ix_b.min_match_len:
        raise ValueError("indices built with different min_match_len")
    min_len = ix_a.min_match_len
    i, j = _candidate_pairs(ix_a, ix_b)
    if not len(i):
        return TilingResult((), 0)
    heap = [(-length, a0, b0, length) for a0, b0, length in _maximal_runs(ix_a, ix_b, i, j)]
    heapq.heapify(heap)

    marked_a = np.zeros(len(ix_a.codes), dtype=bool)
    marked_b = np.zeros(len(ix_b.codes), dtype=bool)
    tiles: list[Tile] = []
    matched = 0
    while heap:
        _, a0, b0, length = heapq.heappop(heap)
        bad = marked_a[a0 : a0 + length] | marked_b[b0 : b0 + length]
        if not bad.any():
            marked_a[a0 : a0 + length] = True
            marked_b[b0 : b0 + length] = True
            tiles.append(Tile(ix_a.clean_offset(a0), ix_b.clean_offset(b0), length))
            matched += length
            continue
        # Stale entry: re-insert the surviving stretches and retry.
        for start, sub_len in _unmarked_subruns(bad):
            if sub_len >= min_len:
                heapq.heappush(heap, (-sub_len, a0 + start, b0 + start, sub_len))
    tiles.sort()
    return TilingResult(tuple(tiles), matched)


def rkr_gst(doc_a: Doclike, doc_b: Doclike, min_match_len: int) -> TilingResult:
    """Tile ``doc_a`` against ``doc_b``; see module docstring for the rule."""
    return rkr_gst_indexed(
        DocumentIndex.build(doc_a, min_match_len),
        DocumentIndex.build(doc_b, min_match_len),
    )


def tiling_oracle(doc_a: Doclike, doc_b: Doclike, min_match_len: int) -> TilingResult:
    """Reference tiling by exhaustive longest-common-substring scan.

    Same contract and tie-breaks as ``rkr_gst``, but computed row by row
    with a dynamic-programming table.  Intended for short inputs only.
    """
    if min_match_len < 1:
        raise ValueError("min_match_len must be >= 1")
    segs_a, segs_b = _segments(doc_a), _segments(doc_b)
    a = "".join(segs_a)
    b = "".join(segs_b)
    seg_a = [k for k, seg in enumerate(segs_a) for _ in seg]
    seg_b = [k for k, seg in enumerate(segs_b) for _ in seg]
    na, nb = len(a), len(b)
    marked_a = [False] * na
    marked_b = [False] * nb

    tiles: list[Tile] = []
    while True:
        best_len = 0
        best_sa = best_sb = 0
        prev = [0] * nb
        for i in range(na):
            cur = [0] * nb
            if not marked_a[i]:
                ai = a[i]
                for jj in range(nb):
                    if marked_b[jj] or b[jj] != ai:
                        continue
                    if (
                        i > 0
                        and jj > 0
                        and seg_a[i] == seg_a[i - 1]
                        and seg_b[jj] == seg_b[jj - 1]
                    ):
                        run = prev[jj - 1] + 1
                    else:
                        run = 1
                    cur[jj] = run
                    sa, sb = i - run + 1, jj - run + 1
                    if run > best_len or (
                        run == best_len and (sa, sb) < (best_sa, best_sb)
                    ):
                        best_len, best_sa, best_sb = run, sa, sb
            prev = cur
        if best_len < min_match_len:
            break
        tiles.append(Tile(best_sa, best_sb, best_len))
        for k in range(best_len):
            marked_a[best_sa + k] = True
            marked_b[best_sb + k] = True
    tiles.sort()
    return TilingResult(tuple(tiles), sum(t.length for t in tiles))
