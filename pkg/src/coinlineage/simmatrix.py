"""Coin-by-coin similarity matrix from pairwise repository tiling.

A repository pair scores ``2 * matched_chars / (total_a + total_b)``, the
overlap fraction of the greedy tiling.  Coin similarity is the maximum over
all repository pairings of the two coins.  The matrix rows follow the
snapshot's chronological coin order, so "prior" lookups are plain prefix
maxima.

The diagonal is 1.0 by definition for coins that have any code and 0.0 for
code-less coins; a zero diagonal is how code-lessness survives the CSV
round-trip.
"""

from __future__ import annotations

import csv
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import CorpusSnapshot, RepoDocument
from .tiling import DocumentIndex, rkr_gst_indexed

__all__ = [
    "SimilarityMatrix",
    "MaxPrior",
    "repo_similarity",
    "coin_similarity",
    "build_matrix",
    "max_prior_similarity",
    "similarity_histogram",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_maxprior_csv",
]


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    snapshot_label: str
    coin_ids: tuple[str, ...]
    values: np.ndarray  # float64, rounded to 6 decimals, read-only
    min_match_len: int

    def __post_init__(self):
        self.values.setflags(write=False)

    def __eq__(self, other):
        return (
            isinstance(other, SimilarityMatrix)
            and self.snapshot_label == other.snapshot_label
            and self.coin_ids == other.coin_ids
            and self.min_match_len == other.min_match_len
            and np.array_equal(self.values, other.values)
        )

    def index_of(self, coin_id: str) -> int:
        return self.coin_ids.index(coin_id)

    def is_code_less(self, i: int) -> bool:
        return self.values[i, i] == 0.0


@dataclass(frozen=True)
class MaxPrior:
    """Best similarity of coin ``index`` against strictly earlier coins.

    ``best_index`` is None for the first coin and for code-less coins; ties
    go to the earliest-released earlier coin (the smallest matrix index).
    """

    index: int
    best_value: float
    best_index: int | None


def _ordered(doc_a: RepoDocument, doc_b: RepoDocument):
    """Canonical argument order, making the pair score symmetric."""
    if (doc_b.coin_id, doc_b.repo_name) < (doc_a.coin_id, doc_a.repo_name):
        return doc_b, doc_a
    return doc_a, doc_b


def repo_similarity(doc_a: RepoDocument, doc_b: RepoDocument, min_match_len: int) -> float:
    total = doc_a.total_chars + doc_b.total_chars
    if total == 0:
        return 0.0
    first, second = _ordered(doc_a, doc_b)
    result = rkr_gst_indexed(
        DocumentIndex.build(first, min_match_len),
        DocumentIndex.build(second, min_match_len),
    )
    return 2.0 * result.matched_chars / total

def coin_similarity(
    docs_a: Sequence[RepoDocument], docs_b: Sequence[RepoDocument], min_match_len: int
) -> float:
    best = 0.0
    for doc_a in docs_a:
        for doc_b in docs_b:
            best = max(best, repo_similarity(doc_a, doc_b, min_match_len))
    return best


# Pair tasks read this module-level state; worker processes inherit it by
# fork, so the prebuilt window tables are shared without pickling.
_STATE: dict | None = None


def _coin_pair_value(entries_a, entries_b) -> float:
    best = 0.0
    for key_a, ix_a, chars_a in entries_a:
        for key_b, ix_b, chars_b in entries_b:
            if key_b < key_a:
                result = rkr_gst_indexed(ix_b, ix_a)
            else:
                result = rkr_gst_indexed(ix_a, ix_b)
            best = max(best, 2.0 * result.matched_chars / (chars_a + chars_b))
    return best


def _pair_chunk(pairs: list[tuple[int, int]]) -> list[tuple[int, int, float]]:
    coins = _STATE["coins"]
    return [(i, j, _coin_pair_value(coins[i], coins[j])) for i, j in pairs]


def build_matrix(
    snapshot: CorpusSnapshot, min_match_len: int, workers: int = 1
) -> SimilarityMatrix:
    """Evaluate every unordered coin pair; deterministic for any worker count."""
    global _STATE
    n = len(snapshot.coins)
    coin_entries = []
    for _, docs in snapshot.coins:
        coin_entries.append(
            [
                ((doc.coin_id, doc.repo_name), DocumentIndex.build(doc, min_match_len), doc.total_chars)
                for doc in docs
                if not doc.is_empty
            ]
        )
    _STATE = {"coins": coin_entries}
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    if workers <= 1 or len(pairs) < 2:
        results = _pair_chunk(pairs)
    else:
        try:
            context = multiprocessing.get_context("fork")
        except ValueError:
            results = _pair_chunk(pairs)
        else:
            # Strided chunks level out the hot pairs across workers.
            chunk_count = min(len(pairs), workers * 4)
            chunks = [pairs[k::chunk_count] for k in range(chunk_count)]
            with ProcessPoolExecutor(max_workers=workers, mp_context=context) as pool:
                results = [item for chunk in pool.map(_pair_chunk, chunks) for item in chunk]
    _STATE = None

    values = np.zeros((n, n), dtype=np.float64)
    for i, j, value in results:
        values[i, j] = values[j, i] = value
    for i in range(n):
        values[i, i] = 0.0 if snapshot.is_code_less(i) else 1.0
    return SimilarityMatrix(
        snapshot.label, tuple(snapshot.coin_ids), np.round(values, 6), min_match_len
    )


def max_prior_similarity(matrix: SimilarityMatrix, i: int) -> MaxPrior:
    n = len(matrix.coin_ids)
    if not 0 <= i < n:
        raise IndexError(f"coin index {i} out of range for {n} coins")
    if i == 0:
        return MaxPrior(0, 0.0, None)
    column = matrix.values[:i, i]
    best_value = float(column.max())
    if matrix.is_code_less(i):
        return MaxPrior(i, best_value, None)
    return MaxPrior(i, best_value, int(np.argmax(column)))


def similarity_histogram(
    matrix: SimilarityMatrix, bucket_width: float = 0.1
) -> list[tuple[tuple[float, float], int]]:
    """Bucket counts of each coin's best prior similarity.

    Buckets are [k*w, (k+1)*w) with the top bucket closed at 1.0.  The first
    coin and code-less coins are not counted.
    """
    width_millionths = round(bucket_width * 1_000_000)
    if width_millionths <= 0 or 1_000_000 % width_millionths:
        raise ValueError("bucket_width must evenly divide 1.0")
    bucket_count = 1_000_000 // width_millionths
    counts = [0] * bucket_count
    for i in range(1, len(matrix.coin_ids)):
        if matrix.is_code_less(i):
            continue
        value = max_prior_similarity(matrix, i).best_value
        k = min(round(value * 1_000_000) // width_millionths, bucket_count - 1)
        counts[k] += 1
    return [
        ((k * width_millionths / 1_000_000, (k + 1) * width_millionths / 1_000_000), counts[k])
        for k in range(bucket_count)
    ]


def write_matrix_csv(matrix: SimilarityMatrix, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(
            f"# snapshot={matrix.snapshot_label} min_match_len={matrix.min_match_len}\n"
        )
        writer = csv.writer(handle)
        writer.writerow(["coin_id", *matrix.coin_ids])
        for coin_id, row in zip(matrix.coin_ids, matrix.values):
            writer.writerow([coin_id, *(f"{v:.6f}" for v in row)])


def read_matrix_csv(path: str | Path) -> SimilarityMatrix:
    with open(path, newline="", encoding="utf-8") as handle:
        first = handle.readline()
        label, min_match_len = "", 0
        if first.startswith("#"):
            for token in first[1:].split():
                key, _, val = token.partition("=")
                if key == "snapshot":
                    label = val
                elif key == "min_match_len":
                    min_match_len = int(val)
        else:
            handle.seek(0)
        rows = list(csv.reader(handle))
    header = rows[0][1:]
    ids = []
    values = np.zeros((len(header), len(header)))
    for k, row in enumerate(rows[1:]):
        ids.append(row[0])
        values[k] = [float(v) for v in row[1:]]
    if ids != header:
        raise ValueError(f"{path}: row ids do not match header ids")
    return SimilarityMatrix(label, tuple(ids), values, min_match_len)


def write_maxprior_csv(matrix: SimilarityMatrix, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["coin_id", "best_value", "best_coin_id"])
        for i, coin_id in enumerate(matrix.coin_ids):
            prior = max_prior_similarity(matrix, i)
            best_id = "" if prior.best_index is None else matrix.coin_ids[prior.best_index]
            writer.writerow([coin_id, f"{prior.best_value:.6f}", best_id])
