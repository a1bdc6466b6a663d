"""Match family trees of an earlier forest to a later one.

Later-snapshot trees are first pruned to the earlier snapshot's coin set;
each surviving tree then maps to the earlier tree sharing the most coins.
Ties prefer the earlier tree whose family started first, then the smaller
representative id.  Several later trees may map to one earlier tree (a
family that broke apart); trees with no surviving members are reported
unmatched.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .pedigree import PedigreeForest

__all__ = ["TreeMatch", "MatchReport", "prune", "match_pedigrees", "write_matches_csv"]


@dataclass(frozen=True)
class TreeMatch:
    fp1_representative: str
    fp2_representative: str
    shared_coins: tuple[str, ...]  # sorted
    shared_count: int


@dataclass(frozen=True)
class MatchReport:
    matches: tuple[TreeMatch, ...]
    unmatched_fp2: tuple[str, ...]  # representatives of trees emptied by pruning


def prune(fp1: PedigreeForest, fp2: PedigreeForest) -> list[tuple[str, tuple[str, ...]]]:
    """Per fp2 tree: (representative, members also present in fp1)."""
    fp1_coins = set(fp1.coin_ids)
    return [
        (family.representative, tuple(m for m in family.members if m in fp1_coins))
        for family in fp2.families
    ]


def match_pedigrees(fp1: PedigreeForest, fp2: PedigreeForest) -> MatchReport:
    first_release = {node.coin_id: node.release_time for node in fp1.nodes}
    fp1_trees = [
        (family.representative, frozenset(family.members), first_release[family.representative])
        for family in fp1.families
    ]

    matches: list[TreeMatch] = []
    unmatched: list[str] = []
    for fp2_rep, surviving in prune(fp1, fp2):
        if not surviving:
            unmatched.append(fp2_rep)
            continue
        survivors = frozenset(surviving)
        best = None
        for fp1_rep, members, released in fp1_trees:
            shared = len(members & survivors)
            if shared == 0:
                continue
            key = (-shared, released, fp1_rep)
            if best is None or key < best[0]:
                best = (key, fp1_rep, members & survivors)
        _, fp1_rep, shared_coins = best  # survivors ⊆ fp1 coins, so best exists
        matches.append(TreeMatch(fp1_rep, fp2_rep, tuple(sorted(shared_coins)), len(shared_coins)))
    return MatchReport(tuple(matches), tuple(unmatched))


def write_matches_csv(report: MatchReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["fp1_rep", "fp2_rep", "shared_count", "shared_coins"])
        for match in report.matches:
            writer.writerow(
                [
                    match.fp1_representative,
                    match.fp2_representative,
                    match.shared_count,
                    ";".join(match.shared_coins),
                ]
            )
