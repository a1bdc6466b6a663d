"""Family pedigrees from the similarity matrix and release dates.

One chronological pass decides each coin's relation: the first coin and
coins whose best prior similarity falls below ``theta_s`` become roots;
otherwise the most similar earlier coin is a father when the release gap
exceeds ``theta_t_days`` and a brother when it does not.  A brother joins
its sibling's family and inherits the sibling's father; a brother of a
root stands beside it as co-root of the same family.  Families are the
connected components of the decision edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Sequence

from .corpus import CoinMeta
from .simmatrix import SimilarityMatrix

__all__ = [
    "PedigreeConfig",
    "PedigreeNode",
    "Family",
    "PedigreeForest",
    "build_forest",
    "family_sizes",
    "family_first_release",
    "forest_to_dot",
    "write_forest_json",
    "read_forest_json",
]

ROOT = "root"
FATHER = "father"
BROTHER = "brother"


@dataclass(frozen=True)
class PedigreeConfig:
    theta_s: float = 0.70
    theta_t_days: int = 90

    def __post_init__(self):
        if not 0.0 <= self.theta_s <= 1.0:
            raise ValueError("theta_s must be within [0, 1]")
        if self.theta_t_days < 0:
            raise ValueError("theta_t_days must be >= 0")


@dataclass(frozen=True)
class PedigreeNode:
    """relation is one of root/father/brother; related_id names the father
    or brother target; parent_id is the effective father (brothers inherit
    their sibling's, which may be none)."""

    coin_id: str
    display_name: str
    release_time: date
    relation: str
    related_id: str | None = None
    parent_id: str | None = None


@dataclass(frozen=True)
class Family:
    representative: str
    members: tuple[str, ...]  # chronological


@dataclass(frozen=True)
class PedigreeForest:
    config: PedigreeConfig
    nodes: tuple[PedigreeNode, ...]  # chronological
    families: tuple[Family, ...]  # by representative's release order

    def node(self, coin_id: str) -> PedigreeNode:
        return next(n for n in self.nodes if n.coin_id == coin_id)

    @property
    def coin_ids(self) -> tuple[str, ...]:
        return tuple(n.coin_id for n in self.nodes)


def build_forest(
    matrix: SimilarityMatrix, coin_metas: Sequence[CoinMeta], config: PedigreeConfig
) -> PedigreeForest:
    metas = sorted(coin_metas, key=lambda m: (m.release_time, m.coin_id))
    ids = tuple(m.coin_id for m in metas)
    if ids != matrix.coin_ids:
        raise ValueError(
            "matrix and metadata disagree: "
            f"{len(matrix.coin_ids)} matrix coins vs {len(ids)} metadata coins"
        )

    nodes: list[PedigreeNode] = []
    family_of: list[int] = []  # per coin: index of its family's founding coin
    for i, meta in enumerate(metas):
        relation, related, parent = ROOT, None, None
        if i > 0 and not matrix.is_code_less(i):
            best_value, best_j = 0.0, None
            for j in range(i):
                if matrix.is_code_less(j):
                    continue
                value = matrix.values[j, i]
                if best_j is None or value > best_value:
                    best_value, best_j = float(value), j
            if best_j is not None and best_value >= config.theta_s:
                gap = abs((meta.release_time - metas[best_j].release_time).days)
                if gap > config.theta_t_days:
                    relation, related, parent = FATHER, ids[best_j], ids[best_j]
                else:
                    relation, related = BROTHER, ids[best_j]
                    parent = nodes[best_j].parent_id
        nodes.append(
            PedigreeNode(meta.coin_id, meta.display_name, meta.release_time, relation, related, parent)
        )
        if relation == ROOT:
            family_of.append(i)
        else:
            family_of.append(family_of[ids.index(related)])

    members: dict[int, list[str]] = {}
    for i, coin_id in enumerate(ids):
        members.setdefault(family_of[i], []).append(coin_id)
    families = tuple(
        Family(ids[founder], tuple(coin_ids)) for founder, coin_ids in sorted(members.items())
    )
    return PedigreeForest(config, tuple(nodes), families)


def family_sizes(forest: PedigreeForest) -> list[tuple[str, int]]:
    pairs = [(family.representative, len(family.members)) for family in forest.families]
    pairs.sort(key=lambda p: -p[1])
    return pairs


def family_first_release(forest: PedigreeForest) -> list[tuple[int, date]]:
    by_id = {node.coin_id: node for node in forest.nodes}
    rows = [
        (len(family.members), by_id[family.representative].release_time)
        for family in forest.families
    ]
    rows.sort(key=lambda r: (-r[0], r[1]))
    return rows


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def forest_to_dot(forest: PedigreeForest) -> str:
    """DOT digraph: solid father->son arrows, dashed same-rank brother links."""
    lines = ["digraph pedigree {", "  rankdir=TB;", "  node [shape=box];"]
    for node in forest.nodes:
        lines.append(f"  {_quote(node.coin_id)} [label={_quote(node.display_name)}];")
    for node in forest.nodes:
        if node.relation == FATHER:
            lines.append(f"  {_quote(node.related_id)} -> {_quote(node.coin_id)};")
        elif node.relation == BROTHER:
            lines.append(f"  {{ rank=same; {_quote(node.related_id)}; {_quote(node.coin_id)}; }}")
            lines.append(
                f"  {_quote(node.related_id)} -> {_quote(node.coin_id)} [style=dashed, dir=none];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_forest_json(forest: PedigreeForest, path: str | Path) -> None:
    payload = {
        "config": {
            "theta_s": forest.config.theta_s,
            "theta_t_days": forest.config.theta_t_days,
        },
        "nodes": [
            {
                "coin_id": n.coin_id,
                "display_name": n.display_name,
                "release_time": n.release_time.isoformat(),
                "relation": n.relation,
                **({"related_coin_id": n.related_id} if n.related_id else {}),
                **({"parent_id": n.parent_id} if n.parent_id else {}),
            }
            for n in forest.nodes
        ],
        "families": [
            {"representative": f.representative, "members": list(f.members)}
            for f in forest.families
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def read_forest_json(path: str | Path) -> PedigreeForest:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    config = PedigreeConfig(
        float(payload["config"]["theta_s"]), int(payload["config"]["theta_t_days"])
    )
    nodes = tuple(
        PedigreeNode(
            raw["coin_id"],
            raw["display_name"],
            date.fromisoformat(raw["release_time"]),
            raw["relation"],
            raw.get("related_coin_id"),
            raw.get("parent_id"),
        )
        for raw in payload["nodes"]
    )
    families = tuple(
        Family(raw["representative"], tuple(raw["members"])) for raw in payload["families"]
    )
    return PedigreeForest(config, nodes, families)
