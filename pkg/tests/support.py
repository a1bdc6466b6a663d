"""Shared builders for test corpora, matrices and forests."""

import json
from datetime import date
from pathlib import Path

import numpy as np

from coinlineage.corpus import CoinMeta, CorpusSnapshot, RepoDocument
from coinlineage.pedigree import Family, PedigreeConfig, PedigreeForest, PedigreeNode


def coin(coin_id, release, repos, display=None, has_link=True):
    """(CoinMeta, docs) from {repo_name: [(relpath, text), ...]}."""
    docs = tuple(
        RepoDocument.build(coin_id, name, files) for name, files in repos.items()
    )
    meta = CoinMeta(
        coin_id,
        display or coin_id.capitalize(),
        date.fromisoformat(release),
        has_link,
        tuple(repos),
    )
    return meta, docs


def snapshot(coins, label="test", cut="2014-01-01"):
    ordered = tuple(sorted(coins, key=lambda pair: (pair[0].release_time, pair[0].coin_id)))
    return CorpusSnapshot(label, date.fromisoformat(cut), ordered)


def write_corpus(root: Path, entries, label="test", cut="2014-01-01", dir_names=None):
    """Write a snapshot tree under ``root``.

    entries: [{id, name?, release_time, has_code_link?, repos: {name: {relpath: text}}}]
    dir_names optionally overrides each coin's directory name (defaults to its id).
    """
    root.mkdir(parents=True, exist_ok=True)
    (root / "snapshot.json").write_text(
        json.dumps({"label": label, "cut_date": cut}), encoding="utf-8"
    )
    for k, entry in enumerate(entries):
        dir_name = dir_names[k] if dir_names else entry["id"]
        coin_dir = root / "coins" / dir_name
        coin_dir.mkdir(parents=True)
        meta = {
            "id": entry["id"],
            "name": entry.get("name", entry["id"].capitalize()),
            "release_time": entry["release_time"],
            "has_code_link": entry.get("has_code_link", True),
            "repos": list(entry.get("repos", {})),
        }
        (coin_dir / "meta.json").write_text(json.dumps(meta), encoding="utf-8")
        for repo_name, files in entry.get("repos", {}).items():
            repo_dir = coin_dir / "repos" / repo_name
            repo_dir.mkdir(parents=True)
            for rel, text in files.items():
                target = repo_dir / rel
                target.parent.mkdir(parents=True, exist_ok=True)
                if isinstance(text, bytes):
                    target.write_bytes(text)
                else:
                    target.write_text(text, encoding="utf-8")
    return root


def make_matrix(values, ids=None, label="hand", min_match_len=30):
    from coinlineage.simmatrix import SimilarityMatrix

    arr = np.asarray(values, dtype=np.float64)
    ids = tuple(ids) if ids else tuple(f"c{k + 1}" for k in range(len(arr)))
    return SimilarityMatrix(label, ids, arr, min_match_len)


def make_forest(family_specs, theta_s=0.70, theta_t_days=90):
    """Forest from [[(coin_id, release_iso), ...], ...]; each family's
    earliest coin becomes its representative root, the rest its sons."""
    nodes = []
    families = []
    for members in family_specs:
        ordered = sorted(
            ((coin_id, date.fromisoformat(release)) for coin_id, release in members),
            key=lambda m: (m[1], m[0]),
        )
        rep = ordered[0][0]
        for k, (coin_id, release) in enumerate(ordered):
            related = None if k == 0 else rep
            nodes.append(
                PedigreeNode(coin_id, coin_id, release, "root" if k == 0 else "father", related, related)
            )
        families.append(Family(rep, tuple(m[0] for m in ordered)))
    nodes.sort(key=lambda n: (n.release_time, n.coin_id))
    families.sort(
        key=lambda f: next((n.release_time, n.coin_id) for n in nodes if n.coin_id == f.representative)
    )
    return PedigreeForest(PedigreeConfig(theta_s, theta_t_days), tuple(nodes), tuple(families))
