"""Snapshot corpus loading.

A snapshot directory holds one sub-directory per coin with a ``meta.json``
and the source trees of its repositories (see ``load_snapshot``).  Files
are filtered down to C/C++ sources, normalized, and packed into immutable
documents that the clone-detection engine consumes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

__all__ = [
    "FilterConfig",
    "CoinMeta",
    "RepoDocument",
    "CorpusSnapshot",
    "filter_file",
    "normalize_text",
    "load_snapshot",
]

DEFAULT_EXTENSIONS = frozenset(
    {".c", ".cc", ".cpp", ".cxx", ".h", ".hh", ".hpp", ".hxx"}
)
DEFAULT_NAME_BLACKLIST = ("readme", "license", "changelog")


@dataclass(frozen=True)
class FilterConfig:
    """File inclusion rules: extension whitelist plus name blacklist."""

    extensions: frozenset[str] = DEFAULT_EXTENSIONS
    name_blacklist: tuple[str, ...] = DEFAULT_NAME_BLACKLIST
    exclude_hidden: bool = True


@dataclass(frozen=True)
class CoinMeta:
    coin_id: str
    display_name: str
    release_time: date
    has_code_link: bool
    repo_names: tuple[str, ...]


@dataclass(frozen=True)
class RepoDocument:
    """Normalized source text of one repository.

    ``files`` is sorted by relative path (byte-wise ascending); every path
    passed the inclusion filter.  ``total_chars`` is the character count
    after normalization, summed over files.
    """

    coin_id: str
    repo_name: str
    files: tuple[tuple[str, str], ...]
    total_chars: int = field(default=0)

    @staticmethod
    def build(coin_id: str, repo_name: str, files: list[tuple[str, str]]) -> "RepoDocument":
        ordered = tuple(sorted(files, key=lambda f: f[0].encode("utf-8")))
        total = sum(len(text) for _, text in ordered)
        return RepoDocument(coin_id, repo_name, ordered, total)

    @property
    def is_empty(self) -> bool:
        return self.total_chars == 0


@dataclass(frozen=True)
class CorpusSnapshot:
    """All coins of one snapshot, sorted by (release_time, coin_id)."""

    label: str
    cut_date: date
    coins: tuple[tuple[CoinMeta, tuple[RepoDocument, ...]], ...]

    @property
    def coin_ids(self) -> list[str]:
        return [meta.coin_id for meta, _ in self.coins]

    def is_code_less(self, index: int) -> bool:
        _, docs = self.coins[index]
        return all(doc.is_empty for doc in docs) if docs else True


def filter_file(relative_path: str | Path, config: FilterConfig = FilterConfig()) -> bool:
    """Return True when the file takes part in clone detection.

    Included: whitelisted extension, no hidden path component, filename not
    on the name blacklist (case-insensitive prefix match).
    """
    path = Path(relative_path)
    parts = path.parts
    if not parts:
        return False
    if config.exclude_hidden and any(part.startswith(".") for part in parts):
        return False
    name = path.name.lower()
    if name.startswith(tuple(config.name_blacklist)):
        return False
    return path.suffix.lower() in config.extensions


def normalize_text(raw: bytes) -> str:
    """Decode bytes as UTF-8 (lossy) and collapse CRLF / lone CR to LF."""
    text = raw.decode("utf-8", errors="replace")
    return text.replace("\r\n", "\n").replace("\r", "\n")


def _load_coin(coin_dir: Path, config: FilterConfig) -> tuple[CoinMeta, tuple[RepoDocument, ...]]:
    meta_path = coin_dir / "meta.json"
    try:
        meta_raw = json.loads(meta_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValueError(f"{coin_dir.name}: missing meta.json")
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"{coin_dir.name}: unreadable meta.json ({exc})")

    try:
        coin_id = str(meta_raw["id"])
        display_name = str(meta_raw["name"])
        release_time = date.fromisoformat(str(meta_raw["release_time"]))
        has_code_link = bool(meta_raw["has_code_link"])
        repo_names = tuple(str(r) for r in meta_raw.get("repos", []))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{coin_dir.name}: invalid meta.json ({exc})")
    if not coin_id:
        raise ValueError(f"{coin_dir.name}: empty coin id")

    docs = []
    for repo_name in repo_names:
        repo_dir = coin_dir / "repos" / repo_name
        files: list[tuple[str, str]] = []
        if repo_dir.is_dir():
            for file_path in sorted(repo_dir.rglob("*")):
                if not file_path.is_file():
                    continue
                rel = file_path.relative_to(repo_dir).as_posix()
                if not filter_file(rel, config):
                    continue
                files.append((rel, normalize_text(file_path.read_bytes())))
        docs.append(RepoDocument.build(coin_id, repo_name, files))
    return CoinMeta(coin_id, display_name, release_time, has_code_link, repo_names), tuple(docs)


def load_snapshot(
    root_dir: str | Path, config: FilterConfig = FilterConfig()
) -> tuple[CorpusSnapshot, list[str]]:
    """Load a snapshot directory tree.

    Returns the snapshot plus a list of per-coin warnings (bad meta.json,
    missing repo trees).  Coins with unusable metadata are skipped; an
    entirely empty corpus raises ValueError.
    """
    root = Path(root_dir)
    label, cut_date = "", date.min
    snap_path = root / "snapshot.json"
    if snap_path.is_file():
        try:
            snap_raw = json.loads(snap_path.read_text(encoding="utf-8"))
            label = str(snap_raw.get("label", ""))
            cut_date = date.fromisoformat(str(snap_raw["cut_date"]))
        except (OSError, KeyError, ValueError) as exc:
            raise ValueError(f"{root}: invalid snapshot.json ({exc})")

    coins_dir = root / "coins"
    if not coins_dir.is_dir():
        raise ValueError(f"empty corpus: {root} has no coins/ directory")

    warnings: list[str] = []
    loaded: list[tuple[CoinMeta, tuple[RepoDocument, ...]]] = []
    seen_ids: set[str] = set()
    for coin_dir in sorted(coins_dir.iterdir()):
        if not coin_dir.is_dir():
            continue
        try:
            meta, docs = _load_coin(coin_dir, config)
        except ValueError as exc:
            warnings.append(str(exc))
            continue
        if meta.coin_id in seen_ids:
            warnings.append(f"{coin_dir.name}: duplicate coin id {meta.coin_id!r}, skipped")
            continue
        seen_ids.add(meta.coin_id)
        for repo_name in meta.repo_names:
            if not (coin_dir / "repos" / repo_name).is_dir():
                warnings.append(f"{meta.coin_id}: repo directory {repo_name!r} missing")
        loaded.append((meta, docs))

    if not loaded:
        raise ValueError(f"empty corpus: no loadable coins under {coins_dir}")

    loaded.sort(key=lambda pair: (pair[0].release_time, pair[0].coin_id))
    return CorpusSnapshot(label, cut_date, tuple(loaded)), warnings
