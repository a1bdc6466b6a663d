"""Repository metadata: fork/source relations and language statistics.

Works offline over a directory of per-repo JSON files shaped like the
GitHub repos API (only full_name, created_at, language, parent.full_name
and source.full_name are read).  ``fetch_repo_meta`` optionally populates
that directory over HTTP; every analytical operation reads files only.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Sequence

import requests

__all__ = [
    "RepoMeta",
    "ForkStats",
    "FetchError",
    "RepoNotFound",
    "RateLimited",
    "load_repo_meta",
    "fork_stats",
    "language_time_stats",
    "fetch_repo_meta",
    "write_forkstats_csv",
]


@dataclass(frozen=True)
class RepoMeta:
    full_name: str
    created_at: datetime
    language: str | None = None
    parent_full_name: str | None = None
    source_full_name: str | None = None


@dataclass(frozen=True)
class ForkStats:
    """direct: how many repos fork a repo directly; source: how many name
    it as their original source."""

    direct: dict[str, int]
    source: dict[str, int]

    def for_repo(self, full_name: str) -> tuple[int, int]:
        return self.direct.get(full_name, 0), self.source.get(full_name, 0)


class FetchError(Exception):
    pass


class RepoNotFound(FetchError):
    pass


class RateLimited(FetchError):
    def __init__(self, message: str, reset_at: datetime | None):
        super().__init__(message)
        self.reset_at = reset_at


def _parse_timestamp(raw: str) -> datetime:
    stamp = datetime.fromisoformat(str(raw).replace("Z", "+00:00"))
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


def meta_from_api_json(obj: dict) -> RepoMeta:
    try:
        full_name = str(obj["full_name"])
        created_at = _parse_timestamp(obj["created_at"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad repo metadata: {exc}")
    language = obj.get("language")
    parent = (obj.get("parent") or {}).get("full_name")
    source = (obj.get("source") or {}).get("full_name")
    if parent and not source:
        source = parent  # a direct fork's original is its parent
    return RepoMeta(
        full_name,
        created_at,
        str(language) if language is not None else None,
        str(parent) if parent else None,
        str(source) if source else None,
    )


def load_repo_meta(meta_dir: str | Path) -> tuple[list[RepoMeta], list[str]]:
    """Parse every *.json in the directory; dedup by full_name (first file
    wins).  Returns (metas sorted by full_name, warnings)."""
    root = Path(meta_dir)
    if not root.is_dir():
        raise ValueError(f"{root}: not a directory")
    metas: dict[str, RepoMeta] = {}
    warnings: list[str] = []
    for path in sorted(root.glob("*.json")):
        try:
            meta = meta_from_api_json(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            warnings.append(f"{path.name}: {exc}")
            continue
        if meta.full_name in metas:
            warnings.append(f"{path.name}: duplicate entry for {meta.full_name}, ignored")
            continue
        metas[meta.full_name] = meta
    return sorted(metas.values(), key=lambda m: m.full_name), warnings


def fork_stats(metas: Sequence[RepoMeta]) -> ForkStats:
    direct: dict[str, int] = {}
    source: dict[str, int] = {}
    for meta in metas:
        if meta.parent_full_name:
            direct[meta.parent_full_name] = direct.get(meta.parent_full_name, 0) + 1
        if meta.source_full_name:
            source[meta.source_full_name] = source.get(meta.source_full_name, 0) + 1
    return ForkStats(direct, source)


def leaderboard(metas: Sequence[RepoMeta]) -> list[tuple[str, int, int]]:
    """(full_name, direct_forks, source_of) for every known repo, most
    forked first."""
    stats = fork_stats(metas)
    rows = [(meta.full_name, *stats.for_repo(meta.full_name)) for meta in metas]
    rows.sort(key=lambda r: (-r[1], -r[2], r[0]))
    return rows


def language_time_stats(
    metas: Sequence[RepoMeta], period_edges: Sequence[date]
) -> list[tuple[str, tuple[date, date], int]]:
    """Repo counts per (language, creation period).

    Periods are [edge[k], edge[k+1]) over the sorted edges; repos outside
    every period are not counted; missing language counts as "unlabeled".
    """
    edges = sorted(period_edges)
    if len(edges) < 2:
        raise ValueError("need at least two period edges")
    counts: dict[tuple[int, str], int] = {}
    for meta in metas:
        created = meta.created_at.date()
        for k in range(len(edges) - 1):
            if edges[k] <= created < edges[k + 1]:
                language = meta.language or "unlabeled"
                counts[(k, language)] = counts.get((k, language), 0) + 1
                break
    return [
        (language, (edges[k], edges[k + 1]), counts[(k, language)])
        for k, language in sorted(counts, key=lambda key: (key[0], key[1]))
    ]


def fetch_repo_meta(
    full_name: str,
    endpoint: str,
    auth_token: str | None = None,
    out_dir: str | Path | None = None,
    timeout: float = 30.0,
) -> RepoMeta:
    """GET /repos/{full_name} from a GitHub-API-compatible endpoint.

    The raw response body is persisted verbatim to out_dir (when given) as
    ``owner__repo.json`` so offline loading sees exactly what the API sent.
    """
    url = f"{endpoint.rstrip('/')}/repos/{full_name}"
    headers = {"Accept": "application/vnd.github+json"}
    if auth_token:
        headers["Authorization"] = f"Bearer {auth_token}"
    try:
        response = requests.get(url, headers=headers, timeout=timeout)
    except requests.RequestException as exc:
        raise FetchError(f"{full_name}: transport failure ({exc})")
    if response.status_code == 404:
        raise RepoNotFound(f"{full_name}: not found")
    if response.status_code == 403 and response.headers.get("X-RateLimit-Remaining") == "0":
        reset_at = None
        raw_reset = response.headers.get("X-RateLimit-Reset")
        if raw_reset and raw_reset.isdigit():
            reset_at = datetime.fromtimestamp(int(raw_reset), tz=timezone.utc)
        raise RateLimited(f"{full_name}: rate limited until {reset_at}", reset_at)
    if response.status_code != 200:
        raise FetchError(f"{full_name}: HTTP {response.status_code}")

    try:
        meta = meta_from_api_json(json.loads(response.content))
    except (json.JSONDecodeError, ValueError) as exc:
        raise FetchError(f"{full_name}: unparseable response ({exc})")
    if out_dir is not None:
        target = Path(out_dir) / (full_name.replace("/", "__") + ".json")
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(response.content)
    return meta


def write_forkstats_csv(metas: Sequence[RepoMeta], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["full_name", "direct_forks", "source_of"])
        for full_name, direct, source in leaderboard(metas):
            writer.writerow([full_name, direct, source])
