"""Command line entry points.

Subcommands cover the pipeline stages: ingest (snapshot -> manifest),
similarity (snapshot -> sim.csv/maxprior.csv), pedigree (sim + manifest ->
forest.json/forest.dot), match (two forests -> matches.csv), prospects
(market series + cohorts -> prospects.csv) and forkstats (metadata dir ->
leaderboard).  Thresholds come from flags, then a key=value config file,
then defaults.  Global flags go before the subcommand.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, fields, replace
from datetime import date
from pathlib import Path

from .corpus import CoinMeta, load_snapshot
from .forkgraph import language_time_stats, load_repo_meta, write_forkstats_csv
from .matcher import match_pedigrees, write_matches_csv
from .pedigree import (
    PedigreeConfig,
    build_forest,
    forest_to_dot,
    read_forest_json,
    write_forest_json,
)
from .prospects import (
    Cohort,
    cohort_with_code,
    cohort_without_code,
    family_prospects,
    load_market_json,
    partition_by_similarity,
    prospect_report,
    write_prospects_csv,
)
from .simmatrix import (
    build_matrix,
    read_matrix_csv,
    similarity_histogram,
    write_matrix_csv,
    write_maxprior_csv,
)

__all__ = ["RunConfig", "main"]


@dataclass(frozen=True)
class RunConfig:
    min_match_len: int = 30
    theta_s: float = 0.70
    theta_t_days: int = 90
    sim_class_threshold: float = 0.80
    alive_lookback_days: int = 14
    workers: int = 1

    def __post_init__(self):
        if self.min_match_len < 1:
            raise ValueError("min_match_len must be >= 1")
        if not 0.0 <= self.theta_s <= 1.0:
            raise ValueError("theta_s must be within [0, 1]")
        if self.theta_t_days < 0:
            raise ValueError("theta_t_days must be >= 0")
        if not 0.0 <= self.sim_class_threshold <= 1.0:
            raise ValueError("sim_class_threshold must be within [0, 1]")
        if self.alive_lookback_days < 0:
            raise ValueError("alive_lookback_days must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def load_config_file(path: str | Path) -> dict:
    """Flat key=value lines; # starts a comment; keys are RunConfig fields."""
    values: dict = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        if key not in _FIELD_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        caster = float if _FIELD_TYPES[key] in ("float", float) else int
        try:
            values[key] = caster(raw)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad value for {key}: {raw!r}")
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig()
    if args.config:
        config = replace(config, **load_config_file(args.config))
    overrides = {
        "min_match_len": args.min_match,
        "theta_s": args.theta_s,
        "theta_t_days": args.theta_t_days,
        "sim_class_threshold": args.sim_threshold,
        "workers": args.workers,
    }
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})


MANIFEST_COLUMNS = [
    "coin_id",
    "display_name",
    "release_time",
    "has_code_link",
    "code_less",
    "repo_count",
    "file_count",
    "total_chars",
]


def write_manifest(snapshot, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(MANIFEST_COLUMNS)
        for i, (meta, docs) in enumerate(snapshot.coins):
            writer.writerow(
                [
                    meta.coin_id,
                    meta.display_name,
                    meta.release_time.isoformat(),
                    str(meta.has_code_link).lower(),
                    str(snapshot.is_code_less(i)).lower(),
                    len(docs),
                    sum(len(doc.files) for doc in docs),
                    sum(doc.total_chars for doc in docs),
                ]
            )


def read_manifest_metas(path: str | Path) -> list[CoinMeta]:
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    if not rows:
        raise ValueError(f"{path}: empty manifest")
    return [
        CoinMeta(
            row["coin_id"],
            row["display_name"],
            date.fromisoformat(row["release_time"]),
            row["has_code_link"] == "true",
            (),
        )
        for row in rows
    ]


def _warn(messages) -> None:
    for message in messages:
        print(f"warning: {message}", file=sys.stderr)


def cmd_ingest(args, config: RunConfig) -> int:
    snapshot, warnings = load_snapshot(args.snapshot_dir)
    _warn(warnings)
    write_manifest(snapshot, args.out)
    print(f"ingested {len(snapshot.coins)} coins -> {args.out}")
    return 0


def cmd_similarity(args, config: RunConfig) -> int:
    snapshot, warnings = load_snapshot(args.snapshot_dir)
    _warn(warnings)
    matrix = build_matrix(snapshot, config.min_match_len, config.workers)
    write_matrix_csv(matrix, args.out_sim)
    write_maxprior_csv(matrix, args.out_maxprior)
    if args.histogram:
        with open(args.histogram, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["bucket_lo", "bucket_hi", "count"])
            for (lo, hi), count in similarity_histogram(matrix, args.bucket_width):
                writer.writerow([f"{lo:.2f}", f"{hi:.2f}", count])
    print(f"{len(matrix.coin_ids)}x{len(matrix.coin_ids)} matrix -> {args.out_sim}")
    return 0


def cmd_pedigree(args, config: RunConfig) -> int:
    matrix = read_matrix_csv(args.sim)
    metas = read_manifest_metas(args.meta)
    forest = build_forest(matrix, metas, PedigreeConfig(config.theta_s, config.theta_t_days))
    write_forest_json(forest, args.out_json)
    if args.out_dot:
        Path(args.out_dot).write_text(forest_to_dot(forest), encoding="utf-8")
    roots = sum(node.relation == "root" for node in forest.nodes)
    print(f"{len(forest.families)} families ({roots} roots) -> {args.out_json}")
    return 0


def cmd_match(args, config: RunConfig) -> int:
    fp1 = read_forest_json(args.fp1)
    fp2 = read_forest_json(args.fp2)
    report = match_pedigrees(fp1, fp2)
    write_matches_csv(report, args.out)
    print(f"{len(report.matches)} matches, {len(report.unmatched_fp2)} unmatched -> {args.out}")
    return 0


def cmd_prospects(args, config: RunConfig) -> int:
    series = load_market_json(args.market)
    t0 = date.fromisoformat(args.t0)
    end = date.fromisoformat(args.end) if args.end else None
    window = config.alive_lookback_days

    if args.members:
        cohorts = [Cohort(args.label, tuple(m for m in args.members.split(",") if m))]
    elif args.families:
        forest = read_forest_json(args.families)
        reports = family_prospects(
            forest,
            series,
            t0,
            horizon_days=args.horizon_days,
            end=end,
            lookback_days=window,
            aggregate_singletons=not args.per_singleton,
        )
        if not reports:
            raise ValueError("no family had a member alive at t0")
        write_prospects_csv(reports, args.out)
        print(f"{len(reports)} family rows -> {args.out}")
        return 0
    else:
        snapshot, warnings = load_snapshot(args.snapshot_dir)
        _warn(warnings)
        matrix = read_matrix_csv(args.sim)
        high, low = partition_by_similarity(snapshot, matrix, config.sim_class_threshold)
        cohorts = [cohort_with_code(snapshot), cohort_without_code(snapshot), high, low]

    reports = []
    for cohort in cohorts:
        try:
            reports.append(
                prospect_report(
                    cohort, series, t0, horizon_days=args.horizon_days, end=end, lookback_days=window
                )
            )
        except ValueError as exc:
            if len(cohorts) == 1:
                raise
            _warn([f"skipping cohort: {exc}"])
    if not reports:
        raise ValueError("every cohort was empty or dead at t0")
    write_prospects_csv(reports, args.out)
    print(f"{len(reports)} cohort rows -> {args.out}")
    return 0


def cmd_forkstats(args, config: RunConfig) -> int:
    metas, warnings = load_repo_meta(args.meta_dir)
    _warn(warnings)
    write_forkstats_csv(metas, args.out)
    if args.language_periods:
        edges = [date.fromisoformat(e) for e in args.language_periods.split(",") if e]
        rows = language_time_stats(metas, edges)
        with open(args.out_languages, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["language", "period_start", "period_end", "count"])
            for language, (lo, hi), count in rows:
                writer.writerow([language, lo.isoformat(), hi.isoformat(), count])
    print(f"{len(metas)} repos -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coinlineage",
        description="Code-clone similarity, family pedigrees and market prospects "
        "for coin repository snapshots.",
    )
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--workers", type=int, help="similarity worker processes")
    parser.add_argument("--min-match", type=int, help="minimum tile length in characters")
    parser.add_argument("--theta-s", type=float, help="family similarity threshold")
    parser.add_argument("--theta-t-days", type=int, help="father/brother time threshold in days")
    parser.add_argument("--sim-threshold", type=float, help="cohort similarity class boundary")
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="load a snapshot and write its manifest")
    ingest.add_argument("snapshot_dir")
    ingest.add_argument("--out", default="manifest.csv")
    ingest.set_defaults(handler=cmd_ingest)

    similarity = commands.add_parser("similarity", help="build the coin similarity matrix")
    similarity.add_argument("snapshot_dir")
    similarity.add_argument("--out-sim", default="sim.csv")
    similarity.add_argument("--out-maxprior", default="maxprior.csv")
    similarity.add_argument("--histogram", help="also write bucketed best-prior counts")
    similarity.add_argument("--bucket-width", type=float, default=0.1)
    similarity.set_defaults(handler=cmd_similarity)

    pedigree = commands.add_parser("pedigree", help="build family trees from a matrix")
    pedigree.add_argument("--sim", required=True)
    pedigree.add_argument("--meta", required=True, help="manifest.csv from ingest")
    pedigree.add_argument("--out-json", default="forest.json")
    pedigree.add_argument("--out-dot")
    pedigree.set_defaults(handler=cmd_pedigree)

    match = commands.add_parser("match", help="match families across two forests")
    match.add_argument("--fp1", required=True, help="earlier forest.json")
    match.add_argument("--fp2", required=True, help="later forest.json")
    match.add_argument("--out", default="matches.csv")
    match.set_defaults(handler=cmd_match)

    prospects = commands.add_parser("prospects", help="NCR/MCCR survival ratios for cohorts")
    prospects.add_argument("--market", required=True, help="market.json series")
    prospects.add_argument("--t0", required=True)
    span = prospects.add_mutually_exclusive_group(required=True)
    span.add_argument("--horizon-days", type=int)
    span.add_argument("--end")
    source = prospects.add_mutually_exclusive_group(required=True)
    source.add_argument("--members", help="comma-separated coin ids")
    source.add_argument("--classes", action="store_true", help="code/similarity cohorts")
    source.add_argument("--families", help="forest.json for per-family rows")
    prospects.add_argument("--label", default="custom", help="cohort label for --members")
    prospects.add_argument("--snapshot-dir", help="snapshot dir (with --classes)")
    prospects.add_argument("--sim", help="sim.csv (with --classes)")
    prospects.add_argument(
        "--per-singleton", action="store_true", help="report singleton families individually"
    )
    prospects.add_argument("--out", default="prospects.csv")
    prospects.set_defaults(handler=cmd_prospects)

    forkstats = commands.add_parser("forkstats", help="fork/source leaderboard from metadata")
    forkstats.add_argument("meta_dir")
    forkstats.add_argument("--out", default="leaderboard.csv")
    forkstats.add_argument("--language-periods", help="comma-separated period edge dates")
    forkstats.add_argument("--out-languages", default="languages.csv")
    forkstats.set_defaults(handler=cmd_forkstats)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        if args.command == "prospects" and args.classes and not (args.snapshot_dir and args.sim):
            raise ValueError("--classes needs --snapshot-dir and --sim")
        return args.handler(args, config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
