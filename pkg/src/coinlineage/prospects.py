"""Survival and market-cap prospects of coin cohorts.

A coin is alive at a query date when its latest market datum on or before
that date lies within a lookback window (14 days by default) and carries a
positive market cap.  Cohort metrics over a horizon:

    ncr  = alive(t0 + horizon) / alive(t0)
    mccr = sum of caps(t0 + horizon) / sum of caps(t0)

where dead or absent members contribute zero cap.  Cohorts come from the
snapshot (with/without code), from the similarity matrix (best prior
similarity above/below a threshold), or from pedigree families.
"""

from __future__ import annotations

import csv
import json
from bisect import bisect_right
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import CorpusSnapshot
from .pedigree import PedigreeForest
from .simmatrix import SimilarityMatrix, max_prior_similarity

__all__ = [
    "MarketSeries",
    "Cohort",
    "ProspectReport",
    "load_market_json",
    "alive_at",
    "cap_at",
    "ncr",
    "mccr",
    "prospect_report",
    "cohort_with_code",
    "cohort_without_code",
    "partition_by_similarity",
    "family_prospects",
    "write_prospects_csv",
]

DEFAULT_LOOKBACK_DAYS = 14


class MarketSeries:
    """Per-coin date-sorted (date, close_price_usd, market_cap_usd) rows."""

    def __init__(self, data: Mapping[str, Sequence[tuple[date, float, float]]]):
        self._dates: dict[str, list[date]] = {}
        self._prices: dict[str, list[float]] = {}
        self._caps: dict[str, list[float]] = {}
        for coin_id, rows in data.items():
            dates, prices, caps = [], [], []
            for when, price, cap in rows:
                if dates and when <= dates[-1]:
                    raise ValueError(f"{coin_id}: dates not strictly increasing at {when}")
                if price < 0 or cap < 0:
                    raise ValueError(f"{coin_id}: negative value at {when}")
                dates.append(when)
                prices.append(float(price))
                caps.append(float(cap))
            self._dates[coin_id] = dates
            self._prices[coin_id] = prices
            self._caps[coin_id] = caps

    def __contains__(self, coin_id: str) -> bool:
        return coin_id in self._dates

    def coin_ids(self) -> list[str]:
        return sorted(self._dates)

    def latest_within(
        self, coin_id: str, when: date, lookback_days: int
    ) -> tuple[date, float, float] | None:
        dates = self._dates.get(coin_id)
        if not dates:
            return None
        k = bisect_right(dates, when) - 1
        if k < 0 or (when - dates[k]).days > lookback_days:
            return None
        return dates[k], self._prices[coin_id][k], self._caps[coin_id][k]


def load_market_json(path: str | Path) -> MarketSeries:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    data = {
        coin_id: [
            (
                date.fromisoformat(str(row["date"])),
                float(row["close_price_usd"]),
                float(row["market_cap_usd"]),
            )
            for row in rows
        ]
        for coin_id, rows in raw.items()
    }
    return MarketSeries(data)


def alive_at(
    series: MarketSeries, coin_id: str, when: date, lookback_days: int = DEFAULT_LOOKBACK_DAYS
) -> bool:
    latest = series.latest_within(coin_id, when, lookback_days)
    return latest is not None and latest[2] > 0


def cap_at(
    series: MarketSeries, coin_id: str, when: date, lookback_days: int = DEFAULT_LOOKBACK_DAYS
) -> float:
    latest = series.latest_within(coin_id, when, lookback_days)
    return latest[2] if latest is not None else 0.0


@dataclass(frozen=True)
class Cohort:
    label: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class ProspectReport:
    cohort: str
    t0: date
    horizon_days: int
    number_t0: int
    number_t1: int
    ncr: float
    marketcap_t0: float
    marketcap_t1: float
    mccr: float


def _resolve_end(t0: date, horizon_days: int | None, end: date | None) -> tuple[date, int]:
    if (horizon_days is None) == (end is None):
        raise ValueError("give exactly one of horizon_days or end")
    if end is None:
        end = t0 + timedelta(days=horizon_days)
    return end, (end - t0).days


def _count_alive(series, members, when, lookback_days) -> int:
    return sum(1 for m in members if alive_at(series, m, when, lookback_days))


def _total_cap(series, members, when, lookback_days) -> float:
    return sum(cap_at(series, m, when, lookback_days) for m in members)


def ncr(
    cohort: Cohort,
    series: MarketSeries,
    t0: date,
    horizon_days: int | None = None,
    end: date | None = None,
    lookback_days: int = DEFAULT_LOOKBACK_DAYS,
) -> float:
    t1, _ = _resolve_end(t0, horizon_days, end)
    alive_t0 = _count_alive(series, cohort.members, t0, lookback_days)
    if alive_t0 == 0:
        raise ValueError(f"cohort {cohort.label!r}: no member alive at {t0}")
    return _count_alive(series, cohort.members, t1, lookback_days) / alive_t0


def mccr(
    cohort: Cohort,
    series: MarketSeries,
    t0: date,
    horizon_days: int | None = None,
    end: date | None = None,
    lookback_days: int = DEFAULT_LOOKBACK_DAYS,
) -> float:
    t1, _ = _resolve_end(t0, horizon_days, end)
    cap_t0 = _total_cap(series, cohort.members, t0, lookback_days)
    if cap_t0 <= 0:
        raise ValueError(f"cohort {cohort.label!r}: zero market cap at {t0}")
    return _total_cap(series, cohort.members, t1, lookback_days) / cap_t0


def prospect_report(
    cohort: Cohort,
    series: MarketSeries,
    t0: date,
    horizon_days: int | None = None,
    end: date | None = None,
    lookback_days: int = DEFAULT_LOOKBACK_DAYS,
) -> ProspectReport:
    t1, span = _resolve_end(t0, horizon_days, end)
    number_t0 = _count_alive(series, cohort.members, t0, lookback_days)
    if number_t0 == 0:
        raise ValueError(f"cohort {cohort.label!r}: no member alive at {t0}")
    number_t1 = _count_alive(series, cohort.members, t1, lookback_days)
    cap_t0 = _total_cap(series, cohort.members, t0, lookback_days)
    cap_t1 = _total_cap(series, cohort.members, t1, lookback_days)
    return ProspectReport(
        cohort.label,
        t0,
        span,
        number_t0,
        number_t1,
        number_t1 / number_t0,
        cap_t0,
        cap_t1,
        cap_t1 / cap_t0,
    )


def cohort_with_code(snapshot: CorpusSnapshot) -> Cohort:
    members = [
        meta.coin_id
        for i, (meta, _) in enumerate(snapshot.coins)
        if not snapshot.is_code_less(i)
    ]
    return Cohort("with_code", tuple(members))


def cohort_without_code(snapshot: CorpusSnapshot) -> Cohort:
    members = [
        meta.coin_id for i, (meta, _) in enumerate(snapshot.coins) if snapshot.is_code_less(i)
    ]
    return Cohort("without_code", tuple(members))


def partition_by_similarity(
    snapshot: CorpusSnapshot, matrix: SimilarityMatrix, threshold: float
) -> tuple[Cohort, Cohort]:
    """Split with-code coins by best prior similarity; the first coin has
    no prior and goes low."""
    if tuple(snapshot.coin_ids) != matrix.coin_ids:
        raise ValueError("matrix was not built over this snapshot")
    high, low = [], []
    for i, coin_id in enumerate(matrix.coin_ids):
        if matrix.is_code_less(i):
            continue
        if i > 0 and max_prior_similarity(matrix, i).best_value >= threshold:
            high.append(coin_id)
        else:
            low.append(coin_id)
    return (
        Cohort(f"sim_ge_{threshold:.2f}", tuple(high)),
        Cohort(f"sim_lt_{threshold:.2f}", tuple(low)),
    )


def family_prospects(
    forest: PedigreeForest,
    series: MarketSeries,
    t0: date,
    horizon_days: int | None = None,
    end: date | None = None,
    lookback_days: int = DEFAULT_LOOKBACK_DAYS,
    aggregate_singletons: bool = True,
) -> list[ProspectReport]:
    """One report per family, largest first, labeled by its earliest member.

    Singleton families pool into a trailing "single" pseudo-cohort unless
    aggregate_singletons is off.  Families with nobody alive at t0 are
    dropped (their ratios are undefined).
    """
    display = {node.coin_id: node.display_name for node in forest.nodes}
    cohorts: list[Cohort] = []
    singles: list[str] = []
    for family in sorted(forest.families, key=lambda f: -len(f.members)):
        if aggregate_singletons and len(family.members) == 1:
            singles.extend(family.members)
            continue
        cohorts.append(Cohort(display[family.representative], family.members))
    if singles:
        cohorts.append(Cohort("single", tuple(singles)))

    reports = []
    for cohort in cohorts:
        if _count_alive(series, cohort.members, t0, lookback_days) == 0:
            continue
        reports.append(
            prospect_report(cohort, series, t0, horizon_days, end, lookback_days)
        )
    return reports


def write_prospects_csv(reports: Sequence[ProspectReport], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "cohort",
                "t0",
                "horizon_days",
                "number_t0",
                "number_t1",
                "ncr",
                "cap_t0",
                "cap_t1",
                "mccr",
            ]
        )
        for report in reports:
            writer.writerow(
                [
                    report.cohort,
                    report.t0.isoformat(),
                    report.horizon_days,
                    report.number_t0,
                    report.number_t1,
                    f"{report.ncr:.6f}",
                    f"{report.marketcap_t0:.2f}",
                    f"{report.marketcap_t1:.2f}",
                    f"{report.mccr:.6f}",
                ]
            )
