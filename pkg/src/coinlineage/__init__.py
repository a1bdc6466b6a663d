"""Code-clone similarity and family analysis for coin repository snapshots.

The pipeline runs corpus -> tiling -> similarity matrix -> pedigree forest,
with matching across snapshots, market-prospect ratios and fork-metadata
statistics layered on top.  Each stage is usable on its own; the cli module
wires them together behind file formats that round-trip.
"""

from .corpus import (
    CoinMeta,
    CorpusSnapshot,
    FilterConfig,
    RepoDocument,
    filter_file,
    load_snapshot,
    normalize_text,
)
from .forkgraph import (
    FetchError,
    ForkStats,
    RateLimited,
    RepoMeta,
    RepoNotFound,
    fetch_repo_meta,
    fork_stats,
    language_time_stats,
    leaderboard,
    load_repo_meta,
    meta_from_api_json,
    write_forkstats_csv,
)
from .matcher import MatchReport, TreeMatch, match_pedigrees, prune, write_matches_csv
from .pedigree import (
    BROTHER,
    FATHER,
    ROOT,
    Family,
    PedigreeConfig,
    PedigreeForest,
    PedigreeNode,
    build_forest,
    family_first_release,
    family_sizes,
    forest_to_dot,
    read_forest_json,
    write_forest_json,
)
from .prospects import (
    Cohort,
    MarketSeries,
    ProspectReport,
    alive_at,
    cap_at,
    cohort_with_code,
    cohort_without_code,
    family_prospects,
    load_market_json,
    mccr,
    ncr,
    partition_by_similarity,
    prospect_report,
    write_prospects_csv,
)
from .simmatrix import (
    MaxPrior,
    SimilarityMatrix,
    build_matrix,
    coin_similarity,
    max_prior_similarity,
    read_matrix_csv,
    repo_similarity,
    similarity_histogram,
    write_matrix_csv,
    write_maxprior_csv,
)
from .tiling import DocumentIndex, Tile, TilingResult, rkr_gst, rkr_gst_indexed, tiling_oracle

__version__ = "0.1.0"

__all__ = [
    "BROTHER",
    "CoinMeta",
    "Cohort",
    "CorpusSnapshot",
    "DocumentIndex",
    "FATHER",
    "Family",
    "FetchError",
    "FilterConfig",
    "ForkStats",
    "MarketSeries",
    "MatchReport",
    "MaxPrior",
    "PedigreeConfig",
    "PedigreeForest",
    "PedigreeNode",
    "ProspectReport",
    "ROOT",
    "RateLimited",
    "RepoDocument",
    "RepoMeta",
    "RepoNotFound",
    "SimilarityMatrix",
    "Tile",
    "TilingResult",
    "TreeMatch",
    "alive_at",
    "build_forest",
    "build_matrix",
    "cap_at",
    "cohort_with_code",
    "cohort_without_code",
    "coin_similarity",
    "family_first_release",
    "family_prospects",
    "family_sizes",
    "fetch_repo_meta",
    "filter_file",
    "forest_to_dot",
    "fork_stats",
    "language_time_stats",
    "leaderboard",
    "load_market_json",
    "load_repo_meta",
    "load_snapshot",
    "match_pedigrees",
    "max_prior_similarity",
    "mccr",
    "meta_from_api_json",
    "ncr",
    "normalize_text",
    "partition_by_similarity",
    "prospect_report",
    "prune",
    "read_forest_json",
    "read_matrix_csv",
    "repo_similarity",
    "rkr_gst",
    "rkr_gst_indexed",
    "similarity_histogram",
    "tiling_oracle",
    "write_forest_json",
    "write_forkstats_csv",
    "write_matches_csv",
    "write_matrix_csv",
    "write_maxprior_csv",
    "write_prospects_csv",
    "__version__",
]
