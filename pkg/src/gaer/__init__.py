"""Geopolitical-adaptive efficiency ratio (GAER) diagnostics.

GAER is the share of total ``market_cap * G * I`` mass held by a core subset
of an investable universe. It is a descriptive state variable for conditioning
a universe, not a return signal.
"""

from .core_selection import CoreSelection, CoreSelectionRule, PredicateSpec, RuleError, select_core
from .engine import AssetContribution, DegenerateUniverseError, GaerResult, compute_gaer, contributions
from .ingest import ParseError, ParsedSnapshot, SnapshotFileSpec, load_snapshot, parse_snapshot, write_snapshot
from .normalization import NormalizationError, NormalizationScheme, is_normalized, normalize
from .sensitivity import (
    LeaveOneOut,
    PerturbationReport,
    ThresholdSweep,
    leave_one_out,
    perturb_embedding,
    threshold_sweep,
)
from .series import (
    ScenarioShock,
    SeriesDecomposition,
    SeriesPoint,
    apply_shock,
    build_series,
    decompose_change,
)
from .universe import (
    AssetRecord,
    DataError,
    GaerError,
    UniverseSnapshot,
    ValidationError,
    Violation,
    Weight,
    asset_weight,
    filter_min_adv,
    validate_snapshot,
)

__version__ = "0.1.0"
