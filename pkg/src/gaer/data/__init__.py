"""Bundled illustrative global large-cap snapshot (49 assets).

``table1.csv`` transcribes the published table verbatim, including its
display-rounded ``w`` column and the checkmarked ``core`` column. Both are
advisory: the parser ignores ``w`` and returns ``core`` separately.
"""

from datetime import date
from importlib import resources

from ..ingest import ParsedSnapshot, SnapshotFileSpec, parse_snapshot

# the table is undated; this stand-in date only orders it within series
ILLUSTRATIVE_DATE = date(2025, 1, 1)
LABEL = "global large-cap (illustrative)"


def table1_bytes() -> bytes:
    return resources.files(__name__).joinpath("table1.csv").read_bytes()


def load_table1(as_of: date = ILLUSTRATIVE_DATE) -> ParsedSnapshot:
    return parse_snapshot(
        table1_bytes(),
        SnapshotFileSpec(expects_core_column=True),
        as_of=as_of,
        label=LABEL,
    )
