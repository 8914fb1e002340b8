import random
import sys
from datetime import date
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gaer import AssetRecord, CoreSelectionRule, UniverseSnapshot  # noqa: E402
from gaer.data import load_table1, table1_bytes  # noqa: E402


@pytest.fixture(scope="session")
def table1():
    return load_table1()


@pytest.fixture(scope="session")
def table1_snapshot(table1):
    return table1.snapshot


@pytest.fixture(scope="session")
def printed_table():
    """Printed w and core columns of the published table, read with csv only."""
    import csv
    import io

    rows = list(csv.DictReader(io.StringIO(table1_bytes().decode())))
    return {r["ticker"]: (float(r["w"]), r["core"] == "1") for r in rows}


def random_snapshot(rng: random.Random, n: int, as_of=date(2024, 1, 1), prefix="T", zero_prob=0.1):
    """Valid snapshot with heavy-tailed caps and occasional exact zeros and ties."""
    assets = []
    for k in range(n):
        mc = round(rng.lognormvariate(4, 1.5), rng.choice([0, 1, 3, 8]))
        g = rng.random() if rng.random() > zero_prob else rng.choice([0.0, 1.0])
        i = rng.random() if rng.random() > zero_prob else rng.choice([0.0, 1.0])
        adv = None if rng.random() < 0.2 else rng.expovariate(1.0)
        assets.append(AssetRecord(f"{prefix}{k}", rng.choice(["US", "EU", "CN"]), mc, g, i, adv))
    return UniverseSnapshot(as_of, tuple(assets), label="random")


def random_rule(rng: random.Random, snapshot):
    kind = rng.choice(["cumulative", "explicit", "predicate"])
    if kind == "cumulative":
        return CoreSelectionRule.cumulative(rng.choice([1.0, rng.uniform(1e-3, 1.0)]))
    if kind == "explicit":
        return CoreSelectionRule.explicit(t for t in snapshot.tickers if rng.random() < 0.4)
    return CoreSelectionRule.where(min_g=rng.random(), min_i=rng.choice([None, rng.random()]))


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    if call.when == "call":
        item._call_outcome = outcome.get_result().outcome


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in RESULTS:
        terminalreporter.write_line(f"{status}  {label}")
