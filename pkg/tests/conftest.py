import re
from pathlib import Path

import pytest

from segbias.corpus import load_corpus
from segbias.segmenters import train

DATA = Path(__file__).parent / "data"

# small enough to keep the suite fast, large enough to exercise pruning and caps
FIXTURE_PARAMS = {
    "char": {},
    "bpe": {"num_merges": 500},
    "unigram": {"target_vocab": 500},
    "morfessor": {},
    "lmvr": {"cap": 500},
}


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def synthetic_corpus():
    return load_corpus(DATA / "synthetic_corpus.txt")


@pytest.fixture(scope="session")
def trained_models(synthetic_corpus):
    return {m: train(m, synthetic_corpus, **p) for m, p in FIXTURE_PARAMS.items()}


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", getattr(rep, "nodeid", ""))
            if m and (rep.when == "call" or outcome == "error"):
                rows.append((int(m.group(1)), m.group(2), "PASS" if outcome == "passed" else "FAIL"))
    if rows:
        terminalreporter.section("acceptance criteria")
        for num, name, verdict in sorted(rows):
            terminalreporter.write_line(f"criterion {num:2d} {name:<32} {verdict}")
