import json
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
sys.path.insert(0, str(HERE))

from kblink.index import IndexBundle, build_index_from_files  # noqa: E402
from kblink.ingest import IngestConfig  # noqa: E402
from kblink.linker import Linker  # noqa: E402

DBR = "http://dbpedia.org/resource/"


@pytest.fixture(scope="session")
def mini_kb_path():
    return FIXTURES / "mini_kb.nt"


@pytest.fixture(scope="session")
def mini_index(mini_kb_path) -> IndexBundle:
    bundle, _ = build_index_from_files(
        [mini_kb_path], IngestConfig.default(), FIXTURES / "mini_acronyms.tsv"
    )
    return bundle


@pytest.fixture(scope="session")
def mini_index_dir(mini_index, tmp_path_factory):
    out = tmp_path_factory.mktemp("mini_index")
    mini_index.save(out)
    return out


@pytest.fixture(scope="session")
def mini_linker(mini_index) -> Linker:
    return Linker(mini_index)


@pytest.fixture(scope="session")
def family_request():
    return json.loads((FIXTURES / "family_document.jsonl").read_text().splitlines()[0])


# (criterion, verdict, detail) rows filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
