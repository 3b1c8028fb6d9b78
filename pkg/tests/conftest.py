from pathlib import Path

import pytest

from deltablocks.cli import load_workspace
from deltablocks.dsl import parse_library

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures" / "braking"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def workspace():
    return load_workspace(FIXTURES / "models", FIXTURES / "deltas", FIXTURES / "products.dbp")


@pytest.fixture(scope="session")
def core(workspace):
    return workspace.models


@pytest.fixture(scope="session")
def deltas(workspace):
    return workspace.deltas


@pytest.fixture(scope="session")
def products(workspace):
    return {p.name: p for p in workspace.products}


@pytest.fixture
def lib_with_subsystem():
    return parse_library("""
        model Top {
            in a
            out b
            subsystem S {
                in x
                out y
                connect x -> y
            }
            mref r : Leaf
            connect a -> S.x
            connect S.y -> b
        }
        model Leaf {
            in p
            out q
        }
    """)


# one line per acceptance criterion, filled in by test_acceptance and printed at the end of the run
ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=int):
        terminalreporter.write_line(ACCEPTANCE[key])
