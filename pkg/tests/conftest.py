import json
from importlib import resources

import pytest

from imsetlab.cone_faces import Cone, face_lattice
from imsetlab.imset_core import build_matrix
from imsetlab.toric_bases import graver_basis, markov_basis

# criterion number -> (title, passed, failed sub-checks); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool, list[str]]] = {}


@pytest.fixture(scope="session")
def A3():
    return build_matrix(3)


@pytest.fixture(scope="session")
def A4():
    return build_matrix(4)


@pytest.fixture(scope="session")
def markov3(A3):
    return markov_basis(A3)


@pytest.fixture(scope="session")
def graver3(A3):
    return graver_basis(A3)


@pytest.fixture(scope="session")
def markov4(A4):
    return markov_basis(A4)


@pytest.fixture(scope="session")
def graver4(A4):
    return graver_basis(A4, budget=3600)


@pytest.fixture(scope="session")
def cone3(A3):
    return Cone(A3)


@pytest.fixture(scope="session")
def cone4(A4):
    return Cone(A4)


@pytest.fixture(scope="session")
def lattice3(cone3):
    return face_lattice(cone3)


@pytest.fixture(scope="session")
def lattice4(cone4):
    return face_lattice(cone4)


def load_schema(name):
    path = resources.files("imsetlab") / "data" / "schemas" / f"{name}.json"
    return json.loads(path.read_text(encoding="utf-8"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, failed = ACCEPTANCE[k]
        line = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        if failed:
            line += "  [failed: " + "; ".join(failed) + "]"
        tr.write_line(line)
    passed = sum(1 for _, ok, _ in ACCEPTANCE.values() if ok)
    tr.write_line(f"{passed}/{len(ACCEPTANCE)} criteria pass")
