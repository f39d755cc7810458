import json
import warnings
from pathlib import Path

import numpy as np
import pytest

from g3agm.agm_step import agm_step
from g3agm.configuration import extract_configuration
from g3agm.forms import HomogeneousForm
from g3agm.numkernel import ToleranceProfile
from g3agm.quartic_theta import FlagSpec, Quartic, alpha_class, bitangents, classify_pairs
from g3agm.serialization import decode_form

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
DATA = Path(__file__).resolve().parent / "data"
DEFAULT_FLAG = FlagSpec.parse("pair=1,2;partition=3-4,5-6")


def load_fixture(name):
    doc = json.loads((FIXTURES / name).read_text())
    return Quartic(decode_form(doc["quartic"])), tuple(doc["alpha"]["pair"])


def random_quartic(seed):
    rng = np.random.default_rng(seed)
    return Quartic(HomogeneousForm(4, 3, rng.uniform(-1, 1, 15)))


@pytest.fixture(scope="session")
def profile():
    return ToleranceProfile()


@pytest.fixture(scope="session")
def trott():
    return load_fixture("trott.json")


@pytest.fixture(scope="session")
def trott_bitangents(trott, profile):
    return bitangents(trott[0], profile)


@pytest.fixture(scope="session")
def generic():
    return load_fixture("fixture.json")


@pytest.fixture(scope="session")
def generic_bitangents(generic, profile):
    return bitangents(generic[0], profile)


@pytest.fixture(scope="session")
def class_table(generic_bitangents, profile):
    return classify_pairs(generic_bitangents, profile)


@pytest.fixture(scope="session")
def generic_class(generic, generic_bitangents, profile):
    return alpha_class(generic_bitangents, generic[1], profile)


@pytest.fixture(scope="session")
def config(generic, generic_class, generic_bitangents, profile):
    return extract_configuration(generic[0], generic_class, generic_bitangents, profile)


@pytest.fixture(scope="session")
def step(config, profile):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        return agm_step(config, DEFAULT_FLAG, profile)


# acceptance criteria register here and are listed after the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: int(k.split(".")[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
