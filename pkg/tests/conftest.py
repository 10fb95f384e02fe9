import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cmcompare.cli import ScanConfig, ells, iter_fields  # noqa: E402
from cmcompare.cmfield import FieldRejected, build_cm_field, check_assumptions  # noqa: E402

CORPUS_CFG = ScanConfig(d_max=41, coeff_max=40, ell_max=50)


def load_corpus(cfg=CORPUS_CFG):
    built, passing = [], []
    for D, a2, b2 in iter_fields(cfg):
        try:
            f = build_cm_field(D, a2, b2)
        except FieldRejected:
            continue
        built.append(f)
        if check_assumptions(f).passed:
            passing.append(f)
    return built, passing


@pytest.fixture(scope="session")
def corpus():
    """Assumption-passing fields of the acceptance box."""
    return load_corpus()[1]


@pytest.fixture(scope="session")
def corpus_ells():
    return ells(CORPUS_CFG.ell_max)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
