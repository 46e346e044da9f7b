"""Shared fixtures.  The end-to-end report (both pipelines, about 80 s) runs
once per session; module and acceptance tests read its artifacts."""
import numpy as np
import pytest

from acwave import cli
from acwave import levelset as L
from acwave import solver2d as S
from acwave.potentials import make_potential


@pytest.fixture(scope="session")
def quartic():
    return make_potential("quartic")


@pytest.fixture(scope="session")
def tilted():
    return make_potential("tilted-quartic", a=0.3)


@pytest.fixture(scope="session")
def report(tmp_path_factory):
    out = tmp_path_factory.mktemp("report")
    cfg = dict(cli.DEFAULTS)
    cfg["report.pipeline"] = "both"
    summary = cli.full_report(cfg, out)
    return out, summary


@pytest.fixture(scope="session")
def balanced(report, quartic):
    """Converged balanced field (recentered) with its level-set tables."""
    out, summary = report
    raw = S.Field2D.from_csv(out / "balanced_field.csv", quartic)
    f, _, _ = S.recenter(raw)
    cv = L.extract_level(f, 0.0)
    return {"raw": raw, "field": f, "curve": cv,
            "k1": L.branch_tables(cv, "k1-of-y"), "k2": L.branch_tables(cv, "k2-of-y"),
            "summary": summary["balanced"]}


@pytest.fixture(scope="session")
def vshape(report, tilted):
    out, summary = report
    raw = S.Field2D.from_csv(out / "vshape_field.csv", tilted)
    f, _, _ = S.recenter(raw)
    return {"raw": raw, "field": f, "summary": summary["unbalanced"]}


def grid_field(u, x, y, c=0.0, P=None):
    return S.Field2D(np.asarray(u, float), float(x[1] - x[0]), float(y[1] - y[0]),
                     float(x[0]), float(y[0]), c, P)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
