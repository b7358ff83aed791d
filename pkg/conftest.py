# conftest.py
# Общие фикстуры: контексты q, сетки, корпус функций.
import pytest

from services.convergence import Grid
from services.functions import corpus
from services.qcalc import QContext


@pytest.fixture
def make_ctx():
    def make(q: float) -> QContext:
        return QContext(q=q)
    return make


@pytest.fixture
def grid():
    return Grid(0.0, 5.0, 501)


@pytest.fixture
def small_grid():
    return Grid(0.0, 2.0, 41)


@pytest.fixture
def functions():
    return corpus()


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("DATABASE_URL", "STANCU_N_LADDER", "STANCU_Q_VALUES", "STANCU_MOMENT_TOL"):
        monkeypatch.delenv(name, raising=False)
