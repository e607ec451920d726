import pytest

from qnatural import QContext
from qnatural.verify import SweepConfig, audit_sweep


def rel(a: float, b: float) -> float:
    denom = max(abs(a), abs(b))
    if denom <= 1e-6:
        return abs(a - b)
    return abs(a - b) / denom


@pytest.fixture
def ctx():
    """Default-precision context at q = 1/2."""
    return QContext(q=0.5)


@pytest.fixture
def tight_ctx():
    """High-precision context used wherever tolerances are 1e-10 or finer."""
    return QContext(q=0.5, rel_tol=1e-13, max_terms=1200)


def tight(q: float) -> QContext:
    return QContext(q=q, rel_tol=1e-12, max_terms=900)


@pytest.fixture(scope="session")
def default_sweep():
    """The full default audit sweep, shared across test modules."""
    return audit_sweep(SweepConfig())
