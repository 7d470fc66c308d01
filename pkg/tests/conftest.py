import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_direction(rng, n):
    """Uniform direction on the sphere; zero components have probability zero."""
    u = rng.standard_normal(n)
    return u / np.linalg.norm(u)


def gram_schmidt_q(m):
    """Orthonormal factor of ``m`` by classical Gram-Schmidt (positive R diagonal by construction)."""
    m = np.asarray(m, dtype=float)
    q = np.zeros_like(m)
    for j in range(m.shape[1]):
        v = m[:, j].copy()
        for i in range(j):
            v -= (q[:, i] @ m[:, j]) * q[:, i]
        q[:, j] = v / np.linalg.norm(v)
    return q


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for text in RESULTS:
            terminalreporter.write_line(text)
