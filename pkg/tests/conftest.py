import itertools
import math

import numpy as np
import pytest


def exponent(**powers):
    """Exponent vector over (l0, l0*, l1, l1*, l2, l2*) from keywords like l0=1, l1c=1."""
    names = ("l0", "l0c", "l1", "l1c", "l2", "l2c")
    return tuple(powers.get(n, 0) for n in names)


def dense_state(amplitudes: dict, cutoff: int) -> np.ndarray:
    psi = np.zeros((cutoff,) * 3, complex)
    for occ, amp in amplitudes.items():
        psi[occ] = amp
    return psi


def number_moments_from_vector(psi: np.ndarray):
    """Brute-force <n_j>, <n_j n_k> straight from a dense amplitude cube."""
    prob = np.abs(psi) ** 2
    d = psi.shape[0]
    n = np.arange(d)
    grids = np.meshgrid(n, n, n, indexing="ij")
    mean = [float((prob * g).sum()) for g in grids]
    second = [[float((prob * a * b).sum()) for b in grids] for a in grids]
    return mean, second


@pytest.fixture
def w1_vector():
    s = 1 / math.sqrt(3)
    return dense_state({(1, 0, 0): s, (0, 1, 0): s, (0, 0, 1): s}, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for result in RESULTS:
            terminalreporter.write_line(result.line())
