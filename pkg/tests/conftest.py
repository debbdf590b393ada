import numpy as np
import pytest

from xorq import games
from xorq.linalg import hermitian_part, trace_norm


def random_game(n: int, seed: int) -> games.GameMatrix:
    """Random Hermitian game matrix normalized to trace norm 1."""
    rng = np.random.default_rng(seed)
    m = hermitian_part(
        rng.standard_normal((n * n, n * n)) + 1j * rng.standard_normal((n * n, n * n))
    )
    return games.validate(m / trace_norm(m), n)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240902)
