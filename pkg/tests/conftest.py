import math

import numpy as np
import pytest

from unseenbound import SeededStream


@pytest.fixture
def stream():
    return SeededStream(master_seed=20240601, stream_index=0)


def three_se(p: float, n: int) -> float:
    """Three binomial standard errors for a frequency estimated from n trials."""
    return 3.0 * math.sqrt(max(p * (1.0 - p), 1e-12) / n)


def mc_frequency(indicator: np.ndarray) -> float:
    return float(np.asarray(indicator, dtype=float).mean())
