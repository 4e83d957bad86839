import os
import tempfile

import numpy as np
import pytest

# boundary curves are traced once per session into a private cache
os.environ.setdefault("QUARTIC_CACHE_DIR", tempfile.mkdtemp(prefix="quartic-cache-"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_sigmas(rng, n, box=4.0):
    return [complex(*rng.uniform(-box, box, 2)) for _ in range(n)]
