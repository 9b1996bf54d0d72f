import numpy as np
import pytest

import radonkit as rk


@pytest.fixture(scope="session")
def crescent():
    return rk.builtin("crescent")


@pytest.fixture(scope="session")
def crescent_sinogram(crescent):
    samples = rk.parallel_beam_samples(18, 20, 0.05)
    return rk.sample(crescent, samples)


def probe_pairs():
    """Mixed probe set: same-angle pairs with distinct offsets plus
    different-angle pairs (25 pairs total)."""
    angles = [0.0, 0.0, np.pi / 4, np.pi / 4, np.pi / 2]
    offs = [-0.3, 0.25, -0.3, 0.45, 0.0]
    return [
        (rk.LineParam(offs[i], angles[i]), rk.LineParam(offs[j], angles[j]))
        for i in range(5)
        for j in range(5)
    ]
