import numpy as np
import pytest

from gldlm import GldParams
from gldlm.core import shape_pair_valid


def draw_shape_pair(rng: np.random.Generator, region: int, lo: float = -0.9) -> tuple[float, float]:
    """One random shape pair from the given region with exponents > lo."""
    while True:
        if region == 3:
            l3 = float(np.exp(rng.uniform(np.log(0.02), np.log(30.0))))
            l4 = float(np.exp(rng.uniform(np.log(0.02), np.log(30.0))))
        elif region == 4:
            l3 = float(rng.uniform(lo, -0.02))
            l4 = float(rng.uniform(lo, -0.02))
        elif region == 5:
            l3 = float(rng.uniform(lo, -0.1))
            l4 = float(np.exp(rng.uniform(np.log(1.5), np.log(60.0))))
        elif region == 6:
            l4 = float(rng.uniform(lo, -0.1))
            l3 = float(np.exp(rng.uniform(np.log(1.5), np.log(60.0))))
        else:
            raise ValueError(region)
        if shape_pair_valid(l3, l4):
            return l3, l4


def draw_params(rng: np.random.Generator, region: int, lo: float = -0.9) -> GldParams:
    """Random valid parameter vector from the given region."""
    l3, l4 = draw_shape_pair(rng, region, lo)
    sign = 1.0 if region == 3 else -1.0
    lam2 = sign * float(rng.uniform(0.2, 2.0))
    lam1 = float(rng.uniform(-2.0, 2.0))
    return GldParams(lam1, lam2, l3, l4)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20250810)
