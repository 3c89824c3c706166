import math

import numpy as np
import pytest

from vlcomp.rates import C_RATE, LinkBudget


def make_budget(h1=0.4, h2=0.3, c_gamma=10.0, bandwidth=20e6):
    """Synthetic link budget with relative weak-UE gains of order 0.1-1."""
    return LinkBudget(gamma_rx=c_gamma / C_RATE, h_eff=np.array([h1, h2]),
                      norm_scale=1e-5, sigma_s2=0.1116, noise_power=2e-14,
                      vlc_bandwidth=bandwidth, p_elec=1e-2,
                      responsivity=0.58, conversion_efficiency=0.6)


def random_budget(rng, cg_lo=0.5, cg_hi=50.0, h_lo=0.05, h_hi=1.5):
    cg = math.exp(rng.uniform(math.log(cg_lo), math.log(cg_hi)))
    h = rng.uniform(h_lo, h_hi, size=2)
    return make_budget(h[0], h[1], cg)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
