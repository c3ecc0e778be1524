import numpy as np
import pytest

from bgw import BgwParams, BivariateSample, RngHandle, sample_n
from bgw.data import nfl_path


@pytest.fixture(scope="session")
def big_sample_half():
    """10^6 pairs at (1, 1, 1, 0.5); the workhorse Monte Carlo fixture.

    Because the construction is a coordinate-wise minimum of Weibull draws,
    monotone transforms give exact samples of related parameter vectors:
    sqrt of the coordinates is a (2, 1, 1, 0.5) sample, and scaling x by
    c**(-1/a) rescales b1 by c.  Tests reuse this one draw accordingly.
    """
    return sample_n(BgwParams(1.0, 1.0, 1.0, 0.5), 10**6, RngHandle(20240817))


@pytest.fixture(scope="session")
def medium_sample():
    """10^5 pairs at (2, 1.5, 1.5, 0.5): KS-sized fixture."""
    return sample_n(BgwParams(2.0, 1.5, 1.5, 0.5), 10**5, RngHandle(515))


@pytest.fixture(scope="session")
def football():
    """The bundled NFL scoring-times data (42 pairs)."""
    return BivariateSample.from_csv(nfl_path())


def gauss_grid(n, lo=0.0, hi=1.0):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0) * (hi - lo) + lo, 0.5 * (hi - lo) * w
