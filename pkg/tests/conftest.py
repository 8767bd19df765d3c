import numpy as np
import pytest
from hypothesis import strategies as st

from cvwork.states import ChannelParams, TmsParams

OMEGA2 = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def brute_symplectic(cov):
    """Symplectic eigenvalues via the squared route sqrt(eig(-(Omega sigma)^2))."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    om = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    m = om @ cov
    ev = np.sort(np.sqrt(np.abs(np.linalg.eigvals(-m @ m).real)))
    return ev[0::2]


def random_params(rng, n_draws, r_max=5.0, n_max=1e4):
    """Uniform r, log-uniform occupations (with exact zeros mixed in), uniform eta."""
    out = []
    for _ in range(n_draws):
        r = rng.uniform(0, r_max)
        n_th = 0.0 if rng.random() < 0.1 else 10 ** rng.uniform(-3, np.log10(n_max))
        n_ch = 0.0 if rng.random() < 0.1 else 10 ** rng.uniform(-3, np.log10(n_max))
        eta = rng.uniform(0, 1)
        out.append((TmsParams(r, n_th), ChannelParams(eta, n_ch)))
    return out


squeezing = st.floats(0.0, 5.0)
occupation = st.one_of(st.just(0.0), st.floats(1e-3, 1e4))
transmissivity = st.floats(0.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
