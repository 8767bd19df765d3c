"""Fixed quadrature conventions and physical constants.

Quadratures are ordered ``(x1, p1, x2, p2, ...)`` with ``[x, p] = i``, so the
vacuum variance is 1/2 and a thermal mode with mean occupation ``n`` has
variance ``1/2 + n``. Entropies are in nats and work is reported in units of
``k_B T``.
"""

import numpy as np

VACUUM_VARIANCE = 0.5

# SI defining constants (identical in CODATA 2018 and later adjustments).
PLANCK = 6.62607015e-34
HBAR = PLANCK / (2.0 * np.pi)
BOLTZMANN = 1.380649e-23

# Absolute slack on the bound nu >= 1/2, before conditioning-dependent slack.
SYMPLECTIC_ATOL = 1e-9
SYMMETRY_RTOL = 1e-12

# Prefactor on the measurement-feedback displacement. Textbook Gaussian
# conditioning uses 1.0; the default follows the work-extraction protocol.
DISPLACEMENT_PREFACTOR = 0.5

RNG_ALGORITHM = "numpy.random.PCG64"


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return the ``2N x 2N`` symplectic form for the interleaved ordering."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))
