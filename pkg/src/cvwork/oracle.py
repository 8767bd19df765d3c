"""Monte Carlo oracle: sample phase-space points from a Gaussian state's Wigner
distribution and estimate correlations and moments empirically.

Every state here is Gaussian with a nonnegative Wigner function, so sampling
it as a classical normal reproduces symmetrized moments exactly. Estimators
return a value together with its standard error; nothing here calls the
analytic code paths it is meant to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from cvwork.conventions import RNG_ALGORITHM
from cvwork.errors import DimensionError, NumericError
from cvwork.symplectic import GaussianState

# column layout of a two-mode batch
X_I, P_I, X_R, P_R = range(4)


class Estimate(NamedTuple):
    value: float
    stderr: float

    def within(self, target: float, n_se: float = 3.0) -> bool:
        return abs(self.value - target) <= n_se * self.stderr


@dataclass(frozen=True, eq=False)
class SampleBatch:
    samples: np.ndarray
    seed: int
    rng: str = RNG_ALGORITHM

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]


def sample(state: GaussianState, n: int, seed: int) -> SampleBatch:
    """Draw ``n`` phase-space points from ``N(mean, cov)`` via Cholesky.

    Deterministic for a given ``(state, n, seed)``.
    """
    if n < 2:
        raise DimensionError(f"need at least 2 samples, got {n}")
    try:
        chol = np.linalg.cholesky(state.cov.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericError("covariance matrix has no Cholesky factor") from exc
    rng = np.random.Generator(np.random.PCG64(seed))
    z = rng.standard_normal((n, chol.shape[0]))
    pts = z @ chol.T + state.mean
    pts.setflags(write=False)
    return SampleBatch(pts, seed)


def _two_mode(batch: SampleBatch) -> np.ndarray:
    s = batch.samples
    if s.shape[1] != 4:
        raise DimensionError(f"expected a 2-mode batch, got {s.shape[1]} columns")
    return s


def empirical_cov(batch: SampleBatch) -> np.ndarray:
    return np.cov(batch.samples, rowvar=False)


def empirical_rho(batch: SampleBatch) -> Estimate:
    """Pearson correlation of ``(x_I, x_R)`` with a Fisher-transform standard error."""
    s = _two_mode(batch)
    xi, xr = s[:, X_I], s[:, X_R]
    if np.var(xi) == 0 or np.var(xr) == 0:
        raise NumericError("degenerate batch: zero variance")
    rho = float(np.corrcoef(xi, xr)[0, 1])
    # delta-method SE of rho from the Fisher z standard error 1/sqrt(n-3)
    se = (1.0 - rho * rho) / math.sqrt(batch.n_samples - 3)
    return Estimate(rho, se)


def empirical_conditional_variance(batch: SampleBatch, quadrature: str = "x") -> Estimate:
    """Residual variance of the idler quadrature after regressing on the
    same quadrature of the returned mode."""
    s = _two_mode(batch)
    if quadrature == "x":
        y, u = s[:, X_I], s[:, X_R]
    elif quadrature == "p":
        y, u = s[:, P_I], s[:, P_R]
    else:
        raise DimensionError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    n = batch.n_samples
    y = y - y.mean()
    u = u - u.mean()
    suu = u @ u
    if suu == 0:
        raise NumericError("degenerate batch: zero regressor variance")
    resid = y - (u @ y / suu) * u
    var = float(resid @ resid / (n - 2))
    return Estimate(var, var * math.sqrt(2.0 / (n - 2)))


class ReceiverMoments(NamedTuple):
    mean: Estimate
    variance: Estimate


def empirical_receiver_moments(batch: SampleBatch) -> ReceiverMoments:
    """Sample mean and variance of ``x_R x_I - p_R p_I``.

    These are phase-space (symmetrized) moments; compare them to the Wigner
    variance, not the operator variance.
    """
    s = _two_mode(batch)
    o = s[:, X_R] * s[:, X_I] - s[:, P_R] * s[:, P_I]
    n = batch.n_samples
    mean = float(o.mean())
    dev = o - mean
    m2 = float(dev @ dev / n)
    m4 = float(np.mean(dev**4))
    var = m2 * n / (n - 1)
    return ReceiverMoments(
        Estimate(mean, math.sqrt(var / n)),
        Estimate(var, math.sqrt(max(m4 - m2 * m2, 0.0) / n)),
    )
