"""Quantum-illumination SNR and QKD correlation coefficients.

Each quantity exists twice: as the quoted closed form and as a
first-principles evaluation on the covariance matrix, so the two can be
compared point by point.

The QI receiver observable is the phase-sensitive cross-correlator
``O = x_R x_I - p_R p_I = a_R a_I + h.c.``. The plain intensity difference of
the 50/50 beam-splitter outputs, ``x_R x_I + p_R p_I``, has zero mean on any
state whose cross block is ``diag(c, -c)``, see :func:`beam_splitter_intensity_difference`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from cvwork.conventions import VACUUM_VARIANCE, symplectic_form
from cvwork.errors import DomainError, NumericError, ValidationError
from cvwork.states import (
    ChannelParams,
    TmsParams,
    TwoModeState,
    apply_channel,
    beam_splitter_symplectic,
    make_tmsts,
    null_hypothesis_state,
)
from cvwork.symplectic import validate

# x_R x_I - p_R p_I in the (x_I, p_I, x_R, p_R) ordering
RECEIVER_FORM = np.array(
    [
        [0.0, 0.0, 0.5, 0.0],
        [0.0, 0.0, 0.0, -0.5],
        [0.5, 0.0, 0.0, 0.0],
        [0.0, -0.5, 0.0, 0.0],
    ]
)


@dataclass(frozen=True)
class SnrResult:
    signal_gap: float
    noise_h1: float
    noise_h0: float
    snr: float

    def m_copies_snr(self, m: int) -> float:
        """SNR of ``m`` independent copies (central-limit scaling)."""
        if m < 1:
            raise DomainError(f"number of copies must be >= 1, got {m}")
        return self.snr * m


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    numerator: float
    var_i: float
    var_r: float


def snr_from_moments(gap: float, noise_h1: float, noise_h0: float) -> float:
    """``4 gap^2 / (sqrt(N1) + sqrt(N0))^2``."""
    denom = (math.sqrt(noise_h1) + math.sqrt(noise_h0)) ** 2
    if denom == 0.0:
        return 0.0 if gap == 0.0 else math.inf
    return 4.0 * gap * gap / denom


def qi_snr_closed_thermal(r: float, eta: float) -> float:
    """Matched-noise squeezed-thermal QI SNR scaling ``eta sinh^2 2r``."""
    return eta * math.sinh(2.0 * r) ** 2


def qi_snr_closed_vacuum(r: float, eta: float, n: float) -> float:
    """Squeezed-vacuum QI SNR scaling ``eta sinh^2 2r / n`` (valid for n >> 1)."""
    if n <= 0:
        raise DomainError("vacuum SNR scaling needs a positive background occupation")
    return eta * math.sinh(2.0 * r) ** 2 / n


def qi_signal_gap_literal(r: float, eta: float, n: float) -> float:
    """Quoted mean-intensity gap ``eta sinh 2r (1/2 + n)``."""
    return eta * math.sinh(2.0 * r) * (VACUUM_VARIANCE + n)


def gaussian_fourth_moment(mean, cov, i: int, j: int, k: int, l: int) -> float:
    """``E[z_i z_j z_k z_l]`` for a Gaussian vector, by Isserlis' theorem."""
    mu = np.asarray(mean, dtype=float)
    v = np.asarray(cov, dtype=float)
    idx = (i, j, k, l)
    total = v[i, j] * v[k, l] + v[i, k] * v[j, l] + v[i, l] * v[j, k]
    # one covariance pair times the means of the other two
    for p, q in itertools.combinations(range(4), 2):
        rest = [idx[t] for t in range(4) if t not in (p, q)]
        total += v[idx[p], idx[q]] * mu[rest[0]] * mu[rest[1]]
    return total + mu[i] * mu[j] * mu[k] * mu[l]


def quadratic_form_moments(form, mean, cov) -> tuple[float, float, float]:
    """Mean and variance of ``O = z^T Q z`` on a Gaussian state.

    ``cov`` holds symmetrized moments, so the Isserlis expansion gives the
    phase-space (Wigner) variance. The operator variance differs by the
    second-order Moyal term ``-(1/8) sum Om_ab Om_cd H_ac H_bd`` with
    ``H = Q + Q^T``; the mean needs no correction for symmetric ``Q``.

    Returns:
        tuple: ``(mean, wigner_variance, operator_variance)``.
    """
    q = np.asarray(form, dtype=float)
    mu = np.asarray(mean, dtype=float)
    v = np.asarray(cov, dtype=float)
    dim = q.shape[0]
    first = float(np.sum(q * (v + np.outer(mu, mu))))
    second = 0.0
    nz = [(a, b) for a in range(dim) for b in range(dim) if q[a, b] != 0.0]
    for a, b in nz:
        for c, d in nz:
            second += q[a, b] * q[c, d] * gaussian_fourth_moment(mu, v, a, b, c, d)
    wigner_var = float(second - first * first)
    h = q + q.T
    om = symplectic_form(dim // 2)
    moyal = float(np.einsum("ab,cd,ac,bd->", om, om, h, h))
    return first, wigner_var, wigner_var - moyal / 8.0


def receiver_moments(s: TwoModeState) -> tuple[float, float, float]:
    """``(mean, wigner_variance, operator_variance)`` of the QI receiver observable."""
    report = validate(s.cov)
    if not report.passed:
        raise ValidationError("invalid state: " + ", ".join(report.failures()))
    return quadratic_form_moments(RECEIVER_FORM, s.mean, s.cov.entries)


def qi_intensity_moments(s_h1: TwoModeState, s_h0: TwoModeState) -> SnrResult:
    """QI SNR from receiver moments under target-present and target-absent states."""
    m1, _, n1 = receiver_moments(s_h1)
    m0, _, n0 = receiver_moments(s_h0)
    gap = m1 - m0
    return SnrResult(gap, n1, n0, snr_from_moments(gap, n1, n0))


def qi_hypotheses(p: TmsParams, ch: ChannelParams) -> tuple[TwoModeState, TwoModeState]:
    """Target-present (channel output) and target-absent (idler x thermal) states."""
    src = make_tmsts(p)
    return apply_channel(src, ch), null_hypothesis_state(src, ch)


def _occupation(cov: np.ndarray, mean: np.ndarray, mode: int) -> float:
    blk = cov[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2]
    mu = mean[2 * mode : 2 * mode + 2]
    return 0.5 * (blk[0, 0] + blk[1, 1] + mu @ mu) - VACUUM_VARIANCE


def mean_occupation(s: TwoModeState, mode) -> float:
    """``<a^dag a> = (<x^2> + <p^2>)/2 - 1/2`` including the displacement."""
    return _occupation(s.cov.entries, s.mean, s.mode_index(mode))


def beam_splitter_intensity_difference(s: TwoModeState) -> float:
    """Mean of ``b+^dag b+ - b-^dag b-`` for ``b_pm = (a_R pm a_I)/sqrt(2)``."""
    bs = beam_splitter_symplectic(math.pi / 4)
    # output mode 0 is (a_I + a_R)/sqrt2, mode 1 is (a_R - a_I)/sqrt2
    cov = bs @ s.cov.entries @ bs.T
    mean = bs @ s.mean
    return _occupation(cov, mean, 0) - _occupation(cov, mean, 1)


def qkd_rho_from_cm(s: TwoModeState) -> CorrelationResult:
    """Pearson correlation of the idler and returned x quadratures."""
    num = float(s.sigma_ir[0, 0])
    var_i = float(s.sigma_i[0, 0])
    var_r = float(s.sigma_r[0, 0])
    if var_i <= 0 or var_r <= 0:
        raise NumericError("degenerate state: zero quadrature variance")
    return CorrelationResult(num / math.sqrt(var_i * var_r), num, var_i, var_r)


def qkd_rho_closed_thermal(r: float, eta: float) -> float:
    """Matched-noise squeezed-thermal correlation
    ``sqrt(eta) sinh 2r / sqrt(cosh 2r [eta cosh 2r + 1 - eta])``."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if eta == 0.0:
        return 0.0
    c2 = math.cosh(2 * r)
    return math.sqrt(eta) * math.sinh(2 * r) / math.sqrt(c2 * (eta * c2 + 1.0 - eta))


def qkd_rho_closed_vacuum(r: float, eta: float, n_ch: float) -> float:
    """Quoted squeezed-vacuum correlation
    ``sqrt(eta) sinh 2r / sqrt(eta cosh 2r + (1 - eta)(1 + 2 n_ch))``.

    Can exceed 1; kept literal for the discrepancy report.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if eta == 0.0:
        return 0.0
    return math.sqrt(eta) * math.sinh(2 * r) / math.sqrt(
        eta * math.cosh(2 * r) + (1.0 - eta) * (1.0 + 2.0 * n_ch)
    )
