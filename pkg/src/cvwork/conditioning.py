"""Gaussian measurement conditioning, displacement feedback and the extracted
work it enables.

Work is the entropy drop of the unmeasured mode once the remote outcome is
known, ``W / k_B T = S(before) - S(after)`` in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from cvwork.conventions import DISPLACEMENT_PREFACTOR, VACUUM_VARIANCE
from cvwork.errors import DimensionError, DomainError, NumericError
from cvwork.states import ChannelParams, TmsParams, TwoModeState, IDLER, SIGNAL
from cvwork.symplectic import CovarianceMatrix, GaussianState, von_neumann_entropy

HOMODYNE_X = "homodyne_x"
HOMODYNE_P = "homodyne_p"
HETERODYNE = "heterodyne"
GENERAL = "general"

_ALIASES = {
    "homx": HOMODYNE_X,
    "homp": HOMODYNE_P,
    "het": HETERODYNE,
    HOMODYNE_X: HOMODYNE_X,
    HOMODYNE_P: HOMODYNE_P,
    HETERODYNE: HETERODYNE,
}

WORK_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MeasurementSpec:
    """Gaussian measurement with seed matrix ``diag(lam, 1/lam) / 2``.

    Homodyne of x is the ``lam -> 0`` limit, homodyne of p is ``lam -> inf``,
    heterodyne is ``lam = 1``.
    """

    kind: str = HOMODYNE_X
    lam: float | None = None

    def __post_init__(self):
        if self.kind not in (HOMODYNE_X, HOMODYNE_P, HETERODYNE, GENERAL):
            raise DomainError(f"unknown measurement kind {self.kind!r}")
        if self.kind == GENERAL:
            if self.lam is None or not (self.lam > 0 and math.isfinite(self.lam)):
                raise DomainError(f"general measurement needs finite lam > 0, got {self.lam}")
        elif self.kind == HETERODYNE:
            object.__setattr__(self, "lam", 1.0)
        elif self.lam is not None:
            raise DomainError(f"{self.kind} takes no lam")

    @classmethod
    def parse(cls, text: str) -> MeasurementSpec:
        """Parse ``homx``, ``homp``, ``het`` or ``general:<lam>``."""
        text = text.strip()
        if text in _ALIASES:
            return cls(_ALIASES[text])
        kind, sep, value = text.partition(":")
        if kind == GENERAL and sep:
            try:
                lam = float(value)
            except ValueError:
                raise DomainError(f"bad lambda in measurement {text!r}") from None
            return cls(GENERAL, lam)
        raise DomainError(f"unknown measurement {text!r}")

    def __str__(self):
        if self.kind == GENERAL:
            return f"general:{self.lam!r}"
        return {HOMODYNE_X: "homx", HOMODYNE_P: "homp", HETERODYNE: "het"}[self.kind]

    @property
    def is_homodyne(self) -> bool:
        return self.kind in (HOMODYNE_X, HOMODYNE_P)

    @property
    def outcome_dim(self) -> int:
        return 1 if self.is_homodyne else 2

    def gamma(self) -> np.ndarray:
        if self.is_homodyne:
            raise DomainError("homodyne seed matrix is singular; use the projected inverse")
        return 0.5 * np.diag([self.lam, 1.0 / self.lam])


HOMX = MeasurementSpec(HOMODYNE_X)
HOMP = MeasurementSpec(HOMODYNE_P)
HET = MeasurementSpec(HETERODYNE)


@dataclass(frozen=True)
class WorkResult:
    work_per_kbt: float
    entropy_before: float
    entropy_after: float
    conditional_cov: CovarianceMatrix


def _split(s: TwoModeState, measured):
    b = s.mode_index(measured)
    a = 1 - b
    return s.cov.block(a, a), s.cov.block(b, b), s.cov.block(a, b), a, b


def _gain_inverse(sigma_b: np.ndarray, m: MeasurementSpec) -> np.ndarray:
    """``(sigma_b + gamma)^-1``, or its homodyne limit as a projected pseudo-inverse."""
    if m.is_homodyne:
        k = 0 if m.kind == HOMODYNE_X else 1
        out = np.zeros((2, 2))
        out[k, k] = 1.0 / sigma_b[k, k]
        return out
    mat = sigma_b + m.gamma()
    if np.linalg.det(mat) <= 0:
        raise NumericError("sigma_b + gamma is singular")
    return np.linalg.inv(mat)


def conditional_cov(s: TwoModeState, measured=SIGNAL, m: MeasurementSpec = HOMX) -> CovarianceMatrix:
    """CM of the unmeasured mode after measuring ``measured`` with ``m``.

    Independent of the measurement outcome.
    """
    sigma_a, sigma_b, c_ab, _, _ = _split(s, measured)
    out = sigma_a - c_ab @ _gain_inverse(sigma_b, m) @ c_ab.T
    return CovarianceMatrix(0.5 * (out + out.T))


def feedback_displacement(
    s: TwoModeState,
    measured,
    m: MeasurementSpec,
    outcome,
    prefactor: float = DISPLACEMENT_PREFACTOR,
) -> np.ndarray:
    """Displacement fed forward to the unmeasured mode for a given outcome.

    Args:
        s: two-mode state before the measurement.
        measured: label or index of the measured mode.
        m: the measurement.
        outcome: one value for homodyne (the measured quadrature), two for
            heterodyne or general measurements. Taken relative to the
            measured mode's mean.
        prefactor: scale on the gain; 1.0 gives textbook Gaussian conditioning.

    Returns:
        length-2 displacement (x, p) for the unmeasured mode.
    """
    outcome = np.atleast_1d(np.asarray(outcome, dtype=float))
    if outcome.shape != (m.outcome_dim,):
        raise DimensionError(
            f"{m.kind} expects {m.outcome_dim} outcome value(s), got shape {outcome.shape}"
        )
    _, sigma_b, c_ab, _, b = _split(s, measured)
    if m.kind == HOMODYNE_X:
        d_b = np.array([outcome[0], 0.0])
    elif m.kind == HOMODYNE_P:
        d_b = np.array([0.0, outcome[0]])
    else:
        d_b = outcome
    # the homodyne gain has a zero row/column, so the unread quadrature drops out
    d_b = d_b - s.mean[2 * b : 2 * b + 2]
    return prefactor * c_ab @ _gain_inverse(sigma_b, m) @ d_b


def extracted_work_general(s: TwoModeState, measured=SIGNAL, m: MeasurementSpec = HOMX) -> WorkResult:
    """Entropy-based extracted work on the unmeasured mode, in units of k_B T."""
    sigma_a, *_ = _split(s, measured)
    cond = conditional_cov(s, measured, m)
    before = von_neumann_entropy(sigma_a)
    after = von_neumann_entropy(cond)
    work = before - after
    if work < -WORK_TOLERANCE:
        raise NumericError(f"conditioning increased entropy by {-work:.3g} nats")
    return WorkResult(max(work, 0.0), before, after, cond)


def _check_ac(a: float, c: float):
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    if not abs(c) < a:
        raise DomainError(f"|c| must be below a (unphysical correlation): a={a}, c={c}")


def work_homodyne_closed(a: float, c: float) -> float:
    """Homodyne work ``(1/2) ln(1 / (1 - (c/a)^2))`` for a symmetric squeezed thermal CM."""
    _check_ac(a, c)
    # (a - c)(a + c) keeps the gap exact when c is close to a
    return -0.5 * math.log((a - c) * (a + c) / (a * a))


def work_homodyne_literal(a: float, c: float) -> float:
    """Homodyne work without the 1/2, exactly twice :func:`work_homodyne_closed`."""
    _check_ac(a, c)
    return -math.log((a - c) * (a + c) / (a * a))


class HeterodyneWork(NamedTuple):
    literal: float
    general: float


def symmetric_tms_cov(a: float, c: float) -> TwoModeState:
    """Two-mode state with both local variances ``a`` and cross block ``diag(c, -c)``."""
    cov = np.array(
        [[a, 0.0, c, 0.0], [0.0, a, 0.0, -c], [c, 0.0, a, 0.0], [0.0, -c, 0.0, a]]
    )
    return TwoModeState(GaussianState.zero_mean(cov), (IDLER, SIGNAL))


def work_heterodyne_closed(a: float, c: float) -> HeterodyneWork:
    """Heterodyne work two ways.

    ``literal`` evaluates ``ln(1 / (1 - c^2 / (a (1 + 2a))^2))`` as printed;
    ``general`` is the entropy drop under heterodyne conditioning of the
    symmetric CM built from ``(a, c)``.
    """
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    arg = 1.0 - c * c / (a * (1.0 + 2.0 * a)) ** 2
    if arg <= 0:
        raise DomainError("log argument of the heterodyne form is not positive")
    literal = -math.log(arg)
    general = extracted_work_general(symmetric_tms_cov(a, c), SIGNAL, HET).work_per_kbt
    return HeterodyneWork(literal, general)


class ChannelWork(NamedTuple):
    x: float
    work_per_kbt: float


def x_after_channel(p: TmsParams, ch: ChannelParams) -> float:
    """Squared normalized idler/returned x-correlation that sets homodyne work."""
    scale = VACUUM_VARIANCE + p.n_th
    ch2, sh2 = math.cosh(2.0 * p.r), math.sinh(2.0 * p.r)
    num = ch.eta * scale**2 * sh2 * sh2
    den = scale * ch2 * (ch.eta * scale * ch2 + (1.0 - ch.eta) * (VACUUM_VARIANCE + ch.n_ch))
    if num == 0.0:
        return 0.0
    x = num / den
    if not 0.0 <= x < 1.0:
        raise NumericError(f"x = {x!r} outside [0, 1)")
    return x


def work_after_channel(p: TmsParams, ch: ChannelParams) -> ChannelWork:
    """Homodyne work ``(1/2) ln(1/(1-x))`` after the signal crosses the channel."""
    x = x_after_channel(p, ch)
    return ChannelWork(x, -0.5 * math.log1p(-x))


def x_vacuum_limit(p: TmsParams, ch: ChannelParams) -> float:
    """Quoted squeezed-vacuum limit ``eta sinh^2 2r / (cosh 2r (1/2 + n_ch))``."""
    if p.n_th != 0:
        raise DomainError("vacuum limit requires n_th = 0")
    return ch.eta * math.sinh(2 * p.r) ** 2 / (math.cosh(2 * p.r) * (VACUUM_VARIANCE + ch.n_ch))


def x_thermal_limit(p: TmsParams, ch: ChannelParams) -> float:
    """Matched-noise form ``eta sinh^2 2r / (cosh 2r [eta cosh 2r + 1 - eta])``."""
    if not math.isclose(p.n_th, ch.n_ch, rel_tol=1e-12, abs_tol=0.0):
        raise DomainError("thermal limit requires n_th = n_ch")
    c2 = math.cosh(2 * p.r)
    return ch.eta * math.sinh(2 * p.r) ** 2 / (c2 * (ch.eta * c2 + 1.0 - ch.eta))


def x_thermal_asymptote(r: float, eta: float) -> float:
    """High-loss asymptote ``eta sinh 2r tanh 2r`` of :func:`x_thermal_limit`."""
    return eta * math.sinh(2 * r) * math.tanh(2 * r)
