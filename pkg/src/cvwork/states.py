"""Source states (thermal, two-mode squeezed thermal/vacuum) and the lossy
thermal channel acting on the signal mode."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cvwork.conventions import BOLTZMANN, HBAR, VACUUM_VARIANCE
from cvwork.errors import DimensionError, DomainError
from cvwork.symplectic import CovarianceMatrix, GaussianState

IDLER = "idler"
SIGNAL = "signal"
RETURNED = "returned"


@dataclass(frozen=True)
class TmsParams:
    """Two-mode squeezing rate ``r`` applied to a thermal pair of occupation ``n_th``."""

    r: float
    n_th: float = 0.0

    def __post_init__(self):
        if not (self.r >= 0 and math.isfinite(self.r)):
            raise DomainError(f"squeezing rate must be finite and >= 0, got {self.r}")
        if not (self.n_th >= 0 and math.isfinite(self.n_th)):
            raise DomainError(f"n_th must be finite and >= 0, got {self.n_th}")


@dataclass(frozen=True)
class ChannelParams:
    """Thermal-loss channel: transmissivity ``eta``, environment occupation ``n_ch``."""

    eta: float
    n_ch: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"eta must lie in [0, 1], got {self.eta}")
        if not (self.n_ch >= 0 and math.isfinite(self.n_ch)):
            raise DomainError(f"n_ch must be finite and >= 0, got {self.n_ch}")


@dataclass(frozen=True)
class TwoModeState:
    """A 2-mode Gaussian state with mode 0 the idler and mode 1 the signal
    (or, after the channel, the returned mode)."""

    state: GaussianState
    labels: tuple[str, str] = (IDLER, SIGNAL)

    def __post_init__(self):
        if self.state.n_modes != 2:
            raise DimensionError(f"expected 2 modes, got {self.state.n_modes}")

    @property
    def cov(self) -> CovarianceMatrix:
        return self.state.cov

    @property
    def mean(self) -> np.ndarray:
        return self.state.mean

    @property
    def sigma_i(self) -> np.ndarray:
        return self.cov.block(0, 0)

    @property
    def sigma_r(self) -> np.ndarray:
        return self.cov.block(1, 1)

    @property
    def sigma_ir(self) -> np.ndarray:
        return self.cov.block(0, 1)

    def mode_index(self, mode) -> int:
        """Resolve a label or integer index to 0 or 1."""
        if isinstance(mode, (int, np.integer)):
            if mode not in (0, 1):
                raise DimensionError(f"mode index must be 0 or 1, got {mode}")
            return int(mode)
        if mode in self.labels:
            return self.labels.index(mode)
        if mode in (SIGNAL, RETURNED):
            return 1
        raise DimensionError(f"unknown mode {mode!r}; labels are {self.labels}")


def make_thermal(n: float) -> GaussianState:
    """Single-mode thermal state with mean occupation ``n``."""
    if not (n >= 0 and math.isfinite(n)):
        raise DomainError(f"occupation must be finite and >= 0, got {n}")
    v = VACUUM_VARIANCE + n
    return GaussianState.zero_mean(np.diag([v, v]))


def occupation_from_temperature(frequency: float, temperature: float) -> float:
    """Bose-Einstein mean occupation at ``frequency`` (Hz) and ``temperature`` (K)."""
    if not frequency > 0:
        raise DomainError(f"frequency must be positive, got {frequency}")
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return 0.0
    ratio = HBAR * 2.0 * math.pi * frequency / (BOLTZMANN * temperature)
    return 1.0 / math.expm1(ratio)


def two_mode_squeeze_symplectic(r: float) -> np.ndarray:
    """4x4 symplectic matrix of two-mode squeezing at rate ``r``.

    Maps a product of two equal thermal modes onto the squeezed thermal CM
    with cross block ``diag(c, -c)``.
    """
    if r < 0:
        raise DomainError(f"squeezing rate must be >= 0, got {r}")
    ch, sh = math.cosh(r), math.sinh(r)
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    return np.block([[ch * eye, sh * z], [sh * z, ch * eye]])


def beam_splitter_symplectic(theta: float) -> np.ndarray:
    """4x4 symplectic matrix of a beam splitter with transmissivity cos^2(theta)."""
    c, s = math.cos(theta), math.sin(theta)
    eye = np.eye(2)
    return np.block([[c * eye, s * eye], [-s * eye, c * eye]])


def make_tmsts(p: TmsParams) -> TwoModeState:
    """Two-mode squeezed thermal state; ``n_th = 0`` gives the squeezed vacuum."""
    scale = VACUUM_VARIANCE + p.n_th
    a = scale * math.cosh(2.0 * p.r)
    c = scale * math.sinh(2.0 * p.r)
    cov = np.array(
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, -c],
            [c, 0.0, a, 0.0],
            [0.0, -c, 0.0, a],
        ]
    )
    return TwoModeState(GaussianState.zero_mean(cov), (IDLER, SIGNAL))


def make_tmsvs(r: float) -> TwoModeState:
    return make_tmsts(TmsParams(r, 0.0))


def apply_channel(s: TwoModeState, ch: ChannelParams) -> TwoModeState:
    """Send mode 1 through a thermal-loss channel; the idler is untouched."""
    if not isinstance(ch, ChannelParams):
        ch = ChannelParams(*ch)
    t = math.sqrt(ch.eta)
    scale = np.diag([1.0, 1.0, t, t])
    added = np.zeros((4, 4))
    added[2:, 2:] = (1.0 - ch.eta) * (VACUUM_VARIANCE + ch.n_ch) * np.eye(2)
    cov = scale @ s.cov.entries @ scale + added
    mean = scale @ s.mean
    return TwoModeState(GaussianState(mean, cov), (s.labels[0], RETURNED))


def null_hypothesis_state(s: TwoModeState, ch: ChannelParams) -> TwoModeState:
    """Idler kept, returned mode replaced by channel noise (no target)."""
    return apply_channel(s, ChannelParams(0.0, ch.n_ch))
