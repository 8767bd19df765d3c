"""Quadrature-space linear algebra: covariance matrices, symplectic spectra,
von Neumann entropy and partial transposition."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cvwork.conventions import (
    SYMMETRY_RTOL,
    SYMPLECTIC_ATOL,
    VACUUM_VARIANCE,
    symplectic_form,
)
from cvwork.errors import DimensionError, UnphysicalStateError, ValidationError

_EPS = np.finfo(float).eps


def _as_matrix(entries) -> np.ndarray:
    m = np.array(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2 or m.shape[0] == 0:
        raise DimensionError(f"covariance matrix must be 2N x 2N, got shape {m.shape}")
    return m


def _asymmetry(m: np.ndarray) -> float:
    """Worst |s_ij - s_ji| relative to max(1, |s_ij|)."""
    scale = np.maximum(1.0, np.abs(m))
    return float(np.max(np.abs(m - m.T) / scale))


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Symmetrized second moments of the quadratures, vacuum variance 1/2.

    Construction checks shape and symmetry only; physicality is reported by
    :func:`validate` and enforced by the operations that need it.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.entries)
        if _asymmetry(m) > SYMMETRY_RTOL:
            raise ValidationError("covariance matrix is not symmetric")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n_modes(self) -> int:
        return self.entries.shape[0] // 2

    def block(self, i: int, j: int) -> np.ndarray:
        """The 2x2 block coupling mode ``i`` (rows) to mode ``j`` (columns)."""
        return np.array(self.entries[2 * i : 2 * i + 2, 2 * j : 2 * j + 2])

    def reduced(self, mode: int) -> CovarianceMatrix:
        return CovarianceMatrix(self.block(mode, mode))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __repr__(self):
        return f"CovarianceMatrix(n_modes={self.n_modes}, entries={self.entries.tolist()})"


def _cov(cov) -> CovarianceMatrix:
    return cov if isinstance(cov, CovarianceMatrix) else CovarianceMatrix(cov)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean quadrature vector plus covariance matrix."""

    mean: np.ndarray
    cov: CovarianceMatrix

    def __post_init__(self):
        cov = _cov(self.cov)
        mean = np.array(self.mean, dtype=float).reshape(-1)
        if mean.shape[0] != 2 * cov.n_modes:
            raise DimensionError(
                f"mean has length {mean.shape[0]}, expected {2 * cov.n_modes}"
            )
        mean.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.cov.n_modes

    @classmethod
    def zero_mean(cls, cov) -> GaussianState:
        cov = _cov(cov)
        return cls(np.zeros(2 * cov.n_modes), cov)


@dataclass(frozen=True)
class SymplecticSpectrum:
    eigenvalues: tuple[float, ...]

    @property
    def smallest(self) -> float:
        return self.eigenvalues[0]

    def __len__(self):
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)


def symplectic_tolerance(cov) -> float:
    """Slack allowed below nu = 1/2 before a state is called unphysical.

    Rounding the entries of a matrix with norm ``s`` perturbs nu^2 by about
    ``eps * s**2``, so strongly squeezed states cannot resolve the bound to
    better than that regardless of the eigensolver.
    """
    m = np.asarray(cov, dtype=float)
    return float(SYMPLECTIC_ATOL + 4.0 * _EPS * np.linalg.norm(m, 2) ** 2)


def _raw_symplectic_eigenvalues(m: np.ndarray) -> np.ndarray:
    # iΩσ has eigenvalues ±nu_k; solving it directly keeps the small nu_k
    # accurate where squaring (Ωσ)^2 would cancel them away.
    n = m.shape[0] // 2
    ev = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ m)))
    return 0.5 * (ev[0::2] + ev[1::2])


def symplectic_eigenvalues(cov) -> SymplecticSpectrum:
    """Symplectic spectrum of a symmetric positive-definite CM, ascending.

    Raises:
        ValidationError: if ``cov`` is not symmetric or not positive definite.
    """
    cov = _cov(cov)
    m = cov.entries
    if np.linalg.eigvalsh(m)[0] <= 0.0:
        raise ValidationError("covariance matrix is not positive definite")
    return SymplecticSpectrum(tuple(float(v) for v in _raw_symplectic_eigenvalues(m)))


def partial_transpose(cov, mode: int = 1) -> CovarianceMatrix:
    """Time-reverse ``mode`` by flipping the sign of its p quadrature."""
    cov = _cov(cov)
    flip = np.ones(2 * cov.n_modes)
    flip[2 * mode + 1] = -1.0
    return CovarianceMatrix(cov.entries * np.outer(flip, flip))


def ppt_smallest_eigenvalue(cov) -> float:
    """Smallest symplectic eigenvalue of the partially transposed 2-mode CM.

    The state is NPT-entangled iff the returned value is below 1/2.
    """
    cov = _cov(cov)
    if cov.n_modes != 2:
        raise DimensionError(f"expected a 2-mode state, got {cov.n_modes} modes")
    return symplectic_eigenvalues(partial_transpose(cov, 1)).smallest


def entropy_function(nu):
    """Entropy of a thermal mode with symplectic eigenvalue ``nu`` (nats).

    Vectorised; callers must pass ``nu >= 1/2``.
    """
    nu = np.asarray(nu, dtype=float)
    lo = nu - VACUUM_VARIANCE
    hi = nu + VACUUM_VARIANCE
    with np.errstate(divide="ignore", invalid="ignore"):
        # (hi)ln(hi) - (lo)ln(lo) cancels badly for large nu
        large = np.log(lo) + hi * np.log1p(1.0 / lo)
        small = hi * np.log(hi) - np.where(lo > 0, lo * np.log(np.where(lo > 0, lo, 1.0)), 0.0)
    out = np.where(lo >= 1.0, large, small)
    return out if out.ndim else float(out)


def von_neumann_entropy(cov) -> float:
    """Von Neumann entropy of a Gaussian state in nats.

    Raises:
        UnphysicalStateError: if any symplectic eigenvalue is below 1/2 by
            more than :func:`symplectic_tolerance`.
    """
    cov = _cov(cov)
    nus = np.array(symplectic_eigenvalues(cov).eigenvalues)
    tol = symplectic_tolerance(cov)
    if nus[0] < VACUUM_VARIANCE - tol:
        raise UnphysicalStateError(
            f"symplectic eigenvalue {nus[0]:.12g} below vacuum bound 1/2"
        )
    nus = np.maximum(nus, VACUUM_VARIANCE)
    return float(np.sum(entropy_function(nus)))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    margin: float


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[str]:
        return [f"{c.name} (margin {c.margin:.6g})" for c in self.checks if not c.passed]


def validate(cov) -> ValidationReport:
    """Check symmetry, positive definiteness and the symplectic bound.

    Never raises for numeric input; each check carries its worst margin
    (positive means satisfied). The symplectic margin is ``min(nu) - 1/2``.
    """
    m = _as_matrix(np.asarray(cov, dtype=float))
    asym = _asymmetry(m)
    sym = Check("symmetric", bool(asym <= SYMMETRY_RTOL), SYMMETRY_RTOL - asym)
    m = 0.5 * (m + m.T)
    min_eig = float(np.linalg.eigvalsh(m)[0])
    pd = Check("positive_definite", bool(min_eig > 0.0), min_eig)
    nu_min = float(_raw_symplectic_eigenvalues(m)[0])
    margin = nu_min - VACUUM_VARIANCE
    phys = Check("symplectic_bound", bool(margin >= -symplectic_tolerance(m)), margin)
    return ValidationReport((sym, pd, phys))
