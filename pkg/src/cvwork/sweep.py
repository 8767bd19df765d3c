"""Parameter sweeps, literal-vs-first-principles comparison reports and the
CSV format both are written in."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from cvwork import __version__
from cvwork.conditioning import (
    GENERAL,
    HOMX,
    MeasurementSpec,
    conditional_cov,
    extracted_work_general,
    symmetric_tms_cov,
    work_after_channel,
    work_heterodyne_closed,
    work_homodyne_closed,
    work_homodyne_literal,
    x_after_channel,
    x_thermal_asymptote,
    x_thermal_limit,
    x_vacuum_limit,
)
from cvwork.conventions import RNG_ALGORITHM, VACUUM_VARIANCE
from cvwork.errors import DomainError
from cvwork.oracle import (
    empirical_conditional_variance,
    empirical_receiver_moments,
    empirical_rho,
    sample,
)
from cvwork.protocols import (
    qi_hypotheses,
    qi_intensity_moments,
    qi_signal_gap_literal,
    qi_snr_closed_thermal,
    qi_snr_closed_vacuum,
    qkd_rho_closed_thermal,
    qkd_rho_closed_vacuum,
    qkd_rho_from_cm,
    receiver_moments,
)
from cvwork.states import ChannelParams, TmsParams, apply_channel, make_tmsts
from cvwork.symplectic import ppt_smallest_eigenvalue

SWEEP_PARAMS = ("r", "n_th", "n_th_ratio", "n_ch", "eta", "lambda")
QUANTITIES = ("work", "x", "snr_closed", "snr_moments", "rho_cm", "rho_closed", "ppt_eigenvalue")

QUANTITY_COLUMNS = {
    "work": ("work_closed", "work_entropy", "work_closed_minus_entropy"),
    "x": ("x",),
    "snr_closed": ("snr_closed_thermal", "snr_closed_vacuum"),
    "snr_moments": ("qi_gap", "qi_noise_h1", "qi_noise_h0", "snr_moments"),
    "rho_cm": ("rho_cm",),
    "rho_closed": ("rho_closed_thermal", "rho_closed_vacuum", "rho_closed_minus_cm"),
    "ppt_eigenvalue": ("ppt_eigenvalue",),
}
ORACLE_COLUMNS = (
    "rho_mc",
    "rho_mc_se",
    "condvar_analytic",
    "condvar_mc",
    "condvar_mc_se",
    "recv_mean_analytic",
    "recv_mean_mc",
    "recv_mean_mc_se",
    "recv_var_wigner",
    "recv_var_mc",
    "recv_var_mc_se",
)
PARAM_COLUMNS = ("index", "r", "n_th", "n_th_ratio", "n_ch", "eta", "measurement")

DEFAULT_FREQUENCY_HZ = 2e9


class ConfigError(ValueError):
    """Invalid sweep configuration; the message names the offending field."""


@dataclass(frozen=True)
class SweepAxis:
    param: str
    lo: float
    hi: float
    n: int
    spacing: str = "lin"

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ConfigError(f"sweep: unknown parameter {self.param!r}; choose from {SWEEP_PARAMS}")
        if self.spacing not in ("lin", "log"):
            raise ConfigError(f"sweep: spacing must be 'lin' or 'log', got {self.spacing!r}")
        if self.n < 2:
            raise ConfigError(f"sweep: need at least 2 points, got {self.n}")
        if self.spacing == "log" and not (self.lo > 0 and self.hi > 0):
            raise ConfigError("sweep: log spacing needs positive bounds")

    @classmethod
    def parse(cls, text: str) -> SweepAxis:
        """Parse ``<param>:<lo>:<hi>:<n>:{lin|log}``."""
        parts = text.split(":")
        if len(parts) != 5:
            raise ConfigError(f"sweep: expected <param>:<lo>:<hi>:<n>:<lin|log>, got {text!r}")
        try:
            return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]), parts[4])
        except ValueError as exc:
            raise ConfigError(f"sweep: {exc}") from None

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)

    def __str__(self):
        return f"{self.param}:{self.lo!r}:{self.hi!r}:{self.n}:{self.spacing}"


@dataclass(frozen=True)
class OracleSpec:
    n_samples: int
    seed: int

    @classmethod
    def parse(cls, text: str) -> OracleSpec:
        n, sep, seed = text.partition(":")
        try:
            spec = cls(int(float(n)), int(seed))
        except ValueError:
            raise ConfigError(f"oracle: expected <n>:<seed>, got {text!r}") from None
        if not sep or spec.n_samples < 2 or spec.seed < 0:
            raise ConfigError(f"oracle: expected <n>=2..:<seed>=0.., got {text!r}")
        return spec

    def __str__(self):
        return f"{self.n_samples}:{self.seed}"


DEFAULT_SWEEP = SweepAxis("n_th_ratio", 1e-4, 1.0, 50, "log")


@dataclass(frozen=True)
class SweepConfig:
    """One sweep. Defaults reproduce the 2 GHz work-vs-preparation-noise curve."""

    r: float = 4.0
    n_th: float = 3000.0
    n_ch: float = 3000.0
    eta: float = 0.01
    measurement: MeasurementSpec = HOMX
    sweep: SweepAxis | None = DEFAULT_SWEEP
    quantities: tuple[str, ...] = ("work", "x")
    oracle: OracleSpec | None = None

    def __post_init__(self):
        for q in self.quantities:
            if q not in QUANTITIES:
                raise ConfigError(f"quantities: unknown quantity {q!r}; choose from {QUANTITIES}")
        if not self.quantities:
            raise ConfigError("quantities: at least one quantity is required")
        if self.sweep is not None and self.sweep.param == "lambda" and self.measurement.kind != GENERAL:
            object.__setattr__(self, "measurement", MeasurementSpec(GENERAL, self.sweep.lo))

    @property
    def n_points(self) -> int:
        return 1 if self.sweep is None else self.sweep.n

    def points(self) -> list[dict]:
        """Grid points in order, each a dict of the evaluation parameters."""
        base = {
            "r": self.r,
            "n_th": self.n_th,
            "n_ch": self.n_ch,
            "eta": self.eta,
            "measurement": self.measurement,
        }
        if self.sweep is None:
            return [_with_ratio(base)]
        out = []
        for v in self.sweep.values():
            pt = dict(base)
            v = float(v)
            if self.sweep.param == "n_th_ratio":
                pt["n_th"] = v * self.n_ch
            elif self.sweep.param == "lambda":
                pt["measurement"] = MeasurementSpec(GENERAL, v)
            else:
                pt[self.sweep.param] = v
            out.append(_with_ratio(pt))
        return out

    def metadata(self) -> list[tuple[str, str]]:
        meta = [
            ("r", repr(self.r)),
            ("n_th", repr(self.n_th)),
            ("n_ch", repr(self.n_ch)),
            ("eta", repr(self.eta)),
            ("measurement", str(self.measurement)),
            ("sweep", str(self.sweep) if self.sweep else "none"),
            ("quantities", ",".join(self.quantities)),
            ("oracle", str(self.oracle) if self.oracle else "none"),
            ("frequency_hz", repr(DEFAULT_FREQUENCY_HZ)),
        ]
        if self.oracle:
            meta += [("rng", RNG_ALGORITHM), ("seed", str(self.oracle.seed))]
        return meta


def _with_ratio(pt: dict) -> dict:
    pt["n_th_ratio"] = pt["n_th"] / pt["n_ch"] if pt["n_ch"] > 0 else math.nan
    return pt


def _evaluate_quantity(q: str, p: TmsParams, ch: ChannelParams, m: MeasurementSpec) -> dict:
    if q == "work":
        closed = work_after_channel(p, ch).work_per_kbt
        general = extracted_work_general(apply_channel(make_tmsts(p), ch), 1, m).work_per_kbt
        return {"work_closed": closed, "work_entropy": general, "work_closed_minus_entropy": closed - general}
    if q == "x":
        return {"x": x_after_channel(p, ch)}
    if q == "snr_closed":
        return {
            "snr_closed_thermal": qi_snr_closed_thermal(p.r, ch.eta),
            "snr_closed_vacuum": qi_snr_closed_vacuum(p.r, ch.eta, ch.n_ch),
        }
    if q == "snr_moments":
        res = qi_intensity_moments(*qi_hypotheses(p, ch))
        return {
            "qi_gap": res.signal_gap,
            "qi_noise_h1": res.noise_h1,
            "qi_noise_h0": res.noise_h0,
            "snr_moments": res.snr,
        }
    if q == "rho_cm":
        return {"rho_cm": qkd_rho_from_cm(apply_channel(make_tmsts(p), ch)).rho}
    if q == "rho_closed":
        th = qkd_rho_closed_thermal(p.r, ch.eta)
        vac = qkd_rho_closed_vacuum(p.r, ch.eta, ch.n_ch)
        cm = qkd_rho_from_cm(apply_channel(make_tmsts(p), ch)).rho
        # each closed form only describes its own preparation
        if p.n_th == ch.n_ch:
            gap = th - cm
        elif p.n_th == 0:
            gap = vac - cm
        else:
            gap = math.nan
        return {"rho_closed_thermal": th, "rho_closed_vacuum": vac, "rho_closed_minus_cm": gap}
    if q == "ppt_eigenvalue":
        return {"ppt_eigenvalue": ppt_smallest_eigenvalue(apply_channel(make_tmsts(p), ch).cov)}
    raise ConfigError(f"quantities: unknown quantity {q!r}")


def _evaluate_oracle(p: TmsParams, ch: ChannelParams, spec: OracleSpec) -> dict:
    state = apply_channel(make_tmsts(p), ch)
    batch = sample(state.state, spec.n_samples, spec.seed)
    rho = empirical_rho(batch)
    cv = empirical_conditional_variance(batch, "x")
    recv = empirical_receiver_moments(batch)
    mean, wigner_var, _ = receiver_moments(state)
    return {
        "rho_mc": rho.value,
        "rho_mc_se": rho.stderr,
        "condvar_analytic": float(conditional_cov(state, 1, HOMX).entries[0, 0]),
        "condvar_mc": cv.value,
        "condvar_mc_se": cv.stderr,
        "recv_mean_analytic": mean,
        "recv_mean_mc": recv.mean.value,
        "recv_mean_mc_se": recv.mean.stderr,
        "recv_var_wigner": wigner_var,
        "recv_var_mc": recv.variance.value,
        "recv_var_mc_se": recv.variance.stderr,
    }


def sweep_columns(cfg: SweepConfig) -> list[str]:
    cols = list(PARAM_COLUMNS)
    for q in cfg.quantities:
        cols += QUANTITY_COLUMNS[q]
    if cfg.oracle:
        cols += ORACLE_COLUMNS
    return cols + ["status"]


def run_sweep(cfg: SweepConfig) -> list[dict]:
    """Evaluate every requested quantity at every grid point, in grid order.

    A failure at one point fills that point's affected columns with NaN and
    records the error in its ``status`` column; other points are unaffected.
    """
    rows = []
    for i, pt in enumerate(cfg.points()):
        row = {
            "index": i,
            "r": pt["r"],
            "n_th": pt["n_th"],
            "n_th_ratio": pt["n_th_ratio"],
            "n_ch": pt["n_ch"],
            "eta": pt["eta"],
            "measurement": str(pt["measurement"]),
        }
        errors = []
        try:
            p = TmsParams(pt["r"], pt["n_th"])
            ch = ChannelParams(pt["eta"], pt["n_ch"])
        except (ValueError, ArithmeticError) as exc:
            p = ch = None
            errors.append(f"params: {exc}")
        for q in cfg.quantities:
            try:
                if p is None:
                    raise DomainError("invalid parameters")
                row.update(_evaluate_quantity(q, p, ch, pt["measurement"]))
            except (ValueError, ArithmeticError) as exc:
                row.update({c: math.nan for c in QUANTITY_COLUMNS[q]})
                if p is not None:
                    errors.append(f"{q}: {exc}")
        if cfg.oracle:
            try:
                if p is None:
                    raise DomainError("invalid parameters")
                row.update(_evaluate_oracle(p, ch, cfg.oracle))
            except (ValueError, ArithmeticError) as exc:
                row.update({c: math.nan for c in ORACLE_COLUMNS})
                if p is not None:
                    errors.append(f"oracle: {exc}")
        row["status"] = "ok" if not errors else "error: " + "; ".join(errors)
        rows.append(row)
    return rows


@dataclass(frozen=True)
class ComparisonRow:
    index: int
    r: float
    n_th: float
    n_ch: float
    eta: float
    item: str
    literal: float
    reference: float
    abs_gap: float
    rel_gap: float
    ratio: float
    flag: str = ""


COMPARE_COLUMNS = (
    "index", "r", "n_th", "n_ch", "eta", "item",
    "literal", "reference", "abs_gap", "rel_gap", "ratio", "flag",
)

MISMATCH_RTOL = 1e-6


def _compare(pt: dict, idx: int, item: str, literal: float, reference: float) -> ComparisonRow:
    gap = literal - reference
    rel = abs(gap) / abs(reference) if reference != 0 else (0.0 if gap == 0 else math.inf)
    ratio = literal / reference if reference != 0 else (1.0 if literal == 0 else math.inf)
    flags = []
    if item.startswith("rho") and abs(literal) > 1:
        flags.append("rho_exceeds_1")
    if rel > MISMATCH_RTOL:
        flags.append("mismatch")
    return ComparisonRow(
        idx, pt["r"], pt["n_th"], pt["n_ch"], pt["eta"], item,
        literal, reference, gap, rel, ratio, ";".join(flags),
    )


def _comparison_items(pt: dict, quantities: Sequence[str]) -> Iterable[tuple[str, float, float]]:
    r, eta, n_ch, n_th = pt["r"], pt["eta"], pt["n_ch"], pt["n_th"]
    ch = ChannelParams(eta, n_ch)
    vac, matched = TmsParams(r, 0.0), TmsParams(r, n_ch)
    if "work" in quantities:
        scale = VACUUM_VARIANCE + n_th
        a, c = scale * math.cosh(2 * r), scale * math.sinh(2 * r)
        entropy_w0 = extracted_work_general(symmetric_tms_cov(a, c), 1, HOMX).work_per_kbt
        het = work_heterodyne_closed(a, c)
        yield "w0_unhalved_vs_closed", work_homodyne_literal(a, c), work_homodyne_closed(a, c)
        yield "w0_closed_vs_entropy", work_homodyne_closed(a, c), entropy_w0
        yield "w1_quoted_vs_entropy", het.literal, het.general
    if "x" in quantities or "work" in quantities:
        x_th = x_thermal_limit(matched, ch)
        yield "x_vacuum_limit_vs_exact", x_vacuum_limit(vac, ch), x_after_channel(vac, ch)
        yield "x_matched_limit_vs_exact", x_th, x_after_channel(matched, ch)
        yield "x_asymptote_vs_matched_limit", x_thermal_asymptote(r, eta), x_th
    if "snr_closed" in quantities or "snr_moments" in quantities:
        th = qi_intensity_moments(*qi_hypotheses(matched, ch))
        yield "snr_thermal_closed_vs_moments", qi_snr_closed_thermal(r, eta), th.snr
        if n_ch > 0:
            vm = qi_intensity_moments(*qi_hypotheses(vac, ch))
            yield "snr_vacuum_closed_vs_moments", qi_snr_closed_vacuum(r, eta, n_ch), vm.snr
        yield "qi_gap_quoted_vs_moments", qi_signal_gap_literal(r, eta, n_ch), th.signal_gap
    if "rho_closed" in quantities or "rho_cm" in quantities:
        yield (
            "rho_thermal_closed_vs_cm",
            qkd_rho_closed_thermal(r, eta),
            qkd_rho_from_cm(apply_channel(make_tmsts(matched), ch)).rho,
        )
        yield (
            "rho_vacuum_closed_vs_cm",
            qkd_rho_closed_vacuum(r, eta, n_ch),
            qkd_rho_from_cm(apply_channel(make_tmsts(vac), ch)).rho,
        )


def compare_report(cfg: SweepConfig) -> list[ComparisonRow]:
    """Gaps between quoted closed forms and first-principles values.

    Work items use each point's own ``(r, n_th)`` source state without a
    channel. Channel items use the two reference preparations the closed
    forms describe: squeezed vacuum (``n_th = 0``) and matched noise
    (``n_th = n_ch``).
    """
    rows = []
    for i, pt in enumerate(cfg.points()):
        try:
            for item, lit, ref in _comparison_items(pt, cfg.quantities):
                rows.append(_compare(pt, i, item, float(lit), float(ref)))
        except (ValueError, ArithmeticError) as exc:
            rows.append(
                ComparisonRow(i, pt["r"], pt["n_th"], pt["n_ch"], pt["eta"], "error",
                              math.nan, math.nan, math.nan, math.nan, math.nan, f"error: {exc}")
            )
    return rows


def find_crossing(
    r: float = 4.0,
    eta: float = 0.01,
    n_ch: float = 3000.0,
    level: float = 1.0,
    lo: float = 1e-4,
    hi: float = 1.0,
) -> float | None:
    """Preparation-to-channel noise ratio at which homodyne work reaches ``level``.

    Returns None when the work does not cross ``level`` inside ``[lo, hi]``.
    """

    def excess(ratio):
        return work_after_channel(TmsParams(r, ratio * n_ch), ChannelParams(eta, n_ch)).work_per_kbt - level

    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo * f_hi > 0:
        return None
    return brentq(excess, lo, hi, xtol=1e-14, rtol=1e-14)


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(
    out,
    columns: Sequence[str],
    rows: Iterable,
    metadata: Sequence[tuple[str, str]] = (),
    timestamp: str | None = None,
) -> None:
    """Write rows (dicts or dataclasses) as CSV with ``#`` metadata lines."""
    out.write(f"# cvwork {__version__}\n")
    if timestamp is not None:
        out.write(f"# generated={timestamp}\n")
    for k, v in metadata:
        out.write(f"# {k}={v}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        get = row.get if isinstance(row, dict) else lambda c, _r=row: getattr(_r, c)
        writer.writerow([format_value(get(c)) for c in columns])


def read_csv(source) -> tuple[dict[str, str], list[dict]]:
    """Parse a file written by :func:`write_csv`; numeric fields become floats."""
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, val = line[1:].strip().partition("=")
            if sep:
                meta[key] = val
        else:
            body.append(line)
    rows = []
    for rec in csv.DictReader(io.StringIO("\n".join(body))):
        parsed = {}
        for k, v in rec.items():
            try:
                parsed[k] = float(v)
            except ValueError:
                parsed[k] = v
        rows.append(parsed)
    return meta, rows


def render_sweep(cfg: SweepConfig, rows: list[dict], timestamp: str | None = None) -> str:
    buf = io.StringIO()
    write_csv(buf, sweep_columns(cfg), rows, cfg.metadata(), timestamp)
    return buf.getvalue()


def render_comparison(cfg: SweepConfig, rows: list[ComparisonRow], timestamp: str | None = None) -> str:
    buf = io.StringIO()
    write_csv(buf, COMPARE_COLUMNS, rows, cfg.metadata(), timestamp)
    return buf.getvalue()
