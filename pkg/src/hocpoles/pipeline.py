"""Crossing counts -> lags -> AR denominator -> poles, packaged as a Report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .crossings import DEFAULT_MEAN_WARMUP, HocConfig, HocCounts, HocState
from .errors import DataError, IllConditionedError, RootFindingError
from .hoc_acf import AcfSequence, acf_from_hoc
from .myw import batch_acf, prediction_rmse, solve_myw
from .poles import DEFAULT_ZETA_THRESHOLD, assess

__all__ = ["RunConfig", "Report", "estimate_from_counts", "estimate_from_acf",
           "estimate_series", "report_schema"]


@dataclass(frozen=True)
class RunConfig:
    n: int
    m: int
    levels: int | None = None
    mean_mode: str = "zero"
    mean_level: float = 0.0
    warmup: int = DEFAULT_MEAN_WARMUP
    ewma_lambda: float | None = None
    k_start: int | None = None
    dt: float = 1.0
    zeta_threshold: float = DEFAULT_ZETA_THRESHOLD
    report_every: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.m < 0:
            raise ValueError(f"order must have n >= 1 and m >= 0, got ({self.n}, {self.m})")
        if self.k_start is not None and self.k_start <= self.m:
            raise ValueError(f"k_start must exceed the MA order {self.m}")
        if self.levels is not None and self.levels < self.lags_needed:
            raise ValueError(f"{self.levels} levels cannot supply {self.lags_needed} lags")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.report_every is not None and self.report_every < 1:
            raise ValueError("report_every must be a positive sample count")

    @property
    def k(self) -> int:
        return self.m + 1 if self.k_start is None else self.k_start

    @property
    def lags_needed(self) -> int:
        return self.k + self.n - 1

    @property
    def n_levels(self) -> int:
        return self.levels if self.levels is not None else self.lags_needed

    @property
    def min_samples(self) -> int:
        return max(self.n + self.m + 2, self.n_levels + 1)

    def hoc_config(self) -> HocConfig:
        return HocConfig(self.n_levels, self.mean_mode, self.mean_level, self.warmup,
                         self.ewma_lambda)

    def new_state(self) -> HocState:
        return HocState.from_config(self.hoc_config())


@dataclass
class Report:
    samples: int
    hoc: list[int]
    d_tilde: list[float | None]
    acf: list[float]
    acf_clamped: list[bool]
    a_hat: list[float]
    cond: float | None
    poles: list[complex]
    damping: list[tuple[float | None, str]]
    unstable: bool
    oscillatory: bool
    ill_conditioned: bool
    rmse: float | None = None
    # not serialized: why the estimate is degraded, for exit codes and logs
    failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "samples": int(self.samples),
            "hoc": [int(d) for d in self.hoc],
            "d_tilde": [None if d is None else float(d) for d in self.d_tilde],
            "acf": [float(r) for r in self.acf],
            "acf_clamped": [bool(c) for c in self.acf_clamped],
            "a_hat": [float(a) for a in self.a_hat],
            "cond": None if self.cond is None or not math.isfinite(self.cond) else float(self.cond),
            "poles": [{"re": float(p.real), "im": float(p.imag)} for p in self.poles],
            "damping": [{"zeta": z, "mode": mode} for z, mode in self.damping],
            "flags": {
                "unstable": bool(self.unstable),
                "oscillatory": bool(self.oscillatory),
                "ill_conditioned": bool(self.ill_conditioned),
            },
            "rmse": None if self.rmse is None else float(self.rmse),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def report_schema() -> dict:
    """JSON schema every serialized :class:`Report` conforms to."""
    text = resources.files("hocpoles").joinpath("report.schema.json").read_text()
    return json.loads(text)


def estimate_from_acf(rho: AcfSequence, cfg: RunConfig, samples: int,
                      counts: HocCounts | None = None) -> Report:
    """Steps 3-4: solve for the denominator and assess its poles.

    Numerical trouble never raises; it is recorded in ``failures`` and the
    report carries whatever could still be computed.
    """
    failures = []
    ill = False
    est = None
    cond = None
    try:
        est = solve_myw(rho, cfg.n, cfg.m, cfg.k_start)
        cond = est.cond
        ill = est.ill_conditioned
    except IllConditionedError as exc:
        failures.append(str(exc))
        est = exc.estimate
        cond = exc.cond
        ill = True

    poles, damping_ = [], []
    unstable = oscillatory = False
    if est is not None:
        try:
            pr = assess(est, cfg.dt, cfg.zeta_threshold)
        except RootFindingError as exc:
            failures.append(str(exc))
        else:
            poles = list(pr.discrete)
            damping_ = [(m.zeta, m.kind) for m in pr.modes]
            unstable = pr.any_unstable
            oscillatory = pr.any_oscillatory

    return Report(
        samples=samples,
        hoc=list(counts.d) if counts is not None else [],
        d_tilde=list(counts.d_tilde) if counts is not None else [],
        acf=list(rho.rho),
        acf_clamped=list(rho.clamped),
        a_hat=list(est.a) if est is not None else [],
        cond=cond,
        poles=poles,
        damping=damping_,
        unstable=unstable,
        oscillatory=oscillatory,
        ill_conditioned=ill,
        failures=failures,
    )


def estimate_from_counts(counts: HocCounts, cfg: RunConfig) -> Report:
    """Steps 2-4 on a crossing-count snapshot."""
    if counts.valid_levels < cfg.lags_needed:
        raise DataError(
            f"{counts.n} samples are not enough; ARMA({cfg.n},{cfg.m}) needs at least "
            f"{cfg.min_samples}"
        )
    rho = acf_from_hoc(counts, cfg.lags_needed)
    return estimate_from_acf(rho, cfg, counts.n, counts)


def estimate_series(y, cfg: RunConfig, oracle: bool = False):
    """One-shot pipeline on an in-memory series.

    Returns the HOC report, and with ``oracle`` also a second report built
    from batch sample autocorrelations of the same data (or the
    :class:`DataError` that prevented it).  RMSE is the AR-part one-step
    prediction error and is filled in only when ``oracle`` is set.
    """
    if len(y) < cfg.min_samples:
        raise DataError(
            f"{len(y)} samples are not enough; ARMA({cfg.n},{cfg.m}) needs at least "
            f"{cfg.min_samples}"
        )
    state = cfg.new_state().extend(y)
    counts = state.counts(use_ewma=cfg.ewma_lambda is not None)
    hoc_report = estimate_from_counts(counts, cfg)
    if not oracle:
        return hoc_report, None
    hoc_report.rmse = _rmse_or_none(y, hoc_report)
    try:
        rho = batch_acf(y, cfg.lags_needed)
    except DataError as exc:
        return hoc_report, exc
    batch_report = estimate_from_acf(rho, cfg, len(y))
    batch_report.rmse = _rmse_or_none(y, batch_report)
    return hoc_report, batch_report


def _rmse_or_none(y, report: Report) -> float | None:
    if not report.a_hat:
        return None
    try:
        return prediction_rmse(y, report.a_hat)
    except DataError:
        return None
