"""Streaming higher-order crossing counts.

A :class:`HocState` keeps, for each of ``L`` levels, the last raw value of
``nabla^(k-1) Y``, the previous clipped bit, the crossing count and the
number of values seen.  That is all the memory the estimator needs, so a
state never grows with the length of the stream.

Clipping follows ``X_t = 1 if value >= 0 else 0``; a crossing is counted
whenever consecutive bits differ.  Level 1 is clipped against a reference
level (zero, a fixed value, or the running mean); differenced levels are
always clipped at zero.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _backend
from ._kernel_py import MEAN_FIXED, MEAN_RUNNING
from .errors import ConfigMismatchError, DataError

__all__ = [
    "EwmaState",
    "HocCounts",
    "HocConfig",
    "HocState",
    "ewma_update",
    "ingest",
    "snapshot",
    "merge",
    "MEAN_MODES",
    "DEFAULT_MEAN_WARMUP",
]

MEAN_MODES = ("zero", "fixed", "running")
DEFAULT_MEAN_WARMUP = 50


@dataclass(frozen=True)
class EwmaState:
    """Exponentially weighted mean of the samples between crossings.

    ``run_length`` is -1 until the first crossing has been seen; only the
    gaps between later crossings are full periods.
    """

    lam: float
    mean_period: float | None = None
    run_length: int = -1

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"forgetting factor must lie in [0, 1], got {self.lam}")

    @property
    def rate(self) -> float | None:
        """Crossings per sample implied by the mean period."""
        if self.mean_period is None:
            return None
        return 1.0 / self.mean_period


def ewma_update(e: EwmaState, period: float) -> EwmaState:
    """Fold one inter-crossing period into the running mean.

    The first observation initialises the mean; later ones apply
    ``T_bar <- (1 - lam) T_bar + lam T``.
    """
    if not period >= 1:
        raise ValueError(f"period must be at least one sample, got {period}")
    if e.mean_period is None:
        new = float(period)
    else:
        new = (1.0 - e.lam) * e.mean_period + e.lam * period
    return EwmaState(e.lam, new, 0)


@dataclass(frozen=True)
class HocCounts:
    """Immutable view of the crossing counts at one instant.

    ``d_tilde[k]`` is ``d[k] / (N_k - 1)`` where ``N_k`` is the number of
    values seen at level ``k`` (fewer at higher levels, since each
    difference consumes a sample).  Levels with fewer than two values are
    invalid and carry ``None``.  In EWMA mode ``d_tilde`` holds the inverse
    mean period instead.
    """

    d: tuple[int, ...]
    d_tilde: tuple[float | None, ...]
    valid: tuple[bool, ...]
    n: int
    source: str = "counts"

    @property
    def valid_levels(self) -> int:
        """Number of leading levels that can be used."""
        k = 0
        while k < len(self.valid) and self.valid[k]:
            k += 1
        return k


@dataclass(frozen=True)
class HocConfig:
    levels: int
    mean_mode: str = "zero"
    mean_level: float = 0.0
    warmup: int = DEFAULT_MEAN_WARMUP
    ewma_lambda: float | None = None

    def __post_init__(self):
        if int(self.levels) != self.levels or self.levels < 1:
            raise ValueError(f"levels must be a positive integer, got {self.levels}")
        if self.mean_mode not in MEAN_MODES:
            raise ValueError(f"mean_mode must be one of {MEAN_MODES}, got {self.mean_mode!r}")
        if self.warmup < 0:
            raise ValueError(f"warmup must be non-negative, got {self.warmup}")
        if not math.isfinite(self.mean_level):
            raise ValueError("mean_level must be finite")
        if self.ewma_lambda is not None and not 0.0 <= self.ewma_lambda <= 1.0:
            raise ValueError(f"forgetting factor must lie in [0, 1], got {self.ewma_lambda}")

    def as_dict(self) -> dict:
        return {
            "levels": int(self.levels),
            "mean_mode": self.mean_mode,
            "mean_level": float(self.mean_level) if self.mean_mode == "fixed" else 0.0,
            "warmup": int(self.warmup) if self.mean_mode == "running" else 0,
            "ewma_lambda": None if self.ewma_lambda is None else float(self.ewma_lambda),
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _nan_to_none(v: float):
    return None if math.isnan(v) else float(v)


def _none_to_nan(v) -> float:
    return math.nan if v is None else float(v)


class HocState:
    """Live crossing state for one stream.

    Parameters
    ----------
    levels : int
        Number of crossing counts to track (``n + m`` for an ARMA(n, m)).
    mean_mode : {"zero", "fixed", "running"}
        Reference level for clipping the raw signal.
    mean_level : float
        Reference used when ``mean_mode == "fixed"``.
    warmup : int
        In running-mean mode, no level-1 crossings are counted until this
        many samples have entered the mean.
    ewma_lambda : float, optional
        Enables EWMA tracking of inter-crossing periods with this forgetting
        factor.

    Notes
    -----
    One writer at a time.  :meth:`counts` returns an immutable value that is
    safe to hand to another thread.
    """

    def __init__(self, levels, mean_mode="zero", mean_level=0.0,
                 warmup=DEFAULT_MEAN_WARMUP, ewma_lambda=None):
        self.config = HocConfig(int(levels), mean_mode, float(mean_level), int(warmup),
                                None if ewma_lambda is None else float(ewma_lambda))
        L = self.config.levels
        self.tails = np.full(L, np.nan)
        self.bits = np.full(L, -1, dtype=np.int8)
        self.d = np.zeros(L, dtype=np.int64)
        self.samples = np.zeros(L, dtype=np.int64)
        self.mean_sum = np.zeros(1)
        self.mean_count = np.zeros(1, dtype=np.int64)
        self.periods = np.full(L, np.nan)
        self.runs = np.full(L, -1, dtype=np.int64)
        # level-0 samples consumed by earlier segments of the same stream
        self.origin = 0

    @classmethod
    def from_config(cls, config: HocConfig) -> HocState:
        return cls(config.levels, config.mean_mode, config.mean_level, config.warmup,
                   config.ewma_lambda)

    @property
    def levels(self) -> int:
        return self.config.levels

    @property
    def uses_ewma(self) -> bool:
        return self.config.ewma_lambda is not None

    @property
    def total_samples(self) -> int:
        return self.origin + int(self.samples[0])

    def extend(self, values) -> HocState:
        """Ingest a block of samples.  Non-finite input leaves the state untouched."""
        y = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
        if y.size == 0:
            return self
        if not np.all(np.isfinite(y)):
            bad = int(np.flatnonzero(~np.isfinite(y))[0])
            raise DataError(f"non-finite sample at offset {bad}: {y[bad]!r}")
        cfg = self.config
        mode = MEAN_RUNNING if cfg.mean_mode == "running" else MEAN_FIXED
        ref = cfg.mean_level if cfg.mean_mode == "fixed" else 0.0
        lam = cfg.ewma_lambda if cfg.ewma_lambda is not None else 0.0
        _backend.ingest_block(y, self.tails, self.bits, self.d, self.samples, mode, ref,
                              cfg.warmup, self.mean_sum, self.mean_count, self.uses_ewma,
                              lam, self.periods, self.runs)
        return self

    def ingest(self, y: float) -> HocState:
        return self.extend([y])

    def _transitions(self) -> np.ndarray:
        start = np.ones(self.levels, dtype=np.int64)
        if self.config.mean_mode == "running":
            start[0] = max(self.config.warmup, 1)
        return self.samples - start

    def counts(self, use_ewma: bool = False) -> HocCounts:
        """Normalized crossing counts; see :class:`HocCounts`."""
        trans = self._transitions()
        valid = [bool(t >= 1) for t in trans]
        if use_ewma:
            if not self.uses_ewma:
                raise ValueError("state was not configured with a forgetting factor")
            rates = [None if math.isnan(p) else 1.0 / p for p in self.periods]
            valid = [v and r is not None for v, r in zip(valid, rates)]
            d_tilde = tuple(r if v else None for r, v in zip(rates, valid))
            source = "ewma"
        else:
            d_tilde = tuple(int(c) / int(t) if v else None
                            for c, t, v in zip(self.d, trans, valid))
            source = "counts"
        return HocCounts(
            d=tuple(int(c) for c in self.d),
            d_tilde=d_tilde,
            valid=tuple(valid),
            n=self.total_samples,
            source=source,
        )

    def ewma_states(self) -> list[EwmaState]:
        if not self.uses_ewma:
            return []
        return [EwmaState(self.config.ewma_lambda, _nan_to_none(p), int(r))
                for p, r in zip(self.periods, self.runs)]

    def copy(self) -> HocState:
        return HocState.from_dict(self.to_dict())

    def continuation(self) -> HocState:
        """Fresh segment that resumes exactly where this state stopped.

        Tails, bits, the running mean and EWMA state carry over, so the first
        values of the new segment are compared against this segment's last
        ones.  Counts start from zero; :func:`merge` adds them back.
        """
        nxt = self.copy()
        nxt.d[:] = 0
        nxt.samples[:] = 0
        nxt.origin = self.total_samples
        return nxt

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        cfg = self.config
        ewma = None
        if self.uses_ewma:
            ewma = {
                "lambda": cfg.ewma_lambda,
                "periods": [_nan_to_none(p) for p in self.periods],
                "runs": [int(r) for r in self.runs],
            }
        return {
            "levels": cfg.levels,
            "counts": [int(c) for c in self.d],
            "samples": [int(s) for s in self.samples],
            "tails": [_nan_to_none(t) for t in self.tails],
            "bits": [None if b < 0 else int(b) for b in self.bits],
            "mean_mode": cfg.mean_mode,
            "mean_state": {
                "level": float(cfg.mean_level),
                "warmup": int(cfg.warmup),
                "sum": float(self.mean_sum[0]),
                "count": int(self.mean_count[0]),
            },
            "ewma": ewma,
            "origin": int(self.origin),
            "config_hash": cfg.config_hash(),
        }

    @classmethod
    def from_dict(cls, d: dict, expect: HocConfig | None = None) -> HocState:
        try:
            ms = d["mean_state"]
            ewma = d["ewma"]
            cfg = HocConfig(
                levels=int(d["levels"]),
                mean_mode=d["mean_mode"],
                mean_level=float(ms["level"]),
                warmup=int(ms["warmup"]),
                ewma_lambda=None if ewma is None else float(ewma["lambda"]),
            )
            L = cfg.levels
            arrays = [d["counts"], d["samples"], d["tails"], d["bits"]]
            if ewma is not None:
                arrays += [ewma["periods"], ewma["runs"]]
            if any(len(a) != L for a in arrays):
                raise ValueError("per-level arrays do not match 'levels'")
            if d["config_hash"] != cfg.config_hash():
                raise ValueError("config_hash does not match the stored configuration")
            state = cls.from_config(cfg)
            state.d[:] = [int(c) for c in d["counts"]]
            state.samples[:] = [int(s) for s in d["samples"]]
            state.tails[:] = [_none_to_nan(t) for t in d["tails"]]
            state.bits[:] = [-1 if b is None else int(b) for b in d["bits"]]
            state.mean_sum[0] = float(ms["sum"])
            state.mean_count[0] = int(ms["count"])
            if ewma is not None:
                state.periods[:] = [_none_to_nan(p) for p in ewma["periods"]]
                state.runs[:] = [int(r) for r in ewma["runs"]]
            state.origin = int(d.get("origin", 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"corrupt state: {exc}") from None
        if expect is not None and expect.config_hash() != cfg.config_hash():
            raise ConfigMismatchError(
                f"state was saved with config {cfg.as_dict()}, expected {expect.as_dict()}"
            )
        return state

    def dumps(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path, expect: HocConfig | None = None) -> HocState:
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: corrupt state file ({exc})") from None
        return cls.from_dict(data, expect)

    def __repr__(self):
        return (f"HocState(levels={self.levels}, n={self.total_samples}, "
                f"counts={[int(c) for c in self.d]})")


def ingest(state: HocState, y: float) -> HocState:
    """Push one sample; returns the same (updated) state."""
    return state.ingest(y)


def snapshot(state: HocState, use_ewma: bool = False) -> HocCounts:
    return state.counts(use_ewma)


def merge(a: HocState, b: HocState) -> HocState:
    """Combine a segment with its continuation (see :meth:`HocState.continuation`)."""
    if a.config.config_hash() != b.config.config_hash():
        raise ConfigMismatchError(f"cannot merge {a.config} with {b.config}")
    if b.origin != a.total_samples:
        raise ConfigMismatchError(
            f"segments are not contiguous: first ends at sample {a.total_samples}, "
            f"second starts at {b.origin}"
        )
    out = b.copy()
    out.d = a.d + b.d
    out.samples = a.samples + b.samples
    out.origin = a.origin
    return out
