"""Batch autocorrelation and the modified Yule-Walker solve."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import DataError, IllConditionedError
from .hoc_acf import AcfSequence

__all__ = [
    "DenominatorEstimate",
    "batch_acf",
    "solve_myw",
    "prediction_rmse",
    "COND_WARN",
    "COND_FAIL",
    "NEAR_UNIT_LAG",
]

COND_WARN = 1e3
COND_FAIL = 1e8
# lags this close to one make the lag matrix nearly singular
NEAR_UNIT_LAG = 0.97


@dataclass(frozen=True)
class DenominatorEstimate:
    """Estimated ``a_1..a_n`` of ``A(z^-1) = 1 + a_1 z^-1 + ... + a_n z^-n``."""

    a: tuple[float, ...]
    k_start: int
    cond: float
    warnings: tuple[str, ...] = field(default=())

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def ill_conditioned(self) -> bool:
        return "ill_conditioned" in self.warnings or "near_unit_lags" in self.warnings

    @property
    def polynomial(self) -> tuple[float, ...]:
        return (1.0,) + self.a


def batch_acf(y, max_lag: int) -> AcfSequence:
    """Sample autocorrelation about the sample mean, normalized by the lag-0 sum."""
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    q = y.size
    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    if max_lag >= q or q < max_lag + 2:
        raise DataError(f"{q} samples are too few for {max_lag} lags")
    if not np.all(np.isfinite(y)):
        raise DataError("samples must be finite")
    z = y - y.mean()
    denom = float(np.dot(z, z))
    if denom == 0.0:
        raise DataError("series has zero variance")
    rho = [1.0] + [float(np.dot(z[:-k], z[k:])) / denom for k in range(1, max_lag + 1)]
    return AcfSequence(tuple(rho))


def _lag_system(rho: AcfSequence, n: int, k: int):
    omega = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            omega[i, j] = rho.lag(k - 1 + i - j)
    p = np.array([rho.lag(k + i) for i in range(n)])
    assert np.array_equal(omega[1:, 1:], omega[:-1, :-1]), "lag matrix must be Toeplitz"
    return omega, p


def solve_myw(rho: AcfSequence, n: int, m: int, k_start: int | None = None) -> DenominatorEstimate:
    """Solve the modified Yule-Walker equations for the AR coefficients.

    Uses the ``n`` equations at lags ``k .. k+n-1`` with ``k = m + 1`` unless
    ``k_start`` overrides it (it must exceed ``m``).  Negative lags are read
    as ``rho_{-j} = rho_j``.

    Raises
    ------
    IllConditionedError
        When the lag matrix is singular or its 2-norm condition number
        exceeds ``COND_FAIL``.  A least-squares estimate is attached when
        one exists.
    """
    if n < 1:
        raise ValueError(f"AR order must be at least 1, got {n}")
    if m < 0:
        raise ValueError(f"MA order must be non-negative, got {m}")
    k = m + 1 if k_start is None else int(k_start)
    if k <= m:
        raise ValueError(f"lag offset k={k} must exceed the MA order {m}")
    if not isinstance(rho, AcfSequence):
        rho = AcfSequence(tuple(rho))
    need = k + n - 1
    if rho.max_lag < need:
        raise DataError(f"ARMA({n},{m}) with k={k} needs lags up to {need}, got {rho.max_lag}")

    omega, p = _lag_system(rho, n, k)
    warnings = []
    if rho.any_clamped:
        warnings.append("acf_clamped")
    used = [abs(rho.lag(j)) for j in range(1, need + 1)]
    if used and max(used) > NEAR_UNIT_LAG:
        warnings.append("near_unit_lags")

    cond = float(np.linalg.cond(omega))
    if not math.isfinite(cond) or cond > COND_FAIL:
        fallback = None
        sol, *_ = np.linalg.lstsq(omega, p, rcond=None)
        if np.all(np.isfinite(sol)):
            fallback = DenominatorEstimate(
                tuple(float(-s) for s in sol), k, cond,
                tuple(warnings + ["ill_conditioned", "singular"]),
            )
        raise IllConditionedError(cond, fallback)
    if cond > COND_WARN:
        warnings.append("ill_conditioned")
    sol = np.linalg.solve(omega, p)
    # the system is solved for -a_i
    return DenominatorEstimate(tuple(float(-s) for s in sol), k, cond, tuple(warnings))


def prediction_rmse(y, a, eps=None, num=None) -> float:
    """Normalized prediction RMSE, ``sqrt(sum (Y - Y_hat)^2 / (N var(Y)))``.

    Without ``eps`` the prediction is the AR-part one-step predictor
    ``Y_hat_t = -sum a_i Y_{t-i}`` on the mean-removed series; the first
    ``n`` samples are skipped in the sum.

    With ``eps`` (the driving noise that produced ``y``) and ``num`` (the
    model numerator), ``Y_hat`` is the output of the estimated model
    ``num / A_hat`` driven by the same noise, which isolates the error due
    to the denominator estimate alone.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    coeffs = np.asarray(getattr(a, "a", a), dtype=np.float64)
    n = coeffs.size
    N = y.size
    if N < n + 1:
        raise DataError(f"{N} samples are too few for an order-{n} predictor")
    var = float(np.var(y))
    if var == 0.0:
        raise DataError("series has zero variance")
    if eps is not None:
        eps = np.asarray(eps, dtype=np.float64).reshape(-1)
        if num is None:
            raise ValueError("num is required together with eps")
        y_hat = lfilter(np.asarray(num, dtype=np.float64), np.r_[1.0, coeffs], eps)
        if y_hat.size < N:
            raise ValueError("eps is shorter than y")
        resid = y - y_hat[-N:]
        return math.sqrt(float(np.dot(resid, resid)) / (N * var))
    z = y - y.mean()
    pred = np.zeros(N - n)
    for i in range(1, n + 1):
        pred -= coeffs[i - 1] * z[n - i : N - i]
    resid = z[n:] - pred
    return math.sqrt(float(np.dot(resid, resid)) / (N * var))
