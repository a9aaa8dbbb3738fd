"""ARMA models, seeded signal generation and analytic oracles.

Models follow the backward-shift convention

    A(z^-1) Y_t = B(z^-1) e_t,   A = 1 + a1 z^-1 + ... + an z^-n,
                                 B = 1 + b1 z^-1 + ... + bm z^-m

so ``den = (1, a1, ..., an)`` and ``num = (1, b1, ..., bm)``.

Random numbers come from ``numpy.random.Generator(PCG64(seed))`` and its
``standard_normal`` method.  That choice is part of the reproducibility
contract: changing it changes every seeded regression value in the repo.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .errors import ModelError, UnstableModelError
from .poles import find_roots

__all__ = [
    "ArmaSpec",
    "NoiseConfig",
    "ClosedLoopSpec",
    "G11",
    "G21",
    "DEFAULT_WARMUP",
    "arma_filter",
    "gaussian_noise",
    "generate_arma",
    "closed_loop_to_arma",
    "analytic_acf",
    "true_poles",
    "load_model",
    "save_model",
]

DEFAULT_WARMUP = 100


@dataclass(frozen=True)
class ArmaSpec:
    """Rational transfer function ``B/A`` driven by white noise."""

    num: tuple[float, ...]
    den: tuple[float, ...]

    def __post_init__(self):
        num = tuple(float(c) for c in self.num)
        den = tuple(float(c) for c in self.den)
        if not num or not den:
            raise ModelError("num and den must each hold at least one coefficient")
        if num[0] != 1.0 or den[0] != 1.0:
            raise ModelError(
                f"model must be monic (num[0]=den[0]=1), got num[0]={num[0]}, den[0]={den[0]}"
            )
        if not all(math.isfinite(c) for c in num + den):
            raise ModelError("coefficients must be finite")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def n(self) -> int:
        """AR order."""
        return len(self.den) - 1

    @property
    def m(self) -> int:
        """MA order."""
        return len(self.num) - 1

    def is_stable(self) -> bool:
        if self.n == 0:
            return True
        return bool(np.all(np.abs(true_poles(self)) < 1.0))

    def to_dict(self) -> dict:
        return {"num": list(self.num), "den": list(self.den)}

    @classmethod
    def from_dict(cls, d: dict) -> ArmaSpec:
        try:
            return cls(num=tuple(d["num"]), den=tuple(d["den"]))
        except (KeyError, TypeError) as exc:
            raise ModelError(f"model must have numeric 'num' and 'den' lists: {exc}") from None


@dataclass(frozen=True)
class NoiseConfig:
    """Seeded IID Gaussian driving noise."""

    seed: int
    count: int
    variance: float = 1.0

    def __post_init__(self):
        if not self.variance > 0:
            raise ModelError(f"noise variance must be positive, got {self.variance}")
        if self.count < 2:
            raise ModelError(f"sample count must be at least 2, got {self.count}")


@dataclass(frozen=True)
class ClosedLoopSpec:
    """First-order-plus-delay plant under integral control.

    The noise model equals the plant denominator, so the loop error is an
    ARMA(max(2, delay), 1) process.
    """

    alpha: float
    delay: int
    kc: float
    dt: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ModelError(f"plant pole alpha must lie in (0, 1), got {self.alpha}")
        if int(self.delay) != self.delay or self.delay < 1:
            raise ModelError(f"delay must be an integer >= 1, got {self.delay}")
        if not self.kc >= 0.0:
            raise ModelError(f"controller gain must be non-negative, got {self.kc}")
        if not self.dt > 0.0:
            raise ModelError(f"sampling period must be positive, got {self.dt}")


G11 = ArmaSpec(num=(1.0, -0.5), den=(1.0, -0.95))
G21 = ArmaSpec(num=(1.0, -0.5), den=(1.0, -1.85, 0.855))


def true_poles(spec: ArmaSpec) -> np.ndarray:
    """Roots of ``z^n + a1 z^(n-1) + ... + an``."""
    if spec.n < 1:
        raise ModelError("a model without AR terms has no poles")
    return find_roots(spec.den)


def arma_filter(spec: ArmaSpec, eps) -> np.ndarray:
    """Run the difference equation over ``eps`` from zero initial conditions.

    ``Y_t = -sum_i a_i Y_{t-i} + sum_j b_j eps_{t-j}``
    """
    eps = np.asarray(eps, dtype=np.float64)
    return lfilter(spec.num, spec.den, eps)


def gaussian_noise(noise: NoiseConfig, extra: int = 0) -> np.ndarray:
    """``noise.count + extra`` IID normal draws with the configured variance."""
    rng = np.random.Generator(np.random.PCG64(noise.seed))
    return math.sqrt(noise.variance) * rng.standard_normal(noise.count + extra)


def generate_arma(
    spec: ArmaSpec,
    noise: NoiseConfig,
    warmup: int = DEFAULT_WARMUP,
    force: bool = False,
) -> np.ndarray:
    """Simulate ``noise.count`` samples of the process.

    The first ``warmup`` filter outputs are discarded to suppress the
    start-up transient.  Unstable models are rejected unless ``force``.
    """
    if warmup < 0:
        raise ModelError(f"warmup must be non-negative, got {warmup}")
    if not force and not spec.is_stable():
        raise UnstableModelError(
            f"denominator {spec.den} has poles on or outside the unit circle"
        )
    eps = gaussian_noise(noise, extra=warmup)
    return arma_filter(spec, eps)[warmup:]


def closed_loop_to_arma(cl: ClosedLoopSpec) -> ArmaSpec:
    """Loop error model ``(1 - z^-1) / (1 - (1+a)z^-1 + a z^-2 + (1-a) Kc z^-d)``."""
    if cl.delay < 1:
        raise ModelError(f"delay must be >= 1, got {cl.delay}")
    order = max(2, cl.delay)
    den = [0.0] * (order + 1)
    den[0] = 1.0
    den[1] = -(1.0 + cl.alpha)
    den[2] = cl.alpha
    den[cl.delay] += (1.0 - cl.alpha) * cl.kc
    return ArmaSpec(num=(1.0, -1.0), den=tuple(den))


def analytic_acf(spec: ArmaSpec, max_lag: int):
    """Exact autocorrelations rho_0..rho_max_lag of a stable ARMA model.

    Solves the linear autocovariance equations for lags 0..max(n, m) and
    extends with ``rho_k = -sum a_i rho_{k-i}`` beyond that.
    """
    from .hoc_acf import AcfSequence

    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    if not spec.is_stable():
        raise UnstableModelError(f"denominator {spec.den} is not stable")
    a = np.asarray(spec.den)
    b = np.asarray(spec.num)
    n, m = spec.n, spec.m
    p = max(n, m)

    # impulse response psi_0..psi_m of B/A
    psi = np.zeros(m + 1)
    for j in range(m + 1):
        acc = b[j]
        for i in range(1, min(j, n) + 1):
            acc -= a[i] * psi[j - i]
        psi[j] = acc

    # sum_i a_i gamma(k - i) = sum_{j>=k} b_j psi_{j-k}, gamma symmetric
    lhs = np.zeros((p + 1, p + 1))
    rhs = np.zeros(p + 1)
    for k in range(p + 1):
        for i in range(n + 1):
            lhs[k, abs(k - i)] += a[i]
        rhs[k] = sum(b[j] * psi[j - k] for j in range(k, m + 1))
    gamma = list(np.linalg.solve(lhs, rhs))
    for k in range(p + 1, max_lag + 1):
        gamma.append(-sum(a[i] * gamma[k - i] for i in range(1, n + 1)))
    rho = np.asarray(gamma[: max_lag + 1]) / gamma[0]
    if len(rho) < max_lag + 1:
        rho = np.concatenate([rho, np.zeros(max_lag + 1 - len(rho))])
    rho[0] = 1.0
    return AcfSequence(rho)


def load_model(path) -> ArmaSpec:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: not valid JSON ({exc})") from None
    return ArmaSpec.from_dict(data)


def save_model(spec: ArmaSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict()) + "\n")
