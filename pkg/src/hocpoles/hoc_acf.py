"""Autocorrelation lags from normalized higher-order crossings.

For a stationary Gaussian series the crossing rate of ``nabla^k Y`` is the
lag-one autocorrelation of that differenced series, mapped through
``cos(pi * D~)``.  Writing the lag-one autocorrelation of ``nabla^k Y`` in
terms of the lags of ``Y`` gives a relation that is linear in
``rho_{k+1}``, so the lags can be peeled off one level at a time::

    rho_{k+1} = (-1)^k * (Psi_k * cos(pi D~_{k+1}) - Phi_k)

with ``Psi_k`` and ``Phi_k`` binomial combinations of ``rho_1..rho_k``.
Each step reuses the previous estimates, so count noise compounds with
depth; recursion is capped at 12 levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError

__all__ = [
    "AcfSequence",
    "PsiPhi",
    "binom",
    "psi_phi",
    "next_lag",
    "acf_from_hoc",
    "hoc_from_acf",
    "MAX_DEPTH",
]

MAX_DEPTH = 12
RATIO_TOL = 1e-9


@dataclass(frozen=True)
class AcfSequence:
    """Autocorrelation lags ``rho_0..rho_K`` with per-lag clamp flags."""

    rho: tuple[float, ...]
    clamped: tuple[bool, ...] = field(default=())

    def __post_init__(self):
        rho = tuple(float(r) for r in self.rho)
        if not rho:
            raise ValueError("an ACF needs at least rho_0")
        clamped = tuple(bool(c) for c in self.clamped) or (False,) * len(rho)
        if len(clamped) != len(rho):
            raise ValueError("clamped flags must match the number of lags")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "clamped", clamped)

    @property
    def max_lag(self) -> int:
        return len(self.rho) - 1

    def lag(self, k: int) -> float:
        """``rho_k`` with ``rho_{-k} = rho_k``."""
        return self.rho[abs(k)]

    def __len__(self):
        return len(self.rho)

    def __getitem__(self, k):
        return self.rho[k]

    @property
    def any_clamped(self) -> bool:
        return any(self.clamped)


@dataclass(frozen=True)
class PsiPhi:
    psi: float
    phi: float
    k: int


def binom(n: int, r: int) -> int:
    """``C(n, r)``, zero outside ``0 <= r <= n``."""
    if r < 0 or r > n:
        return 0
    return math.comb(n, r)


def _rho(rho) -> Sequence[float]:
    return rho.rho if isinstance(rho, AcfSequence) else rho


def _terms(k: int, r) -> tuple[list[float], list[float]]:
    # summands of Psi and Phi, kept apart so callers can use compensated sums
    n = 2 * k
    psi = [float(binom(n, k))]
    phi = [-float(binom(n, k - 1))]
    for j in range(1, k + 1):
        sign = -1.0 if j % 2 else 1.0
        psi.append(2.0 * sign * r[j] * binom(n, k - j))
        phi.append(-sign * r[j] * (binom(n, k - j + 1) + binom(n, k - j - 1)))
    return psi, phi


def psi_phi(k: int, rho) -> PsiPhi:
    """Coefficients of the level-``k`` relation.

    ``Psi = C(2k,k) + 2 sum_{j=1..k} (-1)^j rho_j C(2k,k-j)``
    ``Phi = -C(2k,k-1) + sum_{j=1..k} (-1)^(j+1) rho_j [C(2k,k-j+1) + C(2k,k-j-1)]``
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    r = _rho(rho)
    if len(r) <= k:
        raise ValueError(f"psi_phi({k}) needs lags rho_1..rho_{k}, got {len(r) - 1}")
    if k == 0:
        return PsiPhi(1.0, 0.0, 0)
    psi, phi = _terms(k, r)
    return PsiPhi(math.fsum(psi), math.fsum(phi), k)


def next_lag(k: int, rho, d_tilde_next: float) -> tuple[float, bool]:
    """``rho_{k+1}`` from ``rho_1..rho_k`` and the normalized count ``D~_{k+1}``.

    Returns the lag clamped to ``[-1, 1]`` and whether clamping was needed.
    """
    if not 0.0 <= d_tilde_next <= 1.0:
        raise ValueError(f"normalized count must lie in [0, 1], got {d_tilde_next}")
    c = math.cos(math.pi * d_tilde_next)
    if k == 0:
        return c, False
    r = _rho(rho)
    if len(r) <= k:
        raise ValueError(f"next_lag({k}) needs lags rho_1..rho_{k}, got {len(r) - 1}")
    psi, phi = _terms(k, r)
    # Psi and Phi are large and nearly cancel at high k
    value = math.fsum([t * c for t in psi] + [-t for t in phi])
    if k % 2:
        value = -value
    if value > 1.0:
        return 1.0, True
    if value < -1.0:
        return -1.0, True
    return value, False


def acf_from_hoc(counts, max_lag: int) -> AcfSequence:
    """Lags ``rho_0..rho_K`` from the first ``K`` normalized crossing counts.

    ``counts`` is a :class:`~hocpoles.crossings.HocCounts` or a plain
    sequence of ``D~`` values.
    """
    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    if max_lag > MAX_DEPTH:
        raise ValueError(f"recursion depth {max_lag} exceeds the supported {MAX_DEPTH}")
    d_tilde = getattr(counts, "d_tilde", counts)
    valid = getattr(counts, "valid", None)
    if len(d_tilde) < max_lag:
        raise DataError(f"{max_lag} lags need {max_lag} crossing levels, got {len(d_tilde)}")
    rho = [1.0]
    clamped = [False]
    for k in range(max_lag):
        dk = d_tilde[k]
        if dk is None or (valid is not None and not valid[k]):
            raise DataError(f"crossing level {k + 1} has too few samples")
        value, clip = next_lag(k, rho, dk)
        rho.append(value)
        clamped.append(clip)
    return AcfSequence(tuple(rho), tuple(clamped))


def hoc_from_acf(rho, levels: int) -> tuple[float, ...]:
    """Expected normalized counts ``D~_1..D~_L`` of a process with the given lags."""
    r = _rho(rho)
    if len(r) < levels + 1:
        raise ValueError(f"{levels} levels need lags up to rho_{levels}")
    out = []
    for k in range(levels):
        psi, phi = _terms(k, r) if k else ([1.0], [0.0])
        var = math.fsum(psi)
        if not var > 0.0:
            raise DataError(f"differenced series at level {k + 1} has non-positive variance")
        sign = -1.0 if k % 2 else 1.0
        ratio = math.fsum(phi + [sign * r[k + 1]]) / var
        if abs(ratio) > 1.0 + RATIO_TOL:
            raise DataError(
                f"lags are not a valid autocorrelation: level {k + 1} ratio {ratio:.12g}"
            )
        out.append(math.acos(float(np.clip(ratio, -1.0, 1.0))) / math.pi)
    return tuple(out)
