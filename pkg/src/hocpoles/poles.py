"""Polynomial roots, discrete-to-continuous pole mapping and damping ratios."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import RootFindingError, UndefinedDampingError

__all__ = [
    "Mode",
    "PoleReport",
    "find_roots",
    "to_continuous",
    "damping",
    "assess",
    "DEFAULT_ZETA_THRESHOLD",
]

DEFAULT_ZETA_THRESHOLD = 0.1
MAX_ITER = 500
PAIR_TOL = 1e-8
# |p_z| within this of 1 counts as on the unit circle
BOUNDARY_TOL = 1e-9
_ZERO_POLE = 1e-12


def _monic_coeffs(a) -> np.ndarray:
    coeffs = getattr(a, "a", None)
    if coeffs is not None:
        # DenominatorEstimate stores a1..an without the leading 1
        return np.concatenate([[1.0], np.asarray(coeffs, dtype=np.float64)])
    c = np.asarray(a, dtype=np.float64)
    if c.ndim != 1 or c.size < 2:
        raise ValueError("polynomial needs a leading 1 and at least one more coefficient")
    if c[0] != 1.0:
        raise ValueError(f"polynomial must be monic, leading coefficient is {c[0]}")
    return c


def _polish(c: np.ndarray, r, tol: float):
    """Newton refinement, keeping the best iterate seen."""
    dc = np.polyder(c)
    best, best_res = r, abs(np.polyval(c, r))
    for _ in range(MAX_ITER):
        if best_res <= tol * 1e-4:
            break
        d = np.polyval(dc, r)
        if d == 0:
            break
        r = r - np.polyval(c, r) / d
        res = abs(np.polyval(c, r))
        if not res < best_res:
            break
        best, best_res = r, res
    return best


def _order(real: list[float], upper: list[complex]) -> np.ndarray:
    groups = [[complex(r, 0.0)] for r in real]
    groups += [[u, u.conjugate()] for u in upper]
    groups.sort(key=lambda g: (-abs(g[0]), -g[0].real, -g[0].imag))
    return np.array([r for g in groups for r in g], dtype=complex)


def find_roots(a) -> np.ndarray:
    """All roots of the monic polynomial ``z^n + a1 z^(n-1) + ... + an``.

    Parameters
    ----------
    a : sequence of float or DenominatorEstimate
        Either the full coefficient list ``(1, a1, ..., an)`` or an estimate
        whose ``a`` attribute holds ``a1..an``.

    Returns
    -------
    ndarray of complex
        Roots ordered by decreasing modulus; conjugate pairs are adjacent
        with the positive imaginary part first, real roots have exactly
        zero imaginary part.

    Raises
    ------
    RootFindingError
        If a root fails the residual check ``|A(r)| < 1e-8 max(1, ||a||_1)``.
    """
    c = _monic_coeffs(a)
    if not np.all(np.isfinite(c)):
        raise RootFindingError("polynomial coefficients must be finite")
    n = c.size - 1
    tol = 1e-8 * max(1.0, float(np.sum(np.abs(c))))
    if n == 1:
        return np.array([complex(-c[1], 0.0)])
    companion = np.zeros((n, n))
    companion[0, :] = -c[1:]
    companion[1:, :-1] = np.eye(n - 1)
    try:
        raw = np.linalg.eigvals(companion)
    except np.linalg.LinAlgError as exc:
        raise RootFindingError(f"eigenvalue iteration failed: {exc}") from None
    real, upper, lower = [], [], 0
    for r in raw:
        if abs(r.imag) <= PAIR_TOL * max(1.0, abs(r)):
            real.append(float(_polish(c, float(r.real), tol)))
        elif r.imag > 0:
            upper.append(complex(_polish(c, complex(r), tol)))
        else:
            lower += 1
    if lower != len(upper):
        raise RootFindingError("complex roots do not form conjugate pairs")
    roots = _order(real, upper)
    for r in roots:
        res = abs(np.polyval(c, r))
        if not res < tol:
            raise RootFindingError(f"root {r} has residual {res:.3g} above {tol:.3g}")
    return roots


def to_continuous(p_z: complex, dt: float = 1.0) -> complex:
    """Map a discrete pole to continuous time, ``ln(p_z) / dt`` (principal branch)."""
    if dt <= 0:
        raise ValueError(f"sampling period must be positive, got {dt}")
    p_z = complex(p_z)
    if p_z == 0:
        raise ValueError("a zero discrete pole has no finite continuous image")
    if p_z.imag == 0.0:
        p_z = complex(p_z.real, 0.0)
    return cmath.log(p_z) / dt


def damping(poles: Sequence[complex], mode: str) -> float:
    """Damping ratio of a continuous mode.

    ``mode="conjugate-pair"`` takes one or both members of ``a +/- ib`` and
    returns ``-a / sqrt(a^2 + b^2)``, positive for stable poles.
    ``mode="real-pair"`` takes two real poles and returns
    ``-(p1 + p2) / (2 sqrt(p1 p2))``.
    """
    if mode == "conjugate-pair":
        p = complex(poles[0])
        mag = abs(p)
        if mag == 0:
            raise UndefinedDampingError("damping of a pole at the origin is undefined")
        return -p.real / mag
    if mode == "real-pair":
        if len(poles) != 2:
            raise ValueError("real-pair damping needs exactly two poles")
        p1, p2 = (complex(p).real for p in poles)
        prod = p1 * p2
        if prod <= 0:
            raise UndefinedDampingError(
                f"real poles {p1:.6g}, {p2:.6g} have non-positive product"
            )
        return -(p1 + p2) / (2.0 * math.sqrt(prod))
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class Mode:
    kind: str  # conjugate-pair | real-pair | unpaired-real | no-continuous-image
    indices: tuple[int, ...]
    zeta: float | None
    oscillatory: bool = False


@dataclass(frozen=True)
class PoleReport:
    discrete: tuple[complex, ...]
    continuous: tuple[complex | None, ...]
    modes: tuple[Mode, ...]
    unstable: tuple[bool, ...]
    warnings: tuple[str, ...] = field(default=())

    @property
    def any_unstable(self) -> bool:
        return any(self.unstable)

    @property
    def any_oscillatory(self) -> bool:
        return any(m.oscillatory for m in self.modes)


def assess(estimate, dt: float = 1.0, zeta_threshold: float = DEFAULT_ZETA_THRESHOLD) -> PoleReport:
    """Roots, continuous images, modes and health flags for an AR estimate.

    Conjugate pairs form one mode each.  Positive real poles are paired in
    order of dominance (slowest continuous pole first) and given the
    real-pair damping; an odd one out is ``unpaired-real`` with no damping.
    A negative real pole alternates sign every sample, so it is reported as
    ``unpaired-real`` with the conjugate-pair damping of its log image
    ``ln|p| + i pi``.
    """
    discrete = find_roots(estimate)
    continuous: list[complex | None] = []
    modes: list[Mode] = []
    warnings: list[str] = []
    degenerate = []
    for i, p in enumerate(discrete):
        if abs(p) < _ZERO_POLE:
            continuous.append(None)
            degenerate.append(i)
        else:
            continuous.append(to_continuous(p, dt))
    if degenerate:
        modes.append(Mode("no-continuous-image", tuple(degenerate), None))
        warnings.append("no_continuous_image")

    def oscillatory(zeta):
        return zeta is not None and zeta < zeta_threshold

    i = 0
    positive_real = []
    while i < len(discrete):
        if continuous[i] is None:
            i += 1
            continue
        p = discrete[i]
        if p.imag > 0.0:
            zeta = damping([continuous[i]], "conjugate-pair")
            modes.append(Mode("conjugate-pair", (i, i + 1), zeta, oscillatory(zeta)))
            i += 2
            continue
        if p.real < 0.0:
            zeta = damping([continuous[i]], "conjugate-pair")
            modes.append(Mode("unpaired-real", (i,), zeta, oscillatory(zeta)))
        else:
            positive_real.append(i)
        i += 1

    positive_real.sort(key=lambda j: -continuous[j].real)
    for j in range(0, len(positive_real) - 1, 2):
        pair = (positive_real[j], positive_real[j + 1])
        try:
            zeta = damping([continuous[k] for k in pair], "real-pair")
        except UndefinedDampingError:
            zeta = None
            warnings.append("undefined_damping")
        modes.append(Mode("real-pair", pair, zeta))
    if len(positive_real) % 2:
        modes.append(Mode("unpaired-real", (positive_real[-1],), None))

    unstable = tuple(bool(abs(p) >= 1.0 - BOUNDARY_TOL) for p in discrete)
    return PoleReport(
        discrete=tuple(complex(p) for p in discrete),
        continuous=tuple(continuous),
        modes=tuple(modes),
        unstable=unstable,
        warnings=tuple(warnings),
    )
