"""Re-run the two published benchmark experiments with fixed seeds.

Seeds are part of the repository contract: ``table1`` uses seed 11 for
G11 and 21 for G21; ``table2`` uses seeds 205, 210, 250 and 275 for the
gains 0.05, 0.1, 0.5 and 0.75.  Setting ``HOCPOLES_SEED`` replaces them
with ``HOCPOLES_SEED + i`` (i = row index), which breaks comparability
with the documented output.
"""

from __future__ import annotations

import math
import os
from itertools import permutations
from dataclasses import dataclass

import numpy as np

from .model_sim import (DEFAULT_WARMUP, G11, G21, ArmaSpec, ClosedLoopSpec, NoiseConfig,
                        arma_filter, closed_loop_to_arma, gaussian_noise, true_poles)
from .myw import batch_acf, prediction_rmse
from .pipeline import RunConfig, estimate_from_acf, estimate_from_counts
from .poles import damping, to_continuous

__all__ = ["Table1Row", "Table2Row", "table1", "table2", "format_table1", "format_table2",
           "match_poles", "TABLE1_SEEDS", "TABLE2_SEEDS", "SAMPLES"]

SAMPLES = 10_000
TABLE1_SEEDS = {"G11": 11, "G21": 21}
TABLE2_GAINS = (0.05, 0.1, 0.5, 0.75)
TABLE2_SEEDS = {0.05: 205, 0.1: 210, 0.5: 250, 0.75: 275}

# published values
PUBLISHED_TABLE1 = {
    "G11": {"hoc": (2088, 6338), "rho_hoc": (0.792, 0.754), "rho_batch": (0.784, 0.742),
            "poles_hoc": (0.952,), "poles_batch": (0.946,), "rmse_hoc": 0.028,
            "rmse_batch": 0.047},
    "G21": {"hoc": (268, 3249, 6355), "rho_hoc": (0.996, 0.989, 0.979),
            "rho_batch": (0.996, 0.987, 0.976), "poles_hoc": (0.968, 0.870),
            "poles_batch": (0.962, 0.870), "rmse_hoc": 0.154, "rmse_batch": 0.078},
}
# columns as printed; the analytic roots sit under "estimated" (see README)
PUBLISHED_TABLE2 = {
    0.05: {"actual": 0.8912 + 0.0696j, "zeta_actual": 0.69,
           "estimated": 0.9500 + 0.0500j, "zeta_estimated": 0.82},
    0.1: {"actual": 0.9252 + 0.0980j, "zeta_actual": 0.46,
          "estimated": 0.9500 + 0.0866j, "zeta_estimated": 0.56},
    0.5: {"actual": 0.9482 + 0.2185j, "zeta_actual": 0.11,
          "estimated": 0.9500 + 0.2179j, "zeta_estimated": 0.12},
    0.75: {"actual": 0.9506 + 0.2701j, "zeta_actual": 0.05,
           "estimated": 0.9500 + 0.2693j, "zeta_estimated": 0.04},
}

# pass/fail tolerances
TOL_G11_POLE = 0.02
TOL_G21_POLE = 0.03
TOL_CROSS_PATH = 0.02
TOL_RMSE_MAX = 0.2
TOL_ANALYTIC_POLE = 1e-4
TOL_ZETA = {0.05: 0.15, 0.75: 0.03}


def _seed(default: int, index: int) -> int:
    env = os.environ.get("HOCPOLES_SEED")
    if env:
        return int(env) + index
    return default


def match_poles(estimated, reference) -> np.ndarray:
    """Absolute errors after pairing each reference pole with its closest estimate."""
    est = [complex(p) for p in estimated]
    ref = [complex(p) for p in reference]
    if len(est) != len(ref):
        raise ValueError("pole lists differ in length")
    best = min(permutations(range(len(est))),
               key=lambda perm: sum(abs(est[perm[i]] - ref[i]) for i in range(len(ref))))
    return np.array([abs(est[best[i]] - ref[i]) for i in range(len(ref))])


def _simulate(spec: ArmaSpec, seed: int, samples: int = SAMPLES):
    eps = gaussian_noise(NoiseConfig(seed, samples), extra=DEFAULT_WARMUP)
    y = arma_filter(spec, eps)
    return y[DEFAULT_WARMUP:], eps


@dataclass
class Table1Row:
    system: str
    seed: int
    truth: tuple[float, ...]
    hoc: tuple[int, ...]
    rho_hoc: tuple[float, ...]
    rho_batch: tuple[float, ...]
    poles_hoc: tuple[complex, ...]
    poles_batch: tuple[complex, ...]
    rmse_hoc: float | None
    rmse_batch: float | None
    ill_conditioned: bool

    @property
    def pole_error(self) -> float:
        return float(match_poles(self.poles_hoc, self.truth).max())

    @property
    def cross_path_gap(self) -> float:
        return float(match_poles(self.poles_hoc, self.poles_batch).max())

    @property
    def pole_tolerance(self) -> float:
        return TOL_G11_POLE if self.system == "G11" else TOL_G21_POLE

    @property
    def passed(self) -> dict[str, bool]:
        return {
            "pole": self.pole_error <= self.pole_tolerance,
            "cross_path": self.cross_path_gap <= TOL_CROSS_PATH,
            "rmse": self.rmse_hoc is not None and 0.0 <= self.rmse_hoc <= TOL_RMSE_MAX,
        }


def run_table1_system(name: str, seed: int, samples: int = SAMPLES) -> Table1Row:
    spec, (n, m) = {"G11": (G11, (1, 1)), "G21": (G21, (2, 1))}[name]
    cfg = RunConfig(n=n, m=m)
    y, eps = _simulate(spec, seed, samples)
    state = cfg.new_state().extend(y)
    hoc = estimate_from_counts(state.counts(), cfg)
    batch = estimate_from_acf(batch_acf(y, cfg.lags_needed), cfg, len(y))
    # Y_hat is the estimated model driven by the same noise; see prediction_rmse
    rmse_hoc = prediction_rmse(y, hoc.a_hat, eps=eps, num=spec.num) if hoc.a_hat else None
    rmse_batch = (prediction_rmse(y, batch.a_hat, eps=eps, num=spec.num)
                  if batch.a_hat else None)
    return Table1Row(
        system=name,
        seed=seed,
        truth=tuple(round(float(p.real), 12) for p in true_poles(spec)),
        hoc=tuple(hoc.hoc),
        rho_hoc=tuple(hoc.acf[1:]),
        rho_batch=tuple(batch.acf[1:]),
        poles_hoc=tuple(hoc.poles),
        poles_batch=tuple(batch.poles),
        rmse_hoc=rmse_hoc,
        rmse_batch=rmse_batch,
        ill_conditioned=hoc.ill_conditioned,
    )


def table1() -> list[Table1Row]:
    return [run_table1_system(name, _seed(seed, i))
            for i, (name, seed) in enumerate(TABLE1_SEEDS.items())]


@dataclass
class Table2Row:
    kc: float
    seed: int
    analytic: complex
    zeta_true: float
    estimated: tuple[complex, ...]
    zeta_hat: float | None
    mode: str

    @property
    def analytic_error(self) -> float:
        """Distance between the analytic pole and the quadratic-formula value."""
        c = 0.9 + 0.1 * self.kc
        root = complex(0.95, math.sqrt(c - 0.95 ** 2))
        return abs(self.analytic - root)

    @property
    def zeta_error(self) -> float:
        if self.zeta_hat is None:
            return math.inf
        return abs(self.zeta_hat - self.zeta_true)

    @property
    def passed(self) -> dict[str, bool]:
        out = {"analytic": self.analytic_error <= TOL_ANALYTIC_POLE}
        if self.kc in TOL_ZETA:
            out["zeta"] = self.zeta_error <= TOL_ZETA[self.kc]
        return out


def closed_loop(kc: float) -> ClosedLoopSpec:
    return ClosedLoopSpec(alpha=0.9, delay=2, kc=kc)


def true_damping(kc: float) -> tuple[complex, float]:
    """Upper analytic pole and its damping ratio for the alpha=0.9, d=2 loop."""
    spec = closed_loop_to_arma(closed_loop(kc))
    poles = true_poles(spec)
    upper = max(poles, key=lambda p: p.imag)
    return complex(upper), damping([to_continuous(upper)], "conjugate-pair")


def run_table2_gain(kc: float, seed: int, samples: int = SAMPLES) -> Table2Row:
    spec = closed_loop_to_arma(closed_loop(kc))
    analytic, zeta_true = true_damping(kc)
    cfg = RunConfig(n=spec.n, m=spec.m)
    y, _ = _simulate(spec, seed, samples)
    report = estimate_from_counts(cfg.new_state().extend(y).counts(), cfg)
    # the loop has two poles: one conjugate or real pair carries its damping
    pairs = [d for d in report.damping if d[1] in ("conjugate-pair", "real-pair")]
    zeta_hat, mode = pairs[0] if pairs else (None, "none")
    return Table2Row(kc, seed, analytic, zeta_true, tuple(report.poles), zeta_hat, mode)


def table2() -> list[Table2Row]:
    return [run_table2_gain(kc, _seed(TABLE2_SEEDS[kc], i))
            for i, kc in enumerate(TABLE2_GAINS)]


def _fmt_poles(poles) -> str:
    out = []
    for p in poles:
        p = complex(p)
        if p.imag < 0:
            continue
        out.append(f"{p.real:.4f}" if p.imag == 0 else f"{p.real:.4f}+/-{p.imag:.4f}i")
    return ", ".join(out)


def _mark(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def format_table1(rows: list[Table1Row]) -> str:
    lines = [f"Table 1 reproduction (N={SAMPLES}, published vs reproduced vs truth)"]
    for r in rows:
        p = PUBLISHED_TABLE1[r.system]
        ok = r.passed
        lines += [
            f"{r.system}  seed={r.seed}",
            f"  HOC counts     published {list(p['hoc'])}  reproduced {list(r.hoc)}",
            f"  lags (HOC)     published {list(p['rho_hoc'])}  reproduced "
            f"{[round(x, 3) for x in r.rho_hoc]}",
            f"  lags (batch)   published {list(p['rho_batch'])}  reproduced "
            f"{[round(x, 3) for x in r.rho_batch]}",
            f"  poles (HOC)    published {list(p['poles_hoc'])}  reproduced "
            f"[{_fmt_poles(r.poles_hoc)}]  truth {list(r.truth)}  "
            f"err {r.pole_error:.4f} <= {r.pole_tolerance}  {_mark(ok['pole'])}",
            f"  poles (batch)  published {list(p['poles_batch'])}  reproduced "
            f"[{_fmt_poles(r.poles_batch)}]  HOC-vs-batch gap {r.cross_path_gap:.4f} "
            f"<= {TOL_CROSS_PATH}  {_mark(ok['cross_path'])}",
            f"  RMSE (HOC)     published {p['rmse_hoc']}  reproduced {_num(r.rmse_hoc)}  "
            f"in [0, {TOL_RMSE_MAX}]  {_mark(ok['rmse'])}",
            f"  RMSE (batch)   published {p['rmse_batch']}  reproduced {_num(r.rmse_batch)}",
            f"  ill-conditioning flagged: {r.ill_conditioned}",
        ]
    return "\n".join(lines)


def _num(v) -> str:
    return "n/a" if v is None else f"{v:.4f}"


def format_table2(rows: list[Table2Row]) -> str:
    lines = [f"Table 2 reproduction (alpha=0.9, d=2, N={SAMPLES})",
             f"{'Kc':>5} {'seed':>5}  {'analytic pole':>18} {'zeta':>6}  "
             f"{'published (est. col)':>22} {'publ. zeta':>10} {'publ. est.':>10}  "
             f"{'reproduced pole':>20} {'zeta':>7}  checks"]
    for r in rows:
        p = PUBLISHED_TABLE2[r.kc]
        checks = "  ".join(f"{k}:{_mark(v)}" for k, v in r.passed.items())
        zeta_hat = "n/a" if r.zeta_hat is None else f"{r.zeta_hat:.3f}"
        lines.append(
            f"{r.kc:>5} {r.seed:>5}  {_fmt_poles([r.analytic]):>18} {r.zeta_true:>6.3f}  "
            f"{_fmt_poles([p['estimated']]):>22} {p['zeta_actual']:>10} {p['zeta_estimated']:>10}  "
            f"{_fmt_poles(r.estimated):>20} {zeta_hat:>7}  {checks}"
        )
    return "\n".join(lines)
