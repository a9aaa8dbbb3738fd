"""Command-line front end.

Exit codes: 0 success, 1 usage or argument error, 2 data error (bad input,
too few samples, corrupt or mismatched state), 3 numerical failure (only
with ``--strict``; otherwise degraded reports are printed with flags).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .crossings import DEFAULT_MEAN_WARMUP, MEAN_MODES, HocState
from .errors import ConfigMismatchError, DataError, HocPolesError, ModelError
from .model_sim import (DEFAULT_WARMUP, ArmaSpec, ClosedLoopSpec, NoiseConfig,
                        closed_loop_to_arma, generate_arma, load_model)
from .pipeline import Report, RunConfig, estimate_from_counts, estimate_series
from .poles import DEFAULT_ZETA_THRESHOLD, assess

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
CHUNK = 4096


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _order(text: str) -> tuple[int, int]:
    try:
        n, m = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"order must look like 'n,m', got {text!r}")
    if n < 1 or m < 0:
        raise argparse.ArgumentTypeError("order needs n >= 1 and m >= 0")
    return n, m


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--order", type=_order, required=True, metavar="N,M",
                   help="AR and MA orders of the model, e.g. 2,1")
    p.add_argument("--levels", type=int, default=None,
                   help="crossing levels to track (default: lags needed, n+m)")
    p.add_argument("--mean-mode", choices=MEAN_MODES, default="zero",
                   help="reference level for clipping the raw signal")
    p.add_argument("--mean-level", type=float, default=0.0,
                   help="reference for --mean-mode fixed")
    p.add_argument("--warmup", type=int, default=DEFAULT_MEAN_WARMUP,
                   help="samples before level-1 crossings count in running-mean mode")
    p.add_argument("--ewma-lambda", type=float, default=None,
                   help="report EWMA crossing rates with this forgetting factor")
    p.add_argument("--k-start", type=int, default=None,
                   help="first lag of the Yule-Walker system (default m+1)")
    p.add_argument("--dt", type=float, default=1.0, help="sampling period")
    p.add_argument("--zeta-threshold", type=float, default=DEFAULT_ZETA_THRESHOLD,
                   help="modes with damping below this are flagged oscillatory")
    p.add_argument("--column", type=int, default=None,
                   help="read this 0-based column of a CSV file instead of one value per line")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when any report is ill-conditioned or numerically degraded")


def _run_config(args, report_every=None) -> RunConfig:
    n, m = args.order
    try:
        return RunConfig(n=n, m=m, levels=args.levels, mean_mode=args.mean_mode,
                         mean_level=args.mean_level, warmup=args.warmup,
                         ewma_lambda=args.ewma_lambda, k_start=args.k_start, dt=args.dt,
                         zeta_threshold=args.zeta_threshold, report_every=report_every)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _open_input(path):
    if path in (None, "-"):
        return sys.stdin
    try:
        return open(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def iter_samples(fh, column=None):
    """Yield floats from plain text (one per line) or a CSV column.

    Blank lines are skipped.  With ``column`` a non-numeric first line is
    taken as a header.
    """
    reader = csv.reader(fh) if column is not None else ((line,) for line in fh)
    for lineno, row in enumerate(reader, start=1):
        if column is None:
            text = row[0].strip()
        else:
            if not row or not any(c.strip() for c in row):
                continue
            if column >= len(row):
                raise DataError(f"line {lineno}: no column {column}")
            text = row[column].strip()
        if not text:
            continue
        try:
            value = float(text)
        except ValueError:
            if column is not None and lineno == 1:
                continue
            raise DataError(f"line {lineno}: cannot parse sample {text!r}") from None
        if not np.isfinite(value):
            raise DataError(f"line {lineno}: non-finite sample {text!r}")
        yield value


def _chunks(values, size):
    buf = []
    for v in values:
        buf.append(v)
        if len(buf) >= size:
            yield buf
            buf = []
    if buf:
        yield buf


class _Trace:
    """Plot-ready CSV of poles and damping per report."""

    def __init__(self, path):
        self.fh = open(path, "w", newline="") if path else None
        if self.fh:
            self.writer = csv.writer(self.fh)
            self.writer.writerow(["samples", "pole", "re", "im", "mode", "zeta"])

    def write(self, report: Report, cfg: RunConfig):
        if not self.fh or not report.a_hat:
            return
        try:
            pr = assess((1.0, *report.a_hat), cfg.dt, cfg.zeta_threshold)
        except HocPolesError:
            return
        for mode in pr.modes:
            for i in mode.indices:
                p = pr.discrete[i]
                zeta = "" if mode.zeta is None else repr(mode.zeta)
                self.writer.writerow([report.samples, i, repr(p.real), repr(p.imag),
                                      mode.kind, zeta])

    def close(self):
        if self.fh:
            self.fh.close()


def _emit(report: Report, out) -> None:
    out.write(report.to_json() + "\n")
    out.flush()


def _degraded(report: Report) -> bool:
    return report.ill_conditioned or bool(report.failures)


# -- subcommands ----------------------------------------------------------


def cmd_stream(args) -> int:
    cfg = _run_config(args, args.report_every)
    if args.state_in:
        state = HocState.load(args.state_in, expect=cfg.hoc_config())
    else:
        state = cfg.new_state()
    use_ewma = cfg.ewma_lambda is not None
    trace = _Trace(args.trace)
    degraded = False
    emitted = 0
    seen = 0
    since_report = 0

    def report_now():
        nonlocal degraded, emitted, since_report
        since_report = 0
        counts = state.counts(use_ewma)
        try:
            report = estimate_from_counts(counts, cfg)
        except DataError as exc:
            print(f"hocpoles: report withheld at sample {counts.n}: {exc}", file=sys.stderr)
            return
        for msg in report.failures:
            print(f"hocpoles: sample {counts.n}: {msg}", file=sys.stderr)
        degraded |= _degraded(report)
        _emit(report, sys.stdout)
        trace.write(report, cfg)
        emitted += 1

    fh = _open_input(args.input)
    try:
        every = cfg.report_every
        for chunk in _chunks(iter_samples(fh, args.column), CHUNK):
            pos = 0
            while pos < len(chunk):
                take = len(chunk) - pos
                if every is not None:
                    take = min(take, every - since_report)
                state.extend(chunk[pos:pos + take])
                pos += take
                seen += take
                since_report += take
                if every is not None and since_report >= every:
                    report_now()
        if seen == 0 and not args.state_in:
            print("hocpoles: no data", file=sys.stderr)
        elif since_report > 0 or (every is None and emitted == 0):
            report_now()
    finally:
        if fh is not sys.stdin:
            fh.close()
        trace.close()
    if args.state_out:
        state.save(args.state_out)
    return EXIT_NUMERIC if args.strict and degraded else EXIT_OK


def cmd_estimate(args) -> int:
    cfg = _run_config(args)
    fh = _open_input(args.input)
    try:
        y = np.fromiter(iter_samples(fh, args.column), dtype=np.float64)
    finally:
        if fh is not sys.stdin:
            fh.close()
    hoc_report, oracle = estimate_series(y, cfg, oracle=args.oracle)
    for msg in hoc_report.failures:
        print(f"hocpoles: {msg}", file=sys.stderr)
    _emit(hoc_report, sys.stdout)
    degraded = _degraded(hoc_report)
    if args.oracle:
        if isinstance(oracle, Exception):
            print(f"hocpoles: batch autocorrelation path failed: {oracle}", file=sys.stderr)
            return EXIT_DATA
        _emit(oracle, sys.stdout)
    return EXIT_NUMERIC if args.strict and degraded else EXIT_OK


def cmd_simulate(args) -> int:
    if args.n < 2:
        raise UsageError(f"--n must be at least 2, got {args.n}")
    if args.closed_loop:
        try:
            cl = ClosedLoopSpec(alpha=args.alpha, delay=args.delay, kc=args.kc, dt=args.dt)
        except ModelError as exc:
            raise UsageError(str(exc)) from None
        spec, dt = closed_loop_to_arma(cl), cl.dt
    else:
        dt = args.dt
        if args.model:
            spec = load_model(args.model)
        elif args.den:
            spec = ArmaSpec(num=args.num or (1.0,), den=args.den)
        else:
            raise UsageError("give --den (and optionally --num), --model or --closed-loop")
    try:
        noise = NoiseConfig(seed=args.seed, count=args.n, variance=args.variance)
    except ModelError as exc:
        raise UsageError(str(exc)) from None
    y = generate_arma(spec, noise, warmup=args.warmup, force=args.force)

    sidecar = {
        "model": spec.to_dict(),
        "seed": args.seed,
        "samples": args.n,
        "variance": args.variance,
        "warmup": args.warmup,
        "dt": dt,
        "stable": spec.is_stable(),
        "poles": [],
        "damping": [],
    }
    if spec.n >= 1:
        pr = assess(spec.den, dt)
        sidecar["poles"] = [{"re": p.real, "im": p.imag} for p in pr.discrete]
        sidecar["damping"] = [{"zeta": m.zeta, "mode": m.kind} for m in pr.modes]

    text = "".join(f"{v!r}\n" for v in y.tolist())
    if args.output in (None, "-"):
        sys.stdout.write(text)
        sidecar_path = args.sidecar
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
        sidecar_path = args.sidecar or f"{args.output}.json"
    blob = json.dumps(sidecar, indent=2) + "\n"
    if sidecar_path:
        with open(sidecar_path, "w") as fh:
            fh.write(blob)
    else:
        sys.stderr.write(blob)
    return EXIT_OK


def cmd_repro(args) -> int:
    from . import repro

    parts = []
    if args.table in ("table1", "all"):
        parts.append(repro.format_table1(repro.table1()))
    if args.table in ("table2", "all"):
        parts.append(repro.format_table2(repro.table2()))
    print("\n\n".join(parts))
    return EXIT_OK


def cmd_snapshot(args) -> int:
    cfg = _run_config(args)
    if args.state_in:
        state = HocState.load(args.state_in, expect=cfg.hoc_config())
    else:
        state = cfg.new_state()
    fh = _open_input(args.input)
    try:
        for chunk in _chunks(iter_samples(fh, args.column), CHUNK):
            state.extend(chunk)
    finally:
        if fh is not sys.stdin:
            fh.close()
    state.save(args.output)
    print(f"hocpoles: saved state after {state.total_samples} samples to {args.output}",
          file=sys.stderr)
    return EXIT_OK


def cmd_restore(args) -> int:
    cfg = _run_config(args)
    state = HocState.load(args.state, expect=cfg.hoc_config())
    if args.input:
        fh = _open_input(args.input)
        try:
            for chunk in _chunks(iter_samples(fh, args.column), CHUNK):
                state.extend(chunk)
        finally:
            if fh is not sys.stdin:
                fh.close()
    if args.output:
        state.save(args.output)
    degraded = False
    if args.report:
        report = estimate_from_counts(state.counts(cfg.ewma_lambda is not None), cfg)
        _emit(report, sys.stdout)
        degraded = _degraded(report)
    return EXIT_NUMERIC if args.strict and degraded else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hocpoles",
                description="ARMA pole estimation from higher-order zero crossings")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    ps = sub.add_parser("stream", help="ingest samples and emit JSON-lines reports")
    ps.add_argument("input", nargs="?", default="-", help="sample file (default stdin)")
    _add_run_args(ps)
    ps.add_argument("--report-every", type=int, default=None,
                    help="emit a report every this many samples (and at the end)")
    ps.add_argument("--state-in", help="resume from a saved state file")
    ps.add_argument("--state-out", help="save the final state here")
    ps.add_argument("--trace", help="write a CSV of poles and damping per report")
    ps.set_defaults(func=cmd_stream)

    pe = sub.add_parser("estimate", help="one-shot estimate from a sample file")
    pe.add_argument("input", help="sample file ('-' for stdin)")
    _add_run_args(pe)
    pe.add_argument("--oracle", action="store_true",
                    help="also estimate from batch sample autocorrelations and report RMSE")
    pe.set_defaults(func=cmd_estimate)

    pm = sub.add_parser("simulate", help="generate samples of an ARMA model or control loop")
    pm.add_argument("--num", type=_float_list, default=None, help="numerator, e.g. 1,-0.5")
    pm.add_argument("--den", type=_float_list, default=None, help="denominator, e.g. 1,-0.95")
    pm.add_argument("--model", help="JSON model file with num and den")
    pm.add_argument("--closed-loop", action="store_true",
                    help="simulate the integral-control loop instead of --num/--den")
    pm.add_argument("--alpha", type=float, default=0.9, help="plant pole")
    pm.add_argument("--delay", type=int, default=2, help="plant delay in samples")
    pm.add_argument("--kc", type=float, default=0.05, help="controller gain")
    pm.add_argument("--dt", type=float, default=1.0, help="sampling period")
    pm.add_argument("--n", type=int, default=10_000, help="number of samples")
    pm.add_argument("--seed", type=int, default=0)
    pm.add_argument("--variance", type=float, default=1.0, help="noise variance")
    pm.add_argument("--warmup", type=int, default=DEFAULT_WARMUP,
                    help="initial filter outputs to discard")
    pm.add_argument("--force", action="store_true", help="allow unstable models")
    pm.add_argument("-o", "--output", default=None, help="sample file (default stdout)")
    pm.add_argument("--sidecar", default=None,
                    help="true-pole JSON (default OUTPUT.json, or stderr for stdout)")
    pm.set_defaults(func=cmd_simulate)

    pr = sub.add_parser("repro", help="re-run the published benchmark tables")
    pr.add_argument("table", choices=["table1", "table2", "all"])
    pr.set_defaults(func=cmd_repro)

    pn = sub.add_parser("snapshot", help="ingest samples and save the crossing state")
    pn.add_argument("input", help="sample file ('-' for stdin)")
    pn.add_argument("-o", "--output", required=True, help="state file to write")
    pn.add_argument("--state-in", help="continue from this state file")
    _add_run_args(pn)
    pn.set_defaults(func=cmd_snapshot)

    pt = sub.add_parser("restore", help="load a saved state, optionally continue and report")
    pt.add_argument("state", help="state file")
    pt.add_argument("--input", help="further samples to ingest")
    pt.add_argument("-o", "--output", help="write the (continued) state here")
    pt.add_argument("--report", action="store_true", help="print a report for the state")
    _add_run_args(pt)
    pt.set_defaults(func=cmd_restore)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hocpoles: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigMismatchError as exc:
        print(f"hocpoles: config mismatch: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DataError, ModelError) as exc:
        print(f"hocpoles: {exc}", file=sys.stderr)
        return EXIT_DATA
    except HocPolesError as exc:
        print(f"hocpoles: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
