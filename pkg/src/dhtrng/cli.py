"""Command-line entry point: ``dhtrng <verb> ...``.

Exit status: 0 all verdicts pass, 1 some test failed, 2 usage or config
error, 3 insufficient data, 4 simulation fault.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analytic
from .circuit.bitstream import BitStream
from .circuit.engine import SimulationFault
from .circuit.trng import ConfigError, generate
from .config import BATTERIES, SweepSpec, load_config, parse_tests
from .stats import ais31, nist
from .stats.acf import acf
from .stats.bias import bias_report
from .stats.entropy import collision_estimate, markov_estimate, mcv_estimate
from .stats.report import InsufficientData, MinEntropyEstimate, TestReport, Verdict
from .stats.restart import restart_test

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INSUFFICIENT, EXIT_FAULT = 0, 1, 2, 3, 4
SCHEMA_VERSION = "1"

_RUNNERS = {
    "t0": ais31.disjointness_t0, "t1": ais31.monobit_t1, "t2": ais31.poker_t2,
    "t3": ais31.runs_t3, "t4": ais31.longrun_t4, "t5": ais31.autocorr_t5,
    "mcv": mcv_estimate, "collision": collision_estimate, "markov": markov_estimate,
    "acf": acf, "bias": bias_report,
}
_RUNNERS.update(nist.NIST_TESTS)


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"dhtrng: {msg}", file=sys.stderr)


# ------------------------------------------------------------------ test

def run_tests(stream: BitStream, tests) -> list:
    """Run each test id; InsufficientData becomes a "not applicable" entry."""
    out = []
    n = len(stream)
    for tid in tests:
        try:
            if tid in nist.NIST_TESTS and n < nist.RECOMMENDED_BITS[tid]:
                raise InsufficientData(tid, nist.RECOMMENDED_BITS[tid], n)
            out.append((tid, _RUNNERS[tid](stream)))
        except InsufficientData as err:
            out.append((tid, TestReport.not_applicable(tid, err)))
    return out


def _verdict(result) -> Verdict:
    if isinstance(result, MinEntropyEstimate):
        return Verdict.PASS
    return result.verdict


def _rows(results) -> list[dict]:
    """Flat report rows; ACF expands to one row per lag."""
    rows = []
    for tid, r in results:
        if isinstance(r, MinEntropyEstimate):
            rows.append({"test": tid, "lag": "", "statistic": r.h_min, "p_value": "",
                         "bound_low": "", "bound_high": "", "verdict": "pass",
                         "sample_bits": r.sample_bits, "p_max": r.p_max})
        elif isinstance(r, TestReport):
            lo, hi = ("", "") if r.bounds is None else (r.bounds[0], r.bounds[-1])
            if isinstance(lo, tuple):  # per-class intervals are in the JSON report only
                lo, hi = "", ""
            rows.append({"test": tid, "lag": "", "statistic": _scalar(r.statistic),
                         "p_value": "" if r.p_value is None else r.p_value,
                         "bound_low": lo, "bound_high": hi, "verdict": r.verdict.value,
                         "sample_bits": r.sample_bits, "p_max": ""})
        else:  # AcfSeries
            for lag, c in zip(r.lags, r.coefficients):
                ok = (not r.degenerate) and abs(c) < r.threshold
                rows.append({"test": tid, "lag": lag, "statistic": c, "p_value": "",
                             "bound_low": -r.threshold, "bound_high": r.threshold,
                             "verdict": "pass" if ok else "fail",
                             "sample_bits": r.sample_bits, "p_max": ""})
    return rows


def _scalar(x):
    if isinstance(x, (list, tuple)):
        return json.dumps(x)
    return "" if x is None else x


def _to_json(x):
    if isinstance(x, dict):
        return {k: _to_json(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_to_json(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def write_report(results, fmt: str, dest, meta: dict) -> None:
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, **meta,
               "results": [{"test": tid, **r.to_dict(), "verdict": _verdict(r).value}
                           for tid, r in results]}
        text = json.dumps(_to_json(doc), indent=2) + "\n"
    else:
        rows = _rows(results)
        buf = io.StringIO()
        cols = ["test", "lag", "statistic", "p_value", "bound_low", "bound_high", "verdict",
                "sample_bits", "p_max"]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\r\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    if dest is None:
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text, newline="")


def exit_status(results, strict: bool = True) -> int:
    """1 if anything failed, else 3 if something could not run (when strict), else 0."""
    verdicts = [_verdict(r) for _, r in results]
    if Verdict.FAIL in verdicts:
        return EXIT_FAIL
    if Verdict.NOT_APPLICABLE in verdicts and (strict or Verdict.PASS not in verdicts):
        return EXIT_INSUFFICIENT
    return EXIT_OK


def cmd_test(args) -> int:
    stream = BitStream.read(args.stream)
    tests = parse_tests(args.battery)
    results = run_tests(stream, tests)
    fmt = args.report
    write_report(results, fmt, args.out, {"stream": str(args.stream), "bits": len(stream),
                                          "battery": args.battery})
    # "all" means every test that the stream length allows
    strict = args.battery.strip().lower() != "all"
    status = exit_status(results, strict)
    n_fail = sum(_verdict(r) == Verdict.FAIL for _, r in results)
    n_na = sum(_verdict(r) == Verdict.NOT_APPLICABLE for _, r in results)
    print(f"{len(results)} tests, {n_fail} failed, {n_na} not applicable", file=sys.stderr)
    return status


# -------------------------------------------------------------- generate

def _stream_paths(out: Path, n: int) -> list[Path]:
    if n == 1:
        return [out]
    return [out.with_name(f"{out.stem}_{i:03d}{out.suffix}") for i in range(n)]


def cmd_generate(args) -> int:
    exp, _ = load_config(args.config)
    circuit = exp.circuit if args.seed is None else replace(exp.circuit, seed=args.seed)
    n_bits = exp.bits_per_stream if args.bits is None else args.bits
    if n_bits < 1:
        raise UsageError("--bits must be >= 1")
    out = Path(args.out)
    fmt = args.format or ("txt" if out.suffix == ".txt" else "bin")
    if not out.parent.exists():
        raise UsageError(f"output directory {out.parent} does not exist")
    seeds = [(circuit.seed + i) % 2**64 for i in range(exp.streams)]
    for seed, path in zip(seeds, _stream_paths(out, exp.streams)):
        t0 = time.perf_counter()
        stream = generate(replace(circuit, seed=seed), n_bits)
        dt = time.perf_counter() - t0
        tmp = path.with_name(path.name + ".part")
        try:
            stream.write(tmp, fmt)
            tmp.replace(path)
        except OSError as err:
            tmp.unlink(missing_ok=True)
            raise UsageError(f"cannot write {path}: {err}") from err
        print(f"{path}: {n_bits} bits, seed {seed}, simulation rate {n_bits / dt:.4g} bit/s",
              file=sys.stderr)
    return EXIT_OK


# ----------------------------------------------------------------- sweep

def sweep_point(config, n_bits: int) -> dict:
    stream = generate(config, n_bits)
    b = stream.bits
    ones = int(b.sum())
    row = {"mcv_h_min": mcv_estimate(stream, min_bits=1).h_min,
           "bias_percent": analytic.bias_percent(ones, len(b) - ones)}
    try:
        row["max_abs_acf"] = acf(stream).max_abs
    except InsufficientData:
        row["max_abs_acf"] = float("nan")
    return row


def run_sweep(base, spec: SweepSpec, n_bits: int, jobs: int = 1) -> list[dict]:
    """One row per (value, repeat), ordered by value then repeat; seed = base seed + repeat."""
    configs = spec.configs(base)  # validates every point before any simulation
    tasks = []
    for value, cfg in zip(spec.values, configs):
        for r in range(spec.repeats):
            tasks.append((value, r, replace(cfg, seed=(base.seed + r) % 2**64)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            stats = list(pool.map(sweep_point, [t[2] for t in tasks], [n_bits] * len(tasks)))
    else:
        stats = [sweep_point(t[2], n_bits) for t in tasks]
    return [{"axis": spec.axis, "value": v, "repeat": r, "seed": cfg.seed, "bits": n_bits, **s}
            for (v, r, cfg), s in zip(tasks, stats)]


SWEEP_COLUMNS = ["axis", "value", "repeat", "seed", "bits", "mcv_h_min", "bias_percent",
                 "max_abs_acf"]


def cmd_sweep(args) -> int:
    exp, spec = load_config(args.config)
    if args.axis or args.values:
        if not (args.axis or spec) or not (args.values or spec):
            raise ConfigError("--axis and --values go together unless the config has a sweep")
        axis = args.axis or spec.axis
        values = tuple(float(v) for v in args.values.split(",")) if args.values else spec.values
        spec = SweepSpec(axis, values, args.repeats or (spec.repeats if spec else 1))
    elif spec is None:
        raise ConfigError("no sweep given: use --axis/--values or sweep.* config keys")
    elif args.repeats:
        spec = replace(spec, repeats=args.repeats)
    base = exp.circuit if args.seed is None else replace(exp.circuit, seed=args.seed)
    n_bits = args.bits or exp.bits_per_stream
    rows = run_sweep(base, spec, n_bits, args.jobs)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\r\n")
    w.writeheader()
    w.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue(), newline="")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# --------------------------------------------------------------- restart

def cmd_restart(args) -> int:
    exp, _ = load_config(args.config)
    circuit = exp.circuit if args.seed is None else replace(exp.circuit, seed=args.seed)
    seeds = [circuit.seed] * args.trials if args.same_seed else None
    rep = restart_test(circuit, args.trials, args.prefix_bits, seeds=seeds)
    for seed, word in zip(rep.details["seeds"], rep.details["prefixes"]):
        print(f"seed {seed}: {word}")
    print(f"restart: {rep.statistic}/{args.trials} distinct, {rep.verdict.value}")
    return EXIT_OK if rep.passed else EXIT_FAIL


# ----------------------------------------------------------------- image

def bitstream_image(bits: np.ndarray, width: int, height: int, invert: bool = False) -> bytes:
    """Binary PGM: bit 1 is black, bit 0 white (swapped with ``invert``)."""
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    if len(bits) < width * height:
        raise InsufficientData("image", width * height, len(bits))
    px = np.where(np.asarray(bits[:width * height]) == 1, 0, 255).astype(np.uint8)
    if invert:
        px = 255 - px
    return f"P5\n{width} {height}\n255\n".encode("ascii") + px.tobytes()


def cmd_image(args) -> int:
    stream = BitStream.read(args.stream)
    data = bitstream_image(stream.bits, args.width, args.height, args.invert)
    Path(args.out).write_bytes(data)
    return EXIT_OK


# --------------------------------------------------------------- analyze

def _kv(pairs) -> dict:
    out = {}
    for p in pairs:
        if "=" not in p:
            raise UsageError(f"expected name=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def cmd_analyze(args) -> int:
    kv = _kv(args.params)
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    f = args.formula
    try:
        if f in ("xor2", "xorn"):
            mus = [float(kv["mu1"]), float(kv["mu2"])] if f == "xor2" else _floats(kv["mus"])
            value = analytic.xor2_expectation(*mus) if f == "xor2" else analytic.xor_n_expectation(mus)
            est, se = analytic.xor_monte_carlo(mus, args.trials, rng)
            z = abs(est - value) / se if se > 0 else 0.0
            print(f"{f}: {value:.12g}")
            print(f"monte carlo: {est:.6f} over {args.trials} trials, standard error {se:.3g}, "
                  f"|z| = {z:.2f}")
        elif f == "coverage":
            n = int(kv["n"])
            per = lambda key: _floats(kv[key]) if "," in kv[key] else [float(kv[key])] * n  # noqa: E731
            p = analytic.CoverageParams(n=n, a=float(kv["a"]), w=per("w"), T_ro=per("T_ro"),
                                        tau=float(kv["tau"]), epsilon=float(kv["epsilon"]),
                                        f=per("f"))
            print(f"coverage: {analytic.randomness_coverage(p):.12g}")
        elif f == "phasenoise":
            p = analytic.PhaseNoiseParams(**{k: float(v) for k, v in kv.items()})
            value = analytic.phase_noise_floor(p)
            print(f"phasenoise: {value:.12g}")
            if args.compare:
                q = replace(p, **{k: float(v) for k, v in _kv(args.compare).items()})
                other = analytic.phase_noise_floor(q)
                print(f"compare: {other:.12g}")
                print(f"ratio: {other / value:.12g}")
        elif f == "bias":
            print(f"bias: {analytic.bias_percent(int(kv['ones']), int(kv['zeros'])):.12g} %")
        else:
            raise UsageError(f"unknown formula {f!r}")
    except KeyError as err:
        raise UsageError(f"{f} needs parameter {err.args[0]}") from err
    except (TypeError, ValueError) as err:
        raise UsageError(str(err)) from err
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _u64(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(s: str) -> int:
    v = int(float(s)) if "e" in s.lower() else int(s, 0)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dhtrng", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("generate", help="simulate the circuit and write a bitstream")
    g.add_argument("--config", type=Path)
    g.add_argument("--bits", type=_positive)
    g.add_argument("--seed", type=_u64)
    g.add_argument("--format", choices=("bin", "txt"))
    g.add_argument("--out", required=True, type=Path)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("test", help="run a statistical battery on a bitstream file")
    t.add_argument("stream", type=Path)
    t.add_argument("--battery", default="all",
                   help=f"comma list of {', '.join(BATTERIES)} or single test ids")
    t.add_argument("--report", choices=("json", "csv"), default="json")
    t.add_argument("--out", type=Path)
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("sweep", help="min-entropy, bias and ACF along one parameter axis")
    s.add_argument("--config", type=Path)
    s.add_argument("--axis", choices=("temperature", "voltage", "xor_count", "ro1_stages"))
    s.add_argument("--values", help="comma-separated, strictly monotone")
    s.add_argument("--repeats", type=_positive)
    s.add_argument("--bits", type=_positive)
    s.add_argument("--seed", type=_u64)
    s.add_argument("--jobs", type=_positive, default=1)
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("restart", help="compare output prefixes of independent restarts")
    r.add_argument("--config", type=Path)
    r.add_argument("--trials", type=_positive, default=6)
    r.add_argument("--prefix-bits", type=int, default=32)
    r.add_argument("--seed", type=_u64)
    r.add_argument("--same-seed", action="store_true", help="negative control: reuse one seed")
    r.set_defaults(func=cmd_restart)

    i = sub.add_parser("image", help="render a bitstream as a PGM image")
    i.add_argument("stream", type=Path)
    i.add_argument("--width", type=_positive, default=256)
    i.add_argument("--height", type=_positive, default=256)
    i.add_argument("--invert", action="store_true")
    i.add_argument("--out", required=True, type=Path)
    i.set_defaults(func=cmd_image)

    a = sub.add_parser("analyze", help="evaluate a closed-form model")
    a.add_argument("formula", choices=("xor2", "xorn", "coverage", "phasenoise", "bias"))
    a.add_argument("params", nargs="*", help="name=value pairs (lists comma-separated)")
    a.add_argument("--trials", type=_positive, default=1_000_000)
    a.add_argument("--seed", type=_u64)
    a.add_argument("--compare", nargs="*", help="phasenoise: name=value overrides to compare")
    a.set_defaults(func=cmd_analyze)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    if args.verbose:
        import logging
        logging.basicConfig(level=logging.DEBUG)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as err:
        _err(str(err))
        return EXIT_USAGE
    except InsufficientData as err:
        _err(str(err))
        return EXIT_INSUFFICIENT
    except SimulationFault as err:
        _err(f"simulation fault: {err}")
        return EXIT_FAULT
    except FileNotFoundError as err:
        _err(str(err))
        return EXIT_USAGE
    except ValueError as err:
        _err(str(err))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
