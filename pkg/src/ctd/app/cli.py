"""Command-line interface: ``ctd {static,stream,ddos,eval}``.

Modes are 1-based on the command line. ``--input`` takes an edge-list path or
one of the built-in synthetic datasets ``synthetic:haggle`` and
``synthetic:caida``.
"""
from __future__ import annotations

import argparse
import sys
import time

from ctd.app.bundle import load_factors, save_factors
from ctd.app.datasets import haggle_like, synthetic_traffic
from ctd.app.ddos import DetectionConfig, inject_ddos, run_online_detection
from ctd.app.io import build_tensor, parse_edge_list
from ctd.app.stream import StreamConfig, run_stream
from ctd.errors import CTDError
from ctd.evaluation import EvalReport, memory_usage, relative_error
from ctd.static import DEFAULT_EPSILON, ctd_s
from ctd.tensor import SparseTensor

DEFAULT_SEED = 42
_SYNTHETIC = {"synthetic:haggle": haggle_like, "synthetic:caida": synthetic_traffic}


def load_input(source: str, bin_width: float = 1.0, seed: int = 0) -> SparseTensor:
    if source in _SYNTHETIC:
        return _SYNTHETIC[source](seed=seed)
    return build_tensor(parse_edge_list(source, require_time=True), bin_width).tensor


def _row(*values) -> str:
    return "\t".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in values)


def cmd_static(args) -> int:
    X = load_input(args.input, args.bin_width, args.data_seed)
    start = time.perf_counter()
    f = ctd_s(X, args.mode - 1, args.samples, args.epsilon, args.seed)
    elapsed = time.perf_counter() - start
    print("mode\tsamples\tepsilon\tseed\tkept_fibers\terror\tmemory_usage\tseconds")
    print(_row(args.mode, args.samples, args.epsilon, args.seed, f.rank,
               relative_error(X, f), memory_usage(X, f), elapsed))
    if args.out:
        save_factors(f, args.out)
    return 0


def cmd_stream(args) -> int:
    X = load_input(args.input, args.bin_width, args.data_seed)
    config = StreamConfig(
        mode=args.mode - 1, s=args.samples, d=args.d, epsilon=args.epsilon,
        seed=args.seed, split=args.split,
    )
    result = run_stream(X, config)
    print(EvalReport.HEADER)
    for report in result.reports:
        print(report.to_record())
    print(f"# mean\terror={result.mean('relative_error'):.6g}"
          f"\tseconds={result.mean('wall_time_seconds'):.6g}"
          f"\tmemory_usage={result.mean('memory_usage'):.6g}"
          f"\thistorical_steps={result.historical_steps}")
    if args.out:
        save_factors(result.factors, args.out)
    return 0


def cmd_ddos(args) -> int:
    background = load_input(args.input, args.bin_width, args.seed)
    traffic, attacks = inject_ddos(background, args.attacks, args.fraction, args.intensity, args.seed)
    config = DetectionConfig(
        n_attacks=args.attacks, fraction=args.fraction, d=args.d,
        epsilon=args.epsilon, intensity=args.intensity, seed=args.seed,
    )
    report = run_online_detection(traffic, attacks, config)
    print("kind\tdst\ttime")
    for a in attacks:
        print(_row("injected", a.victim, a.time))
    for dst, t in report.candidates:
        print(_row("flagged", dst, t))
    print("attacks\trecall\tprecision\tf1")
    print(_row(args.attacks, report.recall, report.precision, report.f1))
    return 0


def cmd_eval(args) -> int:
    f = load_factors(args.factors)
    X = load_input(args.input, args.bin_width, args.data_seed)
    print("error\tmemory_usage\tkept_fibers")
    print(_row(relative_error(X, f), memory_usage(X, f), f.rank))
    return 0


def _common(p, samples=True):
    p.add_argument("--input", default="synthetic:haggle", help="edge list path or synthetic:{haggle,caida}")
    p.add_argument("--bin-width", type=float, default=1.0, help="time bin width in seconds")
    p.add_argument("--data-seed", type=int, default=0, help="seed of a synthetic input")
    p.add_argument("--mode", type=int, default=1, help="decomposition mode (1-based)")
    if samples:
        p.add_argument("--samples", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", help="write the factor bundle to this directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("static", help="decompose a tensor once")
    _common(p)
    p.set_defaults(func=cmd_static)

    p = sub.add_parser("stream", help="static start on a prefix, then per-slab updates")
    _common(p)
    p.add_argument("--d", type=int, default=None, help="samples per step (default 1%% of --samples)")
    p.add_argument("--split", type=float, default=0.8)
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("ddos", help="inject attacks and detect them online")
    p.add_argument("--input", default="synthetic:caida")
    p.add_argument("--bin-width", type=float, default=1.0)
    p.add_argument("--attacks", type=int, default=1)
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--intensity", type=float, default=None)
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_ddos)

    p = sub.add_parser("eval", help="score a saved factor bundle against a tensor")
    p.add_argument("--factors", required=True)
    p.add_argument("--input", default="synthetic:haggle")
    p.add_argument("--bin-width", type=float, default=1.0)
    p.add_argument("--data-seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CTDError as exc:
        print(f"ctd {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"ctd {args.command}: {exc}", file=sys.stderr)
        return 9


if __name__ == "__main__":
    sys.exit(main())
