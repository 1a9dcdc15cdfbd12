"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 domain error (e.g. receiver
outside the area of interest), 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .beam_model import rayleigh_length
from .errors import ConfigError, DomainError, OutsideAreaError
from .localizer import RxGroundTruth, localize
from .scenario import PRESETS, NoiseModel, Scenario, SearchMode, load_config, load_preset
from .simharness import (
    iteration_rng,
    level_sweep,
    level_sweep_csv,
    noise_sweep,
    run_campaign,
    run_tracking,
    sample_rx,
    summary_json,
    sweep_csv,
)
from .tracker import track_csv

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3


class _IOFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def parse_range(text: str) -> list[float]:
    """``start:step:stop`` (inclusive) or a comma-separated list."""
    if ":" in text:
        try:
            start, step, stop = (float(v) for v in text.split(":"))
        except ValueError:
            raise ConfigError(f"bad range {text!r}, expected start:step:stop") from None
        if step == 0 or (stop - start) / step < 0:
            raise ConfigError(f"empty range {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(n)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad list {text!r}") from None


def resolve_scenario(args) -> Scenario:
    if args.config:
        sc = load_config(args.config)
    else:
        sc = load_preset(args.preset)
    changes = {}
    if getattr(args, "mode", None):
        changes["mode"] = SearchMode.parse(args.mode)
    if getattr(args, "codebook", None):
        changes["codebook"] = args.codebook
    if getattr(args, "noise_dbm", None) is not None:
        changes["noise"] = NoiseModel.from_dbm(args.noise_dbm)
    return sc.replace(**changes) if changes else sc


def _write(out: Path | None, name: str, text: str) -> None:
    if out is None:
        return
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {out / name}: {exc}") from None


def _direction_table(cb) -> list[str]:
    lines = [f"{cb.kind} codebook, {cb.L} levels",
             f"{'level':>5} {'beams':>6} {'w [m]':>10} {'z_R [m]':>10} {'spacing [deg]':>14}"]
    k = cb.geometry.k
    for lvl in range(1, cb.L + 1):
        w = float(cb.footprints(lvl)[0])
        u = cb.centers(lvl)
        mid = u.size // 2
        step = math.degrees(math.asin(u[mid]) - math.asin(u[mid - 1])) if u.size > 1 else 0.0
        lines.append(f"{lvl:>5} {u.size:>6} {w:>10.4f} {rayleigh_length(w, k):>10.3f} {step:>14.4f}")
    return lines


def _focus_table(cb) -> list[str]:
    lines = [f"bfc codebook, d_0={cb.d_0} m, alpha={cb.alpha}",
             f"{'level':>5} {'areas':>6} {'r_max [m]':>10} {'d_f first [m]':>14} {'d_f last [m]':>13}"]
    for lvl in range(1, cb.L + 1):
        d = cb.distances(lvl)
        lines.append(f"{lvl:>5} {d.size:>6} {cb.radius(lvl):>10.4f} {d[0]:>14.4f} {d[-1]:>13.4f}")
    return lines


def cmd_codebook(args) -> int:
    sc = resolve_scenario(args)
    kinds = ["bfr", "rbfr", "bfc"] if args.kind == "all" else [args.kind]
    for kind in kinds:
        if kind == "bfc":
            cb = sc.focus_codebook
            table = _focus_table(cb)
        else:
            cb = sc.replace(codebook=kind).direction_codebook
            table = _direction_table(cb)
        _write(args.out, f"codebook_{kind}.json", cb.to_json(indent=1) + "\n")
        print("\n".join(table))
        print()
    return EXIT_OK


def cmd_localize(args) -> int:
    sc = resolve_scenario(args)
    if args.theta_deg is not None or args.distance is not None:
        if args.theta_deg is None or args.distance is None:
            raise ConfigError("give both --theta-deg and --distance")
        rx = RxGroundTruth(math.radians(args.theta_deg), args.distance)
        rng = np.random.default_rng(args.seed)
    else:
        rng = iteration_rng(args.seed, 0)
        rx = sample_rx(rng, sc)
    est, trace = localize(sc, rx, sc.mode, rng)
    doc = {
        "rx": {"theta_deg": math.degrees(rx.theta), "d": rx.d, "x": rx.x, "z": rx.z},
        "estimate": {"theta_deg": math.degrees(est.theta_hat), "d": est.d_hat,
                     "x": est.x, "z": est.z},
        "error": est.error,
        "success": est.error <= sc.resolution,
        "pilots": trace.pilots,
        "trace": [
            {"phase": s.phase, "level": s.level, "candidates": list(s.candidates),
             "powers_w": list(s.powers), "chosen": s.chosen}
            for s in trace.steps
        ],
        "provenance": {"config": sc.to_config(), "seed": args.seed, "version": __version__},
    }
    text = json.dumps(doc, indent=2) + "\n"
    _write(args.out, "localize.json", text)
    print(text, end="")
    if args.verbose:
        if args.out is not None:
            _write(args.out, "trace.jsonl", trace.to_jsonl())
        else:
            sys.stderr.write(trace.to_jsonl())
    return EXIT_OK


def cmd_simulate(args) -> int:
    sc = resolve_scenario(args)
    stats = run_campaign(sc, args.n, args.seed, threads=args.threads)
    summary = summary_json(sc, stats, args.n, args.seed,
                           extra={"percentiles": {str(q): v for q, v in stats.percentiles.items()},
                                  "resolution": stats.resolution})
    _write(args.out, "cdf.csv", stats.cdf_csv())
    _write(args.out, "summary.json", summary)
    print(summary, end="")
    return EXIT_OK


def cmd_sweep(args) -> int:
    sc = resolve_scenario(args)
    if (args.noise is None) == (args.levels is None):
        raise ConfigError("give exactly one of --noise or --levels")
    if args.noise is not None:
        dbm = parse_range(args.noise)
        points = noise_sweep(sc, dbm, args.n, args.seed, threads=args.threads)
        table = sweep_csv(points)
        rows = [{"noise_dbm": p.noise_dbm, **p.stats.summary()} for p in points]
        _write(args.out, "sweep.csv", table)
    else:
        levels = [int(v) for v in parse_range(args.levels)]
        result = level_sweep(sc, levels, args.n, args.seed, threads=args.threads)
        table = level_sweep_csv(result)
        rows = [{"L_r": lvl, **s.summary()} for lvl, s in result.items()]
        _write(args.out, "levels.csv", table)
    doc = {"scenario": sc.name, "n": args.n, "seed": args.seed, "points": rows,
           "provenance": {"config": sc.to_config(), "seed": args.seed, "version": __version__}}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    _write(args.out, "summary.json", text)
    if args.out is None:
        print(table, end="")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_track(args) -> int:
    sc = resolve_scenario(args)
    stats, results = run_tracking(sc, args.n, args.seed, threads=args.threads)
    summary = summary_json(sc, stats, args.n, args.seed,
                           extra={"epochs": stats.n, "trajectories": len(results)})
    _write(args.out, "track.csv", track_csv(results))
    _write(args.out, "cdf.csv", stats.cdf_csv())
    _write(args.out, "summary.json", summary)
    print(summary, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="beamloc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=PRESETS, default="scenario1")
    src.add_argument("--config", type=Path, help="JSON scenario file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=["measured", "ideal", "perfect-phase1"])
    common.add_argument("--codebook", choices=["bfr", "rbfr"])
    common.add_argument("--noise-dbm", type=float, help="average AWGN power at the receiver")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("codebook", parents=[common], help="dump codebooks")
    p.add_argument("--kind", choices=["bfr", "rbfr", "bfc", "all"], default="all")
    p.set_defaults(func=cmd_codebook)

    p = sub.add_parser("localize", parents=[common], help="localize one receiver")
    p.add_argument("--theta-deg", type=float)
    p.add_argument("--distance", type=float, help="metres")
    p.add_argument("-v", "--verbose", action="store_true", help="export per-pilot trace")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo error CDF")
    p.add_argument("--n", type=int, default=10_000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="noise or focusing-level sweep")
    p.add_argument("--n", type=int, default=2_000)
    p.add_argument("--noise", help="dBm list or start:step:stop")
    p.add_argument("--levels", help="L_r list or start:step:stop")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("track", parents=[common], help="mobile-user tracking")
    p.add_argument("--n", type=int, default=1_000, help="number of trajectories")
    p.set_defaults(func=cmd_track)
    return parser


def _glue_values(argv: list[str]) -> list[str]:
    # argparse reads "-110:10:20" as an option; attach it to its flag instead
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--noise", "--levels", "--noise-dbm", "--theta-deg"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_values(argv))
    if getattr(args, "n", 1) < 1 or args.threads < 1:
        print("beamloc: error: --n and --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except OutsideAreaError as exc:
        print(f"beamloc: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConfigError as exc:
        print(f"beamloc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"beamloc: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except _IOFailure as exc:
        print(f"beamloc: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"beamloc: {exc}", file=sys.stderr)
        return EXIT_CONFIG if args.config else EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
