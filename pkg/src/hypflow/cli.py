"""Command-line entry points.

Subcommands: verify, trace, census, measure-charts, render.
Exit codes: 0 pass, 1 a certified inequality failed, 2 usage or config
errors.  All outputs are byte-deterministic given (config, seed).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .census import homotopic_inverse_pairs, orbit_census
from .circle_action import CirclePoint
from .config import ConfigError, RunConfig, load_config
from .flow import FoliatedBundle, flow_phi, periodic_orbit
from .geometry import TWO_PI, HyperbolicPoint, classify_and_fixed_points
from .io_formats import (
    CENSUS_HEADER,
    RN_HEADER,
    TRACE_HEADER,
    ZETA_HEADER,
    census_rows,
    render_disk_svg,
    rn_grid_rows,
    trace_rows,
    write_csv,
)
from .surface_group import Word, group_preset
from .verify import certify


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypflow",
        description="Numerical laboratory for flows on foliated circle bundles "
        "over a genus-2 hyperbolic surface.",
    )
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--seed", type=int, help="seed for stochastic sweeps")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--k", type=int, help="fiberwise cover index")
    parser.add_argument("--max-word-len", type=int, dest="max_word_len", help="census word budget")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", help="run the certification sweep, write report")
    sub.add_parser("trace", help="flow an orbit, write CSV + SVG")
    sub.add_parser("census", help="periodic-orbit census, write CSV")
    sub.add_parser("measure-charts", help="export chart coordinates and measure derivatives")
    sub.add_parser("render", help="disk-model picture of the foliations")
    return parser


def _load(args) -> RunConfig:
    overrides = {"seed": args.seed, "out_dir": args.out, "k": args.k}
    if args.max_word_len is not None:
        overrides["census_word_len"] = args.max_word_len
    return load_config(args.config, overrides)


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_verify(cfg: RunConfig) -> int:
    report = certify(cfg)
    out = _outdir(cfg)
    (out / "report.txt").write_text(report.render_text())
    write_csv(out / "report.csv", list(report.csv_rows()[0]), report.csv_rows()[1:])
    print(report.render_text(), end="")
    return 0 if report.passed else 1


def _trace_start(cfg: RunConfig, bundle: FoliatedBundle):
    w = Word.parse(cfg.trace_word)
    cls = classify_and_fixed_points(bundle.group.evaluate(w))
    if cls.kind != "hyperbolic":
        raise ConfigError(f"trace word {cfg.trace_word} is not hyperbolic")
    idx = 0 if cfg.trace_height == "attracting" else 1
    p = CirclePoint.of((cls.fixed[idx].theta / TWO_PI) % 1.0, bundle.k)
    return w, p, cls


def cmd_trace(cfg: RunConfig) -> int:
    bundle = FoliatedBundle(group_preset(cfg.preset), cfg.k)
    out = _outdir(cfg)
    w, p, cls = _trace_start(cfg, bundle)
    if cfg.trace_mode == "flow":
        x0 = HyperbolicPoint(cfg.trace_x, cfg.trace_y)
        pt = bundle.point(x0, p)
        _, seg = flow_phi(bundle, pt, cfg.trace_time, step=0.1)
    elif cfg.trace_mode == "orbit":
        seg = periodic_orbit(bundle, w, p, step=0.05)
    else:
        raise ConfigError(f"unknown trace mode {cfg.trace_mode!r}")
    write_csv(out / "trace.csv", TRACE_HEADER, trace_rows(bundle, seg))
    svg = render_disk_svg(bundle, orbit=seg, target=bundle.target(p), leaves_at=[p])
    (out / "trace.svg").write_text(svg)
    print(f"wrote {out/'trace.csv'} and {out/'trace.svg'} ({len(seg.samples)} samples)")
    return 0


def cmd_census(cfg: RunConfig) -> int:
    cfg.require_seed()
    group = group_preset(cfg.preset)
    entries = []
    for k in cfg.census_covers:
        entries.extend(orbit_census(group, k, cfg.census_word_len))
    out = _outdir(cfg)
    write_csv(out / "census.csv", CENSUS_HEADER, census_rows(entries))
    pairs = homotopic_inverse_pairs(entries)
    bad = sum(1 for p in pairs if not p.keys_inverse)
    print(f"wrote {out/'census.csv'}: {len(entries)} entries, {len(pairs)} inverse pairs, {bad} mismatched")
    return 0 if bad == 0 else 1


def cmd_measure_charts(cfg: RunConfig) -> int:
    bundle = FoliatedBundle(group_preset(cfg.preset), cfg.k)
    out = _outdir(cfg)
    n = 256
    anchor = CirclePoint.of(0.0, bundle.k)
    rows = []
    for i in range(n):
        s = bundle.k * i / n
        rows.append((format(s, ".12g"), format(
            bundle.measure.nu_interval(anchor, CirclePoint.of(s, bundle.k)), ".12g")))
    write_csv(out / "zeta.csv", ZETA_HEADER, rows)
    words = [Word.parse(t) for t in ("a1", "b1", "a2", "b2", "a1 b1", "a1 b1 a2 b2")]
    write_csv(out / "rn_grid.csv", RN_HEADER, rn_grid_rows(bundle, words, 128))
    print(f"wrote {out/'zeta.csv'} and {out/'rn_grid.csv'}")
    return 0


def cmd_render(cfg: RunConfig) -> int:
    bundle = FoliatedBundle(group_preset(cfg.preset), cfg.k)
    out = _outdir(cfg)
    w, p, cls = _trace_start(cfg, bundle)
    seg = periodic_orbit(bundle, w, p, step=0.05)
    heights = [CirclePoint.of(p.s + j * bundle.k / 3.0, bundle.k) for j in range(3)]
    svg = render_disk_svg(bundle, orbit=seg, target=bundle.target(p), leaves_at=heights)
    (out / "foliation.svg").write_text(svg)
    print(f"wrote {out/'foliation.svg'}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "verify":
            cfg.require_seed()
            return cmd_verify(cfg)
        if args.command == "trace":
            return cmd_trace(cfg)
        if args.command == "census":
            return cmd_census(cfg)
        if args.command == "measure-charts":
            return cmd_measure_charts(cfg)
        if args.command == "render":
            return cmd_render(cfg)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
