"""holescope command line.

Subcommands write their reports (CSV or JSON) and figures into ``--out`` and
print a short summary.  Exit codes: 0 success, 1 usage, 2 a computational
check failed, 3 a resource cap or bit budget was hit.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, config, plotting
from .bifset import (FAIL, PASS, exact_anchor, probe_step_scales, rasterize, stairs_from_orbits, stairs_to_json,
                     structure_checks)
from .errors import BitBudgetError, ResourceCapError, UsageError
from .maps import builtin
from .orbits import entropy_estimate, orbits_to_csv, periodic_orbits
from .phase import Hole, Mode, Space, format_scalar, parse_scalar
from .survival import escape_rate, escape_time
from .tentlab import continuity_scan

EXIT_OK, EXIT_USAGE, EXIT_CHECK, EXIT_CAP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p, map_required=True):
    p.add_argument("--map", required=map_required, help="builtin name or JSON map config")
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--manifest", help="write a run manifest (JSON) to this path")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int, default=config.DEFAULTS["seed"])


def _raster_args(p):
    p.add_argument("--resolution", type=int, default=config.DEFAULTS["resolution"])
    p.add_argument("--horizon", type=int, default=config.DEFAULTS["horizon"])
    p.add_argument("--eps-diag", type=float)


def build_parser():
    ap = _Parser(prog="holescope", description="Bifurcation sets of piecewise-linear maps with a hole")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("render", help="raster image of the bifurcation set")
    _common(p)
    _raster_args(p)
    p.add_argument("--pmax", type=int, default=0, help="overlay stairs of orbits up to this period")
    p.add_argument("--stairs-only", action="store_true")
    p.add_argument("--format", choices=["pgm", "png"], default="pgm")

    p = sub.add_parser("orbits", help="periodic orbits and their stairs")
    _common(p)
    p.add_argument("--pmax", type=int, default=5)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("entropy", help="entropy from periodic point counts")
    _common(p)
    p.add_argument("--nmax", type=int, default=12)

    p = sub.add_parser("escape", help="exact surviving-set measures and escape rate")
    _common(p)
    p.add_argument("--hole", required=True, help="a,b (rational or decimal)")
    p.add_argument("--horizons", default="0:20", help="comma list or start:stop")

    p = sub.add_parser("tent-scan", help="continuity scan of the restricted tent family")
    _common(p, map_required=False)
    _raster_args(p)
    p.add_argument("--s0", required=True)
    p.add_argument("--deltas", default="1e-2,1e-3,1e-4")
    p.add_argument("--side", choices=["below", "above"], default="below")
    p.add_argument("--nmax", type=int, default=config.DEFAULTS["tent_nmax"])

    p = sub.add_parser("verify", help="structural checks on a raster plus exact invariants")
    _common(p)
    _raster_args(p)
    p.add_argument("--pmax", type=int, default=5)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--probe", action="store_true", help="also run zoomed step probes")
    return ap


# -- helpers -------------------------------------------------------------------
def _mode(args):
    return Mode.EXACT if args.mode == "exact" else Mode.FLOAT


def _outdir(args) -> Path:
    d = Path(args.out)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise UsageError(f"cannot create output directory {d}: {e}") from None
    return d


def _stem(args):
    name = Path(args.map).stem if args.map and Path(args.map).is_file() else (args.map or "tent")
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def _write(path: Path, data, outputs):
    try:
        if isinstance(data, str):
            path.write_text(data)
        else:
            path.write_bytes(data)
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e}") from None
    outputs.append(path)


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _horizons(text):
    if ":" in text:
        a, b = (int(v) for v in text.split(":"))
        return list(range(a, b + 1))
    return [int(v) for v in text.split(",") if v.strip()]


# -- subcommands ---------------------------------------------------------------
def cmd_render(args, outputs):
    f = builtin(args.map, _mode(args))
    out = _outdir(args)
    stem = _stem(args)
    stairs = stairs_from_orbits(f, args.pmax, classify=False) if args.pmax > 0 else []
    if args.stairs_only:
        r = rasterize(f, 16, 1, threads=args.threads)   # only the frame is used
        fig = out / f"{stem}_stairs_p{args.pmax}.png"
        plotting.plot_raster(r, stairs, fig, title=f"{f.label}: stairs of period <= {args.pmax}",
                             stairs_only=True)
        outputs.append(fig)
        _write(out / f"{stem}_stairs_p{args.pmax}.json", stairs_to_json(stairs), outputs)
        print(f"stairs: {len(stairs)}")
        return EXIT_OK
    r = rasterize(f, args.resolution, args.horizon, eps_diag=args.eps_diag, threads=args.threads)
    base = out / f"{stem}_r{args.resolution}_n{args.horizon}"
    img = base.with_suffix("." + args.format)
    if args.format == "pgm":
        r.write_pgm(img)
    else:
        r.write_png(img)
    outputs.append(img)
    _write(base.with_suffix(".json"), json.dumps(r.metadata(), indent=2), outputs)
    fig = Path(str(base) + "_fig.png")
    plotting.plot_raster(r, stairs, fig)
    outputs.append(fig)
    print(f"in-set cells: {int(r.in_set.sum())} ({r.in_set_fraction():.4f})")
    return EXIT_OK


def cmd_orbits(args, outputs):
    f = builtin(args.map, _mode(args))
    out = _outdir(args)
    orbs = periodic_orbits(f, args.pmax)
    stairs = stairs_from_orbits(f, args.pmax, orbits=orbs)
    stem = f"{_stem(args)}_orbits_p{args.pmax}"
    if args.format == "csv":
        _write(out / f"{stem}.csv", orbits_to_csv(orbs), outputs)
    _write(out / f"{stem}_stairs.json", stairs_to_json(stairs), outputs)
    counts = {}
    for st in stairs:
        counts[st.length] = counts.get(st.length, 0) + 1
    print(f"orbits: {len(orbs)}  stairs by length: {dict(sorted(counts.items()))}")
    return EXIT_OK


def cmd_entropy(args, outputs):
    f = builtin(args.map, _mode(args))
    est = entropy_estimate(f, args.nmax)
    out = _outdir(args)
    rows = ["n,fixed_points,estimate"] + [f"{n},{c},{e!r}" for (n, c), e in zip(est.counts, est.estimates)]
    _write(out / f"{_stem(args)}_entropy.csv", "\n".join(rows) + "\n", outputs)
    print(f"entropy estimate: {est.reported:.6f} ({est.rule})")
    return EXIT_OK


def cmd_escape(args, outputs):
    f = builtin(args.map, _mode(args))
    try:
        a, b = (parse_scalar(v, _mode(args)) for v in args.hole.split(","))
    except ValueError:
        raise UsageError("--hole expects a,b") from None
    h = Hole(a, b, f.space)
    ser = escape_rate(f, h, _horizons(args.horizons))
    out = _outdir(args)
    stem = f"{_stem(args)}_escape"
    _write(out / f"{stem}.csv", ser.to_csv(), outputs)
    fig = out / f"{stem}.png"
    plotting.plot_escape(ser, fig)
    outputs.append(fig)
    print(f"hole {h}: fitted rate {ser.fitted_rate!r}")
    return EXIT_OK


def cmd_tent_scan(args, outputs):
    s0 = parse_scalar(args.s0, Mode.EXACT)
    deltas = [float(v) for v in args.deltas.split(",") if v.strip()]
    rep = continuity_scan(s0, deltas, args.resolution, args.horizon, side=-1 if args.side == "below" else 1,
                          n_max=args.nmax, threads=args.threads)
    out = _outdir(args)
    stem = f"tent_scan_s{format_scalar(s0).replace('/', '_')}"
    _write(out / f"{stem}.csv", rep.to_csv(), outputs)
    fig = out / f"{stem}.png"
    plotting.plot_scan(rep, fig)
    outputs.append(fig)
    for d, h in zip(rep.deltas, rep.distances):
        print(f"delta={d:g}  hausdorff={h:.6f}")
    if rep.rect_b is not None:
        print(f"rectangle (0,{rep.rect_eps}) x B({rep.rect_b:.6g}): {rep.rect_cells_s0} cells at s0, "
              f"{rep.rect_cells} nearby")
    return EXIT_OK


def _sample_soundness(f, r, n, seed):
    """Holes sampled in out-of-set cells must have both endpoints escape."""
    rng = np.random.default_rng(seed)
    out = np.argwhere(~r.in_set & ~r.excluded)
    if len(out) == 0 or n <= 0:
        return 0, 0
    idx = rng.choice(len(out), size=min(n, len(out)), replace=False)
    bad = 0
    den = 1 << 20
    for i, j in out[idx]:
        a0, a1 = r.a_edges[i], r.a_edges[i + 1]
        b0, b1 = r.b_edges[j], r.b_edges[j + 1]
        a = a0 + (a1 - a0) * rng.random()
        b = b0 + (b1 - b0) * rng.random()
        if f.exact:
            a, b = Fraction(round(a * den), den), Fraction(round(b * den), den)
        try:
            h = Hole(a, b, f.space)
        except UsageError:
            continue
        if not (escape_time(f, h, a, r.horizon).escaped and escape_time(f, h, b, r.horizon).escaped):
            bad += 1
    return len(idx), bad


def cmd_verify(args, outputs):
    f = builtin(args.map, _mode(args))
    out = _outdir(args)
    r = rasterize(f, args.resolution, args.horizon, eps_diag=args.eps_diag, threads=args.threads)
    stairs = stairs_from_orbits(f, args.pmax) if f.exact else []
    items = structure_checks(f, r, args.pmax if f.exact else 0, stairs)
    if f.exact:
        anchors = [exact_anchor(f, s) for st in stairs for s in st.steps]
        items["anchors"] = {"verdict": PASS if all(anchors) else FAIL, "steps": len(anchors),
                            "failed": anchors.count(False)}
    n, bad = _sample_soundness(f, r, args.samples, args.seed)
    items["soundness"] = {"verdict": PASS if bad == 0 else FAIL, "samples": n, "violations": bad,
                          "seed": args.seed}
    if args.probe and stairs:
        res = [probe_step_scales(f, s)[0] for st in stairs for s in st.steps]
        items["probes"] = {"verdict": PASS if all(x is not False for x in res) else FAIL,
                           "steps": len(res), "disagreements": res.count(False)}
    stem = f"{_stem(args)}_verify_r{args.resolution}_n{args.horizon}"
    _write(out / f"{stem}.json", json.dumps(items, indent=2, default=str), outputs)
    fig = out / f"{stem}.png"
    plotting.plot_raster(r, stairs, fig)
    outputs.append(fig)
    failed = [k for k, v in items.items() if v["verdict"] not in (PASS, "descriptive")]
    for k, v in items.items():
        print(f"item {k}: {v['verdict']}")
    return EXIT_CHECK if failed else EXIT_OK


COMMANDS = {"render": cmd_render, "orbits": cmd_orbits, "entropy": cmd_entropy, "escape": cmd_escape,
            "tent-scan": cmd_tent_scan, "verify": cmd_verify}


def _manifest(path, args, argv, outputs, wall, code):
    doc = {
        "command": args.command,
        "argv": list(argv),
        "parameters": {k: v for k, v in sorted(vars(args).items()) if k != "command"},
        "defaults": config.DEFAULTS,
        "version": __version__,
        "mode": getattr(args, "mode", "exact"),
        "exit_code": code,
        "wall_time_s": round(wall, 3),
        "outputs": {str(p): _sha256(p) for p in outputs if Path(p).exists()},
    }
    Path(path).write_text(json.dumps(doc, indent=2, default=str))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    outputs: list = []
    t0 = time.perf_counter()
    args = None
    try:
        args = build_parser().parse_args(argv)
        code = COMMANDS[args.command](args, outputs)
    except UsageError as e:
        print(f"holescope: usage error: {e}", file=sys.stderr)
        code = EXIT_USAGE
    except (ResourceCapError, BitBudgetError) as e:
        print(f"holescope: resource cap: {e}", file=sys.stderr)
        code = EXIT_CAP
    except AssertionError as e:
        print(f"holescope: check failed: {e}", file=sys.stderr)
        code = EXIT_CHECK
    if args is not None and getattr(args, "manifest", None):
        _manifest(args.manifest, args, argv, outputs, time.perf_counter() - t0, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
