"""Command-line entry point: collapse-dyn fig1|fig2|limits|sweep."""

from __future__ import annotations

import argparse
import sys

from . import experiments as ex


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="flat TOML parameter/sweep file")
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--grid-n", type=int, default=None, dest="grid_n")
    sp.add_argument("--solver", choices=("closed", "grid"), default=None)
    sp.add_argument("--quad-nodes", type=int, default=None, dest="quad_nodes")
    sp.add_argument("--workers", type=int, default=None)


def _overrides(args) -> dict:
    over = {}
    for key in ("seed", "grid_n", "solver", "quad_nodes", "workers"):
        v = getattr(args, key, None)
        if v is not None:
            over[key] = v
    return over


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="collapse-dyn",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("fig1", "fig2", "limits", "sweep"):
        _add_common(sub.add_parser(name))
    args = ap.parse_args(argv)
    over = _overrides(args)

    try:
        if args.command == "limits":
            out = args.out or "out/limits"
            entries = ex.run_limits(out, seed=args.seed or 0)
            for e in entries:
                status = "PASS" if e["pass"] else "FAIL"
                print(f"[{status}] {e['check']}.{e['metric']} = {e['value']:.3e}"
                      f" (threshold {e['threshold']:.3e})")
            # failures are report entries; the exit code tracks finiteness
            import math
            finite = all(math.isfinite(e["value"]) for e in entries)
            return 0 if finite else 1

        if args.command == "fig1":
            cfg = (ex.config_from_file(args.config, "fig1", **over)
                   if args.config else ex.default_fig1_config(**over))
            res = ex.run_fig1(cfg, args.out or "out/fig1")
            print(f"fig1: {len(res['series'])} series -> {res['out_dir']}")
            return 0

        if args.command == "fig2":
            cfg = (ex.config_from_file(args.config, "fig2", **over)
                   if args.config else ex.default_fig2_config(**over))
            res = ex.run_fig2(cfg, args.out or "out/fig2")
            print(f"fig2: {res['gamma'].size} gamma points -> {res['out_dir']}")
            return 0

        if args.command == "sweep":
            if not args.config:
                raise ValueError("sweep requires --config")
            cfg = ex.config_from_file(args.config, "sweep", **over)
            res = ex.run_sweep(cfg, args.out or "out/sweep")
            print(f"sweep: {res['n_rows']} rows -> {res['out_dir']}")
            return 0
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
