"""Command-line front end: ``zeromodes <subcommand> [flags]``.

Exit codes: 0 all checks pass, 1 some tolerance failed, 2 usage or config error.
Every flag can also be set through an environment variable ZEROMODES_<FLAG>
(for example ZEROMODES_DIM=5, ZEROMODES_EPS=0.1,0.03, ZEROMODES_TOL=clifford=1e-13).
Command-line values win over the environment.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import checks
from .fields import eval_zero_mode, sharp_params
from .grid import GridSpec, sample_field, write_binary, write_csv
from .reports import DEFAULT_TOLERANCES, report_document, to_csv, to_json

ENV_PREFIX = "ZEROMODES_"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


def _parse_tol(items) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    for item in items:
        if "=" not in item:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        name, value = item.split("=", 1)
        if name not in tol:
            raise UsageError(f"unknown tolerance {name!r}; known: {', '.join(sorted(tol))}")
        try:
            tol[name] = float(value)
        except ValueError:
            raise UsageError(f"tolerance {name} must be a number, got {value!r}") from None
    return tol


def _split(value) -> list[str]:
    return [v for v in str(value).split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=None, help="space dimension n (default 3)")
    common.add_argument("--s", type=int, default=None, choices=[1, -1], help="sign of the sharp family")
    common.add_argument("--grid", type=int, default=None, help="grid points per axis (default 129)")
    common.add_argument("--radius", type=float, default=None, help="box half-width R (default 8)")
    common.add_argument("--eps", type=float, action="append", default=None,
                        help="regularization parameter; repeat for a sweep (default 0.1)")
    common.add_argument("--order", type=int, default=None, choices=[2, 4], help="stencil order")
    common.add_argument("--tol", action="append", default=None, metavar="NAME=VALUE",
                        help="override a tolerance; repeatable")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--format", choices=["json", "csv"], default=None)
    common.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="zeromodes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*checks.SUBCOMMANDS, "all"):
        sub.add_parser(name, parents=[common])
    exp = sub.add_parser("export-field", parents=[common],
                         help="sample the sharp spinor on the grid (binary, or CSV with --format csv)")
    exp.set_defaults(export=True)
    return parser


def config_from_args(args) -> checks.RunConfig:
    def pick(flag, conv, default):
        v = getattr(args, flag)
        if v is not None:
            return v
        raw = _env(flag)
        if raw is None:
            return default
        try:
            return conv(raw)
        except ValueError:
            raise UsageError(f"bad value {raw!r} for {ENV_PREFIX}{flag.upper()}") from None

    eps = args.eps if args.eps else [float(v) for v in _split(_env("eps", "0.1"))]
    if any(not e > 0 for e in eps):
        raise UsageError("--eps values must be positive")
    tol_items = args.tol if args.tol is not None else _split(_env("tol", ""))
    cfg = checks.RunConfig(
        dim=pick("dim", int, 3),
        s=pick("s", int, 1),
        grid=pick("grid", int, 129),
        radius=pick("radius", float, 8.0),
        eps=tuple(eps),
        order=pick("order", int, 4),
        seed=pick("seed", int, 0),
        tolerances=_parse_tol(tol_items),
    )
    if cfg.s not in (1, -1):
        raise UsageError("--s must be 1 or -1")
    if cfg.order not in (2, 4):
        raise UsageError("--order must be 2 or 4")
    if cfg.dim < 2:
        raise UsageError("--dim must be at least 2")
    if cfg.radius <= 0 or cfg.grid < 9:
        raise UsageError("--radius must be positive and --grid at least 9")
    return cfg


def _export(cfg: checks.RunConfig, fmt: str, out: Path | None) -> int:
    if out is None:
        raise UsageError("export-field needs --out")
    params = sharp_params(cfg.dim, cfg.s, seed=cfg.seed)
    grid = GridSpec(cfg.dim, cfg.radius, cfg.grid, cfg.order)
    field = sample_field(lambda x: eval_zero_mode(params, x), grid)
    (write_csv if fmt == "csv" else write_binary)(field, out)
    return EXIT_OK


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = config_from_args(args)
        fmt = args.format or _env("format", "json")
        if fmt not in ("json", "csv"):
            raise UsageError(f"unknown format {fmt!r}")
        out = args.out or (Path(_env("out")) if _env("out") else None)
        if getattr(args, "export", False):
            return _export(cfg, fmt, out)
        runner = checks.run_all if args.command == "all" else checks.SUBCOMMANDS[args.command]
        reports = runner(cfg)
    except (UsageError, ValueError) as exc:
        print(f"zeromodes: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    doc = report_document(args.command, cfg.settings(), cfg.tolerances, reports)
    text = to_csv(doc) if fmt == "csv" else to_json(doc)
    if out is not None:
        Path(out).write_text(text)
    else:
        stdout.write(text)
    return EXIT_OK if doc["all_pass"] else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
