"""Command-line entry point: ``treeqst --preset fig2a --out fig2a.csv``.

Settings are layered defaults < preset < config file < explicit flags.
Exit codes: 0 success, 1 configuration or I/O error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from treeqst.experiment import FORMATS, MODES, PRESETS, ConfigError, RunConfig, emit, run

log = logging.getLogger("treeqst")

# flag dest -> RunConfig field
_FLAG_FIELDS = {
    "mode": "mode",
    "generations": "generations",
    "site": "target_site",
    "nu": "nu",
    "lam": "lam",
    "gamma": "gamma",
    "omega0": "omega0",
    "tmax": "t_max",
    "steps": "t_steps",
    "p": "wm_strengths",
    "theta": "theta",
    "phi": "phi",
    "format": "format",
    "out": "output_path",
    "seed": "seed",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treeqst", description=__doc__.splitlines()[0])
    ap.add_argument("--mode", choices=MODES)
    ap.add_argument("--generations", type=int, help="tree depth N")
    ap.add_argument("--site", type=int, help="target site r (default: 2^(N-1))")
    ap.add_argument("--nu", type=float, help="tree coupling")
    ap.add_argument("--lambda", dest="lam", type=float, help="Lorentzian spectral width")
    ap.add_argument("--gamma", type=float, help="reservoir coupling constant")
    ap.add_argument("--omega0", type=float, help="qubit frequency (drops out in the interaction picture)")
    ap.add_argument("--tmax", type=float)
    ap.add_argument("--steps", type=int, help="number of time points including t=0")
    ap.add_argument("--p", type=float, action="append", help="weak-measurement strength; repeatable")
    ap.add_argument("--theta", type=float)
    ap.add_argument("--phi", type=float)
    ap.add_argument("--seed", type=int, help="seed for randomised verification suites")
    ap.add_argument("--format", choices=FORMATS)
    ap.add_argument("--out", help="output file (default: stdout)")
    ap.add_argument("--config", help="key = value file")
    ap.add_argument("--preset", choices=sorted(PRESETS))
    ap.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = PRESETS[args.preset] if args.preset else RunConfig()
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        cfg = RunConfig.from_text(text, cfg)
    overrides = {}
    for dest, name in _FLAG_FIELDS.items():
        val = getattr(args, dest)
        if val is not None:
            overrides[name] = tuple(val) if name == "wm_strengths" else val
    return RunConfig.from_mapping(overrides, cfg)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"treeqst: config error: {exc}", file=sys.stderr)
        return 1
    if args.dump_config:
        sys.stdout.write(cfg.to_text())
        return 0

    log.info("running mode=%s N=%d site=%d", cfg.mode, cfg.generations, cfg.site)
    table = run(cfg)
    try:
        text = emit(table, cfg.format, cfg.output_path)
    except (OSError, ValueError) as exc:
        print(f"treeqst: cannot write output: {exc}", file=sys.stderr)
        return 1
    if cfg.output_path is None:
        sys.stdout.write(text)

    if cfg.mode == "verify":
        failed = [row[0] for row in table.rows if not row[-1]]
        for name in failed:
            print(f"treeqst: verification failed: {name}", file=sys.stderr)
        return 2 if failed else 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
