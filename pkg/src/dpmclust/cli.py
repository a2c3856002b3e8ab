"""Batch command-line front end.

Verbs: ``generate`` (scenario to CSV), ``run`` (experiment), ``summarize``
(re-aggregate from artifacts), ``ari`` (score two partition files).

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import (ChainError, ConstantColumn, NoConvergence,
                     NotPositiveDefinite, ParseError)
from .experiment import (ConfigError, build_config, default_output_root,
                         parse_config_text, read_labels, reaggregate,
                         run_experiment, write_labels, write_matrix)
from .postprocess import adjusted_rand
from .simulate import PRESETS, generate


def _build_parser():
    parser = argparse.ArgumentParser(prog="dpmclust")
    sub = parser.add_subparsers(dest="verb", required=True)

    gen = sub.add_parser("generate", help="write a simulation preset as CSV")
    gen.add_argument("--preset", required=True, choices=sorted(PRESETS))
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("-o", "--output", required=True)
    gen.add_argument("--labels", default=None, help="also write true labels here")

    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("--config", default=None, help="flat key=value config file")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override a config entry")
    run.add_argument("-o", "--output", default=None)
    run.add_argument("--workers", type=int, default=None)

    summ = sub.add_parser("summarize", help="re-aggregate per-run artifacts")
    summ.add_argument("out_dir")

    ari = sub.add_parser("ari", help="adjusted Rand index of two partition files")
    ari.add_argument("partition_a")
    ari.add_argument("partition_b")
    return parser


def _cmd_generate(args) -> int:
    data, truth = generate(PRESETS[args.preset], np.random.default_rng(args.seed))
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    write_matrix(args.output, data.values)
    if args.labels:
        write_labels(args.labels, truth)
    print(f"wrote {data.n}x{data.J} matrix to {args.output}")
    return 0


def _cmd_run(args) -> int:
    entries = {}
    if args.config:
        entries.update(parse_config_text(Path(args.config).read_text()))
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        entries[key.strip()] = value.strip()
    cfg = build_config(entries)
    if args.output:
        cfg.output = args.output
    if args.workers is not None:
        cfg.workers = args.workers
    out_dir = cfg.output or default_output_root()
    status, rows = run_experiment(cfg, out_dir)
    for row in rows:
        print(f"run {row['chain']}: prior={row['prior']} clusters={row['n_clusters']} "
              f"ari={row['ari']:.4f} seconds={row['seconds']:.1f}")
    print(f"artifacts in {out_dir}")
    return status


def _cmd_summarize(args) -> int:
    rows = reaggregate(args.out_dir)
    for row in rows:
        print(f"run {row['chain']}: prior={row['prior']} clusters={row['n_clusters']} "
              f"ari={row['ari']:.4f} seconds={row['seconds']:.1f}")
    return 0


def _cmd_ari(args) -> int:
    value = adjusted_rand(read_labels(args.partition_a), read_labels(args.partition_b))
    print("%.17g" % value)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"generate": _cmd_generate, "run": _cmd_run,
                "summarize": _cmd_summarize, "ari": _cmd_ari}
    try:
        return handlers[args.verb](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, ConstantColumn, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (ChainError, NotPositiveDefinite, NoConvergence) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
