"""``swelm`` command line entry point."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("swelm")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swelm", description="Sparse-weight ELM surrogates and Sobol' indices.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"generate": "sample training and validation datasets from a benchmark model",
             "gsa": "run the sparsity sweep and write analytic indices",
             "compare": "as gsa, plus a Monte Carlo pick-freeze reference on the model",
             "truth": "write closed-form indices for models that have them"}
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="path to a JSON run configuration")
        p.add_argument("--seed", type=_u64, help="override master_seed")
        p.add_argument("--out", help="override output_dir")
    return parser


def thread_cap(environ=os.environ) -> int | None:
    raw = environ.get("SWELM_THREADS")
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise ValueError(f"SWELM_THREADS must be a positive integer, got {raw!r}")
    return value


def _apply_thread_cap(cap: int):
    import numba
    from threadpoolctl import threadpool_limits

    if cap < numba.config.NUMBA_NUM_THREADS:
        numba.set_num_threads(cap)
    threadpool_limits(limits=cap)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    from .config import ConfigError, RunConfig
    from .errors import NumericalError, SwelmError
    from .runner import COMMANDS

    try:
        cap = thread_cap()
        if cap is not None:
            _apply_thread_cap(cap)
        config = RunConfig.load(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if args.out is not None:
            overrides["output_dir"] = args.out
        if overrides:
            config = dataclasses.replace(config, **overrides)
        out = COMMANDS[args.command](config)
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"swelm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, SwelmError, ArithmeticError) as exc:
        print(f"swelm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"swelm: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
