"""Command line entry point: ``morphonca {evolve,replay,curves,scatter,shapes}``."""
import argparse
import logging
import sys

from ._validation import ConfigError, DataError
from .evolution import TREATMENTS
from .harness import (
    cmd_curves,
    cmd_evolve,
    cmd_replay,
    cmd_scatter,
    load_config,
    load_genome,
    render_shape,
    replay_config,
)
from .shapes import SHAPE_NAMES

logger = logging.getLogger("morphonca")


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _config_args(p):
    p.add_argument("--config", help="TOML experiment config")
    p.add_argument("--treatment", choices=TREATMENTS + ("all",))
    p.add_argument("--shape", choices=SHAPE_NAMES)
    p.add_argument("--m", type=int, help="grid side length")
    p.add_argument("--steps", type=int, help="development steps N (even)")
    p.add_argument("--pop", type=int, help="population size P")
    p.add_argument("--gens", type=int, help="generations G")
    p.add_argument("--runs", type=int, help="runs per treatment R")
    p.add_argument("--seed", type=_seed, help="base seed; run r uses seed + r")
    p.add_argument("--workers", type=int)


def _load(args, out=None):
    return load_config(
        args.config,
        treatments=args.treatment, shape=args.shape, m=args.m, n_steps=args.steps,
        population=args.pop, generations=args.gens, runs=args.runs, seed=args.seed,
        workers=args.workers, out=out)


def build_parser():
    parser = argparse.ArgumentParser(prog="morphonca", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run AFPO batches and write per-run artifacts")
    _config_args(p)
    p.add_argument("--out", help="output root (default from config, else ./out)")

    p = sub.add_parser("replay", help="develop a saved genome, write frames and heatmap")
    p.add_argument("genome", help="champion JSON file")
    _config_args(p)
    p.add_argument("--out", default="replay", help="output directory")

    p = sub.add_parser("curves", help="aggregate RunLogs into mean/CI curves")
    p.add_argument("runs", nargs="+", help="run directories or roots to search")
    p.add_argument("--out", required=True, help="output CSV")

    p = sub.add_parser("scatter", help="final champions plus random generation-zero baseline")
    p.add_argument("runs", nargs="+", help="run directories or roots to search")
    p.add_argument("--out", required=True, help="output CSV")

    p = sub.add_parser("shapes", help="target shape utilities")
    shapes_sub = p.add_subparsers(dest="shapes_command", required=True)
    r = shapes_sub.add_parser("render", help="write a target mask as PGM")
    r.add_argument("--shape", choices=SHAPE_NAMES, required=True)
    r.add_argument("--m", type=int, default=25)
    r.add_argument("--out", required=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "evolve":
            config = _load(args, out=args.out)
            for artifacts in cmd_evolve(config):
                print(artifacts.directory)
        elif args.command == "replay":
            _, doc = load_genome(args.genome)
            config = replay_config(doc, args.config, shape=args.shape, m=args.m,
                                   n_steps=args.steps)
            value, bits = cmd_replay(args.genome, args.out, config)
            print(f"loss={value!r} empowerment_bits={bits!r}")
        elif args.command == "curves":
            cmd_curves(args.runs, args.out)
        elif args.command == "scatter":
            cmd_scatter(args.runs, args.out)
        elif args.command == "shapes":
            render_shape(args.shape, args.m, args.out)
    except (ConfigError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
