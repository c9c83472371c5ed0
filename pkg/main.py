import sys
import argparse

from helper_functions import setup_logging, load_config, write_text
from harness import (COMMANDS, DISTANCE_KINDS, EXIT_USAGE, FORMATS, MC_STATISTICS,
                     ExperimentConfig, run, serialize_records)

COMMAND_HELP = {
    "sample": "Draw uniform chord diagrams; every one of the (2n-1)!! diagrams is equally likely.",
    "stats": "Crossings, nestings, simple chords, length-j chords and components of one diagram "
             "(--pairs) or Monte Carlo means of a statistic (--samples).",
    "exact-crossings": "Exact crossing-number law; checks mean n(n-1)/6, variance n(n-1)(n+3)/45 "
                       "and the Catalan count of non-crossing diagrams.",
    "exact-simple": "Exact simple-chord law; checks the mean 2n/(2n-1).",
    "scfree": "Exact count s(n) of diagrams without simple chords; checks "
              "(2n-1)!!/e (exp(-1/(2n-1)) -/+ 10/n) bounds it.",
    "sb-verify": "Checks that the size-bias coupling of crossings or simple chords produces "
                 "exactly the size-bias law.",
    "stein-bound": "Evaluates the size-bias Stein bound on d_K(W_n, Z); theoretical mode checks "
                   "it stays below 12920 n^(-1/2), empirical mode that it dominates the exact distance.",
    "distance": "Distances to reference laws: d_TV(S_n, Poisson(2n/(2n-1))) <= 10n/(2n-1)^2, "
                "d_K(W_n, Z) <= 12920 n^(-1/2), and length-j chords against Poisson(1).",
    "report": "Runs every claim at desk scale and emits one record per check.",
}
EXACT_BY_DEFAULT = ("exact-crossings", "exact-simple", "scfree", "sb-verify", "distance", "report")


class CliParser(argparse.ArgumentParser):
    """Usage errors exit with status 1 and name the offending flag"""
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = CliParser(prog="steinlab",
                       description="Random chord diagrams, size-bias couplings and Stein bounds.")
    parser.add_argument("--config", default="config.json", help="Path to the JSON configuration file")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=COMMAND_HELP[command],
                                    description=COMMAND_HELP[command])
        sub.add_argument("--n", type=int, default=None, help="Number of chords")
        sub.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count")
        sub.add_argument("--seed", type=int, default=None, help="64-bit master seed")
        sub.add_argument("--workers", type=int, default=None,
                         help="Worker processes (default: STEINLAB_THREADS or config)")
        sub.add_argument("--format", choices=FORMATS, default=None, help="Output format")
        sub.add_argument("--out", default=None, help="Output path (default: stdout)")
        if command in ("stats", "sb-verify"):
            sub.add_argument("--statistic", choices=MC_STATISTICS, default=None)
        if command in ("stats", "distance"):
            sub.add_argument("--j", type=int, default=None, help="Chord length for length-j statistics")
        if command == "stats":
            sub.add_argument("--pairs", default=None, help='Chords as "1,8 2,9 3,4 ..."')
            sub.add_argument("--kind", choices=("mean", "dk"), default=None)
        if command == "distance":
            sub.add_argument("--kind", choices=DISTANCE_KINDS, required=True)
            sub.add_argument("--corrupt-pmf", action="store_true", help=argparse.SUPPRESS)
        if command == "stein-bound":
            sub.add_argument("--mode", choices=("theoretical", "empirical"), default=None)
    return parser


def config_from_args(args, settings):
    overrides = {
        key: getattr(args, key, None)
        for key in ("n", "samples", "seed", "workers", "format", "out", "statistic",
                    "kind", "mode", "j", "pairs")
    }
    if getattr(args, "corrupt_pmf", False):
        overrides["corrupt_pmf"] = True
    # Exact commands and distances stay exact unless samples are asked for
    if args.samples is None and args.command in EXACT_BY_DEFAULT:
        overrides["samples"] = 0
    return ExperimentConfig.from_settings(args.command, settings, **overrides)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    settings = load_config(args.config)
    setup_logging(settings.get("log_level"), settings.get("log_dir"))

    config = config_from_args(args, settings)
    status, records = run(config)
    if records:
        write_text(serialize_records(records, config.format), config.out)
    return status


if __name__ == "__main__":
    sys.exit(main())
