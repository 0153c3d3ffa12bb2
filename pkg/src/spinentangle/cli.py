"""Command line entry point: ``spinentangle run|validate|figures``."""
import argparse
from importlib import resources
import sys

from .errors import ConfigError
from .runner import load_configs, run_config

FIGURES = tuple(f"fig{k}" for k in range(1, 8))


def figure_config(name):
    if name not in FIGURES:
        raise KeyError(name)
    return resources.files("spinentangle.configs").joinpath(f"{name}.yaml").read_text()


def _log(msg):
    print(msg, file=sys.stderr)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="spinentangle", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep config and write its table")
    p_run.add_argument("config")
    p_run.add_argument("-o", "--output", help="output file (or directory for multi-document configs)")
    p_run.add_argument("-j", "--workers", type=int, default=1, help="field points evaluated concurrently")

    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")

    p_fig = sub.add_parser("figures", help="print the bundled config for a figure")
    p_fig.add_argument("figure", choices=FIGURES)
    p_fig.add_argument("-o", "--output", help="write the config here instead of stdout")

    args = parser.parse_args(argv)

    if args.command == "run":
        status, _ = run_config(args.config, output=args.output, workers=args.workers, log=_log)
        return status

    if args.command == "validate":
        try:
            configs = load_configs(args.config)
        except (ConfigError, OSError) as exc:
            _log(f"error: {exc}")
            return 2
        for k, c in enumerate(configs):
            kind = "ensemble" if c.is_ensemble else f"{len(c.initials)} initial state(s)"
            print(f"document {k}: ok ({c.hamiltonian.model.value}, "
                  f"{c.hamiltonian.graph.n_sites} sites, {kind}, {c.times[2]} times, "
                  f"{len(c.field_points())} field point(s), {len(c.pairs)} pair(s))")
        return 0

    text = figure_config(args.figure)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
