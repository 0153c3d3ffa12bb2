"""Run every bundled figure config and write the tables into one directory.

Usage: python scripts/reproduce_figures.py [outdir] [--workers N]
"""
import argparse
from pathlib import Path
import time

from spinentangle.cli import FIGURES, figure_config
from spinentangle.runner import run_config


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("outdir", nargs="?", default="figures_out")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name in FIGURES:
        cfg = out / f"{name}.yaml"
        cfg.write_text(figure_config(name))
        start = time.perf_counter()
        status, written = run_config(cfg, output=out, workers=args.workers)
        tables = [p.name for p in written if p.suffix in (".csv", ".json")]
        print(f"{name}: status {status}, {time.perf_counter() - start:.1f}s, {', '.join(tables)}")


if __name__ == "__main__":
    main()
