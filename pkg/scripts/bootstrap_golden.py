"""Regenerate the golden CSVs used by the regression tests.

Run once after a verified change to the sweep code; review the diff before
committing.  Usage: python scripts/bootstrap_golden.py [outdir]
"""
from pathlib import Path
import shutil
import sys
import tempfile

from spinentangle.cli import figure_config
from spinentangle.runner import run_config

GOLDEN = ("fig6", "fig7")


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        for name in GOLDEN:
            cfg = Path(tmp) / f"{name}.yaml"
            cfg.write_text(figure_config(name))
            status, written = run_config(cfg, output=tmp)
            if status:
                raise SystemExit(f"{name}: run failed with status {status}")
            for path in written:
                if path.suffix == ".csv":
                    shutil.copy(path, outdir / path.name)
                    print(f"wrote {outdir / path.name}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "tests" / "golden")
