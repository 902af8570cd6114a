"""Run the shipped experiment configs and write results to one directory.

    python scripts/run_experiments.py --out results --threads 4 [size power ...]
"""
import argparse
import sys
from pathlib import Path

from betamix import cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
DEFAULT = ("size", "power", "clt", "equicontinuity", "entropy", "norm")


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("kinds", nargs="*", help=f"subset of {', '.join(DEFAULT)} (default: all)")
    p.add_argument("--out", default="results")
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args(argv)
    unknown = set(args.kinds) - set(DEFAULT)
    if unknown:
        p.error(f"unknown experiment(s): {', '.join(sorted(unknown))}")
    worst = 0
    for kind in args.kinds or DEFAULT:
        code = cli.main([kind, "--config", str(CONFIGS / f"{kind}.ini"), "--out", args.out, "--threads", str(args.threads)])
        if code:
            print(f"{kind}: exit code {code}", file=sys.stderr)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
