"""Scaling sweeps for the good and pathological families, with power-law fits.

Writes one CSV per family into --outdir and prints a summary table.

    python3 scripts/run_scaling.py --outdir results/
"""

import argparse
import math
from pathlib import Path

from silhlab.experiments import (SweepConfig, check_theorem_bound, emit_csv, fit_exponent,
                                 run_sweep, write_atomic)
from silhlab.generators import family_member

FAMILIES = {
    "icosphere": [1, 2, 3, 4, 5],
    "uvsphere": [8, 16, 32, 64],
    "cylsec": [16, 32, 64, 128],
    "lantern:8": [8, 64, 512, 4096],
    "strips": [8, 32, 128, 512],
    "saucer": [4, 8, 16, 32],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    ap.add_argument("--samples", type=int, default=10000, help="Monte-Carlo samples per member")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    cfg = SweepConfig(mc_samples=args.samples, seed=args.seed)
    print(f"{'family':<12} {'n range':>16} {'p':>7} {'r2':>8} {'min E/n':>8}  bound")
    for family, sizes in FAMILIES.items():
        records = run_sweep(lambda s: family_member(family, s), sizes, cfg)
        name = family.replace(":", "_")
        write_atomic(args.outdir / f"{name}.csv", emit_csv(records))
        fit = fit_exponent(records)
        ratio = min(r.exact_expected / r.n for r in records)
        bound = "-"
        if family in ("icosphere", "uvsphere"):
            bound = "holds" if all(check_theorem_bound(r, 2 * math.pi).holds
                                   for r in records) else "VIOLATED"
        span = f"{records[0].n}..{records[-1].n}"
        print(f"{family:<12} {span:>16} {fit.exponent:7.3f} {fit.r_squared:8.5f} {ratio:8.4f}  {bound}")


if __name__ == "__main__":
    main()
