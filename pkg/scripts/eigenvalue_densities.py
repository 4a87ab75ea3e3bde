#!/usr/bin/env python3
"""Eigenvalue-density data for the three reference ensembles.

Writes one histogram CSV per ensemble (plus per-member moments), all at
dimension 252 with 100 members: a classical GOE, a two-body fermionic
embedded ensemble (ell=10, m=5), and a two-level bosonic one (ell=2, m=251).
Plot the CSVs with any external tool.
"""

import argparse

from mbrmt.cli import run
from mbrmt.config import RunConfig

ENSEMBLES = {
    "goe": {"kind": "goe", "n": 252},
    "fegoe": {"kind": "fegoe", "ell": 10, "m": 5, "k": 2},
    "begoe": {"kind": "begoe", "ell": 2, "m": 251, "k": 2},
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/densities")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--members", type=int, default=100)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--bins", type=int, default=40)
    args = ap.parse_args()

    for name, ensemble in ENSEMBLES.items():
        for command in ("density", "moments"):
            manifest = run(
                RunConfig(
                    command=command,
                    seed=args.seed,
                    member_count=args.members,
                    worker_count=args.workers,
                    output_dir=f"{args.out}/{name}",
                    ensemble=ensemble,
                    statistic={"bins": args.bins, "normalized": name != "goe"},
                )
            )
            print(f"{name}/{command}: {sorted(manifest.artifacts)}")


if __name__ == "__main__":
    main()
