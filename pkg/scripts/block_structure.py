#!/usr/bin/env python3
"""Selection-rule structure data: configuration blocks and zero-pattern maps.

Emits the block table, the block-to-block transfer-distance matrix, and the
state-by-state map coding which regions a two-body interaction can reach
(0/1/2 transfers, 9 forbidden) for a three-orbit example and for the plain
ell=10, m=5 space.
"""

import argparse

from mbrmt.cli import run
from mbrmt.config import RunConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/blocks")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    manifest = run(
        RunConfig(
            command="blocks",
            seed=args.seed,
            member_count=1,
            output_dir=f"{args.out}/three_orbits",
            ensemble={"kind": "fegoe", "ell": 12, "m": 8, "k": 2, "capacities": [6, 4, 2]},
        )
    )
    print(f"three_orbits: {sorted(manifest.artifacts)}")

    manifest = run(
        RunConfig(
            command="blocks",
            seed=args.seed,
            member_count=1,
            output_dir=f"{args.out}/flat",
            ensemble={"kind": "fegoe", "ell": 10, "m": 5, "k": 2},
        )
    )
    print(f"flat: {sorted(manifest.artifacts)}")


if __name__ == "__main__":
    main()
