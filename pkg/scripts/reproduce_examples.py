#!/usr/bin/env python3
"""Run the showcase bundle and drop per-topic artifacts into an output dir.

Equivalent to `cantorext examples` plus a few per-topic CSV tables; every
file embeds its resolved configuration.
"""

import pathlib
import sys

from cantorext.cli import main

OUT = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "out")


def run(*args):
    code = main(list(args))
    if code != 0:
        sys.exit(code)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    run("examples", "--out", str(OUT / "examples.json"))
    run("gamma", "--family", "example1", "--B", "1", "--k-max", "20",
        "--format", "csv", "--out", str(OUT / "example1_profile.csv"))
    run("dn", "--family", "example2", "--k-max", "40", "--epsilon", "0.25",
        "--r", "32,128,512", "--s", "4,9,16",
        "--out", str(OUT / "dip_dn_table.json"))
    run("density", "--family", "islands", "--Q", "2", "--alpha0", "0.5",
        "--k-max", "120", "--k-range", "10,30,60,90,119",
        "--format", "csv", "--out", str(OUT / "island_density.csv"))
    run("markov", "--family", "power_law", "--a", "2", "--depth", "3",
        "--n", "2,4,8", "--format", "csv", "--out", str(OUT / "markov.csv"))
    print(f"artifacts written to {OUT}/")
