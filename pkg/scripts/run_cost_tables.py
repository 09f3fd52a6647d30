#!/usr/bin/env python3
"""Measure the six per-repair cost scenarios and print them as a table."""

import argparse

from collabregen.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0, help="object seed")
    args = parser.parse_args()
    return cli_main(["tables", "--seed", str(args.seed)])


if __name__ == "__main__":
    raise SystemExit(main())
