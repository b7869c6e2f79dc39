"""Echoes gold scores from a TSV table, keyed by (reference, candidate).

Useful as a harness sanity check: evaluating a metric against its own
gold labels must correlate perfectly.
"""

from __future__ import annotations

import argparse
import csv

from .protocol import serve


def load_gold(path: str) -> dict[tuple[str, str], float]:
    table: dict[tuple[str, str], float] = {}
    with open(path, encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle, delimiter="\t"):
            table[(row["reference"], row["candidate"])] = float(row["score"])
    return table


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("gold", help="TSV with reference/candidate/score columns")
    args = parser.parse_args()
    table = load_gold(args.gold)

    def score(reference: str, candidate: str) -> float:
        try:
            return table[(reference, candidate)]
        except KeyError:
            raise LookupError("pair not present in the gold table") from None

    return serve(score)


if __name__ == "__main__":
    raise SystemExit(main())
