#!/usr/bin/env python3
"""Recompute ODM, FPM and WPM from the raw columns of both bundled tables
and compare with the printed values."""
import sys
from pathlib import Path

from zonepart.metrics import CASE1_WEIGHTS, CASE2_WEIGHTS, rank_partitions, read_raw_table, score

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def replay(name: str, weights) -> float:
    rows, printed = read_raw_table(DATA / name)
    score(rows, weights)
    worst = 0.0
    print(f"\n{name}  (u_nr {weights.u_nr}, ave_nr {weights.ave_nr}, max_nr {weights.max_nr}, alpha {weights.alpha})")
    print(f"{'partition':24s} {'ODM%':>9} {'FPM%':>9} {'WPM%':>9} {'|dev| pp':>9}")
    for r in rows:
        dev = max(abs(a - b) for a, b in zip((r.odm, r.fpm, r.wpm), printed[r.label]))
        worst = max(worst, dev)
        flag = "  *" if dev > 0.005 else ""
        print(f"{r.label:24s} {r.odm:9.4f} {r.fpm:9.4f} {r.wpm:9.4f} {dev:9.4f}{flag}")
    print(f"best by WPM: {rank_partitions(rows)[0].label}; max deviation {worst:.4f} pp")
    return worst


def main() -> int:
    a = replay("table1.csv", CASE1_WEIGHTS)
    b = replay("table2.csv", CASE2_WEIGHTS)
    return 0 if max(a, b) <= 0.005 else 1


if __name__ == "__main__":
    sys.exit(main())
