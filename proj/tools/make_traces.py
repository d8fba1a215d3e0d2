"""Regenerates the shipped channel traces under data/traces."""
import csv
import random
from pathlib import Path


def bad(rng):
    rows, outage = [], 0
    for i in range(300):
        t = i / 10
        if outage == 0 and rng.random() < 0.03:
            outage = rng.randint(3, 8)
        if outage:
            outage -= 1
            rows.append((t, rng.uniform(45e6, 60e6), rng.uniform(0.6, 1.0)))
        else:
            rows.append((t, rng.uniform(45e6, 80e6), rng.uniform(0.05, 0.2)))
    return rows


def good(rng):
    return [(i / 10, rng.uniform(80e6, 120e6), rng.uniform(0.0, 0.02)) for i in range(300)]


def write(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["t_s", "capacity_bps", "loss_prob"])
        for t, c, p in rows:
            w.writerow([f"{t:.1f}", f"{c:.0f}", f"{p:.4f}"])


if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "data" / "traces"
    out.mkdir(parents=True, exist_ok=True)
    write(out / "bad_connectivity.csv", bad(random.Random(7)))
    write(out / "good_connectivity.csv", good(random.Random(8)))
