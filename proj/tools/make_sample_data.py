#!/usr/bin/env python3
"""Write a small synthetic trip file and zone-centroid file.

The columns follow the taxi trip-record layout read by `darpdp generate`.
Coordinates are in miles on a 12 x 12 square; trips span 07:30-10:50 so that
some fall outside the 08:10-10:10 planning horizon.
"""

import argparse
import csv
import math
import random
from pathlib import Path


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data", help="output directory")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--zones", type=int, default=60)
    ap.add_argument("--trips", type=int, default=480)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    zones = {}
    with open(out / "sample_zones.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["LocationID", "x", "y"])
        for zid in range(1, args.zones + 1):
            x, y = round(rng.uniform(0, 12), 3), round(rng.uniform(0, 12), 3)
            zones[zid] = (x, y)
            w.writerow([zid, x, y])

    rows = []
    ids = list(zones)
    while len(rows) < args.trips:
        pu = rng.choice(ids)
        do = rng.choice(ids)
        dist = math.dist(zones[pu], zones[do])
        if pu == do or dist > 9.0:
            continue
        start = rng.uniform(450, 650)
        minutes = 2.0 * dist + rng.uniform(0.5, 4.0)
        rows.append((start, start + minutes, pu, do, round(dist * rng.uniform(1.0, 1.3), 2)))
    rows.sort()

    def stamp(t: float) -> str:
        s = int(round(t * 60))
        return "2019-01-15 %02d:%02d:%02d" % (s // 3600, s // 60 % 60, s % 60)

    with open(out / "sample_trips.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["VendorID", "tpep_pickup_datetime", "tpep_dropoff_datetime", "passenger_count",
                    "trip_distance", "PULocationID", "DOLocationID"])
        for start, end, pu, do, dist in rows:
            w.writerow([1, stamp(start), stamp(end), 1, dist, pu, do])


if __name__ == "__main__":
    main()
