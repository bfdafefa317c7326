#!/usr/bin/env python3
"""Regenerate data/funds_sample.csv (synthetic, fixed seed)."""

import csv
import random
import sys

SEED = 2018
ROWS = 200

# (province, weight, number of families)
PROVINCES = [
    ("Gauteng", 38, 22),
    ("N.Cape", 5, 6),
    ("W.Cape", 18, 10),
    ("KZN", 13, 8),
    ("Limpopo", 6, 4),
    ("North West", 10, 7),
    ("Mpungalanga", 5, 3),
    ("Free State", 5, 4),
]

# (category, mean performance, std)
CATEGORIES = [
    ("Top 200 stocks, eight provinces", 0.310, 0.750),
    ("Simple specification", 0.209, 0.076),
    ("Excluding large families (20% of a city)", 0.416, 0.509),
    ("Excluding local stocks", 0.227, 0.480),
    ("Extensive margin", 0.311, 0.987),
    ("Intensive margin only", 0.746, 0.452),
    ("Low book-to-market stocks", 0.338, 0.742),
    ("High book-to-market stocks", 0.103, 0.356),
]

# (race, gender, weight)
MANAGERS = [
    ("white", "M", 55),
    ("white", "F", 14),
    ("black", "M", 16),
    ("black", "F", 4),
    ("other/unknown", "M", 6),
    ("other/unknown", "unknown", 5),
]


def main(path):
    rng = random.Random(SEED)
    with open(path, "w", newline="") as fh:
        fh.write("# Synthetic fund sample: 200 invented funds. Marginals loosely follow the\n")
        fh.write("# reference province and manager composition tables; values are not real data.\n")
        fh.write("# Regenerate with tools/make_fixture.py.\n")
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["fund_id", "family", "province", "category", "manager_race",
                      "manager_gender", "assets", "performance"])
        for k in range(ROWS):
            prov, _, fams = rng.choices(PROVINCES, weights=[p[1] for p in PROVINCES])[0]
            family = "%s family %d" % (prov.replace(".", "").replace(" ", ""), rng.randrange(fams) + 1)
            cat, mu, sd = CATEGORIES[rng.randrange(len(CATEGORIES))]
            race, gender, _ = rng.choices(MANAGERS, weights=[m[2] for m in MANAGERS])[0]
            assets = round(rng.lognormvariate(5.0, 1.4), 2)
            perf = round(rng.gauss(mu, sd), 4)
            out.writerow(["F%03d" % (k + 1), family, prov, cat, race, gender, assets, perf])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/funds_sample.csv")
