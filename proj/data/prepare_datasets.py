#!/usr/bin/env python3
"""Regenerate the bundled benchmark CSVs.

Most tables are copied out of the ``keel-ds`` wheel (``pip download keel-ds``).
The six-class glass table is rebuilt from KEEL's one-vs-rest glass variants,
and balance-scale is enumerated directly since it is fully synthetic.

    python3 data/prepare_datasets.py path/to/keel_ds-*.whl data/
"""

import csv
import itertools
import sys
import zipfile
from pathlib import Path

FEATURES = {
    "iris": ["sepal_length", "sepal_width", "petal_length", "petal_width"],
    "haberman": ["age", "year", "positive_nodes"],
    "heart": ["age", "sex", "chest_pain", "rest_bp", "cholesterol", "fasting_sugar",
              "rest_ecg", "max_hr", "exercise_angina", "oldpeak", "slope",
              "major_vessels", "thal"],
    "pima": ["preg", "plas", "pres", "skin", "insu", "mass", "pedi", "age"],
    "wine": ["alcohol", "malic_acid", "ash", "alcalinity", "magnesium", "phenols",
             "flavanoids", "nonflav_phenols", "proanthocyanins", "color_intensity",
             "hue", "od280_od315", "proline"],
    "ionosphere": [f"a{i}" for i in range(1, 34)],
    "glass": ["RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe"],
}

SOURCES = {
    "iris": "balanced/raw/iris.dat",
    "heart": "balanced/raw/heart.dat",
    "pima": "balanced/raw/pima.dat",
    "ionosphere": "balanced/raw/ionosphere.dat",
    "wine": "balanced/raw/wine.dat",
    "haberman": "imbalanced/raw/haberman.dat",
}

# glass<k>.dat marks one original class as positive; class 3 is the remainder.
GLASS_PARTS = {"glass0": "1", "glass1": "2", "glass4": "5", "glass5": "6", "glass6": "7"}


def read_rows(wheel, member):
    text = wheel.read(f"keel_ds/data/{member}").decode()
    return [[c.strip() for c in line.split(",")] for line in text.strip().splitlines()]


def write(out, name, header, rows):
    with open(out / f"{name}.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    wheel = zipfile.ZipFile(sys.argv[1])
    out = Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)

    for name, member in SOURCES.items():
        write(out, name, FEATURES[name] + ["class"], read_rows(wheel, member))

    parts = {k: read_rows(wheel, f"imbalanced/raw/{k}.dat") for k in GLASS_PARTS}
    base = parts["glass0"]
    labels = ["3"] * len(base)
    for key, cls in GLASS_PARTS.items():
        rows = parts[key]
        assert [r[:-1] for r in rows] == [r[:-1] for r in base], key
        for i, r in enumerate(rows):
            if r[-1] == "positive":
                assert labels[i] == "3", (key, i)
                labels[i] = cls
    write(out, "glass", FEATURES["glass"] + ["class"],
          [r[:-1] + [c] for r, c in zip(base, labels)])

    balance = []
    for lw, ld, rw, rd in itertools.product(range(1, 6), repeat=4):
        left, right = lw * ld, rw * rd
        cls = "L" if left > right else "R" if right > left else "B"
        balance.append([lw, ld, rw, rd, cls])
    write(out, "balance", ["left_weight", "left_distance", "right_weight",
                           "right_distance", "class"], balance)


if __name__ == "__main__":
    main()
