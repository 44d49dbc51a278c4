# Copyright 2026 The stabforest Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Rebuilds data/breast_cancer.csv and data/diamonds_5000.csv from upstream.

Sources:
  Wisconsin breast cancer (original), UCI Machine Learning Repository:
    https://archive.ics.uci.edu/ml/machine-learning-databases/breast-cancer-wisconsin/breast-cancer-wisconsin.data
  ggplot2 diamonds:
    https://raw.githubusercontent.com/tidyverse/ggplot2/main/data-raw/diamonds.csv

The breast cancer file keeps all 699 rows (missing bare_nuclei stays "?")
and drops the sample ID. Diamonds keeps a random.Random(42) sample of 5000
rows; price becomes the label "high" when above the full-data median.

Usage: python3 docs/fetch-datasets.py [output_dir]
"""

import csv
import hashlib
import io
import pathlib
import random
import sys
import urllib.request

BREAST_URL = ("https://archive.ics.uci.edu/ml/machine-learning-databases/"
              "breast-cancer-wisconsin/breast-cancer-wisconsin.data")
DIAMONDS_URL = "https://raw.githubusercontent.com/tidyverse/ggplot2/main/data-raw/diamonds.csv"

EXPECTED_SHA256 = {
    "breast_cancer.csv": "17102822f2ba0c9824077c86af6a62b911eccf9f645d1cf09f4b68214c46a58e",
    "diamonds_5000.csv": "892d6209c1e524f35eb57112f9996eccc8f9e3b7ef35cc586b3c1c89ccff1db6",
}

BREAST_COLUMNS = ["clump_thickness", "cell_size_uniformity", "cell_shape_uniformity",
                  "marginal_adhesion", "epithelial_cell_size", "bare_nuclei", "bland_chromatin",
                  "normal_nucleoli", "mitoses"]


def fetch(url):
    with urllib.request.urlopen(url, timeout=60) as response:
        return response.read().decode("utf-8")


def write_rows(path, header, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def breast_cancer(out):
    rows = []
    for record in csv.reader(io.StringIO(fetch(BREAST_URL))):
        if not record:
            continue
        label = {"2": "benign", "4": "malignant"}[record[10].strip()]
        rows.append([v.strip() for v in record[1:10]] + [label])
    write_rows(out / "breast_cancer.csv", BREAST_COLUMNS + ["class"], rows)


def diamonds(out):
    table = list(csv.reader(io.StringIO(fetch(DIAMONDS_URL))))
    header, body = table[0], table[1:]
    col = {name.strip('"'): i for i, name in enumerate(header)}
    prices = sorted(int(r[col["price"]]) for r in body)
    median = prices[len(prices) // 2]
    sample = random.Random(42).sample(body, 5000)
    features = ["carat", "cut", "color", "clarity", "depth", "table", "x", "y", "z"]
    rows = [[r[col[f]] for f in features] + ["high" if int(r[col["price"]]) > median else "low"]
            for r in sample]
    write_rows(out / "diamonds_5000.csv", features + ["price_class"], rows)
    print(f"diamonds median price: {median}")


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    out.mkdir(parents=True, exist_ok=True)
    breast_cancer(out)
    diamonds(out)
    for name, expected in EXPECTED_SHA256.items():
        digest = hashlib.sha256((out / name).read_bytes()).hexdigest()
        status = "ok" if digest == expected else f"differs from the shipped file ({digest})"
        print(f"{name}: {status}")


if __name__ == "__main__":
    main()
