#!/usr/bin/env python3
"""Fetch the UCI multiple features (mfeat) files and write a manifest.

The original archive at archive.ics.uci.edu ships whitespace-separated files
named mfeat-fou, mfeat-fac, ... with 2000 rows in 200-row digit blocks. When
that host is reachable, download and unpack it yourself and point a manifest
at the files. Otherwise this script recovers the same tables from the copy
bundled in the mvlearn 0.1.0 wheel on PyPI (CSV with a header row and a
trailing label column) and rewrites them in the original layout.

    python3 tools/fetch_mfeat.py --out data
    python3 tools/fetch_mfeat.py --wheel mvlearn-0.1.0-py3-none-any.whl --out data
"""

import argparse
import csv
import io
import pathlib
import sys
import urllib.request
import zipfile

WHEEL_URL = ("https://files.pythonhosted.org/packages/d5/20/"
             "3a958b005e853addb7057a048640b8b9a07a361ad6658736c716da3e2e0d/"
             "mvlearn-0.1.0-py3-none-any.whl")

# Table order: canonical name, file stem, dimension.
FEATURES = [
    ("fourier", "mfeat-fou", 76),
    ("profile-correlations", "mfeat-fac", 216),
    ("karhunen-loeve", "mfeat-kar", 64),
    ("pixel", "mfeat-pix", 240),
    ("zernike", "mfeat-zer", 47),
    ("morphological", "mfeat-mor", 6),
]


def convert(text, stem, dim):
    rows = list(csv.reader(io.StringIO(text)))[1:]
    if len(rows) != 2000:
        sys.exit(f"{stem}: expected 2000 rows, found {len(rows)}")
    lines = []
    for i, row in enumerate(rows):
        if len(row) != dim + 1:
            sys.exit(f"{stem}: row {i + 1} has {len(row) - 1} values, expected {dim}")
        if int(float(row[-1])) != i // 200:
            sys.exit(f"{stem}: row {i + 1} is out of digit-block order")
        lines.append(" ".join(row[:-1]))
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data", help="directory for mfeat/ and mfeat.manifest")
    ap.add_argument("--wheel", help="use a local mvlearn 0.1.0 wheel instead of downloading")
    args = ap.parse_args()

    if args.wheel:
        blob = pathlib.Path(args.wheel).read_bytes()
    else:
        with urllib.request.urlopen(WHEEL_URL, timeout=300) as resp:
            blob = resp.read()

    out = pathlib.Path(args.out)
    (out / "mfeat").mkdir(parents=True, exist_ok=True)
    manifest = ["# UCI multiple features, digit blocks of 200 rows"]
    with zipfile.ZipFile(io.BytesIO(blob)) as z:
        for name, stem, dim in FEATURES:
            text = z.read(f"mvlearn/datasets/UCImultifeature/{stem}.csv").decode()
            (out / "mfeat" / stem).write_text(convert(text, stem, dim))
            manifest += [f"{name}.path = mfeat/{stem}", f"{name}.dim = {dim}"]
    (out / "mfeat.manifest").write_text("\n".join(manifest) + "\n")
    print(f"wrote {len(FEATURES)} files and {out / 'mfeat.manifest'}")


if __name__ == "__main__":
    main()
