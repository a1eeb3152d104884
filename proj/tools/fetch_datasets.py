#!/usr/bin/env python3
"""Build the six benchmark CSVs under data/.

The UCI files are not vendored. This script pulls two PyPI packages that
redistribute them (pydataset for crabs and Boston housing, keel-ds for the
rest) with `pip download`, and writes one CSV per dataset with a header row
and a `class` column:

  crab        200 x 6   sex (M/F); species B/O encoded 0/1, index dropped
  cancer      683 x 9   2 benign / 4 malignant (rows with missing values
                        are absent from this copy)
  glass       214 x 9   window (types 1-4) vs non-window (5-7)
  ionosphere  351 x 33  g / b
  thyroid     215 x 5   hyper vs other (the packaged copies do not mark
                        the hypothyroid rows, so normal vs abnormal is
                        not available)
  housing     506 x 13  raw medv target; binarise with mode=above_median

Usage: tools/fetch_datasets.py [--out data] [--cache DIR]
"""

import argparse
import csv
import io
import pathlib
import subprocess
import sys
import tarfile
import tempfile
import zipfile

PACKAGES = {"keel": "keel-ds==0.2.5", "pydataset": "pydataset==0.2.0"}


def download(spec, dest):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", spec, "--no-deps", "-q", "-d", str(dest)],
        check=True,
    )
    stem = spec.split("==")[0].replace("-", "_")
    hits = [p for p in dest.iterdir() if p.name.lower().replace("-", "_").startswith(stem)]
    if not hits:
        sys.exit(f"download of {spec} produced no file in {dest}")
    return hits[0]


def keel_rows(wheel, member):
    with zipfile.ZipFile(wheel) as z:
        text = z.read(f"keel_ds/data/{member}").decode()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        rows.append([c.strip() for c in line.split(",")])
    return rows


def rdata_rows(sdist, member):
    with tarfile.open(sdist) as outer:
        res = next(m for m in outer.getmembers() if m.name.endswith("resources.tar.gz"))
        inner = tarfile.open(fileobj=io.BytesIO(outer.extractfile(res).read()))
        m = next(m for m in inner.getmembers() if m.name.endswith(member))
        text = inner.extractfile(m).read().decode()
    return list(csv.reader(io.StringIO(text)))


def write(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"{path}: {len(rows)} rows, {len(header) - 1} features")


def build(out, keel, pyds):
    out.mkdir(parents=True, exist_ok=True)

    crabs = rdata_rows(pyds, "MASS/crabs.csv")
    header = crabs[0]
    idx = {name: i for i, name in enumerate(header)}
    rows = []
    for r in crabs[1:]:
        sp = "0" if r[idx["sp"]] == "B" else "1"
        rows.append([sp] + [r[idx[k]] for k in ("FL", "RW", "CL", "CW", "BD")] + [r[idx["sex"]]])
    write(out / "crab.csv", ["sp", "FL", "RW", "CL", "CW", "BD", "class"], rows)

    boston = rdata_rows(pyds, "MASS/Boston.csv")
    write(out / "housing.csv", boston[0][1:-1] + ["class"], [r[1:] for r in boston[1:]])

    cancer = keel_rows(keel, "balanced/raw/wisconsin.dat")
    write(out / "cancer.csv", [f"a{i}" for i in range(1, 10)] + ["class"], cancer)

    glass = keel_rows(keel, "imbalanced/raw/glass-0-1-2-3_vs_4-5-6.dat")
    glass = [r[:-1] + ["window" if r[-1] == "negative" else "other"] for r in glass]
    write(out / "glass.csv", ["RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe", "class"], glass)

    iono = keel_rows(keel, "balanced/raw/ionosphere.dat")
    write(out / "ionosphere.csv", [f"a{i}" for i in range(1, 34)] + ["class"], iono)

    # Both packaged variants flag the same 35 hyperthyroid rows.
    thyroid = keel_rows(keel, "imbalanced/raw/new-thyroid1.dat")
    rows = [r[:-1] + ["hyper" if r[-1] == "positive" else "other"] for r in thyroid]
    write(out / "thyroid.csv", ["T3resin", "T4", "T3", "TSH", "dTSH", "class"], rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--cache", help="directory holding (or receiving) the downloaded packages")
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        cache = pathlib.Path(args.cache or tmp)
        cache.mkdir(parents=True, exist_ok=True)
        keel = download(PACKAGES["keel"], cache)
        pyds = download(PACKAGES["pydataset"], cache)
        build(pathlib.Path(args.out), keel, pyds)


if __name__ == "__main__":
    main()
