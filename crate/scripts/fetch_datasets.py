#!/usr/bin/env python3
"""Build the desk-scale MNIST / Fashion-MNIST subsets under data/.

The images come from the `mnist` and `fashion-mnist` npm packages, which
bundle the pixel data as JSON. Each class is written as a gzipped IDX3
(unsigned byte, 3-D) file so the Rust loaders can read it directly.

    python3 scripts/fetch_datasets.py [--out data]
"""
import argparse
import gzip
import json
import os
import struct
import subprocess
import tarfile
import tempfile

FASHION_TRAIN = 1000
FASHION_TEST = 200


def npm_fetch(pkg, workdir):
    out = subprocess.run(["npm", "pack", pkg], cwd=workdir, check=True,
                         capture_output=True, text=True).stdout.strip().splitlines()[-1]
    dest = os.path.join(workdir, pkg)
    with tarfile.open(os.path.join(workdir, out)) as tar:
        tar.extractall(dest)
    return os.path.join(dest, "package", "src")


def write_idx(path, images):
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(bytes([0, 0, 0x08, 0x03]))
        f.write(struct.pack(">III", len(images), 28, 28))
        for img in images:
            f.write(bytes(img))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    os.makedirs(os.path.join(args.out, "mnist"), exist_ok=True)
    os.makedirs(os.path.join(args.out, "fashion"), exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        digits = npm_fetch("mnist", tmp)
        for d in range(10):
            flat = json.load(open(os.path.join(digits, "digits", f"{d}.json")))["data"]
            # stored as value/255 rounded to 3 decimals; rounding back is exact
            px = [round(x * 255) for x in flat]
            images = [px[i:i + 784] for i in range(0, len(px), 784)]
            write_idx(os.path.join(args.out, "mnist", f"digit-{d}.idx3-ubyte.gz"), images)
            print(f"mnist digit {d}: {len(images)} images")

        clothes = npm_fetch("fashion-mnist", tmp)
        for c in range(10):
            rows = json.load(open(os.path.join(clothes, "clothes", f"{c}.json")))["data"]
            # the class-0 file carries a couple of empty rows
            rows = [r for r in rows if len(r) == 784]
            train = rows[:FASHION_TRAIN]
            test = rows[FASHION_TRAIN:FASHION_TRAIN + FASHION_TEST]
            write_idx(os.path.join(args.out, "fashion", f"train-{c}.idx3-ubyte.gz"), train)
            write_idx(os.path.join(args.out, "fashion", f"test-{c}.idx3-ubyte.gz"), test)
            print(f"fashion class {c}: {len(train)} train / {len(test)} test")


if __name__ == "__main__":
    main()
