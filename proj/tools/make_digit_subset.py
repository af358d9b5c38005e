#!/usr/bin/env python3
# Copyright 2026 The tsnn Authors
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
"""Builds the 2,500-digit subset in tests/data from the npm `mnist` package.

Usage: make_digit_subset.py <path/to/mnist/src/digits> <out_dir>

The first 2,000 records are the training split (200 per class) and the last
500 are the test split (50 per class). Both splits are shuffled with a fixed
seed. Output is gzipped IDX, the layout of the original MNIST distribution.
"""
import gzip
import json
import random
import struct
import sys
from pathlib import Path

PER_CLASS_TRAIN = 200
PER_CLASS_TEST = 50


def main():
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    train, test = [], []
    for digit in range(10):
        data = json.loads((src / f"{digit}.json").read_text())["data"]
        n = len(data) // 784
        images = [data[i * 784:(i + 1) * 784] for i in range(n)]
        for i, img in enumerate(images[:PER_CLASS_TRAIN + PER_CLASS_TEST]):
            pixels = bytes(min(255, max(0, round(v * 255))) for v in img)
            (train if i < PER_CLASS_TRAIN else test).append((pixels, digit))
    rng = random.Random(20200101)
    rng.shuffle(train)
    rng.shuffle(test)
    records = train + test

    out.mkdir(parents=True, exist_ok=True)
    with gzip.GzipFile(out / "digits-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x803, len(records), 28, 28))
        for pixels, _ in records:
            f.write(pixels)
    with gzip.GzipFile(out / "digits-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x801, len(records)))
        f.write(bytes(label for _, label in records))


if __name__ == "__main__":
    main()
