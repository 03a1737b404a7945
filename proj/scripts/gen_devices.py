#!/usr/bin/env python3
# Copyright 2026 The mpqc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the bundled synthetic heavy-hex calibration files.

Error magnitudes resemble published superconducting-device calibrations:
log-normal CNOT errors around 0.8%, single-qubit errors in [2e-4, 1e-3] and
readout errors in [1%, 4%]. Seeded, so reruns are byte-identical.
"""

import json
import math
import pathlib
import random

HEAVYHEX27 = [
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10),
    (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14),
    (14, 16), (15, 18), (16, 19), (17, 18), (18, 21), (19, 20), (19, 22),
    (21, 23), (22, 25), (23, 24), (24, 25), (25, 26),
]


def heavyhex65():
    links = []
    rows = [range(0, 10), range(13, 24), range(27, 38), range(41, 52), range(55, 65)]
    for row in rows:
        links += [(q, q + 1) for q in list(row)[:-1]]
    bridges = [
        (0, 10), (4, 11), (8, 12),
        (10, 13), (11, 17), (12, 21),
        (15, 24), (19, 25), (23, 26),
        (24, 29), (25, 33), (26, 37),
        (27, 38), (31, 39), (35, 40),
        (38, 41), (39, 45), (40, 49),
        (43, 52), (47, 53), (51, 54),
        (52, 56), (53, 60), (54, 64),
    ]
    return sorted(links + bridges)


def calibration(n, links, seed):
    rng = random.Random(seed)
    out_links = []
    for a, b in links:
        e = math.exp(rng.gauss(math.log(0.008), 0.5))
        out_links.append([a, b, round(min(max(e, 0.003), 0.06), 6)])
    return {
        "num_qubits": n,
        "links": out_links,
        "qubit_errors": [round(rng.uniform(2e-4, 1e-3), 6) for _ in range(n)],
        "readout_errors": [round(rng.uniform(0.01, 0.04), 6) for _ in range(n)],
    }


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "devices"
    out.mkdir(parents=True, exist_ok=True)
    for name, n, links, seed in [
        ("heavyhex27", 27, HEAVYHEX27, 27),
        ("heavyhex65", 65, heavyhex65(), 65),
    ]:
        doc = {"name": name, **calibration(n, links, seed)}
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(f"{name}: {n} qubits, {len(links)} links")


if __name__ == "__main__":
    main()
