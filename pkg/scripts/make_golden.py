"""Regenerate the frozen reference values under tests/golden/.

    python3 scripts/make_golden.py

Writes exhaustive best-subset residuals for the seeded n=12, m=3 instances
and the SHA-256 of a few seeded synthetic containers.
"""

import argparse
import hashlib
import json
import os

from ffwd.model import encode_container
from ffwd.synth import ScenarioSpec, generate, oracle_best_subset, random_instance

HERE = os.path.dirname(os.path.abspath(__file__))
GOLDEN = os.path.join(HERE, "..", "tests", "golden")

SUBSET_SEEDS = 200
SUBSET_DIMS = (6, 32)
CONTAINER_SPECS = [
    ScenarioSpec(n=300, f=8, semantic_fraction=0.25, shake_bursts=((40, 30, 2.5),), seed=1),
    ScenarioSpec(n=1000, f=32, semantic_fraction=0.5, shake_bursts=((100, 40, 1.5), (700, 25, 3.0)), seed=42),
    ScenarioSpec(n=50, f=3, semantic_fraction=0.0, seed=2**63 + 5, thumb_size=0),
]


def best_subsets():
    out = {}
    for f in SUBSET_DIMS:
        rows = []
        for seed in range(SUBSET_SEEDS):
            D, _ = random_instance(seed, f, 12)
            subset, residual = oracle_best_subset(D, 3)
            rows.append({"seed": seed, "subset": list(subset), "residual": residual})
        out[str(f)] = rows
    return {"n": 12, "m": 3, "instances": out}


def container_hashes():
    rows = []
    for spec in CONTAINER_SPECS:
        digest = hashlib.sha256(encode_container(generate(spec))).hexdigest()
        rows.append({"n": spec.n, "f": spec.f, "semantic_fraction": spec.semantic_fraction,
                     "shake_bursts": [list(b) for b in spec.shake_bursts], "seed": spec.seed,
                     "thumb_size": spec.thumb_size, "sha256": digest})
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=GOLDEN)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "best_subset_n12_m3.json"), "w") as fh:
        json.dump(best_subsets(), fh, indent=1)
        fh.write("\n")
    with open(os.path.join(args.out, "synth_containers.json"), "w") as fh:
        json.dump(container_hashes(), fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
