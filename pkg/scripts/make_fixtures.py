"""Write the shipped input documents to fixtures/.

The generic fixture is a seeded random quartic with coefficients rounded to
six decimals; it is accepted only if every one of the 45 flags steps cleanly
for the chosen class.
"""
import argparse
import json
from pathlib import Path

import numpy as np

from g3agm.agm_step import agm_step
from g3agm.configuration import extract_configuration
from g3agm.errors import G3Error
from g3agm.forms import HomogeneousForm, monomials
from g3agm.quartic_theta import Quartic, alpha_class, bitangents, enumerate_flags

TROTT = {"4,0,0": "144", "0,4,0": "144", "2,0,2": "-225", "0,2,2": "-225",
         "2,2,0": "350", "0,0,4": "81"}


def random_terms(rng):
    return {",".join(map(str, e)): f"{rng.uniform(-1, 1):.6f}" for e in monomials(4, 3)}


def all_flags_pass(terms, pair):
    F = HomogeneousForm.from_dict({tuple(map(int, k.split(","))): float(v) for k, v in terms.items()})
    C = Quartic(F)
    bts = bitangents(C)
    config = extract_configuration(C, alpha_class(bts, pair), bts)
    for flag in enumerate_flags()[2]:
        agm_step(config, flag)
    return True


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="fixtures")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)

    trott = {"description": "Trott quartic: 28 real bitangents", "quartic": TROTT,
             "alpha": {"pair": [0, 7]}, "seed": 0}
    (out / "trott.json").write_text(json.dumps(trott, indent=2) + "\n")

    rng = np.random.default_rng(args.seed)
    for attempt in range(20):
        terms = random_terms(rng)
        try:
            all_flags_pass(terms, (0, 1))
        except G3Error as exc:
            print(f"attempt {attempt}: rejected ({type(exc).__name__}: {exc})")
            continue
        doc = {"description": f"random quartic, seed {args.seed}, attempt {attempt}",
               "quartic": terms, "alpha": {"pair": [0, 1]},
               "flag": "pair=1,2;partition=3-4,5-6", "seed": 0}
        (out / "fixture.json").write_text(json.dumps(doc, indent=2) + "\n")
        print(f"wrote fixture from attempt {attempt}")
        break


if __name__ == "__main__":
    main()
