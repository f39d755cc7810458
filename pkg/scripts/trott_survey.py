"""Count the classes of the Trott quartic for which extraction and a step succeed.

The quartic is very symmetric, so many classes give colliding or collinear
marked points; this reports which stage rejects each class.
"""
import argparse
import collections
import json

from g3agm.agm_step import agm_step
from g3agm.configuration import extract_configuration
from g3agm.errors import G3Error
from g3agm.quartic_theta import FlagSpec, Quartic, bitangents, classify_pairs
from g3agm.serialization import load_config


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("config", nargs="?", default="fixtures/trott.json")
    p.add_argument("--flag", default="pair=1,2;partition=3-4,5-6")
    args = p.parse_args()

    cfg, _ = load_config(args.config)
    profile = cfg.profile()
    C = Quartic(cfg.quartic)
    bts = bitangents(C, profile)
    table = classify_pairs(bts, profile)
    flag = FlagSpec.parse(args.flag)
    outcome = collections.Counter()
    for cls in table.classes:
        try:
            agm_step(extract_configuration(C, cls, bts, profile), flag, profile)
            outcome["ok"] += 1
        except G3Error as exc:
            outcome[f"{type(exc).__name__}: {exc}"[:80]] += 1
    print(json.dumps(dict(outcome.most_common()), indent=2))


if __name__ == "__main__":
    main()
