"""Iterate the step with the dual flag and print how the data evolve.

With the dual flag the second step returns to the starting configuration, so
the orbit has period two; the printout makes that visible.
"""
import argparse

from g3agm.agm_step import agm_step
from g3agm.configuration import extract_configuration
from g3agm.quartic_theta import FlagSpec, Quartic, alpha_class, bitangents
from g3agm.serialization import load_config


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("config")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--flag", default="pair=1,2;partition=3-4,5-6")
    args = p.parse_args()

    cfg, _ = load_config(args.config)
    profile = cfg.profile()
    C = Quartic(cfg.quartic)
    bts = bitangents(C, profile)
    start = extract_configuration(C, alpha_class(bts, cfg.alpha_pair, profile), bts, profile)
    config, flag = start, FlagSpec.parse(args.flag)
    print(f"{'step':>4s} {'E gap':>9s} {'Q gap':>9s} {'|E-E0|':>9s} {'|Q-Q0|':>9s}")
    for k in range(1, args.n + 1):
        out = agm_step(config, flag, profile)
        config, flag = out.configuration, out.dual_flag
        print(f"{k:4d} {out.certificates[0].gap_ratio:9.1e} {out.certificates[1].gap_ratio:9.1e} "
              f"{config.E.distance(start.E):9.1e} {config.Q.distance(start.Q):9.1e}")


if __name__ == "__main__":
    main()
