"""Run one step for every flag on a configuration and tabulate the certificates."""
import argparse
import json

from g3agm.agm_step import agm_step, roundtrip_check
from g3agm.configuration import extract_configuration
from g3agm.errors import G3Error
from g3agm.quartic_theta import Quartic, alpha_class, bitangents, enumerate_flags
from g3agm.serialization import load_config


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("config", help="input JSON with a quartic and an alpha pair")
    p.add_argument("--roundtrip", action="store_true", help="also run the round trip per flag")
    p.add_argument("--json", help="write rows as JSON here")
    args = p.parse_args()

    cfg, _ = load_config(args.config)
    profile = cfg.profile()
    C = Quartic(cfg.quartic)
    bts = bitangents(C, profile)
    config = extract_configuration(C, alpha_class(bts, cfg.alpha_pair, profile), bts, profile)

    rows = []
    print(f"{'flag':30s} {'E gap':>9s} {'Q gap':>9s} {'meet':>9s} {'swap':>9s} {'roundtrip':>9s}")
    for flag in enumerate_flags()[2]:
        row = {"flag": flag.format()}
        try:
            out = agm_step(config, flag, profile)
            row.update(E_gap=out.certificates[0].gap_ratio, Q_gap=out.certificates[1].gap_ratio,
                       meet=out.diagnostics["meet_distance"],
                       swap=out.diagnostics["dictionary_swap_distance"])
            if args.roundtrip:
                rep = roundtrip_check(config, flag, profile)
                row["roundtrip"] = max(rep.coefficient_distance, rep.point_distance)
        except G3Error as exc:
            row["error"] = f"{type(exc).__name__} at {exc.stage}: {exc}"
        rows.append(row)
        if "error" in row:
            print(f"{row['flag']:30s} {row['error']}")
            continue
        rt = f"{row['roundtrip']:9.1e}" if "roundtrip" in row else f"{'-':>9s}"
        print(f"{row['flag']:30s} {row['E_gap']:9.1e} {row['Q_gap']:9.1e} {row['meet']:9.1e} "
              f"{row['swap']:9.1e} {rt}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
