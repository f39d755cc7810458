"""Command-line front end.

Every subcommand writes one JSON report with ``input``, ``stages`` and
``verdict``.  Exit codes: 0 pass, 1 usage error, 2 non-generic input,
3 numeric failure (after one retry at extended precision) or failed check.
"""
from __future__ import annotations

import argparse
import sys
import time
from contextlib import contextmanager

import numpy as np

from .agm_step import agm_step, roundtrip_check
from .configuration import PlaneConfiguration, build_space_model, extract_configuration
from .differentials import AffineChart, canonical_iso, odd_space_report
from .errors import G3Error, NumericFailure
from .plane import point_distance
from .quartic_theta import (FlagSpec, Quartic, alpha_class, bitangents, classify_pairs,
                            enumerate_flags, weil_pairing)
from .serialization import RunConfig, dumps, encode_point, load_config

SUBCOMMANDS = ("bitangents", "classes", "flags", "extract", "step", "roundtrip", "iterate", "verify")
DEFAULT_FLAG = "pair=1,2;partition=3-4,5-6"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Run:
    """Collects stages and checks for one report."""

    def __init__(self):
        self.stages: list[dict] = []
        self.checks: dict[str, bool] = {}
        self.cache: dict = {}

    @contextmanager
    def stage(self, name: str):
        entry = {"name": name, "certificates": [], "residuals": {}, "points": {}, "forms": {}}
        start = time.perf_counter()
        self.stages.append(entry)
        try:
            yield entry
        except G3Error as exc:
            exc.at(name)
            entry["error"] = {"type": type(exc).__name__, "message": str(exc), "stage": exc.stage}
            raise
        finally:
            entry["seconds"] = time.perf_counter() - start

    def check(self, name: str, ok) -> bool:
        self.checks[name] = bool(ok)
        return bool(ok)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="g3agm", description="Genus-3 AGM step on plane quartics.")
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("--config", help="input JSON document")
    p.add_argument("--flag", help='flag such as "pair=1,2;partition=3-4,5-6"')
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int)
    p.add_argument("--eps-rank", type=float)
    p.add_argument("--eps-point", type=float)
    p.add_argument("--precision", choices=("double", "extended"))
    p.add_argument("--n", type=int, default=3, help="number of steps for iterate")
    return p


# ---------------------------------------------------------------------------
# pipeline pieces


def _require_quartic(cfg: RunConfig) -> Quartic:
    if cfg.quartic is None:
        raise UsageError("config has no quartic")
    return Quartic(cfg.quartic)


def _bitangents(run: Run, C: Quartic, profile):
    if "bitangents" in run.cache:
        return run.cache["bitangents"]
    with run.stage("bitangents") as st:
        bts = bitangents(C, profile)
        st["residuals"]["max_square_residual"] = max(b.residual for b in bts)
        st["count"] = len(bts)
        st["lines"] = [encode_point(b.line.coeffs) for b in bts]
    run.check("bitangent_count", len(bts) == 28)
    run.check("bitangent_residual", max(b.residual for b in bts) < 1e-8)
    run.cache["bitangents"] = bts
    return bts


def _alpha_pair(cfg: RunConfig, bts, profile) -> tuple[int, int]:
    if cfg.alpha_pair is not None:
        i, j = cfg.alpha_pair
        if not (0 <= i < len(bts) and 0 <= j < len(bts)) or i == j:
            raise UsageError(f"alpha pair {cfg.alpha_pair} is not a pair of bitangent indices")
        return i, j
    if cfg.alpha_lines is not None:
        idx = []
        for v in cfg.alpha_lines:
            d = [point_distance(v, b.line.coeffs) for b in bts]
            k = int(np.argmin(d))
            if d[k] > profile.eps_point:
                raise UsageError(f"alpha line {v} matches no bitangent (distance {d[k]:.2e})")
            idx.append(k)
        return tuple(idx)
    raise UsageError("config has no alpha")


def _configuration(run: Run, cfg: RunConfig, profile) -> PlaneConfiguration:
    if "configuration" not in run.cache:
        run.cache["configuration"] = _build_configuration(run, cfg, profile)
    return run.cache["configuration"]


def _build_configuration(run: Run, cfg: RunConfig, profile) -> PlaneConfiguration:
    if cfg.configuration is not None:
        with run.stage("load_configuration") as st:
            c = cfg.configuration
            config = PlaneConfiguration(c["E"], c["Q"], tuple(c["q"]))
            st["residuals"]["meet_distance"] = config.validate(profile)
        return config
    C = _require_quartic(cfg)
    bts = _bitangents(run, C, profile)
    pair = _alpha_pair(cfg, bts, profile)
    with run.stage("alpha_class") as st:
        cls = alpha_class(bts, pair, profile)
        st["pairs"] = [list(p) for p in cls.pairs]
    run.check("class_size", len(cls.pairs) == 6)
    with run.stage("extract_configuration") as st:
        config = extract_configuration(C, cls, bts, profile)
        st["certificates"] = [c.to_dict() for c in config.certificates]
        st["forms"] = {"E": config.E, "Q": config.Q}
        st["points"] = {"q": list(config.q)}
        st["residuals"]["held_out_cross_points"] = config.provenance["held_out_residual"]
    cq, ce = config.certificates
    run.check("conic_rank5", cq.claimed_rank == 5 and cq.gap_ratio < 1e-8)
    run.check("cubic_rank9", ce.claimed_rank == 9 and ce.gap_ratio < 1e-8)
    run.check("held_out_cross_points", config.provenance["held_out_residual"] < 1e-7)
    return config


def _flag(args, cfg: RunConfig) -> FlagSpec:
    text = args.flag or cfg.flag or DEFAULT_FLAG
    try:
        return FlagSpec.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _step(run: Run, config, flag, profile, name="step"):
    with run.stage(name) as st:
        out = agm_step(config, flag, profile)
        st["flag"] = flag.format()
        st["certificates"] = [c.to_dict() for c in out.certificates]
        st["forms"] = {"E_prime": out.E_prime, "Q_prime": out.Q_prime}
        st["points"] = {"t": out.t, "ram": list(out.ram), "q_prime": list(out.q_prime)}
        st["residuals"] = dict(out.diagnostics)
        st["tower_pattern"] = out.report.to_dict()
        st["dual_tower_pattern"] = out.dual_report.to_dict()
        st["dual_flag"] = out.dual_flag.format()
        st["dual_partition_candidates"] = [[list(p) for p in part] for part in out.partition_candidates]
    ce, cq = out.certificates
    run.check(f"{name}:E_prime_rank9", tuple(ce.shape) == (13, 10) and ce.claimed_rank == 9
              and ce.gap_ratio < 1e-8)
    run.check(f"{name}:Q_prime_rank5", tuple(cq.shape) == (6, 6) and cq.claimed_rank == 5 and cq.gap_ratio < 1e-8)
    run.check(f"{name}:meet", out.diagnostics["meet_distance"] < 1e-7)
    run.check(f"{name}:pattern", tuple(out.report.type_counts.values()) == (1, 4, 4))
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_bitangents(run, args, cfg, profile):
    _bitangents(run, _require_quartic(cfg), profile)


def cmd_classes(run, args, cfg, profile):
    bts = _bitangents(run, _require_quartic(cfg), profile)
    with run.stage("classify_pairs") as st:
        table = classify_pairs(bts, profile)
        st["classes"] = [[list(p) for p in c.pairs] for c in table.classes]
    run.check("classes_63x6", len(table.classes) == 63 and all(len(c.pairs) == 6 for c in table.classes))
    with run.stage("weil_pairing") as st:
        cls = table.classes
        E = np.array([[weil_pairing(bts, a, b, profile) for b in cls] for a in cls])
        alpha = table.class_of(*_alpha_pair(cfg, bts, profile)) if (cfg.alpha_pair or cfg.alpha_lines) \
            else cls[0]
        row = E[table.position(alpha)]
        st["alpha_split"] = {"zero": int((row == 0).sum()), "one": int((row == 1).sum())}
        st["symmetric"] = bool((E == E.T).all())
        st["alternating"] = bool((np.diag(E) == 0).all())
        st["nondegenerate"] = bool(all(r.any() for r in E))
    run.check("weil_symmetric", st["symmetric"])
    run.check("weil_alternating", st["alternating"])
    run.check("weil_nondegenerate", st["nondegenerate"])
    run.check("weil_split_31_32", (st["alpha_split"]["zero"], st["alpha_split"]["one"]) == (31, 32))


def cmd_flags(run, args, cfg, profile):
    with run.stage("enumerate_flags") as st:
        pairs, matchings, flags = enumerate_flags()
        st["counts"] = {"pairs": len(pairs), "partitions": len(matchings), "flags": len(flags)}
        st["flags"] = [f.format() for f in flags]
    run.check("flag_counts", (len(pairs), len(matchings), len(flags)) == (15, 15, 45))


def cmd_extract(run, args, cfg, profile):
    config = _configuration(run, cfg, profile)
    _space_model(run, config)


def _space_model(run, config):
    with run.stage("space_model") as st:
        model = build_space_model(config)
        lifted = [model.lift(p) for p in config.q]
        res = max(max(model.Q2.residual(p), model.Q3.residual(p)) for p in lifted)
        report = odd_space_report(model)
        st["forms"] = {"Q2": model.Q2, "Q3": model.Q3}
        st["residuals"]["lifted_points"] = res
        st["odd_even"] = report.to_dict()
    run.check("space_model_points", res < 1e-10)
    run.check("odd_even_3_1", (report.odd_dimension, report.even_dimension) == (3, 1))


def cmd_step(run, args, cfg, profile):
    config = _configuration(run, cfg, profile)
    out = _step(run, config, _flag(args, cfg), profile)
    with run.stage("canonical_iso") as st:
        chart = AffineChart.standard()
        iso = canonical_iso(out, chart, chart, profile=profile)
        st["matrix"] = iso.matrix
        st["residuals"] = {"off_identity": iso.off_identity(), "t": iso.t_residual,
                           "pencil_lines": iso.pencil_residual}
    run.check("iso_identity", iso.off_identity() < 1e-12)
    run.check("iso_fixes_t", iso.t_residual < 1e-8)
    run.check("iso_fixes_pencil", iso.pencil_residual < 1e-8)


def cmd_roundtrip(run, args, cfg, profile):
    config = _configuration(run, cfg, profile)
    flag = _flag(args, cfg)
    with run.stage("roundtrip") as st:
        rep = roundtrip_check(config, flag, profile)
        st["flag"] = flag.format()
        st["residuals"] = rep.to_dict()
    run.check("roundtrip_coefficients", rep.coefficient_distance < 1e-6)
    run.check("roundtrip_points", rep.point_distance < 1e-7)
    run.check("negative_control", rep.negative_control > 1e-2)


def cmd_iterate(run, args, cfg, profile):
    if args.n < 1:
        raise UsageError("--n must be positive")
    config = _configuration(run, cfg, profile)
    flag = _flag(args, cfg)
    for k in range(args.n):
        out = _step(run, config, flag, profile, name=f"step{k + 1}")
        config, flag = out.configuration, out.dual_flag


def cmd_verify(run, args, cfg, profile):
    if cfg.configuration is None:
        cmd_classes(run, args, cfg, profile)
    cmd_flags(run, args, cfg, profile)
    cmd_extract(run, args, cfg, profile)
    cmd_step(run, args, cfg, profile)
    cmd_roundtrip(run, args, cfg, profile)


COMMANDS = {name: globals()[f"cmd_{name}"] for name in SUBCOMMANDS}


def run_command(argv=None) -> tuple[int, dict]:
    """Run one subcommand; returns (exit code, report)."""
    try:
        args = build_parser().parse_args(argv)
        if args.config:
            cfg, digest = load_config(args.config)
        elif args.command == "flags":
            cfg, digest = RunConfig(), None
        else:
            raise UsageError(f"{args.command} needs --config")
        profile = cfg.profile(seed=args.seed, eps_rank=args.eps_rank, eps_point=args.eps_point,
                              precision=args.precision)
    except (UsageError, ValueError, OSError, KeyError) as exc:
        return 1, {"verdict": {"pass": False, "exit_code": 1, "error": f"usage: {exc}"}}

    report = {"input": {"command": args.command, "config": args.config, "sha256": digest,
                        "seed": profile.seed, "precision": profile.precision,
                        "tolerances": {"eps_point": profile.eps_point, "eps_rank": profile.eps_rank,
                                       "eps_residual": profile.eps_residual}}}
    code, error = 0, None
    run = Run()
    try:
        try:
            COMMANDS[args.command](run, args, cfg, profile)
        except NumericFailure:
            if profile.precision == "extended":
                raise
            profile = profile.escalated()
            report["input"]["precision"] = "extended"
            run = Run()
            COMMANDS[args.command](run, args, cfg, profile)
    except UsageError as exc:
        return 1, {**report, "verdict": {"pass": False, "exit_code": 1, "error": f"usage: {exc}"}}
    except G3Error as exc:
        code = exc.exit_code
        error = {"type": type(exc).__name__, "message": str(exc), "stage": exc.stage}
    report["stages"] = run.stages
    checks = run.checks
    passed = error is None and all(checks.values())
    if error is None and not passed:
        code = 3
    report["verdict"] = {"pass": passed, "exit_code": code, "checks": checks}
    if error:
        report["verdict"]["error"] = error
    return code, report


def main(argv=None) -> int:
    code, report = run_command(argv)
    text = dumps(report)
    out = None
    try:
        out = build_parser().parse_known_args(argv)[0].out
    except UsageError:
        pass
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if code == 1:
        print(report["verdict"].get("error", "usage error"), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
