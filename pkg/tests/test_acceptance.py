"""Acceptance gate: one PASS/FAIL line per criterion, at the stated tolerances."""
import itertools
import time
import warnings

import numpy as np

from conftest import ACCEPTANCE, DEFAULT_FLAG, random_quartic
from g3agm.agm_step import agm_step, projection_center, ramification_points, roundtrip_check
from g3agm.configuration import (PlaneConfiguration, build_space_model, verify_tower_pattern)
from g3agm.differentials import AffineChart, canonical_iso, odd_space_report
from g3agm.errors import NonGeneric
from g3agm.plane import proj_point
from g3agm.quartic_theta import (bitangents, classify_pairs, enumerate_flags, is_syzygetic,
                                 weil_pairing)


def record(name, ok, detail):
    ACCEPTANCE[name] = (bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def test_1_bitangents(trott, profile):
    quartics = [("trott", trott[0])] + [(f"random{s}", random_quartic(100 + s)) for s in range(5)]
    rows, ok = [], True
    for name, C in quartics:
        start = time.perf_counter()
        bts = bitangents(C, profile)
        secs = time.perf_counter() - start
        res = max(b.residual for b in bts)
        good = len(bts) == 28 and res < 1e-8 and secs < 60
        ok &= good
        rows.append(f"{name} n={len(bts)} res={res:.1e} t={secs:.1f}s")
    record("1. bitangents", ok, "; ".join(rows))


def test_2_classes(generic, profile):
    start = time.perf_counter()
    bts = bitangents(generic[0], profile)
    table = classify_pairs(bts, profile)
    checked, worst, ok = 0, 0.0, len(table.classes) == 63
    for cls in table.classes:
        ok &= len(cls.pairs) == 6
        for (a, b), (c, d) in itertools.combinations(cls.pairs, 2):
            syz, cert = is_syzygetic([bts[i] for i in (a, b, c, d)], profile)
            ok &= syz
            worst = max(worst, cert.gap_ratio)
            checked += 1
    secs = time.perf_counter() - start
    ok &= secs < 300 and len({p for c in table.classes for p in c.pairs}) == 378
    record("2. classes", ok, f"{len(table.classes)} classes, {checked} pair checks, "
                             f"worst gap {worst:.1e}, {secs:.1f}s")


def test_3_conic(config):
    cert = config.certificates[0]
    ok = cert.claimed_rank == 5 and cert.gap_ratio < 1e-8 and cert.shape == (6, 6)
    record("3. conic", ok, f"shape {cert.shape} rank {cert.claimed_rank} gap {cert.gap_ratio:.1e}")


def test_4_cubic(config):
    cert = config.certificates[1]
    n_cross = config.provenance["cross_points"]
    held = config.provenance["held_out_residual"]
    ok = n_cross >= 15 and cert.claimed_rank == 9 and cert.gap_ratio < 1e-8 and held < 1e-7
    record("4. cubic", ok, f"{n_cross} cross points, rank {cert.claimed_rank}, "
                           f"gap {cert.gap_ratio:.1e}, held-out {held:.1e}")


def test_5_tower_pattern(config, profile):
    t = projection_center(config, DEFAULT_FLAG.distinguished_pair, profile)
    ram = ramification_points(config.E, t, profile)
    report = verify_tower_pattern(config, DEFAULT_FLAG, t, ram, profile)
    counts = tuple(report.type_counts.values())
    ok = counts == (1, 4, 4) and report.distinct
    # synthetic degeneracies
    raised = 0
    bad_ram = list(ram)
    bad_ram[0] = config.point(3)
    q = list(config.q)
    q[2] = proj_point(0.4 * t + 0.6 * q[3])
    cases = [(config, bad_ram), (PlaneConfiguration(config.E, config.Q, q), ram)]
    for cfg, r in cases:
        try:
            verify_tower_pattern(cfg, DEFAULT_FLAG, t, r, profile)
        except NonGeneric:
            raised += 1
    ok &= raised == len(cases)
    record("5. tower pattern", ok, f"counts {counts}, separation {report.min_separation:.1e}, "
                                   f"{raised}/{len(cases)} degeneracies rejected")


def test_6_step_fits(config, profile):
    _, _, flags = enumerate_flags()
    ok, slowest, worst_meet, worst_gap = True, 0.0, 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for flag in flags:
            start = time.perf_counter()
            out = agm_step(config, flag, profile)
            slowest = max(slowest, time.perf_counter() - start)
            ce, cq = out.certificates
            ok &= ce.shape == (13, 10) and ce.claimed_rank == 9 and ce.gap_ratio < 1e-8
            ok &= cq.shape == (6, 6) and cq.claimed_rank == 5
            worst_meet = max(worst_meet, out.diagnostics["meet_distance"])
            worst_gap = max(worst_gap, ce.gap_ratio)
    ok &= worst_meet < 1e-7 and slowest < 1.0
    record("6. step fits", ok, f"{len(flags)} flags, E' gap {worst_gap:.1e}, "
                               f"meet {worst_meet:.1e}, slowest {slowest:.2f}s")


def test_7_round_trip(config, profile):
    rep = roundtrip_check(config, DEFAULT_FLAG, profile)
    ok = rep.coefficient_distance < 1e-6 and rep.point_distance < 1e-7 and rep.negative_control > 1e-2
    record("7. round trip", ok, f"coeff {rep.coefficient_distance:.1e}, points {rep.point_distance:.1e}, "
                                f"negative control {rep.negative_control:.2f}")


def test_8_canonical_iso(step, profile):
    chart = AffineChart.standard()
    iso = canonical_iso(step, chart, chart, n_lines=10, profile=profile)
    ok = iso.off_identity() < 1e-12 and iso.t_residual < 1e-8 and iso.pencil_residual < 1e-8
    record("8. canonical isomorphism", ok, f"off-identity {iso.off_identity():.1e}, "
                                           f"t {iso.t_residual:.1e}, 10 lines {iso.pencil_residual:.1e}")


def test_9_flags_and_pairing(generic_bitangents, class_table, profile):
    pairs, matchings, flags = enumerate_flags()
    ok = (len(pairs), len(matchings), len(flags)) == (15, 15, 45)
    cls = class_table.classes
    W = np.array([[weil_pairing(generic_bitangents, a, b, profile) for b in cls] for a in cls])
    symmetric = (W == W.T).all()
    alternating = (np.diag(W) == 0).all()
    zeros = {int(z) for z in (W == 0).sum(axis=1)}
    ones = {int(z) for z in (W == 1).sum(axis=1)}
    nondegenerate = all(row.any() for row in W)
    ok &= symmetric and alternating and nondegenerate and zeros == {31} and ones == {32}
    record("9. flags and pairing", ok, f"{len(pairs)}/{len(matchings)}/{len(flags)}, symmetric "
                                       f"{symmetric}, alternating {alternating}, nondegenerate "
                                       f"{nondegenerate}, split per row {sorted(zeros)}/{sorted(ones)}")


def test_10_space_lift(config, profile):
    model = build_space_model(config)
    res = max(max(model.Q2.residual(model.lift(p)), model.Q3.residual(model.lift(p))) for p in config.q)
    rep = odd_space_report(model, profile)
    ok = res < 1e-10 and (rep.odd_dimension, rep.even_dimension) == (3, 1)
    record("10. P^3 lift", ok, f"lift residual {res:.1e}, odd/even ({rep.odd_dimension},"
                               f"{rep.even_dimension})")
