import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import DATA, random_quartic
from g3agm.errors import CountMismatch, NonGeneric
from g3agm.forms import HomogeneousForm
from g3agm.plane import match_points, point_distance
from g3agm.quartic_theta import (FlagSpec, Quartic, TwoTorsionClass, alpha_class,
                                 bitangents, enumerate_flags, is_syzygetic, perfect_matchings,
                                 square_residual, syzygy_ratios, weil_pairing)


def oracle_lines(name):
    doc = json.loads((DATA / "oracle_bitangents.json").read_text())
    return [np.array([complex(*z) for z in L]) for L in doc[name]]


@pytest.mark.parametrize("name, fixture", [("trott.json", "trott_bitangents"),
                                           ("fixture.json", "generic_bitangents")])
def test_bitangents_match_frozen_oracle(name, fixture, request):
    bts = request.getfixturevalue(fixture)
    expected = oracle_lines(name)
    assert len(expected) == 28 and len(bts) == 28
    dist, _ = match_points([b.line.coeffs for b in bts], expected)
    assert dist < 1e-8


def test_trott_bitangents_are_real(trott_bitangents):
    for b in trott_bitangents:
        assert np.abs(b.line.coeffs.imag).max() < 1e-10


def test_bitangent_records_satisfy_invariants(generic, generic_bitangents, profile):
    F = generic[0].form
    for b in generic_bitangents:
        assert b.residual < 1e-8
        for p in b.contacts:
            assert F.residual(p) < profile.eps_point
            assert b.line.residual(p) < profile.eps_point
    lines = [b.line.coeffs for b in generic_bitangents]
    assert min(point_distance(a, c) for a, c in itertools.combinations(lines, 2)) > profile.eps_point


def test_restriction_square_free_part_has_no_discriminant(generic, generic_bitangents):
    # F on the line is k * (u - r1 v)^2 (u - r2 v)^2; its square root is a quadratic
    F = generic[0].form
    for b in generic_bitangents:
        _, _, Vh = np.linalg.svd(b.line.coeffs.reshape(1, -1))
        c = F.binary_restriction(Vh[1].conj(), Vh[2].conj())[::-1]
        roots = np.sort_complex(np.roots(c))
        pairs = min(((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)),
                    key=lambda pr: abs(roots[pr[0][0]] - roots[pr[0][1]]) + abs(roots[pr[1][0]] - roots[pr[1][1]]))
        assert all(abs(roots[i] - roots[j]) < 1e-6 * (1 + abs(roots[i])) for i, j in pairs)


@pytest.mark.parametrize("seed", range(5))
def test_random_quartics_have_28_bitangents(seed, profile):
    bts = bitangents(random_quartic(100 + seed), profile)
    assert len(bts) == 28 and max(b.residual for b in bts) < 1e-8


def test_bitangents_are_deterministic(generic, generic_bitangents, profile):
    again = bitangents(generic[0], profile)
    assert all(np.array_equal(a.line.coeffs, b.line.coeffs) for a, b in zip(again, generic_bitangents))


def test_bitangents_stable_under_tiny_perturbation(generic, generic_bitangents, profile):
    rng = np.random.default_rng(0)
    F = generic[0].form.normalized()
    G = HomogeneousForm(4, 3, F.coeffs + 1e-12 * rng.normal(size=15))
    moved = bitangents(Quartic(G), profile)
    dist, _ = match_points([b.line.coeffs for b in moved], [b.line.coeffs for b in generic_bitangents])
    assert dist < 1e-9


def test_singular_quartic_is_rejected(profile):
    # two conics: reducible, singular at their four meets
    a = HomogeneousForm.from_dict({(2, 0, 0): 1, (0, 2, 0): 2, (0, 0, 2): -1})
    b = HomogeneousForm.from_dict({(2, 0, 0): 2, (0, 2, 0): 1, (0, 0, 2): -1, (1, 1, 0): 0.3})
    with pytest.raises((CountMismatch, NonGeneric)):
        bitangents(Quartic(a * b), profile)


def test_square_residual_detects_non_bitangent(generic):
    F = generic[0].form
    assert square_residual(F, [1, 0.2, 0.1], [0.3, 1, -0.4]) > 1e-3


def test_class_pairs_are_syzygetic(generic_bitangents, generic_class, profile):
    for (a, b), (c, d) in itertools.combinations(generic_class.pairs, 2):
        ok, cert = is_syzygetic([generic_bitangents[i] for i in (a, b, c, d)], profile)
        assert ok and cert.gap_ratio < profile.eps_rank


def test_pairs_from_different_classes_are_not_syzygetic(generic_bitangents, class_table, profile):
    a, b = class_table.classes[0].pairs[0]
    c, d = next(p for p in class_table.classes[1].pairs if not set(p) & {a, b})
    ok, _ = is_syzygetic([generic_bitangents[i] for i in (a, b, c, d)], profile)
    assert not ok


def test_random_points_are_not_on_a_conic():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(1, 8, 3)) + 1j * rng.normal(size=(1, 8, 3))
    assert syzygy_ratios(pts)[0] > 1e-3


def test_syzygy_needs_four_bitangents(generic_bitangents, profile):
    with pytest.raises(ValueError):
        is_syzygetic(generic_bitangents[:3], profile)


def test_alpha_class_has_six_pairs(generic_class):
    assert len(generic_class.pairs) == 6 and len(generic_class.support) == 12


def test_alpha_class_independent_of_representative(generic_bitangents, generic_class, profile):
    for pair in generic_class.pairs:
        assert alpha_class(generic_bitangents, pair, profile) == generic_class


def test_exhaustive_classification(class_table):
    classes = class_table.classes
    assert len(classes) == 63 and all(len(c.pairs) == 6 for c in classes)
    pairs = [p for c in classes for p in c.pairs]
    assert len(pairs) == 378 and len(set(pairs)) == 378


def test_two_torsion_class_validates_pairs():
    with pytest.raises(CountMismatch):
        TwoTorsionClass(((0, 1), (1, 2), (3, 4), (5, 6), (7, 8), (9, 10)), (0, 1))
    cls = TwoTorsionClass(((1, 0), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11)), (0, 1))
    assert cls.partner(0) == 1 and cls.partner(11) == 10


@pytest.fixture(scope="module")
def pairing(generic_bitangents, class_table, profile):
    cls = class_table.classes
    return np.array([[weil_pairing(generic_bitangents, a, b, profile) for b in cls] for a in cls])


def test_weil_pairing_symmetric_and_alternating(pairing):
    assert (pairing == pairing.T).all()
    assert (np.diag(pairing) == 0).all()


def test_weil_pairing_split_against_every_class(pairing):
    # a nonzero functional on F2^6 vanishes on 31 nonzero vectors
    assert set((pairing == 0).sum(axis=1)) == {31}
    assert set((pairing == 1).sum(axis=1)) == {32}


def test_weil_pairing_nondegenerate(pairing):
    # no class pairs trivially with every class; also full rank over F2
    M = pairing.copy() % 2
    rank, rows = 0, list(M)
    for col in range(M.shape[1]):
        pivot = next((r for r in rows if r[col]), None)
        if pivot is None:
            continue
        rows = [r ^ pivot if r[col] and r is not pivot else r for r in rows if r is not pivot]
        rank += 1
    assert all(row.any() for row in pairing)
    assert rank == 6


def test_weil_pairing_bilinear(pairing, class_table):
    rng = np.random.default_rng(20)
    cls = class_table.classes
    for _ in range(20):
        i, j, k = rng.choice(63, size=3, replace=False)
        s = class_table.add(cls[j], cls[k])
        assert s is not None
        assert pairing[i, class_table.position(s)] == pairing[i, j] ^ pairing[i, k]


def test_class_sum_is_a_group_law(class_table):
    cls = class_table.classes
    assert class_table.add(cls[3], cls[3]) is None
    s = class_table.add(cls[1], cls[2])
    assert class_table.add(s, cls[2]) == cls[1]


def test_flag_counts():
    pairs, matchings, flags = enumerate_flags()
    assert (len(pairs), len(matchings), len(flags)) == (15, 15, 45)
    assert len({f.format() for f in flags}) == 45


def test_flag_parse_and_format():
    f = FlagSpec.parse("pair=2,1;partition=6-5,3-4")
    assert f.distinguished_pair == (1, 2) and f.partition == ((3, 4), (5, 6))
    assert FlagSpec.parse(f.format()) == f
    assert FlagSpec.parse("pair=3,5").others == (1, 2, 4, 6)


@pytest.mark.parametrize("text", ["pair=1,1;partition=3-4,5-6", "pair=1,2;partition=2-4,5-6",
                                  "partition=3-4,5-6", "pair=1,2;partition=3-4"])
def test_bad_flags_rejected(text):
    with pytest.raises(ValueError):
        FlagSpec.parse(text)


@given(st.permutations([1, 2, 3, 4, 5, 6]))
def test_every_labelling_gives_a_valid_flag(perm):
    f = FlagSpec(perm[:2], (perm[2:4], perm[4:]))
    assert sorted(f.distinguished_pair + f.others) == [1, 2, 3, 4, 5, 6]


def test_perfect_matchings_of_four():
    assert len(perfect_matchings((3, 4, 5, 6))) == 3
