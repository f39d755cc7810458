import time

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import DEFAULT_FLAG
from g3agm.agm_step import (agm_step, dual_partitions, fit_E_prime, projection_center,
                            ramification_points, roundtrip_check, tangency_residual)
from g3agm.configuration import PlaneConfiguration
from g3agm.errors import NonGeneric
from g3agm.forms import HomogeneousForm
from g3agm.plane import line_through, match_points, point_distance, polar_conic, tangent_line
from g3agm.quartic_theta import FlagSpec, enumerate_flags

# frozen from a run on fixtures/fixture.json; a determinism check
T_FIXTURE = np.array([0.54965238 + 1.49346373e-01j, 0.81776219 + 4.99419448e-17j,
                      0.00685129 - 8.24377343e-02j])

CUSP_FREE = HomogeneousForm.from_dict({(0, 2, 1): 1, (3, 0, 0): -1, (1, 0, 2): 1})  # y^2 z = x^3 - x z^2


def test_center_is_third_point_on_line(config, step, profile):
    t = step.t
    assert config.E.residual(t) < 1e-12
    assert line_through(config.point(1), config.point(2)).residual(t) < 1e-12
    assert min(point_distance(t, p) for p in config.q) > 1e-3


def test_center_is_deterministic(step):
    assert point_distance(step.t, T_FIXTURE) < 1e-7


def test_ramification_at_flex_center(profile):
    ram = ramification_points(CUSP_FREE, [0, 1, 0], profile)
    expected = [np.array(p, dtype=complex) for p in ([0, 0, 1], [1, 0, 1], [-1, 0, 1], [0, 1, 0])]
    assert match_points(ram, expected)[0] < 1e-7


def test_ramification_points_are_tangencies(config, step):
    for r in step.ram:
        assert config.E.residual(r) < 1e-12
        assert polar_conic(config.E, step.t).residual(r) < 1e-10
        assert tangent_line(config.E, r).residual(step.t) < 1e-9


def test_ramification_needs_point_on_curve(profile):
    with pytest.raises(ValueError):
        ramification_points(CUSP_FREE, [1, 1, 1], profile)


def test_E_prime_certificate(step):
    cert = step.certificates[0]
    assert cert.shape == (13, 10) and cert.claimed_rank == 9 and cert.gap_ratio < 1e-8


def test_E_prime_conditions(config, step):
    E1 = step.E_prime
    assert E1.residual(step.t) < 1e-10
    assert all(E1.residual(r) < 1e-10 for r in step.ram)
    for k in DEFAULT_FLAG.others:
        p = config.point(k)
        assert E1.residual(p) < 1e-10
        assert tangency_residual(E1, p, line_through(step.t, p)) < 1e-9


def test_Q_prime_certificate_and_meet(step):
    cert = step.certificates[1]
    assert cert.shape == (6, 6) and cert.claimed_rank == 5
    assert step.diagnostics["meet_distance"] < 1e-7
    s1, s2 = step.q_prime[:2]
    assert all(step.Q_prime.residual(p) < 1e-10 for p in step.q_prime)
    assert point_distance(s1, s2) > 1e-3


def test_dictionary_swap(config, step, profile):
    # projecting E' from t ramifies at the old marked points q3..q6
    ram = ramification_points(step.E_prime, step.t, profile)
    assert match_points(ram, [config.point(k) for k in DEFAULT_FLAG.others])[0] < 1e-7


def test_dual_flag(step):
    assert step.dual_flag.distinguished_pair == (1, 2)
    assert step.partition_candidates == dual_partitions()
    assert step.dual_flag.partition in step.partition_candidates


def test_output_is_a_valid_configuration(step, profile):
    assert step.configuration.validate(profile) < 1e-7


def test_all_flags_step(config, profile):
    _, _, flags = enumerate_flags()
    for flag in flags:
        out = agm_step(config, flag, profile)
        assert out.certificates[0].gap_ratio < 1e-8 and out.certificates[1].gap_ratio < 1e-8
        assert out.diagnostics["meet_distance"] < 1e-7


def test_step_ignores_partition(config, profile):
    a = agm_step(config, FlagSpec((1, 2), ((3, 4), (5, 6))), profile)
    b = agm_step(config, FlagSpec((1, 2), ((3, 6), (4, 5))), profile)
    assert a.E_prime.distance(b.E_prime) < 1e-12


def test_round_trip(config, profile):
    report = roundtrip_check(config, DEFAULT_FLAG, profile)
    assert report.coefficient_distance < 1e-6
    assert report.point_distance < 1e-7
    assert report.center_distance < 1e-9
    assert report.negative_control > 1e-2
    assert report.partition_tied and len(report.partition_residuals) == 3


def test_center_of_second_step_is_t(step, profile):
    back = agm_step(step.configuration, step.dual_flag, profile)
    assert point_distance(back.t, step.t) < 1e-9


@settings(max_examples=8, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.integers(0, 2 ** 32 - 1))
def test_step_is_equivariant(config, step, profile, seed):
    rng = np.random.default_rng(seed)
    A = np.eye(3) + 0.3 * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    if np.linalg.cond(A) > 1e3:
        return
    A_inv = np.linalg.inv(A)
    moved = PlaneConfiguration(config.E.transform(A_inv), config.Q.transform(A_inv),
                               [A @ p for p in config.q])
    out = agm_step(moved, DEFAULT_FLAG, profile)
    assert out.E_prime.distance(step.E_prime.transform(A_inv)) < 1e-7
    assert out.Q_prime.distance(step.Q_prime.transform(A_inv)) < 1e-7
    assert point_distance(out.t, A @ step.t) < 1e-8


def test_collinear_marked_points_are_nongeneric(config, profile):
    # put q2 at the third point so that t = q3
    t = projection_center(config, (1, 2), profile)
    q = list(config.q)
    q[2] = t
    bad = PlaneConfiguration(config.E, config.Q, q)
    with pytest.raises(NonGeneric) as info:
        agm_step(bad, DEFAULT_FLAG, profile)
    assert info.value.stage == "projection_center"


def test_step_runtime(config, profile):
    start = time.perf_counter()
    agm_step(config, DEFAULT_FLAG, profile)
    assert time.perf_counter() - start < 1.0


def test_fit_E_prime_directly(config, step, profile):
    E1, cert = fit_E_prime(config, DEFAULT_FLAG, step.t, step.ram, profile)
    assert E1.distance(step.E_prime) < 1e-12 and cert.claimed_rank == 9
