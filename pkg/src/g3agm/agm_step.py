"""One step of the genus-3 AGM on plane configurations.

Given (E, Q, q1..q6) and a flag with distinguished pair {q1, q2}:

* ``t`` is the third point of line(q1 q2) on E, so projecting from ``t``
  identifies q1 and q2;
* the ramification points of that projection are ``E ∩ polar(E, t)`` minus
  ``t`` counted twice;
* ``E'`` is the cubic through ``t`` and the ramification points that is
  tangent at q3..q6 to the lines joining them to ``t`` (13 conditions, rank 9);
* ``s1, s2`` are the points of line(q1 q2) ∩ E' other than ``t``, and ``Q'``
  is the conic through s1, s2 and the ramification points (6 conditions, rank 5).

Everything happens in one fixed plane; no coordinate change is applied
between input and output.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .configuration import PlaneConfiguration, RamificationReport, verify_tower_pattern
from .errors import AmbiguousRank, G3Error, NonGeneric
from .forms import HomogeneousForm
from .numkernel import RankCertificate, ToleranceProfile
from .plane import (TangencyConstraint, expand_multiset, fit_form_constrained, intersect,
                    line_through, match_points, point_distance, points_on_line, polar_conic,
                    proj_point, third_point)
from .quartic_theta import FlagSpec, perfect_matchings


def _canonical_order(points):
    return sorted((proj_point(p) for p in points),
                  key=lambda p: tuple(np.round(np.concatenate([p.real, p.imag]), 7)))


@dataclass(frozen=True, eq=False)
class StepOutput:
    E_prime: HomogeneousForm
    Q_prime: HomogeneousForm
    q_prime: tuple
    t: np.ndarray
    ram: tuple
    dual_flag: FlagSpec
    partition_candidates: tuple
    certificates: tuple
    report: RamificationReport
    dual_report: RamificationReport | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def configuration(self) -> PlaneConfiguration:
        return PlaneConfiguration(self.E_prime, self.Q_prime, self.q_prime, self.certificates,
                                  {"source": "agm_step"})


def projection_center(config: PlaneConfiguration, pair, profile: ToleranceProfile | None = None
                      ) -> np.ndarray:
    """Third point of line(q_a q_b) on E."""
    profile = profile or ToleranceProfile()
    a, b = pair
    t = third_point(config.E, config.point(a), config.point(b), profile)
    for k, p in enumerate(config.q, start=1):
        if point_distance(t, p) < profile.eps_collision:
            raise NonGeneric(f"projection center coincides with marked point {k}")
    return t


def ramification_points(E: HomogeneousForm, t, profile: ToleranceProfile | None = None
                        ) -> list[np.ndarray]:
    """Contact points of the tangent lines from ``t`` (on E) to E.

    If ``t`` is a flex it appears once among the four points.
    """
    profile = profile or ToleranceProfile()
    t = proj_point(t)
    if E.residual(t) > profile.eps_point:
        raise ValueError("t is not on E")
    pts = expand_multiset(intersect(polar_conic(E, t), E, profile))
    pts.sort(key=lambda p: point_distance(p, t))
    if point_distance(pts[1], t) > profile.eps_collision:
        raise NonGeneric("polar conic is not tangent to E at t")
    ram = pts[2:]
    for a, b in itertools.combinations(ram, 2):
        if point_distance(a, b) < profile.eps_collision:
            raise NonGeneric("ramification points collide")
    return _canonical_order(ram)


def fit_E_prime(config: PlaneConfiguration, flag: FlagSpec, t, ram,
                profile: ToleranceProfile | None = None) -> tuple[HomogeneousForm, RankCertificate]:
    """Cubic through t and ram, tangent at the other four q to the lines from t."""
    profile = profile or ToleranceProfile()
    tangencies = [TangencyConstraint(config.point(k), line_through(t, config.point(k)))
                  for k in flag.others]
    try:
        return fit_form_constrained(3, [t, *ram], tangencies, profile, label="E'")
    except AmbiguousRank as exc:
        raise exc.at("fit_E_prime")


def tangency_residual(F: HomogeneousForm, point, line: HomogeneousForm) -> float:
    """Distance of the tangent line of F at ``point`` from ``line``."""
    return point_distance(F.gradient(proj_point(point)), line.coeffs)


def fit_Q_prime(config: PlaneConfiguration, E_prime: HomogeneousForm, flag: FlagSpec, t, ram,
                profile: ToleranceProfile | None = None):
    """Conic through s1, s2 and ram; returns (Q', s1, s2, certificate)."""
    profile = profile or ToleranceProfile()
    a, b = (config.point(k) for k in flag.distinguished_pair)
    pts = expand_multiset(points_on_line(E_prime, a, b, profile))
    pts.sort(key=lambda p: point_distance(p, t))
    if point_distance(pts[0], t) > profile.eps_collision:
        raise NonGeneric("t is not on line(q1 q2) ∩ E'")
    if point_distance(pts[1], t) < profile.eps_collision:
        raise NonGeneric("line(q1 q2) is tangent to E' at t")
    s1, s2 = _canonical_order(pts[1:])
    if point_distance(s1, s2) < profile.eps_collision:
        raise NonGeneric("s1 = s2: line(q1 q2) is tangent to E'")
    try:
        Q, cert = fit_form_constrained(2, [s1, s2, *ram], (), profile, label="Q'")
    except AmbiguousRank as exc:
        raise exc.at("fit_Q_prime")
    return Q, s1, s2, cert


def dual_partitions() -> tuple:
    """The three matchings of the new labels 3..6."""
    return tuple(perfect_matchings((3, 4, 5, 6)))


def agm_step(config: PlaneConfiguration, flag: FlagSpec, profile: ToleranceProfile | None = None
             ) -> StepOutput:
    profile = profile or ToleranceProfile()
    stage = "projection_center"
    try:
        t = projection_center(config, flag.distinguished_pair, profile)
        stage = "ramification_points"
        ram = ramification_points(config.E, t, profile)
        flex = min(point_distance(r, t) for r in ram) < profile.eps_collision
        if flex:
            warnings.warn("projection center is a flex of E", RuntimeWarning)
        stage = "verify_tower_pattern"
        report = verify_tower_pattern(config, flag, t, ram, profile)
        stage = "fit_E_prime"
        E1, cert_e = fit_E_prime(config, flag, t, ram, profile)
        stage = "fit_Q_prime"
        Q1, s1, s2, cert_q = fit_Q_prime(config, E1, flag, t, ram, profile)
        stage = "validate_output"
        q1 = (s1, s2, *ram)
        out_config = PlaneConfiguration(E1, Q1, q1, (cert_e, cert_q))
        meet_dist, _ = match_points([p for p, _ in intersect(Q1, E1, profile)], q1)
        if meet_dist > 1e-7:
            raise NonGeneric(f"Q' ∩ E' differs from the new marked points ({meet_dist:.2e})")
        candidates = dual_partitions()
        dual = FlagSpec((1, 2), candidates[0])
        # bigonal dictionary: from t, E' is ramified exactly at the old q3..q6
        stage = "dual_pattern"
        ram_dual = ramification_points(E1, t, profile)
        swap_dist, _ = match_points(ram_dual, [config.point(k) for k in flag.others])
        if swap_dist > profile.eps_collision:
            raise NonGeneric(f"E' is not ramified at the old marked points ({swap_dist:.2e})")
        dual_report = verify_tower_pattern(out_config, dual, t, ram_dual, profile)
    except G3Error as exc:
        raise exc.at(stage)
    diagnostics = {
        "t_on_E_prime": E1.residual(t),
        "ram_on_E_prime": max(E1.residual(r) for r in ram),
        "tangency": max(tangency_residual(E1, config.point(k), line_through(t, config.point(k)))
                        for k in flag.others),
        "s_on_line": max(line_through(*(config.point(k) for k in flag.distinguished_pair)).residual(s)
                         for s in (s1, s2)),
        "meet_distance": meet_dist,
        "dictionary_swap_distance": swap_dist,
        "flex_center": flex,
    }
    return StepOutput(E1, Q1, tuple(q1), t, tuple(ram), dual, candidates, (cert_e, cert_q),
                      report, dual_report, diagnostics)


@dataclass(frozen=True)
class RoundTripReport:
    coefficient_distance: float
    point_distance: float
    center_distance: float
    partition_residuals: tuple
    selected_partition: tuple
    partition_tied: bool
    negative_control: float

    def to_dict(self) -> dict:
        return {
            "coefficient_distance": self.coefficient_distance,
            "point_distance": self.point_distance,
            "center_distance": self.center_distance,
            "partition_residuals": [{"partition": [list(p) for p in part], "residual": r}
                                    for part, r in self.partition_residuals],
            "selected_partition": [list(p) for p in self.selected_partition],
            "partition_tied": self.partition_tied,
            "negative_control": self.negative_control,
        }


def _config_distance(a: PlaneConfiguration, b: PlaneConfiguration) -> tuple[float, float]:
    coeff = max(a.E.distance(b.E), a.Q.distance(b.Q))
    pts, _ = match_points(a.q, b.q)
    return coeff, pts


def roundtrip_check(config: PlaneConfiguration, flag: FlagSpec,
                    profile: ToleranceProfile | None = None) -> RoundTripReport:
    """Step forward with ``flag``, back with the dual flag, and compare."""
    profile = profile or ToleranceProfile()
    first = agm_step(config, flag, profile)
    mid = first.configuration
    residuals = []
    second = None
    for part in first.partition_candidates:
        back = agm_step(mid, FlagSpec((1, 2), part), profile)
        coeff, pts = _config_distance(back.configuration, config)
        residuals.append((part, max(coeff, pts)))
        if second is None:
            second = (back, coeff, pts)
    back, coeff, pts = second
    best = min(r for _, r in residuals)
    tied = all(r <= 10 * max(best, 1e-12) for _, r in residuals)
    # the step never reads the partition, so a tie is expected; keep the default then
    selected = residuals[0][0] if tied else min(residuals, key=lambda pr: pr[1])[0]
    # wrong dual pair: two ramification points distinguished
    try:
        wrong = agm_step(mid, FlagSpec((3, 4), ((1, 2), (5, 6))), profile)
        negative = max(_config_distance(wrong.configuration, config))
    except G3Error:
        negative = float("inf")
    return RoundTripReport(coeff, pts, point_distance(back.t, first.t), tuple(residuals),
                           selected, tied, negative)
