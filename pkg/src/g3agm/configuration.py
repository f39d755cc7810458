"""From a quartic and a 2-torsion class to the plane configuration (E, Q, q).

The contact points of the representative bitangent pair span a pencil of
conics.  Its moving intersection with the quartic is a 4-point fiber of the
linear system ``|K + alpha|``; for each fiber the three "diagonal" points
``line(p1 p2) ∩ line(p3 p4)`` etc. lie on the cubic ``E``.  The six marked
points are the meets ``l_i1 ∩ l_i2`` of the class's bitangent pairs and lie on
``E`` and on a conic ``Q``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import AmbiguousRank, CountMismatch, NonGeneric
from .forms import HomogeneousForm, monomial_values
from .numkernel import ToleranceProfile, nullspace
from .plane import (expand_multiset, fit_form_constrained, intersect, is_smooth_conic,
                    line_through, match_points, meet, point_distance, proj_point,
                    tangent_line)
from .quartic_theta import FlagSpec, Quartic, TwoTorsionClass

DIAGONALS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


@dataclass(frozen=True, eq=False)
class PencilOfConics:
    basis: tuple
    base_points: tuple

    def member(self, lam) -> HomogeneousForm:
        a, b = self.basis
        return a * complex(lam[0]) + b * complex(lam[1])

    def parameter_of(self, conic: HomogeneousForm) -> tuple[np.ndarray, float]:
        """Coordinates of ``conic`` in the basis and the relative fit residual."""
        N = np.column_stack([b.coeffs for b in self.basis])
        lam, *_ = np.linalg.lstsq(N, conic.coeffs, rcond=None)
        res = np.linalg.norm(N @ lam - conic.coeffs) / conic.norm()
        return lam, float(res)


@dataclass(frozen=True, eq=False)
class PlaneConfiguration:
    """Cubic ``E``, conic ``Q`` and marked points ``q[0..5]`` (labels 1..6)."""

    E: HomogeneousForm
    Q: HomogeneousForm
    q: tuple
    certificates: tuple = ()
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.E.degree != 3 or self.Q.degree != 2:
            raise ValueError("configuration needs a cubic and a conic")
        if len(self.q) != 6:
            raise ValueError("configuration needs six marked points")
        object.__setattr__(self, "q", tuple(proj_point(p) for p in self.q))
        object.__setattr__(self, "certificates", tuple(self.certificates))

    def point(self, label: int) -> np.ndarray:
        return self.q[label - 1]

    def validate(self, profile: ToleranceProfile) -> float:
        """Check ``Q ∩ E = q`` with simple distinct points; returns the match distance."""
        for a, b in itertools.combinations(range(6), 2):
            if point_distance(self.q[a], self.q[b]) < profile.eps_collision:
                raise NonGeneric(f"marked points {a + 1} and {b + 1} collide")
        worst = max(max(self.E.residual(p), self.Q.residual(p)) for p in self.q)
        if worst > profile.eps_point:
            raise NonGeneric(f"marked points off E or Q (residual {worst:.2e})")
        pts = intersect(self.Q, self.E, profile)
        if any(m > 1 for _, m in pts):
            raise NonGeneric("Q and E are tangent")
        dist, _ = match_points([p for p, _ in pts], self.q)
        if dist > profile.eps_collision:
            raise NonGeneric(f"Q ∩ E differs from the marked points ({dist:.2e})")
        for p in self.q:
            if np.linalg.norm(self.E.gradient(p)) <= 1e-8 * self.E.norm():
                raise NonGeneric("E is singular at a marked point")
        return dist


@dataclass(frozen=True, eq=False)
class SpaceCurveModel:
    """``Q2 = f_Q + x3^2`` and the cone ``Q3`` over ``E`` with vertex (0:0:0:1)."""

    Q2: HomogeneousForm
    Q3: HomogeneousForm

    vertex = np.array([0, 0, 0, 1], dtype=complex)

    def lift(self, p) -> np.ndarray:
        return np.append(proj_point(p), 0)


@dataclass(frozen=True)
class RamificationReport:
    type_counts: dict
    base_lines: tuple
    distinct: bool
    min_separation: float

    def to_dict(self) -> dict:
        return {"type_counts": dict(self.type_counts), "distinct": self.distinct,
                "min_separation": self.min_separation}


# ---------------------------------------------------------------------------
# pencil and fibers


def build_pencil(C: Quartic, cls: TwoTorsionClass, bts, profile: ToleranceProfile | None = None
                 ) -> PencilOfConics:
    """Conics through the four contacts of the class's representative pair."""
    profile = profile or ToleranceProfile()
    i, j = cls.representative_pair
    base = tuple(proj_point(p) for p in (*bts[i].contacts, *bts[j].contacts))
    for a, b, c in itertools.combinations(base, 3):
        if abs(np.linalg.det(np.array([a, b, c]))) < profile.eps_collision:
            raise NonGeneric("three contact points are collinear")
    try:
        N, _ = nullspace(monomial_values(2, np.array(base)), profile, dim=2, label="pencil")
    except AmbiguousRank as exc:
        raise NonGeneric("contact points do not span a pencil") from exc
    pencil = PencilOfConics((HomogeneousForm(2, 3, N[:, 0]), HomogeneousForm(2, 3, N[:, 1])), base)
    _, res = pencil.parameter_of(bts[i].line * bts[j].line)
    if res > profile.eps_residual:
        raise NonGeneric(f"bitangent pair is not a member of the pencil ({res:.2e})")
    return pencil


def pencil_fiber(C: Quartic, pencil: PencilOfConics, lam, profile: ToleranceProfile | None = None
                 ) -> list[np.ndarray]:
    """The four moving points of the pencil member ``lam`` on ``C``."""
    profile = profile or ToleranceProfile()
    G = pencil.member(lam)
    if not is_smooth_conic(G, profile.eps_collision):
        raise NonGeneric("degenerate member of the pencil")
    pts = expand_multiset(intersect(G, C.form, profile))
    D = np.array([[point_distance(p, b) for p in pts] for b in pencil.base_points])
    rows, cols = linear_sum_assignment(D)
    if D[rows, cols].max() > profile.eps_collision:
        raise NonGeneric("base point missing from the fiber")
    rest = [p for k, p in enumerate(pts) if k not in set(cols)]
    for a, b in itertools.combinations(rest + list(pencil.base_points), 2):
        if point_distance(a, b) < profile.eps_collision:
            raise NonGeneric("branch fiber: moving points collide")
    return rest


def cross_points(fiber) -> list[np.ndarray]:
    """The three diagonal points of a complete quadrilateral."""
    return [meet(line_through(fiber[a], fiber[b]), line_through(fiber[c], fiber[d]))
            for (a, b), (c, d) in DIAGONALS]


def sample_cross_points(C: Quartic, pencil: PencilOfConics, count: int, profile: ToleranceProfile,
                        salt: int = 0) -> list[np.ndarray]:
    """Cross points of ``count`` generic fibers, resampling special ones."""
    rng = profile.rng(1913, salt)
    out = []
    tries = 0
    while len(out) < 3 * count:
        tries += 1
        if tries > 4 * count + 10:
            raise NonGeneric("could not sample enough generic fibers")
        lam = rng.normal(size=2) + 1j * rng.normal(size=2)
        try:
            out.extend(cross_points(pencil_fiber(C, pencil, lam, profile)))
        except NonGeneric:
            continue
    return out


# ---------------------------------------------------------------------------
# configuration


def marked_points(bts, cls: TwoTorsionClass) -> list[np.ndarray]:
    return [meet(bts[a].line, bts[b].line) for a, b in cls.pairs]


def extract_configuration(C: Quartic, cls: TwoTorsionClass, bts,
                          profile: ToleranceProfile | None = None,
                          fibers: int = 5, held_out: int = 2) -> PlaneConfiguration:
    """Fit ``Q`` through the six marked points and ``E`` through them and cross points."""
    profile = profile or ToleranceProfile()
    if len(cls.pairs) != 6:
        raise CountMismatch("class must have six pairs")
    q = marked_points(bts, cls)
    for a, b in itertools.combinations(range(6), 2):
        if point_distance(q[a], q[b]) < profile.eps_collision:
            raise NonGeneric(f"marked points {a + 1} and {b + 1} collide")
    try:
        Q, cert_q = fit_form_constrained(2, q, (), profile, label="Q")
    except AmbiguousRank as exc:
        raise NonGeneric("marked points are not on a unique conic") from exc
    if not is_smooth_conic(Q, profile.eps_collision):
        raise NonGeneric("the conic through the marked points is singular")

    pencil = build_pencil(C, cls, bts, profile)
    cross = sample_cross_points(C, pencil, fibers + held_out, profile)
    fit, check = cross[: 3 * fibers], cross[3 * fibers:]
    try:
        E, cert_e = fit_form_constrained(3, fit + q, (), profile, label="E")
    except AmbiguousRank as exc:
        raise NonGeneric("cross points do not determine a unique cubic") from exc
    held = max((E.residual(p) for p in check), default=0.0)
    if held > 1e-7:
        raise NonGeneric(f"held-out cross points off E (residual {held:.2e})")
    config = PlaneConfiguration(E, Q, tuple(q), (cert_q, cert_e),
                                {"representative_pair": list(cls.representative_pair),
                                 "pairs": [list(p) for p in cls.pairs],
                                 "cross_points": len(fit), "held_out_residual": held})
    config.validate(profile)
    return config


def build_space_model(config: PlaneConfiguration) -> SpaceCurveModel:
    x3 = HomogeneousForm.linear([0, 0, 0, 1])
    return SpaceCurveModel(config.Q.lift(4) + x3 * x3, config.E.lift(4))


# ---------------------------------------------------------------------------
# tower pattern

TYPE_BASE = "⊂⊂/="       # line through the distinguished pair
TYPE_TANGENT = "⊂⊂/⊂"    # tangent line from t
TYPE_MARKED = "⊂=/="     # line through one further marked point


def _line_type(E: HomogeneousForm, t, L: HomogeneousForm, marked, profile, r) -> str:
    """Type of a line through ``t``: how many marked points it carries, and
    whether E is tangent to it away from ``t`` (or has a flex at ``t``)."""
    on_line = sum(L.residual(x) < profile.eps_collision for x in marked)
    # E(t + s w) = s (c1 + c2 s + c3 s^2) with w a generic point of L
    w = proj_point(np.cross(L.coeffs, r))
    c = E.binary_restriction(t, w)
    disc = abs(c[2] ** 2 - 4 * c[1] * c[3]) / np.abs(c[1:]).sum() ** 2
    ramified = disc < profile.eps_collision
    if on_line == 2 and not ramified:
        return TYPE_BASE
    if on_line == 0 and ramified:
        return TYPE_TANGENT
    if on_line == 1 and not ramified:
        return TYPE_MARKED
    raise NonGeneric(f"line through t of non-generic type (marked={on_line}, ramified={ramified})")


def verify_tower_pattern(config: PlaneConfiguration, flag: FlagSpec, t, ram,
                         profile: ToleranceProfile | None = None) -> RamificationReport:
    """Classify the nine special lines through ``t`` and check they are distinct.

    A ramification point equal to ``t`` (flex center) is supported by the
    tangent line of E at ``t``.
    """
    profile = profile or ToleranceProfile()
    t = proj_point(t)
    if len(ram) != 4:
        raise NonGeneric("expected four ramification points")
    a = config.point(flag.distinguished_pair[0])
    labels = ["pair"] + [f"ram{k}" for k in range(1, 5)] + [f"q{k}" for k in flag.others]
    support = [a] + list(ram) + [config.point(k) for k in flag.others]
    lines = []
    for p, name in zip(support, labels):
        if point_distance(p, t) >= profile.eps_collision:
            lines.append(line_through(t, p))
        elif name.startswith("ram"):
            lines.append(tangent_line(config.E, t))
        else:
            raise NonGeneric(f"{name} coincides with the projection center")
    sep = min(point_distance(x.coeffs, y.coeffs) for x, y in itertools.combinations(lines, 2))
    for (i, x), (j, y) in itertools.combinations(enumerate(lines), 2):
        if point_distance(x.coeffs, y.coeffs) < profile.eps_collision:
            raise NonGeneric(f"pencil lines {labels[i]} and {labels[j]} coincide")
    r = profile.rng(6007).normal(size=3)
    counts = {TYPE_BASE: 0, TYPE_TANGENT: 0, TYPE_MARKED: 0}
    for L in lines:
        counts[_line_type(config.E, t, L, config.q, profile, r)] += 1
    if (counts[TYPE_BASE], counts[TYPE_TANGENT], counts[TYPE_MARKED]) != (1, 4, 4):
        raise NonGeneric(f"ramification pattern {counts} is not (1, 4, 4)")
    return RamificationReport(counts, tuple(lines), True, float(sep))
