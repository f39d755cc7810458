"""Holomorphic differentials on the quartic through Poincaré residues.

A linear form ``l`` gives the differential ``l dz1 / (dk/dz2)`` in an affine
chart ``(z1, z2)`` of the complement of a line ``V``, where ``k = 0`` is the
affine equation of the quartic.  Differentials are kept symbolic (numerator
plus chart) and evaluated pointwise, either as the ``dz1`` coefficient or on
a tangent vector, which makes values from different charts comparable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .configuration import SpaceCurveModel
from .errors import ChartDegenerate
from .forms import HomogeneousForm
from .numkernel import ToleranceProfile, nullspace
from .plane import conic_matrix, point_distance, proj_point, third_point
from .quartic_theta import Quartic


@dataclass(frozen=True, eq=False)
class AffineChart:
    V_infty: HomogeneousForm
    z1: HomogeneousForm
    z2: HomogeneousForm

    def __post_init__(self):
        if any(f.degree != 1 or f.nvars != 3 for f in (self.V_infty, self.z1, self.z2)):
            raise ValueError("chart functionals must be linear forms in 3 variables")
        s = np.linalg.svd(self.frame, compute_uv=False)
        if s[-1] <= 1e-12 * s[0]:
            raise ChartDegenerate("V, z1, z2 do not form a frame")

    @classmethod
    def standard(cls) -> "AffineChart":
        e = np.eye(3)
        return cls(HomogeneousForm.linear(e[2]), HomogeneousForm.linear(e[0]),
                   HomogeneousForm.linear(e[1]))

    @classmethod
    def from_matrix(cls, M) -> "AffineChart":
        """Chart whose rows are ``z1, z2, V``."""
        M = np.asarray(M, dtype=complex)
        return cls(HomogeneousForm.linear(M[2]), HomogeneousForm.linear(M[0]),
                   HomogeneousForm.linear(M[1]))

    @property
    def frame(self) -> np.ndarray:
        """Rows ``z1, z2, V``: homogeneous coordinates in this chart."""
        return np.array([self.z1.coeffs, self.z2.coeffs, self.V_infty.coeffs])

    def affine(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=complex)
        v = self.V_infty(p)
        if abs(v) < 1e-14 * np.linalg.norm(p):
            raise ChartDegenerate("point on the line at infinity")
        return np.array([self.z1(p), self.z2(p)]) / v

    def dz(self, p, T) -> np.ndarray:
        """Differentials of (z1, z2) at ``p`` along the motion ``p + e T``."""
        p, T = np.asarray(p, dtype=complex), np.asarray(T, dtype=complex)
        v, dv = self.V_infty(p), self.V_infty(T)
        return np.array([(f(T) * v - f(p) * dv) / v ** 2 for f in (self.z1, self.z2)])


def _dk_dz2(C: Quartic, chart: AffineChart) -> HomogeneousForm:
    """The cubic form ``grad F . d`` with ``d`` the z2-direction of the chart."""
    d = np.linalg.inv(chart.frame)[:, 1]
    out = C.form.partial(0) * complex(d[0])
    for i in (1, 2):
        out = out + C.form.partial(i) * complex(d[i])
    return out


@dataclass(frozen=True, eq=False)
class ResidueForm:
    """``numerator dz1 / (dk/dz2)`` on the quartic ``curve`` in ``chart``."""

    numerator: HomogeneousForm
    chart: AffineChart
    curve: Quartic
    denominator_tag: str = "dk/dz2"

    def coefficient(self, p) -> complex:
        """The ``dz1``-coefficient at a point of the curve."""
        p = np.asarray(p, dtype=complex)
        v = self.chart.V_infty(p)
        if abs(v) < 1e-14 * np.linalg.norm(p):
            raise ChartDegenerate("point on the line at infinity")
        ph = p / v
        den = _dk_dz2(self.curve, self.chart)(ph)
        return complex(self.numerator(ph) / den)

    def __call__(self, p, T) -> complex:
        """Value on the tangent vector given by the motion ``p + e T``."""
        return self.coefficient(p) * complex(self.chart.dz(p, T)[0])

    def __add__(self, other: "ResidueForm") -> "ResidueForm":
        return ResidueForm(self.numerator + other.numerator, self.chart, self.curve)

    def scaled(self, c) -> "ResidueForm":
        return ResidueForm(self.numerator * c, self.chart, self.curve)


def residue_basis(C: Quartic, chart: AffineChart) -> list[ResidueForm]:
    """Residue forms of the three coordinate functionals."""
    if _dk_dz2(C, chart).is_zero(1e-13 * C.form.norm()):
        raise ChartDegenerate("dk/dz2 vanishes identically")
    return [ResidueForm(HomogeneousForm.linear(e), chart, C) for e in np.eye(3)]


def tangent_vector(C: Quartic, p, rng=None) -> np.ndarray:
    """A vector ``T`` with ``p + e T`` moving along the curve to first order."""
    g = C.form.gradient(np.asarray(p, dtype=complex))
    w = np.array([0.3, -0.7, 1.1]) if rng is None else rng.normal(size=3)
    # bilinear: g . (g x w) = 0
    return np.cross(g, w)


@dataclass(frozen=True)
class CanonicalIso:
    """Projective matrix identifying the canonical planes of C and C'."""

    matrix: np.ndarray
    t_residual: float = 0.0
    pencil_residual: float = 0.0

    def off_identity(self) -> float:
        A = self.matrix / (np.trace(self.matrix) / 3)
        return float(np.linalg.norm(A - np.eye(3)))

    def apply_point(self, p) -> np.ndarray:
        return proj_point(self.matrix @ np.asarray(p, dtype=complex))

    def apply_line(self, line: HomogeneousForm) -> HomogeneousForm:
        return HomogeneousForm.linear(proj_point(np.linalg.solve(self.matrix.T, line.coeffs)))

    def transport(self, form: ResidueForm, chart_out: AffineChart, curve_out: Quartic) -> ResidueForm:
        """Numerator transport ``l -> l o A^{-1}``."""
        A_inv = np.linalg.inv(self.matrix)
        return ResidueForm(form.numerator.transform(A_inv), chart_out, curve_out)

    def compose(self, other: "CanonicalIso") -> "CanonicalIso":
        """``self o other``."""
        return CanonicalIso(self.matrix @ other.matrix)


def frame_change(chart_in: AffineChart, chart_out: AffineChart) -> np.ndarray:
    """Chart-in coordinates to chart-out coordinates of the same point."""
    return chart_out.frame @ np.linalg.inv(chart_in.frame)


def canonical_iso(step, chart_in: AffineChart, chart_out: AffineChart, n_lines: int = 10,
                  profile: ToleranceProfile | None = None) -> CanonicalIso:
    """Identification of the two canonical planes, written in the given charts.

    Both configurations live in one plane, so the identification is the
    identity there and only the chart frames contribute.  The report checks
    that it sends ``t`` to the projection center ``t'`` of the output (the
    third point of line(s1 s2) on E') and that pencil lines through ``t``
    go to pencil lines through ``t'``.
    """
    profile = profile or ToleranceProfile()
    M = frame_change(chart_in, chart_out)
    shared = CanonicalIso(frame_change(chart_in, chart_in))
    t = proj_point(step.t)
    t_dual = third_point(step.E_prime, step.q_prime[0], step.q_prime[1], profile)
    t_res = point_distance(shared.apply_point(t), t_dual)
    rng = profile.rng(4421)
    worst = 0.0
    for _ in range(n_lines):
        other = rng.normal(size=3) + 1j * rng.normal(size=3)
        L = HomogeneousForm.linear(proj_point(np.cross(t, other)))
        image = shared.apply_line(L)
        worst = max(worst, point_distance(image.coeffs, L.coeffs), image.residual(t_dual))
    return CanonicalIso(M, t_res, worst)


@dataclass(frozen=True)
class OddSpaceReport:
    odd_dimension: int
    even_dimension: int
    vertex: np.ndarray
    H: np.ndarray
    involution_residual: float

    def to_dict(self) -> dict:
        return {"odd": self.odd_dimension, "even": self.even_dimension,
                "vertex": self.vertex, "H": self.H, "involution_residual": self.involution_residual}


def cone_vertex(Q3: HomogeneousForm, profile: ToleranceProfile | None = None) -> np.ndarray:
    """Directions ``d`` with ``sum d_i dQ3/dx_i = 0``: the vertex of a cone."""
    profile = profile or ToleranceProfile()
    D = np.column_stack([Q3.partial(i).coeffs for i in range(Q3.nvars)])
    N, _ = nullspace(D, profile, dim=1, label="vertex")
    return proj_point(N[:, 0])


def odd_space_report(model: SpaceCurveModel, profile: ToleranceProfile | None = None) -> OddSpaceReport:
    """Decompose linear forms of P^3 under the covering involution of the model.

    The involution is the harmonic homology with center the cone vertex and
    axis its polar plane ``H`` with respect to ``Q2``.  Forms vanishing at the
    vertex (planes through it) form the odd part; the equation of ``H`` spans
    the even part.
    """
    profile = profile or ToleranceProfile()
    v = cone_vertex(model.Q3, profile)
    A = conic_matrix(model.Q2)
    h = proj_point(A @ v)
    if abs(h @ v) < 1e-12:
        raise ChartDegenerate("cone vertex lies on Q2")
    S = np.eye(4) - 2 * np.outer(v, h) / (h @ v)
    res = max(model.Q2.distance(model.Q2.transform(S)), model.Q3.distance(model.Q3.transform(S)))
    # S^T acts on linear forms
    w, _ = np.linalg.eig(S.T)
    odd = int(np.sum(np.abs(w - 1) < 1e-9))
    even = int(np.sum(np.abs(w + 1) < 1e-9))
    return OddSpaceReport(odd, even, v, h, float(res))


def phi_Y(model: SpaceCurveModel, line: HomogeneousForm, profile: ToleranceProfile | None = None
          ) -> HomogeneousForm:
    """The plane spanned by a line of ``H`` (a ternary linear form) and the vertex."""
    v = cone_vertex(model.Q3, profile)
    plane = line.lift(4)
    if abs(plane(v)) > 1e-12:
        raise ChartDegenerate("line lift does not contain the vertex")
    return plane
