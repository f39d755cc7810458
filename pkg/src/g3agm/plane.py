"""Projective plane geometry: points, lines, intersections, polars, fits.

Points are plain complex numpy vectors (3 or 4 coordinates).  Use
:func:`proj_point` for the canonical representative and
:func:`point_distance` to compare points projectively.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import unitary_group

from .errors import (CommonComponent, DegenerateLine, NonConvergence,
                     NonGeneric, ZeroForm)
from .forms import HomogeneousForm, _phase_aligned_distance, canonical_phase, monomial_gradients, monomial_values
from .numkernel import RankCertificate, ToleranceProfile, nullspace, resultant_eliminate, roots_univariate, UnivariatePoly


# ---------------------------------------------------------------------------
# points and lines


def proj_point(v) -> np.ndarray:
    """Canonical representative: unit norm, leading large entry positive real."""
    return canonical_phase(np.asarray(v, dtype=complex))


def point_distance(p, q) -> float:
    return _phase_aligned_distance(np.asarray(p, dtype=complex), np.asarray(q, dtype=complex))


def line_through(p, q) -> HomogeneousForm:
    return HomogeneousForm.linear(proj_point(np.cross(p, q)))


def meet(l1: HomogeneousForm, l2: HomogeneousForm) -> np.ndarray:
    return proj_point(np.cross(l1.coeffs, l2.coeffs))


def incident(point, line: HomogeneousForm) -> float:
    """Scale-free incidence residual of a point and a line."""
    return line.residual(point)


def match_points(A, B) -> tuple[float, list[int]]:
    """Optimal matching of two equal-size point lists.

    Returns the maximal matched distance and, for each point of ``A``, the
    index of its partner in ``B``.
    """
    A, B = list(A), list(B)
    if len(A) != len(B):
        raise ValueError("point sets of different size")
    if not A:
        return 0.0, []
    D = np.array([[point_distance(a, b) for b in B] for a in A])
    rows, cols = linear_sum_assignment(D)
    perm = [0] * len(A)
    for r, c in zip(rows, cols):
        perm[r] = int(c)
    return float(D[rows, cols].max()), perm


def random_unitary(rng: np.random.Generator, n: int = 3) -> np.ndarray:
    return unitary_group.rvs(n, random_state=rng)


@dataclass(frozen=True, eq=False)
class TangencyConstraint:
    point: np.ndarray
    required_tangent_line: HomogeneousForm

    def __post_init__(self):
        if self.required_tangent_line.degree != 1:
            raise ValueError("tangent line must be a linear form")
        object.__setattr__(self, "point", proj_point(self.point))

    def check(self, profile: ToleranceProfile) -> None:
        if incident(self.point, self.required_tangent_line) > profile.eps_point:
            raise ValueError("tangency point does not lie on its line")


# ---------------------------------------------------------------------------
# intersections


def _newton_polish(F: HomogeneousForm, G: HomogeneousForm, p: np.ndarray, iters: int) -> np.ndarray:
    p = proj_point(p)
    for _ in range(iters):
        a = p.conj()
        J = np.vstack([F.gradient(p), G.gradient(p), a])
        r = np.array([F(p), G(p), a @ p - 1])
        try:
            dp = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            break
        p = p + dp
        if np.linalg.norm(dp) < 1e-15:
            break
    return proj_point(p)


def _common_root_on_fiber(Ft, Gt, x, profile):
    """Given x, the y making (x, y, 1) a common zero of Ft and Gt."""
    base = np.array([x, 0, 1], dtype=complex)
    direction = np.array([0, 1, 0], dtype=complex)
    fy = UnivariatePoly(Ft.binary_restriction(base, direction)).trimmed(1e-13)
    gy = UnivariatePoly(Gt.binary_restriction(base, direction)).trimmed(1e-13)
    first, second = (fy, gy) if fy.degree <= gy.degree else (gy, fy)
    if first.degree < 1:
        first, second = second, first
    cands = [r for r, _ in roots_univariate(first, profile)]
    scale = np.abs(second.coefficients).max()
    return min(cands, key=lambda y: abs(second(y)) / (scale * max(1, abs(y)) ** second.degree))


def intersect(F: HomogeneousForm, G: HomogeneousForm,
              profile: ToleranceProfile | None = None) -> list[tuple[np.ndarray, int]]:
    """``F ∩ G`` as a multiset of (point, multiplicity); Bézout total."""
    profile = profile or ToleranceProfile()
    if F.nvars != 3 or G.nvars != 3:
        raise ValueError("intersect works in the plane")
    total = F.degree * G.degree
    last_error: Exception | None = None
    for attempt in range(4):
        U = random_unitary(profile.rng(7919, attempt))
        Ft, Gt = F.transform(U), G.transform(U)
        R = resultant_eliminate(Ft, Gt, eliminated=1, chart=2).trimmed(1e-12)
        if R.degree != total:
            last_error = NonConvergence("intersection point at chart infinity")
            continue
        out = []
        for x, m in roots_univariate(R, profile):
            y = _common_root_on_fiber(Ft, Gt, x, profile)
            p = U @ np.array([x, y, 1], dtype=complex)
            if m == 1:
                p = _newton_polish(F, G, p, profile.max_newton_iters)
            out.append((proj_point(p), m))
        worst = max(max(F.residual(p), G.residual(p)) for p, _ in out)
        if worst <= profile.eps_residual:
            return out
        last_error = NonConvergence(f"intersection residual {worst:.2e}")
    raise last_error


def points_on_line(F: HomogeneousForm, p, q, profile: ToleranceProfile | None = None
                   ) -> list[tuple[np.ndarray, int]]:
    """``F ∩ line(p, q)`` via the binary restriction of ``F``."""
    profile = profile or ToleranceProfile()
    p, q = proj_point(p), proj_point(q)
    if point_distance(p, q) < profile.eps_point:
        raise DegenerateLine("points coincide")
    # generic basis of the line so no root sits at parameter infinity
    W = random_unitary(profile.rng(104729), 2)
    a = W[0, 0] * p + W[0, 1] * q
    b = W[1, 0] * p + W[1, 1] * q
    c = F.binary_restriction(a, b)
    if np.abs(c).max() <= 1e-13 * F.norm():
        raise CommonComponent("line is a component of the curve")
    poly = UnivariatePoly(c).trimmed(1e-14)
    if poly.degree < F.degree:
        raise NonConvergence("intersection at line-parameter infinity")
    return [(proj_point(a + s * b), m) for s, m in roots_univariate(poly, profile)]


def expand_multiset(points) -> list[np.ndarray]:
    return [p for p, m in points for _ in range(m)]


# ---------------------------------------------------------------------------
# polars, residual points, fits


def polar_conic(E: HomogeneousForm, t) -> HomogeneousForm:
    """``sum_i t_i dE/dx_i``; for a cubic this is the polar conic of ``t``."""
    t = np.asarray(t, dtype=complex)
    out = t[0] * E.partial(0)
    for i in range(1, E.nvars):
        out = out + t[i] * E.partial(i)
    if out.is_zero(1e-13 * E.norm()):
        raise ZeroForm("polar vanishes identically: t is a point of multiplicity deg E")
    return out


def tangent_line(F: HomogeneousForm, p) -> HomogeneousForm:
    g = F.gradient(proj_point(p))
    if np.linalg.norm(g) <= 1e-12 * F.norm():
        raise NonGeneric("singular point: gradient vanishes")
    return HomogeneousForm.linear(proj_point(g))


def third_point(E: HomogeneousForm, p, q, profile: ToleranceProfile | None = None) -> np.ndarray:
    """Residual point of ``E ∩ line(p, q)`` after removing ``p`` and ``q``."""
    profile = profile or ToleranceProfile()
    p, q = proj_point(p), proj_point(q)
    if point_distance(p, q) < profile.eps_point:
        raise DegenerateLine("p = q: use the tangent line instead")
    for name, x in (("p", p), ("q", q)):
        if E.residual(x) > profile.eps_point:
            raise ValueError(f"{name} is not on the cubic (residual {E.residual(x):.2e})")
    c = E.binary_restriction(p, q)
    scale = np.abs(c).max()
    if scale <= 1e-13 * E.norm():
        raise CommonComponent("line(p, q) is a component of E")
    c1, c2 = c[1], c[2]
    if abs(c2) <= 1e-12 * scale:
        raise NonGeneric("line is tangent at q: residual point equals q")
    if abs(c1) <= 1e-12 * scale:
        raise NonGeneric("line is tangent at p: residual point equals p")
    r = proj_point(p - (c1 / c2) * q)
    if min(point_distance(r, p), point_distance(r, q)) < profile.eps_collision:
        raise NonGeneric("residual point collides with p or q")
    return r


def interpolation_rows(degree: int, points=(), tangencies=()) -> np.ndarray:
    """Stacked, row-normalised linear conditions on the coefficients of a form.

    A point contributes its monomial row.  A tangency contributes two rows
    saying the gradient is annihilated by a basis of the bilinear complement
    of the required line, i.e. the gradient is proportional to the line.
    """
    rows = []
    for p in points:
        rows.append(monomial_values(degree, proj_point(p)))
    for tc in tangencies:
        n = tc.required_tangent_line.coeffs
        # w with w . n = 0 (bilinear): nullspace of n as a 1x3 matrix
        _, _, Vh = np.linalg.svd(n.reshape(1, -1))
        W = Vh[1:].conj()
        G = monomial_gradients(degree, tc.point)
        rows.extend(W @ G)
    M = np.array(rows, dtype=complex)
    return M / np.linalg.norm(M, axis=1, keepdims=True)


def fit_form_constrained(degree: int, points=(), tangencies=(), profile: ToleranceProfile | None = None,
                         label: str = "") -> tuple[HomogeneousForm, RankCertificate]:
    """The unique form of given degree satisfying point and tangency conditions."""
    profile = profile or ToleranceProfile()
    if degree not in (1, 2, 3, 4):
        raise ValueError("degree must be between 1 and 4")
    for tc in tangencies:
        tc.check(profile)
    M = interpolation_rows(degree, points, tangencies)
    basis, cert = nullspace(M, profile, dim=1, label=label)
    form = HomogeneousForm(degree, 3, basis[:, 0]).normalized()
    return form, cert


def conic_matrix(Q: HomogeneousForm) -> np.ndarray:
    """Symmetric matrix ``A`` with ``Q(p) = p^T A p``."""
    if Q.degree != 2:
        raise ValueError("not a conic")
    n = Q.nvars
    A = np.zeros((n, n), dtype=complex)
    for e, c in Q.to_dict().items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx
        if i == j:
            A[i, i] += c
        else:
            A[i, j] += c / 2
            A[j, i] += c / 2
    return A


def is_smooth_conic(Q: HomogeneousForm, tol: float = 1e-8) -> bool:
    s = np.linalg.svd(conic_matrix(Q), compute_uv=False)
    return bool(s[-1] > tol * s[0])
