"""Numeric foundation: tolerances, univariate roots, nullspaces, resultants."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import comb

import numpy as np

from .errors import AmbiguousRank, CommonComponent, NonConvergence
from .forms import HomogeneousForm, monomials

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ToleranceProfile:
    eps_point: float = 1e-9
    eps_rank: float = 1e-8
    eps_residual: float = 1e-8
    max_newton_iters: int = 50
    seed: int = 0
    precision: str = "double"

    def __post_init__(self):
        for name in ("eps_point", "eps_rank", "eps_residual"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be positive")
        if self.precision not in ("double", "extended"):
            raise ValueError(f"unknown precision {self.precision!r}")

    @property
    def eps_collision(self) -> float:
        # distinctness threshold for computed points; double roots are only
        # accurate to about sqrt(machine eps), so eps_point alone is too tight
        return float(np.sqrt(self.eps_point))

    def rng(self, *salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, *salt])

    def escalated(self) -> "ToleranceProfile":
        return replace(self, precision="extended")


@dataclass(frozen=True)
class RankCertificate:
    singular_values: tuple
    claimed_rank: int
    gap_ratio: float
    label: str = ""
    shape: tuple = ()

    def passes(self, eps_rank: float) -> bool:
        return self.gap_ratio < eps_rank

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "singular_values": [float(s) for s in self.singular_values],
            "claimed_rank": self.claimed_rank,
            "gap_ratio": float(self.gap_ratio),
            "shape": list(self.shape),
        }


@dataclass(frozen=True, eq=False)
class UnivariatePoly:
    """Polynomial with ascending complex coefficients."""

    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(1, complex))

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex).reshape(-1)
        if c.size == 0:
            c = np.zeros(1, complex)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_roots(cls, roots, leading=1.0) -> "UnivariatePoly":
        c = np.array([leading], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coefficients)[0]
        return int(nz[-1]) if nz.size else -1

    def trimmed(self, rel: float = 0.0) -> "UnivariatePoly":
        c = self.coefficients
        cutoff = rel * np.abs(c).max() if c.size else 0
        k = c.size
        while k > 1 and abs(c[k - 1]) <= cutoff:
            k -= 1
        return UnivariatePoly(c[:k])

    def __call__(self, z):
        return np.polyval(self.coefficients[::-1], z)

    def derivative(self) -> "UnivariatePoly":
        c = self.coefficients
        return UnivariatePoly(c[1:] * np.arange(1, c.size)) if c.size > 1 else UnivariatePoly([0])

    def is_zero(self) -> bool:
        return not np.any(self.coefficients)


# ---------------------------------------------------------------------------
# roots


def _initial_radii(c: np.ndarray) -> np.ndarray:
    """Newton-polygon starting radii (upper convex hull of log|c_k|)."""
    n = c.size - 1
    with np.errstate(divide="ignore"):
        y = np.log(np.abs(c))
    pts = [k for k in range(n + 1) if np.isfinite(y[k])]
    hull = []
    for k in pts:
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            if (y[j] - y[i]) * (k - i) <= (y[k] - y[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    radii = np.empty(n)
    for i, j in zip(hull[:-1], hull[1:]):
        radii[i:j] = np.exp((y[i] - y[j]) / (j - i))
    return radii


def _aberth(c: np.ndarray, max_iter: int, z0=None) -> tuple[np.ndarray, bool]:
    n = c.size - 1
    desc = c[::-1]
    ddesc = np.polyder(desc)
    if z0 is None:
        radii = _initial_radii(c)
        angles = 2 * np.pi * np.arange(n) / n + 0.4
        z = radii * np.exp(1j * angles)
    else:
        z = np.array(z0, dtype=complex)
    absc = np.abs(desc)
    active = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        p = np.polyval(desc, z)
        bound = np.polyval(absc, np.abs(z)) * EPS * 4 * (n + 1)
        active &= np.abs(p) > bound
        if not active.any():
            return z, True
        dp = np.polyval(ddesc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = (1.0 / diff).sum(axis=1)
            w = ratio / (1 - ratio * s)
        w = np.where(np.isfinite(w), w, 1e-3 * (1 + np.abs(z)))
        z = np.where(active, z - w, z)
    p = np.polyval(desc, z)
    bound = np.polyval(absc, np.abs(z)) * EPS * 4 * (n + 1)
    # stalled iterates on multiple roots still satisfy a loose backward bound
    return z, bool(np.all(np.abs(p) <= bound * 1e6))


def _extended_roots(c: np.ndarray, dps: int = 40) -> np.ndarray:
    import mpmath

    with mpmath.workdps(dps):
        coeffs = [mpmath.mpc(complex(v)) for v in c[::-1]]
        try:
            rts = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * dps)
        except mpmath.libmp.libhyper.NoConvergence as exc:
            raise NonConvergence("extended-precision root finding failed") from exc
    return np.array([complex(r) for r in rts])


def _taylor_small(c: np.ndarray, z: complex, k: int, tol: float) -> bool:
    """Is ``z`` a root of multiplicity >= k up to relative perturbation ``tol``?"""
    n = c.size - 1
    absz = abs(z)
    for j in range(k):
        t = sum(c[i] * comb(i, j) * z ** (i - j) for i in range(j, n + 1))
        b = sum(abs(c[i]) * comb(i, j) * absz ** (i - j) for i in range(j, n + 1))
        if abs(t) > tol * b:
            return False
    return True


def _refine_center(c: np.ndarray, z: complex, k: int) -> complex:
    """Newton on the (k-1)-th derivative, where a k-fold root is simple."""
    d = np.polyder(c[::-1], k - 1)
    dd = np.polyder(d)
    for _ in range(5):
        den = np.polyval(dd, z)
        if den == 0:
            break
        step = np.polyval(d, z) / den
        if not abs(step) < 1e-6 * (1 + abs(z)):
            break
        z = z - step
    return complex(z)


def _single_linkage(z: np.ndarray, radius: float) -> list[list[int]]:
    n = z.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = 1 + max(abs(z[i]), abs(z[j]))
            if abs(z[i] - z[j]) <= radius * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _cluster(c, z, idx, radius, profile, out):
    for group in _single_linkage(z[idx], radius):
        members = [idx[g] for g in group]
        if len(members) == 1:
            out.append((complex(z[members[0]]), 1))
            continue
        center = _refine_center(c, complex(np.mean(z[members])), len(members))
        if radius <= profile.eps_point or _taylor_small(c, center, len(members), 1e-3 * profile.eps_residual):
            out.append((center, len(members)))
        else:
            _cluster(c, z, members, radius / 100, profile, out)


def roots_univariate(p: UnivariatePoly, profile: ToleranceProfile | None = None) -> list[tuple[complex, int]]:
    """Roots with multiplicities, clustered; sorted by (real, imag)."""
    profile = profile or ToleranceProfile()
    q = p.trimmed()
    c = q.coefficients
    if q.degree < 1:
        raise ValueError("roots_univariate needs degree >= 1")
    c = c / np.abs(c).max()
    # exact zero roots
    nzero = int(np.argmax(c != 0))
    c = c[nzero:]
    roots: list[complex] = [0j] * nzero
    if c.size > 1:
        if profile.precision == "extended":
            z = _extended_roots(c)
        else:
            z, ok = _aberth(c, 40 * (c.size + 10))
            if not ok:
                z, ok = _aberth(c, 40 * (c.size + 10), z0=np.roots(c[::-1]) * (1 + 1e-12))
            if not ok:
                z = _extended_roots(c)
        roots.extend(complex(v) for v in z)
    z = np.array(roots, dtype=complex)
    full = q.coefficients / np.abs(q.coefficients).max()
    out: list[tuple[complex, int]] = []
    _cluster(full, z, list(range(z.size)), 1e-3, profile, out)
    out.sort(key=lambda r: (round(r[0].real, 12), round(r[0].imag, 12)))
    return out


def expand_roots(roots, leading: complex = 1.0) -> UnivariatePoly:
    flat = [r for r, m in roots for _ in range(m)]
    return UnivariatePoly.from_roots(flat, leading)


# ---------------------------------------------------------------------------
# nullspace


def _svd(M: np.ndarray, profile: ToleranceProfile):
    if profile.precision == "extended":
        import mpmath

        with mpmath.workdps(40):
            A = mpmath.matrix([[mpmath.mpc(complex(x)) for x in row] for row in M])
            U, S, V = mpmath.svd_c(A, full_matrices=True)
            s = np.array([float(S[i]) for i in range(min(M.shape))])
            Vh = np.array([[complex(V[i, j]) for j in range(V.cols)] for i in range(V.rows)])
        return s, Vh
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    return s, Vh


def nullspace(M, profile: ToleranceProfile | None = None, dim: int | None = None,
              label: str = "") -> tuple[np.ndarray, RankCertificate]:
    """Orthonormal nullspace basis (columns) with a rank certificate.

    With ``dim`` given the claimed rank is ``ncols - dim``; otherwise the rank
    is placed at the first singular value drop below ``eps_rank``.
    """
    profile = profile or ToleranceProfile()
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.size == 0:
        raise ValueError("empty matrix")
    m, n = M.shape
    s, Vh = _svd(M, profile)
    sv = np.zeros(n)
    sv[: s.size] = s
    if dim is None:
        rank = n
        for r in range(n):
            if sv[r] == 0 or (r > 0 and sv[r] <= profile.eps_rank * sv[r - 1]):
                rank = r
                break
    else:
        if not 0 <= dim <= n:
            raise ValueError("bad nullspace dimension")
        rank = n - dim
    if rank == 0:
        gap = 0.0 if sv[0] == 0 else np.inf
    elif rank == n:
        gap = 0.0
    else:
        gap = sv[rank] / sv[rank - 1] if sv[rank - 1] > 0 else np.inf
    cert = RankCertificate(tuple(float(x) for x in sv), rank, float(gap), label, (m, n))
    if not gap < profile.eps_rank:
        raise AmbiguousRank(
            f"no singular value gap at rank {rank} (ratio {gap:.3e})", certificate=cert)
    basis = Vh[rank:].conj().T
    if basis.size:
        normM = sv[0]
        res = np.linalg.norm(M @ basis, axis=0)
        if np.any(res > profile.eps_residual * max(normM, 1e-300)):
            raise AmbiguousRank("nullspace residual too large", certificate=cert)
    return basis, cert


def rank_certificate(M, claimed_rank: int, label: str = "") -> RankCertificate:
    """Certificate for a claimed rank without raising."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    n = M.shape[1]
    s = np.linalg.svd(M, compute_uv=False)
    sv = np.zeros(n)
    sv[: s.size] = s
    if claimed_rank >= n:
        gap = 0.0
    elif claimed_rank == 0:
        gap = 0.0 if sv[0] == 0 else np.inf
    else:
        gap = sv[claimed_rank] / sv[claimed_rank - 1] if sv[claimed_rank - 1] > 0 else np.inf
    return RankCertificate(tuple(float(x) for x in sv), claimed_rank, float(gap), label, M.shape)


# ---------------------------------------------------------------------------
# resultants


def _coefficient_table(f: HomogeneousForm, elim: int, free: int):
    """``table[k]`` lists (coefficient, power of free variable) for elim^k."""
    table = [[] for _ in range(f.degree + 1)]
    for e, c in zip(monomials(f.degree, f.nvars), f.coeffs):
        if c != 0:
            table[e[elim]].append((c, e[free]))
    return table


def _sylvester(fc: np.ndarray, gc: np.ndarray) -> np.ndarray:
    """Sylvester matrix from descending coefficient vectors."""
    m, n = fc.size - 1, gc.size - 1
    S = np.zeros((m + n, m + n), dtype=complex)
    for i in range(n):
        S[i, i:i + m + 1] = fc
    for i in range(m):
        S[n + i, i:i + n + 1] = gc
    return S


def resultant_eliminate(f: HomogeneousForm, g: HomogeneousForm, eliminated: int = 1,
                        chart: int | None = None) -> UnivariatePoly:
    """Resultant of ``f, g`` w.r.t. variable ``eliminated``.

    The result is a polynomial in the remaining free variable, with the
    ``chart`` variable set to 1.  Computed by evaluating Sylvester
    determinants at roots of unity and interpolating.
    """
    if f.nvars != 3 or g.nvars != 3:
        raise ValueError("resultant_eliminate works on ternary forms")
    others = [i for i in range(3) if i != eliminated]
    if chart is None:
        chart = others[-1]
    if chart not in others:
        raise ValueError("chart variable must differ from the eliminated one")
    free = [i for i in others if i != chart][0]
    df, dg = f.degree, g.degree
    if df == 0 or dg == 0:
        raise ValueError("forms must have positive degree")
    ft = _coefficient_table(f, eliminated, free)
    gt = _coefficient_table(g, eliminated, free)
    N = df * dg + 1
    u = np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.empty(N, dtype=complex)
    hadamard = np.empty(N)
    for j, uj in enumerate(u):
        fc = np.array([sum(c * uj ** a for c, a in ft[k]) for k in range(df, -1, -1)])
        gc = np.array([sum(c * uj ** a for c, a in gt[k]) for k in range(dg, -1, -1)])
        S = _sylvester(fc, gc)
        vals[j] = np.linalg.det(S)
        hadamard[j] = np.prod(np.linalg.norm(S, axis=1))
    if np.all(np.abs(vals) <= 1e-11 * hadamard):
        raise CommonComponent("resultant vanishes identically")
    coeffs = np.fft.fft(vals) / N
    coeffs[np.abs(coeffs) <= 1e-14 * np.abs(coeffs).max()] = 0
    return UnivariatePoly(coeffs)
