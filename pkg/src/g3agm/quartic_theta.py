"""Bitangents of a smooth plane quartic and level-2 combinatorics.

The 28 bitangents are found by eliminating the intercept from the two
"restriction is a perfect square" conditions on lines ``y = m x + c z`` of a
random unitary frame.  The elimination is carried out as a polynomial
eigenvalue problem in the slope ``m`` (the Sylvester matrix in ``c`` has
polynomial entries in ``m``), and every candidate is polished by Newton's
method on its two contact points in homogeneous coordinates.

Two-torsion classes are stored extensionally as their six bitangent pairs;
two pairs lie in one class iff their eight contact points are on a conic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.linalg
from scipy.signal import convolve2d

from .errors import AmbiguousRank, CountMismatch, NonGeneric
from .forms import HomogeneousForm, monomial_values
from .numkernel import RankCertificate, ToleranceProfile
from .plane import point_distance, proj_point, random_unitary

N_BITANGENTS = 28
N_CLASSES = 63


@dataclass(frozen=True, eq=False)
class Quartic:
    form: HomogeneousForm

    def __post_init__(self):
        if self.form.degree != 4 or self.form.nvars != 3:
            raise ValueError("a plane quartic is a ternary form of degree 4")

    @classmethod
    def from_dict(cls, terms: dict) -> "Quartic":
        return cls(HomogeneousForm.from_dict(terms))


@dataclass(frozen=True, eq=False)
class BitangentRecord:
    line: HomogeneousForm
    contacts: tuple
    residual: float

    def contact_array(self) -> np.ndarray:
        return np.array(self.contacts)


# ---------------------------------------------------------------------------
# bitangent solver


def _line_restriction(F: HomogeneousForm) -> list[np.ndarray]:
    """``a[k][i, j]``: coefficient of ``m^i c^j x^k`` in ``F(x, m x + c, 1)``."""
    a = [np.zeros((5, 5), dtype=complex) for _ in range(5)]
    for (i, j, _), f in F.to_dict().items():
        for r in range(j + 1):
            a[i + r][r, j - r] += f * comb(j, r)
    return a


def _padd(*ps):
    shape = np.max([p.shape for p in ps], axis=0)
    out = np.zeros(shape, dtype=complex)
    for p in ps:
        out[: p.shape[0], : p.shape[1]] += p
    return out


def _pmul(*ps):
    out = ps[0]
    for p in ps[1:]:
        out = convolve2d(out, p)
    return out


def _square_conditions(a):
    """The two polynomials in (m, c) forcing ``sum a_k x^k`` to be a square."""
    a0, a1, a2, a3, a4 = a
    g1 = _padd(8 * _pmul(a4, a4, a1), -4 * _pmul(a2, a3, a4), _pmul(a3, a3, a3))
    t = _padd(4 * _pmul(a2, a4), -_pmul(a3, a3))
    g2 = _padd(64 * _pmul(a4, a4, a4, a0), -_pmul(t, t))
    return g1, g2


def _slope_candidates(F: HomogeneousForm) -> list[tuple[complex, complex]]:
    """(m, c) candidates from the polynomial eigenproblem of the Sylvester matrix."""
    g1, g2 = _square_conditions(_line_restriction(F))
    d1, d2 = 3, 4
    deg_m = max(g1.shape[0], g2.shape[0])
    n = d1 + d2
    S = np.zeros((deg_m, n, n), dtype=complex)
    for k in range(d2):
        for s in range(min(d1 + 1, g1.shape[1])):
            S[: g1.shape[0], k, k + s] += g1[:, s]
    for k in range(d1):
        for s in range(min(d2 + 1, g2.shape[1])):
            S[: g2.shape[0], d2 + k, k + s] += g2[:, s]
    while deg_m > 1 and np.abs(S[deg_m - 1]).max() <= 1e-14 * np.abs(S).max():
        deg_m -= 1
    S = S[:deg_m] / np.abs(S).max()
    D = deg_m - 1
    A = np.zeros((n * D, n * D), dtype=complex)
    B = np.eye(n * D, dtype=complex)
    for i in range(D - 1):
        A[i * n:(i + 1) * n, (i + 1) * n:(i + 2) * n] = np.eye(n)
    for i in range(D):
        A[(D - 1) * n:, i * n:(i + 1) * n] = -S[i]
    B[(D - 1) * n:, (D - 1) * n:] = S[D]
    w, V = scipy.linalg.eig(A, B)
    out = []
    for m, v in zip(w, V.T):
        if not np.isfinite(m) or abs(m) > 1e6:
            continue
        u = v[:n]
        k = int(np.argmax(np.abs(u[:-1])))
        if abs(u[k]) == 0:
            continue
        out.append((complex(m), complex(u[k + 1] / u[k])))
    return out


def _contacts_from_chart(F: HomogeneousForm, m: complex, c: complex):
    a = _line_restriction(F)
    ak = [np.polynomial.polynomial.polyval2d(m, c, A) for A in a]
    if abs(ak[4]) < 1e-12:
        return None
    b = ak[3] / (2 * ak[4])
    d = (ak[2] / ak[4] - b * b) / 2
    xs = np.roots([1, b, d])
    return [np.array([x, m * x + c, 1.0], dtype=complex) for x in xs]


def _polish_contacts(F: HomogeneousForm, p1, p2, iters: int):
    """Newton on: F(p_i) = 0, tangent at p_i passes through p_j, p_i normalised."""
    p1, p2 = proj_point(p1), proj_point(p2)
    for _ in range(iters):
        a1, a2 = p1.conj(), p2.conj()
        g1, g2 = F.gradient(p1), F.gradient(p2)
        H1 = _hessian(F, p1)
        H2 = _hessian(F, p2)
        r = np.array([F(p1), F(p2), g1 @ p2, g2 @ p1, a1 @ p1 - 1, a2 @ p2 - 1])
        J = np.zeros((6, 6), dtype=complex)
        J[0, :3] = g1
        J[1, 3:] = g2
        J[2, :3] = H1 @ p2
        J[2, 3:] = g1
        J[3, :3] = g2
        J[3, 3:] = H2 @ p1
        J[4, :3] = a1
        J[5, 3:] = a2
        try:
            dp = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            break
        p1, p2 = p1 + dp[:3], p2 + dp[3:]
        if np.linalg.norm(dp) < 1e-15:
            break
    return proj_point(p1), proj_point(p2)


def _hessian(F: HomogeneousForm, p) -> np.ndarray:
    return np.array([F.partial(i).gradient(p) for i in range(3)])


def square_residual(F: HomogeneousForm, p1, p2) -> float:
    """How far ``F`` restricted to line(p1, p2) is from ``k u^2 v^2``."""
    c = F.binary_restriction(proj_point(p1), proj_point(p2))
    off = np.delete(c, 2)
    return float(np.linalg.norm(off) / np.linalg.norm(c))


def _candidate_bitangents(F: HomogeneousForm, U: np.ndarray, profile: ToleranceProfile):
    Ft = F.transform(U)
    found = []
    for m, c in _slope_candidates(Ft):
        pts = _contacts_from_chart(Ft, m, c)
        if pts is None:
            continue
        p1, p2 = (U @ p for p in pts)
        if point_distance(p1, p2) < 1e-8:
            continue
        p1, p2 = _polish_contacts(F, p1, p2, profile.max_newton_iters)
        if point_distance(p1, p2) < profile.eps_collision:
            continue
        res = square_residual(F, p1, p2)
        if res <= profile.eps_residual:
            found.append(BitangentRecord(HomogeneousForm.linear(proj_point(np.cross(p1, p2))),
                                         (p1, p2), res))
    return found


def _merge(records, new, tol=1e-7):
    for rec in new:
        for k, old in enumerate(records):
            if point_distance(old.line.coeffs, rec.line.coeffs) < tol:
                if rec.residual < old.residual:
                    records[k] = rec
                break
        else:
            records.append(rec)


def _sort_key(rec: BitangentRecord):
    v = rec.line.coeffs
    return tuple(np.round(np.concatenate([v.real, v.imag]), 7))


def _order_contacts(rec: BitangentRecord) -> BitangentRecord:
    p1, p2 = sorted(rec.contacts, key=lambda p: tuple(np.round(np.concatenate([p.real, p.imag]), 7)))
    return BitangentRecord(rec.line, (p1, p2), rec.residual)


def bitangents(C: Quartic, profile: ToleranceProfile | None = None) -> list[BitangentRecord]:
    """The 28 bitangents of a smooth quartic, in a deterministic order."""
    profile = profile or ToleranceProfile()
    F = C.form.normalized()
    records: list[BitangentRecord] = []
    for attempt in range(3):
        U = random_unitary(profile.rng(28, attempt))
        _merge(records, _candidate_bitangents(F, U, profile))
        if len(records) >= N_BITANGENTS:
            break
    if len(records) != N_BITANGENTS:
        raise CountMismatch(f"found {len(records)} bitangents, expected 28 "
                            "(singular or special quartic)", count=len(records))
    return sorted((_order_contacts(r) for r in records), key=_sort_key)


# ---------------------------------------------------------------------------
# syzygy and classes


def _conic_rows(points: np.ndarray) -> np.ndarray:
    pts = points / np.linalg.norm(points, axis=-1, keepdims=True)
    rows = monomial_values(2, pts)
    return rows / np.linalg.norm(rows, axis=-1, keepdims=True)


def syzygy_ratios(contacts: np.ndarray) -> np.ndarray:
    """``sigma_6 / sigma_5`` of the 8x6 conic matrices, batched over tetrads.

    ``contacts`` has shape ``(K, 8, 3)``.
    """
    s = np.linalg.svd(_conic_rows(contacts), compute_uv=False)
    return s[..., 5] / s[..., 4]


def _syzygy_decision(ratio: float, profile: ToleranceProfile) -> bool:
    if ratio < profile.eps_rank:
        return True
    if ratio > np.sqrt(profile.eps_rank):
        return False
    raise AmbiguousRank(f"syzygy test inconclusive (ratio {ratio:.2e})")


def is_syzygetic(bts, profile: ToleranceProfile | None = None) -> tuple[bool, RankCertificate]:
    """Do the 8 contact points of 4 bitangents lie on a conic?"""
    profile = profile or ToleranceProfile()
    if len(bts) != 4:
        raise ValueError("need four bitangents")
    pts = np.concatenate([b.contact_array() for b in bts])
    for i, j in itertools.combinations(range(8), 2):
        if point_distance(pts[i], pts[j]) < profile.eps_point:
            raise NonGeneric("contact points are not distinct")
    s = np.linalg.svd(_conic_rows(pts), compute_uv=False)
    ratio = s[5] / s[4]
    verdict = _syzygy_decision(ratio, profile)
    cert = RankCertificate(tuple(float(x) for x in s), 5 if verdict else 6,
                           float(ratio) if verdict else 0.0, "syzygy", (8, 6))
    return verdict, cert


def _pair(i, j) -> tuple[int, int]:
    if i == j:
        raise ValueError("a pair needs two distinct bitangents")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class TwoTorsionClass:
    """A nonzero 2-torsion class as its 6 bitangent pairs (0-based indices)."""

    pairs: tuple
    representative_pair: tuple

    def __post_init__(self):
        pairs = tuple(sorted(_pair(*p) for p in self.pairs))
        if len(pairs) != 6 or len({i for p in pairs for i in p}) != 12:
            raise CountMismatch("a two-torsion class has 6 disjoint pairs")
        object.__setattr__(self, "pairs", pairs)
        rep = _pair(*self.representative_pair)
        if rep not in pairs:
            raise ValueError("representative pair is not in the class")
        object.__setattr__(self, "representative_pair", rep)

    def __eq__(self, other):
        return isinstance(other, TwoTorsionClass) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    @property
    def support(self) -> frozenset:
        return frozenset(i for p in self.pairs for i in p)

    def partner(self, i: int) -> int:
        for a, b in self.pairs:
            if i == a:
                return b
            if i == b:
                return a
        raise KeyError(i)

    def with_representative(self, pair) -> "TwoTorsionClass":
        return TwoTorsionClass(self.pairs, pair)


def _contacts(bts) -> np.ndarray:
    return np.array([b.contact_array() for b in bts])


def _class_members(contacts: np.ndarray, pair, candidates, profile):
    i, j = pair
    if not candidates:
        return []
    tetrads = np.array([np.concatenate([contacts[i], contacts[j], contacts[c], contacts[d]])
                        for c, d in candidates])
    ratios = syzygy_ratios(tetrads)
    return [cd for cd, r in zip(candidates, ratios) if _syzygy_decision(r, profile)]


def alpha_class(bts, pair, profile: ToleranceProfile | None = None) -> TwoTorsionClass:
    """The class of ``theta_i - theta_j``: all pairs syzygetic with ``pair``."""
    profile = profile or ToleranceProfile()
    pair = _pair(*pair)
    contacts = _contacts(bts)
    rest = [k for k in range(len(bts)) if k not in pair]
    members = _class_members(contacts, pair, list(itertools.combinations(rest, 2)), profile)
    if len(members) != 5:
        raise CountMismatch(f"class of {pair} has {len(members) + 1} pairs, expected 6")
    return TwoTorsionClass(tuple([pair] + members), pair)


@dataclass
class ClassTable:
    """Exhaustive partition of the 378 bitangent pairs into 63 classes."""

    classes: list
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {p: k for k, cls in enumerate(self.classes) for p in cls.pairs}

    def class_of(self, i: int, j: int) -> TwoTorsionClass:
        return self.classes[self.index[_pair(i, j)]]

    def position(self, cls: TwoTorsionClass) -> int:
        return self.index[cls.pairs[0]]

    def add(self, a: TwoTorsionClass, b: TwoTorsionClass):
        """Class sum ``a + b``; ``None`` stands for zero."""
        if a == b:
            return None
        common = sorted(a.support & b.support)
        if not common:
            raise NonGeneric("classes share no bitangent")
        k = common[0]
        return self.class_of(a.partner(k), b.partner(k))


def classify_pairs(bts, profile: ToleranceProfile | None = None) -> ClassTable:
    profile = profile or ToleranceProfile()
    contacts = _contacts(bts)
    n = len(bts)
    remaining = set(itertools.combinations(range(n), 2))
    classes = []
    for pair in sorted(remaining):
        if pair not in remaining:
            continue
        cands = [cd for cd in sorted(remaining) if not set(cd) & set(pair)]
        members = _class_members(contacts, pair, cands, profile)
        if len(members) != 5:
            raise CountMismatch(f"class of {pair} has {len(members) + 1} pairs, expected 6")
        cls = TwoTorsionClass(tuple([pair] + members), pair)
        classes.append(cls)
        remaining -= set(cls.pairs)
    if len(classes) != N_CLASSES:
        raise CountMismatch(f"{len(classes)} classes, expected 63")
    return ClassTable(classes)


def weil_pairing(bts, a: TwoTorsionClass, b: TwoTorsionClass,
                 profile: ToleranceProfile | None = None) -> int:
    """Weil pairing of two classes through the syzygy test.

    Write ``a = [k - i]`` and ``b = [k - j]`` for a bitangent ``k`` common to
    both supports.  The pairing vanishes iff the triad ``{k, i, j}`` completes
    to a syzygetic tetrad, and the only candidate fourth member is the
    ``a``-partner of ``j``.
    """
    profile = profile or ToleranceProfile()
    if a == b:
        return 0
    common = sorted(a.support & b.support)
    if not common:
        raise NonGeneric("classes share no bitangent")
    k = common[0]
    i, j = a.partner(k), b.partner(k)
    if j not in a.support:
        return 1
    ok, _ = is_syzygetic([bts[k], bts[i], bts[j], bts[a.partner(j)]], profile)
    if not ok:
        raise AmbiguousRank("class table and syzygy test disagree")
    return 0


# ---------------------------------------------------------------------------
# flags

LABELS = (1, 2, 3, 4, 5, 6)


@dataclass(frozen=True)
class FlagSpec:
    """A distinguished pair of marked points plus a matching of the other four."""

    distinguished_pair: tuple
    partition: tuple

    def __post_init__(self):
        dp = tuple(sorted(self.distinguished_pair))
        part = tuple(sorted(tuple(sorted(p)) for p in self.partition))
        used = list(dp) + [i for p in part for i in p]
        if len(dp) != 2 or len(part) != 2 or sorted(used) != list(LABELS):
            raise ValueError(f"flag must split labels 1..6 disjointly, got {dp} / {part}")
        object.__setattr__(self, "distinguished_pair", dp)
        object.__setattr__(self, "partition", part)

    @property
    def others(self) -> tuple:
        return tuple(i for p in self.partition for i in p)

    @classmethod
    def parse(cls, text: str) -> "FlagSpec":
        """Parse ``"pair=1,2;partition=3-4,5-6"``."""
        fields = {}
        for chunk in text.replace(" ", "").split(";"):
            if chunk:
                key, _, value = chunk.partition("=")
                fields[key] = value
        try:
            pair = tuple(int(x) for x in fields["pair"].split(","))
            if "partition" in fields:
                part = tuple(tuple(int(x) for x in p.split("-")) for p in fields["partition"].split(","))
            else:
                rest = [i for i in LABELS if i not in pair]
                part = ((rest[0], rest[1]), (rest[2], rest[3]))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"cannot parse flag {text!r}") from exc
        return cls(pair, part)

    def format(self) -> str:
        a, b = self.distinguished_pair
        return f"pair={a},{b};partition=" + ",".join(f"{x}-{y}" for x, y in self.partition)


def perfect_matchings(labels) -> list:
    labels = list(labels)
    if not labels:
        return [()]
    first, rest = labels[0], labels[1:]
    out = []
    for k, other in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        out.extend(((first, other),) + m for m in perfect_matchings(remaining))
    return out


def enumerate_flags():
    """15 pairs, 15 matchings and 45 flags on the six marked points."""
    pairs = list(itertools.combinations(LABELS, 2))
    matchings = perfect_matchings(LABELS)
    flags = [FlagSpec(m[k], tuple(p for i, p in enumerate(m) if i != k))
             for m in matchings for k in range(3)]
    return pairs, matchings, flags
