"""Homogeneous forms over the complex numbers.

A form of degree ``d`` in ``n`` variables is stored as a dense coefficient
vector aligned with :func:`monomials`, which lists exponent tuples in
descending lexicographic order (``x0^d`` first, ``x_{n-1}^d`` last).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def monomials(degree: int, nvars: int) -> tuple[tuple[int, ...], ...]:
    if nvars == 1:
        return ((degree,),)
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(degree - first, nvars - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _exponent_array(degree: int, nvars: int) -> np.ndarray:
    arr = np.array(monomials(degree, nvars), dtype=int).reshape(-1, nvars)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _index(degree: int, nvars: int) -> dict:
    return {e: k for k, e in enumerate(monomials(degree, nvars))}


@lru_cache(maxsize=None)
def _product_table(da: int, db: int, nvars: int) -> np.ndarray:
    """Target index in degree da+db for every pair of monomial indices."""
    target = _index(da + db, nvars)
    ma, mb = monomials(da, nvars), monomials(db, nvars)
    table = np.empty((len(ma), len(mb)), dtype=int)
    for i, ea in enumerate(ma):
        for j, eb in enumerate(mb):
            table[i, j] = target[tuple(x + y for x, y in zip(ea, eb))]
    table.setflags(write=False)
    return table


def monomial_values(degree: int, points) -> np.ndarray:
    """Rows of monomial values, shape ``(..., n_monomials)``."""
    p = np.asarray(points, dtype=complex)
    exps = _exponent_array(degree, p.shape[-1])
    return np.prod(p[..., None, :] ** exps, axis=-1)


def monomial_gradients(degree: int, point) -> np.ndarray:
    """Matrix ``G`` with ``G @ coeffs`` the gradient of a form at ``point``."""
    p = np.asarray(point, dtype=complex)
    n = p.shape[-1]
    exps = _exponent_array(degree, n)
    out = np.zeros((n, len(exps)), dtype=complex)
    for i in range(n):
        lowered = exps.copy()
        lowered[:, i] -= 1
        mask = exps[:, i] > 0
        vals = np.prod(p[None, :] ** np.where(mask[:, None], lowered, 0), axis=-1)
        out[i] = np.where(mask, exps[:, i] * vals, 0)
    return out


def _phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0 if na == nb else 1.0
    a = a / na
    b = b / nb
    inner = np.vdot(b, a)
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Unit norm, first entry of (near) largest magnitude made positive real."""
    v = np.asarray(v, dtype=complex)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("zero vector has no projective class")
    v = v / nv
    mags = np.abs(v)
    k = int(np.argmax(mags >= mags.max() * (1 - 1e-9)))
    return v * (abs(v[k]) / v[k])


@dataclass(frozen=True, eq=False)
class HomogeneousForm:
    degree: int
    nvars: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        expected = len(monomials(self.degree, self.nvars))
        if c.size != expected:
            raise ValueError(
                f"degree {self.degree} form in {self.nvars} variables needs "
                f"{expected} coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_dict(cls, terms: dict, nvars: int | None = None) -> "HomogeneousForm":
        if not terms:
            raise ValueError("empty form")
        keys = [tuple(int(x) for x in k) for k in terms]
        degree = sum(keys[0])
        nvars = nvars or len(keys[0])
        idx = _index(degree, nvars)
        c = np.zeros(len(idx), dtype=complex)
        for k, v in zip(keys, terms.values()):
            if sum(k) != degree or len(k) != nvars:
                raise ValueError(f"monomial {k} is not of degree {degree}")
            c[idx[k]] += complex(v)
        return cls(degree, nvars, c)

    @classmethod
    def linear(cls, coords) -> "HomogeneousForm":
        coords = np.asarray(coords, dtype=complex)
        return cls(1, coords.size, coords)

    def to_dict(self) -> dict:
        return {e: complex(c) for e, c in zip(monomials(self.degree, self.nvars), self.coeffs)
                if c != 0}

    # -- evaluation -------------------------------------------------------
    @property
    def exponents(self) -> np.ndarray:
        return _exponent_array(self.degree, self.nvars)

    def __call__(self, p):
        return monomial_values(self.degree, p) @ self.coeffs

    def gradient(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=complex)
        if p.ndim == 1:
            return monomial_gradients(self.degree, p) @ self.coeffs
        return np.array([monomial_gradients(self.degree, q) @ self.coeffs for q in p])

    def partial(self, i: int) -> "HomogeneousForm":
        if self.degree == 0:
            return HomogeneousForm(0, self.nvars, [0])
        idx = _index(self.degree - 1, self.nvars)
        c = np.zeros(len(idx), dtype=complex)
        for e, v in zip(monomials(self.degree, self.nvars), self.coeffs):
            if e[i]:
                lowered = list(e)
                lowered[i] -= 1
                c[idx[tuple(lowered)]] += e[i] * v
        return HomogeneousForm(self.degree - 1, self.nvars, c)

    def residual(self, p) -> float:
        """Scale-free value ``|F(p)| / (|F| |p|^d)``."""
        p = np.asarray(p, dtype=complex)
        return float(abs(self(p)) / (self.norm() * np.linalg.norm(p) ** self.degree))

    def binary_restriction(self, p, q) -> np.ndarray:
        """Coefficients ``c_k`` of ``F(p + s q) = sum c_k s^k`` (ascending)."""
        d = self.degree
        n = d + 1
        s = np.exp(2j * np.pi * np.arange(n) / n)
        pts = np.asarray(p, dtype=complex)[None, :] + s[:, None] * np.asarray(q, dtype=complex)[None, :]
        return np.fft.fft(self(pts)) / n

    # -- algebra ----------------------------------------------------------
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        self._check_compatible(other)
        return HomogeneousForm(self.degree, self.nvars, self.coeffs + other.coeffs)

    def __sub__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        self._check_compatible(other)
        return HomogeneousForm(self.degree, self.nvars, self.coeffs - other.coeffs)

    def __neg__(self):
        return HomogeneousForm(self.degree, self.nvars, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, HomogeneousForm):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            table = _product_table(self.degree, other.degree, self.nvars)
            out = np.zeros(len(monomials(self.degree + other.degree, self.nvars)), dtype=complex)
            np.add.at(out, table, np.outer(self.coeffs, other.coeffs))
            return HomogeneousForm(self.degree + other.degree, self.nvars, out)
        return HomogeneousForm(self.degree, self.nvars, self.coeffs * complex(other))

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if (self.degree, self.nvars) != (other.degree, other.nvars):
            raise ValueError("forms of different shape")

    def transform(self, A) -> "HomogeneousForm":
        """The form ``p -> F(A p)``."""
        A = np.asarray(A, dtype=complex)
        n = self.nvars
        rows = [HomogeneousForm(1, n, A[i]) for i in range(n)]
        powers = [[HomogeneousForm(0, n, [1.0])] for _ in range(n)]
        for i in range(n):
            for _ in range(self.degree):
                powers[i].append(powers[i][-1] * rows[i])
        out = np.zeros(len(self.coeffs), dtype=complex)
        for e, c in zip(monomials(self.degree, n), self.coeffs):
            if c == 0:
                continue
            term = powers[0][e[0]]
            for i in range(1, n):
                term = term * powers[i][e[i]]
            out += c * term.coeffs
        return HomogeneousForm(self.degree, n, out)

    def lift(self, nvars: int) -> "HomogeneousForm":
        """The same polynomial viewed in ``nvars`` variables (new ones unused)."""
        extra = nvars - self.nvars
        if extra < 0:
            raise ValueError("cannot drop variables")
        terms = {e + (0,) * extra: c for e, c in zip(monomials(self.degree, self.nvars), self.coeffs)}
        idx = _index(self.degree, nvars)
        c = np.zeros(len(idx), dtype=complex)
        for e, v in terms.items():
            c[idx[e]] = v
        return HomogeneousForm(self.degree, nvars, c)

    def normalized(self) -> "HomogeneousForm":
        """Max coefficient magnitude 1 with its phase made real positive."""
        c = self.coeffs
        m = np.abs(c).max()
        if m == 0:
            raise ValueError("zero form")
        k = int(np.argmax(np.abs(c) >= m * (1 - 1e-9)))
        return HomogeneousForm(self.degree, self.nvars, c / c[k])

    def distance(self, other: "HomogeneousForm") -> float:
        """Projective coefficient distance (unit norm, best phase)."""
        self._check_compatible(other)
        return _phase_aligned_distance(self.coeffs, other.coeffs)

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.abs(self.coeffs).max() <= tol)

    def __repr__(self):
        return f"HomogeneousForm(degree={self.degree}, nvars={self.nvars}, coeffs={np.round(self.coeffs, 6)})"

