"""Independent bitangent oracle: random-start Newton on the square condition.

For lines ``y = m x + c`` (and ``x = m y + c`` for the lines missed by that
chart) the restriction of the quartic is required to equal
``a4 (x^2 + b x + d)^2``.  The 4x4 system in (m, c, b, d) is solved by plain
Newton with finite-difference Jacobians from many random starts; converged
lines are deduplicated.  Nothing here shares code with the package solver.

The frozen result is written to tests/data/oracle_bitangents.json.
"""
import argparse
import json
from pathlib import Path

import numpy as np

NODES = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
VANDER_INV = np.linalg.inv(np.vander(NODES, 5, increasing=True))


def load_terms(path):
    doc = json.loads(Path(path).read_text())
    return [(tuple(int(x) for x in k.split(",")), float(v)) for k, v in doc["quartic"].items()]


def evaluate(terms, x, y, z):
    return sum(c * x ** i * y ** j * z ** k for (i, j, k), c in terms)


def restriction(terms, m, c, swap):
    """Coefficients a_0..a_4 (in x) of F on the chart line, batched over m, c."""
    x = NODES[:, None]
    y = m[None, :] * x + c[None, :]
    vals = evaluate(terms, y, x, 1.0) if swap else evaluate(terms, x, y, 1.0)
    return VANDER_INV @ vals


def residual(terms, v, swap):
    m, c, b, d = v
    a = restriction(terms, m, c, swap)
    return np.array([a[3] - 2 * b * a[4], a[2] - (b * b + 2 * d) * a[4],
                     a[1] - 2 * b * d * a[4], a[0] - d * d * a[4]]) / np.abs(a).max(axis=0)


def newton(terms, v, swap, iters=60, h=1e-7):
    for _ in range(iters):
        r = residual(terms, v, swap)
        J = np.empty((v.shape[1], 4, 4), dtype=complex)
        for k in range(4):
            dv = np.zeros_like(v)
            dv[k] = h
            J[:, :, k] = ((residual(terms, v + dv, swap) - residual(terms, v - dv, swap)) / (2 * h)).T
        ok = np.isfinite(J).all(axis=(1, 2)) & (np.abs(np.linalg.det(J)) > 1e-300)
        step = np.zeros_like(v)
        step[:, ok] = np.linalg.solve(J[ok], -r.T[ok][..., None])[..., 0].T
        v = v + step
        v[:, ~np.isfinite(v).all(axis=0)] = 0
    return v, np.abs(residual(terms, v, swap)).max(axis=0)


def two_double_roots(terms, m, c, swap, tol=1e-5):
    a = restriction(terms, np.array([m]), np.array([c]), swap)[:, 0]
    r = np.roots(a[::-1])
    if len(r) != 4:
        return False
    # best split of the four roots into two pairs
    gaps = [max(abs(r[i] - r[j]), abs(r[k] - r[l])) / (1 + np.abs(r).max())
            for (i, j), (k, l) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))]
    return min(gaps) < tol


def line_vector(m, c, swap):
    # y - m x - c z = 0, or x - m y - c z = 0
    v = np.array([1, -m, -c]) if swap else np.array([-m, 1, -c])
    return v / np.linalg.norm(v)


def oracle(terms, starts, seed):
    rng = np.random.default_rng(seed)
    found = []
    for swap in (False, True):
        v0 = (rng.normal(size=(4, starts)) + 1j * rng.normal(size=(4, starts))) * 2
        v, res = newton(terms, v0, swap)
        for col in np.where(res < 1e-11)[0]:
            m, c, b, d = v[:, col]
            if abs(b * b - 4 * d) < 1e-6 or abs(m) > 1e6 or not two_double_roots(terms, m, c, swap):
                continue
            L = line_vector(m, c, swap)
            if all(1 - abs(np.vdot(f, L)) > 1e-10 for f in found):
                found.append(L)
    return found


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("configs", nargs="*", default=["fixtures/trott.json", "fixtures/fixture.json"])
    ap.add_argument("--starts", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--out", default="tests/data/oracle_bitangents.json")
    args = ap.parse_args()
    out = {}
    for path in args.configs:
        lines = oracle(load_terms(path), args.starts, args.seed)
        print(f"{path}: {len(lines)} bitangents")
        out[Path(path).name] = [[[z.real, z.imag] for z in L] for L in lines]
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
