#!/usr/bin/env python3
"""Derive the diagonal-norm first-derivative SBP operators and write data/sbp_coefficients.txt.

For boundary order p (interior order 2p) and closure width b, the unknowns are the
norm weights H_0..H_{b-1} and the strictly upper part of the b x b boundary block of Q
(the lower part follows from Q + Q^T = diag(-1, 0, ...)).  The accuracy conditions
Q x^m = H m x^(m-1) for m = 0..p on the closure rows are linear in these unknowns and
are solved in exact rational arithmetic.

Remaining freedom is fixed as follows:
  * if the norm is not unique (p = 5), the one-parameter family of norms is fixed by
    maximising the smallest norm weight;
  * the remaining Q parameters minimise the H-weighted squared truncation error of the
    closure rows for x^(p+1).

Usage: gen_sbp_coefficients.py OUTPUT_FILE
"""
from fractions import Fraction as F
import sys

import mpmath

mpmath.mp.dps = 40

CLOSURE_WIDTH = {1: 1, 2: 4, 3: 6, 4: 8, 5: 11}


def central(p):
    # a_1..a_p for the order-2p central difference, h = 1
    n = p
    A = [[F(2 * j ** m) for j in range(1, n + 1)] for m in range(1, 2 * p, 2)]
    rhs = [F(1)] + [F(0)] * (n - 1)
    sol, null = solve_exact(A, rhs)
    assert not null
    return sol


def rref(A, rhs):
    rows = [list(r) + [b] for r, b in zip(A, rhs)]
    ncol = len(A[0])
    piv_cols = []
    r = 0
    for c in range(ncol):
        pr = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            raise RuntimeError("inconsistent system")
    return rows[:r], piv_cols


def solve_exact(A, rhs):
    """Particular solution (free vars = 0) and nullspace basis."""
    ncol = len(A[0])
    rows, piv = rref(A, rhs)
    free = [c for c in range(ncol) if c not in piv]
    part = [F(0)] * ncol
    for r, c in zip(rows, piv):
        part[c] = r[-1]
    null = []
    for f in free:
        v = [F(0)] * ncol
        v[f] = F(1)
        for r, c in zip(rows, piv):
            v[c] = -r[f]
        null.append(v)
    return part, null


def build(p, b):
    a = central(p)
    pairs = [(i, j) for i in range(b) for j in range(i + 1, b)]
    nunk = b + len(pairs)
    sidx = {pr: b + k for k, pr in enumerate(pairs)}

    def q_entry(i, j):
        """Returns (constant, {unknown: coeff})."""
        if i < b and j < b:
            if i == j:
                return (F(-1, 2) if i == 0 else F(0)), {}
            if i < j:
                return F(0), {sidx[(i, j)]: F(1)}
            return F(0), {sidx[(j, i)]: F(-1)}
        d = j - i
        if d == 0 or abs(d) > p:
            return F(0), {}
        return (a[d - 1] if d > 0 else -a[-d - 1]), {}

    def row_equation(k, m):
        coeffs = [F(0)] * nunk
        const = F(0)
        for j in range(b + p):
            xm = F(j) ** m if not (j == 0 and m == 0) else F(1)
            c0, lin = q_entry(k, j)
            const += c0 * xm
            for u, cf in lin.items():
                coeffs[u] += cf * xm
        # - H_k m x_k^(m-1)
        if m >= 1:
            dx = F(m) * (F(k) ** (m - 1) if not (k == 0 and m == 1) else F(1))
            coeffs[k] -= dx
        return coeffs, -const

    A, rhs = [], []
    for k in range(b):
        for m in range(p + 1):
            c, r = row_equation(k, m)
            A.append(c)
            rhs.append(r)
    part, null = solve_exact(A, rhs)
    def trunc_rows(m):
        return [row_equation(k, m) for k in range(b)]

    return a, pairs, part, null, trunc_rows


def lin_comb(part, null, z):
    v = list(part)
    for zi, n in zip(z, null):
        if zi != 0:
            v = [x + zi * y for x, y in zip(v, n)]
    return v


def choose(p, b):
    a, pairs, part, null, trunc_rows = build(p, b)
    # Split nullspace directions into those that move H and those that do not.
    h_dirs = [n for n in null if any(n[k] != 0 for k in range(b))]
    if h_dirs:
        # reduce to a basis where only the first vector touches H
        assert len(h_dirs) >= 1
        base = h_dirs[0]
        k0 = next(k for k in range(b) if base[k] != 0)
        newnull = [base]
        for n in null:
            if n is base:
                continue
            f = n[k0] / base[k0]
            m = [x - f * y for x, y in zip(n, base)]
            assert all(m[k] == 0 for k in range(b)), "norm family has more than one parameter"
            newnull.append(m)
        null = newnull
        # maximise min_k H_k(t) along part + t*base : piecewise-linear max-min, solve exactly
        lo, hi = F(-10 ** 9), F(10 ** 9)
        for k in range(b):
            c0, c1 = part[k], base[k]
            if c1 > 0:
                lo = max(lo, -c0 / c1)
            elif c1 < 0:
                hi = min(hi, -c0 / c1)
            elif c0 <= 0:
                raise RuntimeError("no positive norm")
        if not lo < hi:
            raise RuntimeError("no positive norm")
        cands = {lo, hi}
        for i in range(b):
            for j in range(i + 1, b):
                if base[i] != base[j]:
                    t = (part[j] - part[i]) / (base[i] - base[j])
                    if lo < t < hi:
                        cands.add(t)
        best = max(cands, key=lambda t: min(part[k] + t * base[k] for k in range(b)))
        part = [x + best * y for x, y in zip(part, base)]
        null = null[1:]
    H = part[:b]
    assert all(h > 0 for h in H)
    # least-squares truncation error in the remaining directions, weights 1/H_k^2;
    # degrees p+1, p+2, ... are used in turn until no freedom is left
    degree = p + 1
    while null:
        trunc = trunc_rows(degree)
        nz = len(null)
        G = [[F(0)] * nz for _ in range(nz)]
        g = [F(0)] * nz
        for k, (c, r) in enumerate(trunc):
            w = 1 / (H[k] * H[k])
            res0 = sum(ci * xi for ci, xi in zip(c, part)) - r
            dres = [sum(ci * xi for ci, xi in zip(c, n)) for n in null]
            for i in range(nz):
                g[i] -= w * dres[i] * res0
                for j in range(nz):
                    G[i][j] += w * dres[i] * dres[j]
        z, zn = solve_exact(G, g)
        part = lin_comb(part, null, z)
        null = [lin_comb([F(0)] * len(part), null, v) for v in zn]
        degree += 1
    H = part[:b]
    Qb = [[F(0)] * b for _ in range(b)]
    Qb[0][0] = F(-1, 2)
    for (i, j), u in zip(pairs, range(b, b + len(pairs))):
        Qb[i][j] = part[u]
        Qb[j][i] = -part[u]
    return a, H, Qb


def fmt(x):
    return mpmath.nstr(mpmath.mpf(x.numerator) / x.denominator, 25, min_fixed=-1, max_fixed=1,
                       strip_zeros=False) if x != 0 else "0"


def main():
    out = sys.argv[1]
    lines = [
        "# Diagonal-norm first-derivative SBP operators on a unit-spaced grid.",
        "# Generated by tools/gen_sbp_coefficients.py; see data/README.md for the format.",
    ]
    for q in range(1, 6):
        b = CLOSURE_WIDTH[q]
        a, H, Qb = choose(q, b)
        lines.append("")
        lines.append(f"[operator {q}]")
        lines.append(f"interior_order {2 * q}")
        lines.append(f"closure_width {b}")
        lines.append("central " + " ".join(fmt(x) for x in a))
        lines.append("norm " + " ".join(fmt(x) for x in H))
        for k in range(b):
            lines.append(f"qrow {k} " + " ".join(fmt(x) for x in Qb[k]))
        print(f"q={q}: b={b} min H={float(min(H)):.6f}", file=sys.stderr)
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
