"""Exact integer matrix routines: HNF, SNF, kernels, determinants, LLL.

Everything here works on plain Python ints (lists of lists), so results are
exact regardless of magnitude.  Matrices are small (rank <= 32), which keeps
the classical O(n^3)-ish algorithms perfectly adequate.
"""

from __future__ import annotations

import bisect


def mat_copy(m):
    return [list(row) for row in m]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def vec_mat(v, a):
    ncols = len(a[0]) if a else 0
    return [sum(v[i] * a[i][j] for i in range(len(v))) for j in range(ncols)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def bareiss_det(m):
    """Determinant by fraction-free Bareiss elimination (no floating point)."""
    n = len(m)
    if n == 0:
        return 1
    a = mat_copy(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def hnf(rows, ncols=None):
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns the canonical basis: row echelon with positive pivots, entries
    above a pivot reduced into [0, pivot).  Zero rows are dropped.  Two
    generating sets span the same lattice iff their HNFs are equal.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    basis = []  # echelon rows, pivot columns strictly increasing
    pivcol = []
    for vec in rows:
        vec = list(vec)
        while True:
            j = next((k for k, x in enumerate(vec) if x), None)
            if j is None:
                break
            pos = bisect.bisect_left(pivcol, j)
            if pos < len(pivcol) and pivcol[pos] == j:
                row = basis[pos]
                a, b = row[j], vec[j]
                if b % a == 0:
                    q = b // a
                    for k in range(j, ncols):
                        vec[k] -= q * row[k]
                else:
                    g, x, y = xgcd(a, b)
                    ag, bg = a // g, b // g
                    for k in range(j, ncols):
                        ra, va = row[k], vec[k]
                        row[k] = x * ra + y * va
                        vec[k] = -bg * ra + ag * va
            else:
                basis.insert(pos, vec)
                pivcol.insert(pos, j)
                break
    for i in range(len(basis)):
        if basis[i][pivcol[i]] < 0:
            basis[i] = [-x for x in basis[i]]
    # reduce above-pivot entries; ascending order so columns touched by a
    # reduction are themselves normalized by a later pass
    for i in range(1, len(basis)):
        p = pivcol[i]
        piv = basis[i][p]
        for k in range(i):
            q = basis[k][p] // piv
            if q:
                basis[k] = [a - q * b for a, b in zip(basis[k], basis[i])]
    return basis


def smith_normal_form(m):
    """Smith normal form with transforms: returns (U, S, V) with U*M*V = S.

    S is diagonal with the divisibility chain s_1 | s_2 | ..., U and V
    unimodular.  Pivoting picks the minimal nonzero absolute value.
    """
    a = mat_copy(m)
    nr = len(a)
    nc = len(a[0]) if nr else 0
    u = identity(nr)
    v = identity(nc)

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    def addmul_row(dst, src, c):
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def addmul_col(dst, src, c):
        for row in a:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    t = 0
    r = min(nr, nc)
    while t < r:
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            for i in range(t + 1, nr):
                if a[i][t]:
                    addmul_row(i, t, -(a[i][t] // a[t][t]))
            if any(a[i][t] for i in range(t + 1, nr)):
                # a remainder became the new, smaller pivot
                i = next(i for i in range(t + 1, nr) if a[i][t])
                swap_rows(t, i)
                continue
            for j in range(t + 1, nc):
                if a[t][j]:
                    addmul_col(j, t, -(a[t][j] // a[t][t]))
            if any(a[t][j] for j in range(t + 1, nc)):
                j = next(j for j in range(t + 1, nc) if a[t][j])
                swap_cols(t, j)
                continue
            break
        t += 1

    # divisibility chain: fold entry t+1 into t until each divides the next
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            x, y = a[i][i], a[i + 1][i + 1]
            if x != 0 and y != 0 and y % x != 0:
                changed = True
                addmul_col(i, i + 1, 1)  # puts y into column i, row i+1 stays
                # clear the 2x2 block again by gcd steps
                while a[i + 1][i]:
                    q = a[i][i] // a[i + 1][i]
                    addmul_row(i, i + 1, -q)
                    if a[i][i]:
                        swap_rows(i, i + 1)
                        continue
                    swap_rows(i, i + 1)
                while a[i][i + 1]:
                    addmul_col(i + 1, i, -(a[i][i + 1] // a[i][i]))
    for i in range(r):
        if a[i][i] < 0:
            a[i] = [-x for x in a[i]]
            u[i] = [-x for x in u[i]]
    return u, a, v


def right_kernel(m, ncols=None):
    """Saturated basis of {v in Z^nc : M v = 0}, returned as rows."""
    nr = len(m)
    if ncols is None:
        ncols = len(m[0]) if nr else 0
    if nr == 0 or ncols == 0:
        return identity(ncols)
    _, s, v = smith_normal_form(m)
    rank = sum(1 for i in range(min(nr, ncols)) if s[i][i] != 0)
    cols = transpose(v)
    return [cols[j] for j in range(rank, ncols)]


def solve_mod2(a, b):
    """One solution x of A x = b over F_2 (A square), or None."""
    n = len(a)
    m = [[a[i][j] & 1 for j in range(n)] + [b[i] & 1] for i in range(n)]
    piv = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, n) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        for i in range(n):
            if i != r and m[i][c]:
                m[i] = [(x ^ y) for x, y in zip(m[i], m[r])]
        piv.append(c)
        r += 1
    for i in range(r, n):
        if m[i][n]:
            return None
    x = [0] * n
    for i, c in enumerate(piv):
        x[c] = m[i][n]
    return x


def lll_gram(gram, delta_num=99, delta_den=100):
    """Exact LLL on a Gram matrix; returns (reduced_gram, U) with U G U^T.

    Integer-only de Weger bookkeeping: d[i] is the Gram determinant of the
    first i vectors and lam[i][j] = d[j+1] * mu_{ij}, so no rationals appear.
    Lovasz condition with delta = delta_num/delta_den.
    """
    n = len(gram)
    if n <= 1:
        return mat_copy(gram), identity(n)
    g = mat_copy(gram)
    u = identity(n)
    d = [1] * (n + 1)
    lam = [[0] * n for _ in range(n)]

    def gso_row(i):
        for j in range(i + 1):
            x = g[i][j]
            for k in range(j):
                x = (d[k + 1] * x - lam[i][k] * lam[j][k]) // d[k]
            if j < i:
                lam[i][j] = x
            else:
                d[i + 1] = x

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            gkk = g[k][k] - 2 * q * g[k][l] + q * q * g[l][l]
            for t in range(n):
                g[k][t] -= q * g[l][t]
            for t in range(n):
                g[t][k] = g[k][t]
            g[k][k] = gkk
            u[k] = [a - q * b for a, b in zip(u[k], u[l])]
            lam[k][l] -= q * d[l + 1]
            for t in range(l):
                lam[k][t] -= q * lam[l][t]

    def swap(k):
        g[k], g[k - 1] = g[k - 1], g[k]
        for row in g:
            row[k], row[k - 1] = row[k - 1], row[k]
        u[k], u[k - 1] = u[k - 1], u[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lam_kk1 = lam[k][k - 1]
        new_dk = (d[k - 1] * d[k + 1] + lam_kk1 * lam_kk1) // d[k]
        for i in range(k + 1, n):
            old_km1, old_k = lam[i][k - 1], lam[i][k]
            lam[i][k - 1] = (old_km1 * lam_kk1 + old_k * d[k - 1]) // d[k]
            lam[i][k] = (old_km1 * d[k + 1] - old_k * lam_kk1) // d[k]
        d[k] = new_dk

    for i in range(n):
        gso_row(i)
    k = 1
    while k < n:
        red(k, k - 1)
        if delta_den * (d[k + 1] * d[k - 1] + lam[k][k - 1] ** 2) < delta_num * d[k] ** 2:
            swap(k)
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return g, u
