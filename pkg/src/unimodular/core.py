"""Integral lattices given by exact Gram matrices.

A ``GramLattice`` is an immutable value: the Gram matrix of some basis, with
an optional embedding into Q^n given by integer basis rows over a single
global denominator D (so the Gram integrality check is D^2 | B B^T).  All
arithmetic is exact; floating point never touches anything authoritative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import intmat
from .intmat import bareiss_det, hnf, lll_gram, mat_mul, smith_normal_form, transpose


def _freeze(m):
    return tuple(tuple(int(x) for x in row) for row in m)


@dataclass(frozen=True)
class GramLattice:
    """Lattice of rank n with exact integer Gram matrix.

    ``embedding`` is an optional pair (D, B): the lattice is spanned by the
    rows of B/D inside Q^m with the standard inner product.
    """

    gram: tuple
    embedding: tuple | None = None  # (denominator, rows)

    def __post_init__(self):
        g = _freeze(self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        for i in range(n):
            if len(g[i]) != n:
                raise ValueError("gram matrix must be square")
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        if self.embedding is not None:
            dnm, rows = self.embedding
            rows = _freeze(rows)
            object.__setattr__(self, "embedding", (int(dnm), rows))
            if len(rows) != n:
                raise ValueError("embedding must have one row per basis vector")
            bbt = mat_mul(rows, transpose(rows))
            for i in range(n):
                for j in range(n):
                    if bbt[i][j] != g[i][j] * dnm * dnm:
                        raise ValueError("embedding inconsistent: B B^T != D^2 gram")

    @property
    def rank(self):
        return len(self.gram)

    def gram_rows(self):
        return [list(r) for r in self.gram]

    def inner(self, u, v):
        return sum(u[i] * sum(self.gram[i][j] * v[j] for j in range(self.rank)) for i in range(self.rank))

    def norm(self, v):
        return self.inner(v, v)

    def sublattice(self, rows):
        """Lattice spanned by the given rows (coordinates in this basis)."""
        rows = [list(r) for r in rows]
        g = self.gram_rows()
        gram = mat_mul(mat_mul(rows, g), transpose(rows))
        emb = None
        if self.embedding is not None:
            dnm, b = self.embedding
            emb = (dnm, mat_mul(rows, [list(r) for r in b]))
        return GramLattice(_freeze(gram), emb)

    def __repr__(self):
        return f"GramLattice(rank={self.rank}, det={det(self)})"


def from_rows(rows, denominator=1):
    """Embedded lattice spanned by rows/denominator in Q^m."""
    rows = _freeze(rows)
    d2 = denominator * denominator
    bbt = mat_mul([list(r) for r in rows], transpose([list(r) for r in rows]))
    gram = []
    for i in range(len(rows)):
        grow = []
        for j in range(len(rows)):
            q, r = divmod(bbt[i][j], d2)
            if r:
                raise ValueError("rows/denominator do not span an integral lattice")
            grow.append(q)
        gram.append(grow)
    return GramLattice(_freeze(gram), (denominator, rows))


@lru_cache(maxsize=4096)
def det(lat: GramLattice):
    """Determinant of the Gram matrix, fraction-free."""
    return bareiss_det(lat.gram_rows())


def is_positive_definite(lat: GramLattice):
    g = lat.gram_rows()
    for k in range(1, lat.rank + 1):
        if bareiss_det([row[:k] for row in g[:k]]) <= 0:
            return False
    return True


def is_even(lat: GramLattice):
    """Even iff every basis norm is even (off-diagonal terms pair up)."""
    return all(lat.gram[i][i] % 2 == 0 for i in range(lat.rank))


@dataclass(frozen=True)
class CharacteristicCoset:
    """One representative xi of Char(L) modulo 2L, in basis coordinates."""

    lattice: GramLattice
    xi: tuple

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(int(x) for x in self.xi))


def characteristic_rep(lat: GramLattice):
    """Solve xi . e_i = e_i . e_i (mod 2); needs det(L) odd (unimodular)."""
    if det(lat) % 2 == 0:
        raise ValueError("characteristic vectors need odd determinant")
    g = lat.gram_rows()
    diag = [g[i][i] for i in range(lat.rank)]
    x = intmat.solve_mod2(g, diag)
    assert x is not None
    return CharacteristicCoset(lat, tuple(x))


def even_part(lat: GramLattice):
    """Largest even sublattice; the input itself when already even."""
    if is_even(lat):
        return lat
    xi = characteristic_rep(lat).xi
    c = intmat.mat_vec(lat.gram_rows(), list(xi))  # v . xi = c . v_coords
    c = [x & 1 for x in c]
    n = lat.rank
    i0 = c.index(1)
    rows = []
    for j in range(n):
        if j == i0:
            row = [0] * n
            row[i0] = 2
        else:
            row = [0] * n
            row[j] = 1
            if c[j]:
                row[i0] = -1
        rows.append(row)
    return lat.sublattice(hnf(rows, n))


def smith_normal_form_op(m):
    """(U, S, V) with U M V = S diagonal, divisibility chain; U,V unimodular."""
    return smith_normal_form(m)


def mat_inverse_unimodular(v):
    """Exact inverse of a unimodular integer matrix."""
    n = len(v)
    aug = [[Fraction(v[i][j]) for j in range(n)] + [Fraction(1 if j == i else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    inv = [[aug[i][n + j] for j in range(n)] for i in range(n)]
    out = []
    for row in inv:
        irow = []
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            irow.append(int(x))
        out.append(irow)
    return out


def saturate(lat: GramLattice, rows):
    """Saturation Sat_L(A) = L n (A ox Q) of the subgroup spanned by rows.

    Returns (basis rows of the saturation, index of A in it).
    """
    rows = [list(r) for r in rows]
    if not rows:
        return [], 1
    _, s, v = smith_normal_form(rows)
    r = sum(1 for i in range(min(len(rows), lat.rank)) if s[i][i] != 0)
    vinv = mat_inverse_unimodular(v)
    sat = [vinv[i] for i in range(r)]
    index = 1
    for i in range(r):
        index *= s[i][i]
    return hnf(sat, lat.rank), index


def orthogonal_complement(lat: GramLattice, rows):
    """Basis of {v in L : v . w = 0 for all w in span(rows)} (saturated)."""
    if not rows:
        return intmat.identity(lat.rank)
    constraints = mat_mul([list(r) for r in rows], lat.gram_rows())
    return intmat.right_kernel(constraints, lat.rank)


def split_norm_one(lat: GramLattice):
    """Unique decomposition L = I_m perp B with r_1(B) = 0; returns (m, B)."""
    from . import shortvec

    ones = shortvec.short_vectors(lat, 1).vectors_of_norm(1)
    m2 = len(ones)  # one per +- pair
    if m2 == 0:
        return 0, lat
    comp = orthogonal_complement(lat, ones)
    b = lat.sublattice(comp)
    assert b.rank == lat.rank - m2
    assert det(b) == det(lat)
    return m2, b


def lll_reduce(lat: GramLattice):
    """Same lattice, LLL-reduced basis (Lovasz delta = 0.99, exact)."""
    g2, u = lll_gram(lat.gram_rows())
    emb = None
    if lat.embedding is not None:
        dnm, b = lat.embedding
        emb = (dnm, mat_mul(u, [list(r) for r in b]))
    return GramLattice(_freeze(g2), emb)


def standard_lattice(kind, n):
    """Gram matrix of I_n, A_n, D_n or E_n in its standard basis.

    D_n and I_n come with their natural embedding in Z^n; E_8 is built as
    D_8 + Z(1/2, ..., 1/2) with denominator 2, and E_7/E_6 as orthogonal
    complements inside E_8.
    """
    if kind == "I":
        if n < 0:
            raise ValueError("rank must be >= 0")
        rows = intmat.identity(n)
        return from_rows(rows, 1)
    if kind == "A":
        if n < 1:
            raise ValueError("A_n needs n >= 1")
        g = [[0] * n for _ in range(n)]
        for i in range(n):
            g[i][i] = 2
            if i + 1 < n:
                g[i][i + 1] = g[i + 1][i] = -1
        return GramLattice(_freeze(g))
    if kind == "D":
        if n < 2:
            raise ValueError("D_n needs n >= 2")
        rows = []
        for i in range(n - 1):
            row = [0] * n
            row[i], row[i + 1] = 1, -1
            rows.append(row)
        last = [0] * n
        last[n - 2] = last[n - 1] = 1
        rows.append(last)
        return from_rows(rows, 1)
    if kind == "E":
        if n not in (6, 7, 8):
            raise ValueError("E_n needs n in {6, 7, 8}")
        d8 = standard_lattice("D", 8)
        rows = [[2 * x for x in row] for row in d8.embedding[1]]
        rows[-1] = [1] * 8  # replace one generator by the glue vector
        e8 = from_rows(hnf(rows + [[2 * x for x in r] for r in d8.embedding[1]], 8), 2)
        if n == 8:
            return e8
        # eps_7 + eps_8 = (0,...,0,1,1) has coordinates in E8 basis; cut it out
        targets = [[0, 0, 0, 0, 0, 0, 1, 1]]
        if n == 6:
            targets.append([0, 0, 0, 0, 0, -1, 1, 0])
        coords = _coords_in(e8, targets)
        comp = orthogonal_complement(e8, coords)
        return lll_reduce(e8.sublattice(comp))
    raise ValueError(f"unknown lattice kind {kind!r}")


def _coords_in(lat: GramLattice, ambient_vectors):
    """Coordinates of ambient Q^m vectors in an embedded lattice's basis."""
    dnm, b = lat.embedding
    n = len(b)
    out = []
    for w in ambient_vectors:
        target = [dnm * x for x in w]
        sol = _solve_int([list(col) for col in zip(*b)], target)
        if sol is None:
            raise ValueError("vector not in lattice")
        out.append(sol)
    return out


def _solve_int(a, b):
    """Integer solution x of A x = b, if one exists (A full column rank)."""
    nr, nc = len(a), len(a[0])
    aug = [[Fraction(a[i][j]) for j in range(nc)] + [Fraction(b[i])] for i in range(nr)]
    r = 0
    piv = []
    for c in range(nc):
        pr = next((i for i in range(r, nr) if aug[i][c] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(nr):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv.append(c)
        r += 1
        if r == nc:
            break
    for i in range(r, nr):
        if aug[i][nc] != 0:
            return None
    x = [0] * nc
    for i, c in enumerate(piv):
        if aug[i][nc].denominator != 1:
            return None
        x[c] = int(aug[i][nc])
    return x


def gram_to_json(lat: GramLattice):
    """Serialize the Gram matrix as arrays of decimal integer strings."""
    return json.dumps([[str(x) for x in row] for row in lat.gram])


def gram_from_json(s):
    data = json.loads(s)
    return GramLattice(_freeze([[int(x) for x in row] for row in data]))
