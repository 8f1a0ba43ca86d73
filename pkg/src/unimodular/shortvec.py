"""Short vector enumeration (Fincke-Pohst) and coset minima.

The enumeration is guided by a floating-point Cholesky decomposition with a
small relative slack on the bound; every candidate inside the slackened
bound is then re-verified with exact integer (or rational) arithmetic, so
the floating point is never authoritative.  The basis is LLL-reduced first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor, sqrt

import numpy as np

from .core import GramLattice, lll_reduce  # noqa: F401  (re-exported surface)
from .intmat import lll_gram, mat_vec, vec_mat

SLACK = 1e-6
_MAX_PARTIALS = 40_000_000


@dataclass(frozen=True)
class ShortVectorSet:
    """All vectors of norm <= bound, one representative per +-pair."""

    bound: int
    pairs: tuple  # ((coords, norm), ...) coords in the lattice's own basis
    counts: tuple  # ((norm, r_norm), ...) with r_norm = 2 * #pairs

    def vectors_of_norm(self, m):
        return [list(v) for v, nrm in self.pairs if nrm == m]

    def count(self, m):
        return dict(self.counts).get(m, 0)

    def all_vectors_signed(self):
        out = []
        for v, _ in self.pairs:
            out.append(list(v))
            out.append([-x for x in v])
        return out


def _cholesky_rows(gram_float):
    lo = np.linalg.cholesky(gram_float)
    return lo.T.copy()  # upper triangular, Q(x) = ||R x||^2


def _expand_levels(r, bound, shift):
    """All integer rows y with ||R (y + shift)||^2 <= bound (float, slack)."""
    n = r.shape[0]
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    lim = bound * (1.0 + SLACK) + 1e-9
    partial = np.zeros((1, 0), dtype=np.int64)  # suffix coords x_{i+1..n-1}
    sq = np.zeros(1)
    for i in range(n - 1, -1, -1):
        tail = partial + shift[i + 1 :] if n - 1 - i else partial.astype(float)
        u = tail @ r[i, i + 1 :] if n - 1 - i else np.zeros(len(partial))
        rem = lim - sq
        rad = np.sqrt(np.maximum(rem, 0.0)) / r[i, i]
        center = -u / r[i, i] - shift[i]
        lo = np.ceil(center - rad - 1e-9).astype(np.int64)
        hi = np.floor(center + rad + 1e-9).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        total = int(cnt.sum())
        if total > _MAX_PARTIALS:
            raise MemoryError("short vector enumeration exceeded partial budget")
        idx = np.repeat(np.arange(len(partial)), cnt)
        starts = np.cumsum(cnt) - cnt
        xi = lo[idx] + (np.arange(total) - starts[idx])
        step = r[i, i] * (xi + shift[i]) + u[idx]
        sq = sq[idx] + step * step
        partial = np.column_stack([xi, partial[idx]]) if partial.shape[1] else xi.reshape(-1, 1)
        keep = sq <= lim + 1e-9
        partial = partial[keep]
        sq = sq[keep]
    return partial


def _exact_norms(x, gram_int):
    g = np.asarray(gram_int, dtype=np.int64)
    if x.size and (np.abs(x).max() > 1 << 20 or np.abs(g).max() > 1 << 40):
        rows = []
        gl = [list(r) for r in gram_int]
        for row in x:
            v = [int(t) for t in row]
            rows.append(sum(a * b for a, b in zip(v, mat_vec(gl, v))))
        return np.array(rows, dtype=object)
    return np.einsum("ij,ij->i", x @ g, x)


@lru_cache(maxsize=32)
def short_vectors(lat: GramLattice, bound: int) -> ShortVectorSet:
    """Complete set R_{<=bound}(L)/+- with exact norms."""
    if bound < 0:
        raise ValueError("bound must be >= 0")
    n = lat.rank
    if n == 0:
        return ShortVectorSet(bound, (), ())
    g2, u = lll_gram(lat.gram_rows())
    r = _cholesky_rows(np.array(g2, dtype=float))
    y = _expand_levels(r, float(bound), np.zeros(n))
    norms = _exact_norms(y, g2)
    keep = (norms <= bound) & (norms > 0)
    y = y[keep]
    norms = norms[keep]
    # one representative per +-pair: first nonzero reduced coordinate > 0
    if len(y):
        first = np.argmax(y != 0, axis=1)
        sign = y[np.arange(len(y)), first]
        y = y[sign > 0]
        norms = norms[sign > 0]
    un = np.array(u, dtype=np.int64)
    x = y @ un  # original basis coordinates
    # canonical sign in original coordinates
    if len(x):
        first = np.argmax(x != 0, axis=1)
        sign = x[np.arange(len(x)), first]
        x = np.where((sign < 0)[:, None], -x, x)
    raw = [(int(norms[i]), tuple(int(t) for t in x[i])) for i in range(len(x))]
    raw.sort()
    pairs = tuple((v, nrm) for nrm, v in raw)
    cnt = {}
    for _, nrm in pairs:
        cnt[nrm] = cnt.get(nrm, 0) + 2
    counts = tuple(sorted(cnt.items()))
    return ShortVectorSet(bound, pairs, counts)


def r_counts(lat: GramLattice, bound: int):
    """Dict {i: r_i(L)} for 1 <= i <= bound."""
    sv = short_vectors(lat, bound)
    out = {i: 0 for i in range(1, bound + 1)}
    out.update(dict(sv.counts))
    return out


def coset_min_vectors(lat: GramLattice, t):
    """Minimal vectors of the coset t + L, t rational in basis coordinates.

    Returns (min_norm, vectors); norms are exact Fractions, each vector is a
    tuple of Fractions in the basis of L.  For t in L the minimum is 0.
    """
    n = lat.rank
    t = [Fraction(x) for x in t]
    if n == 0:
        return Fraction(0), [()]
    g2, u = lll_gram(lat.gram_rows())
    uinv = _fraction_inverse(u)
    t_red = [sum(t[i] * uinv[i][j] for i in range(n)) for j in range(n)]
    r = _cholesky_rows(np.array(g2, dtype=float))
    s = np.array([float(x) for x in t_red])
    # Babai estimate of the coset minimum gives the initial search radius
    y0 = -np.round(s)
    c0 = float((y0 + s) @ np.array(g2, dtype=float) @ (y0 + s))
    bound = max(c0 * (1 + 1e-3), 1e-3)
    while True:
        y = _expand_levels(r, bound, s)
        if len(y):
            break
        bound *= 2
    q = 1
    for x in t_red:
        q = q * x.denominator // _gcd(q, x.denominator)
    p = [int(x * q) for x in t_red]
    gl = [list(row) for row in g2]
    best = None
    best_rows = []
    for row in y:
        v = [int(a) * q + b for a, b in zip(row, p)]
        nrm = Fraction(sum(a * b for a, b in zip(v, mat_vec(gl, v))), q * q)
        if best is None or nrm < best:
            best = nrm
            best_rows = [row]
        elif nrm == best:
            best_rows.append(row)
    vecs = []
    for row in best_rows:
        y_full = [Fraction(int(a)) + tr for a, tr in zip(row, t_red)]
        coords = tuple(sum(y_full[i] * u[i][j] for i in range(n)) for j in range(n))
        vecs.append(coords)
    vecs.sort()
    return best, vecs


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _fraction_inverse(m):
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [[aug[i][n + j] for j in range(n)] for i in range(n)]


def naive_short_vectors(lat: GramLattice, bound: int):
    """Box enumeration oracle for small ranks (tests compare against this)."""
    n = lat.rank
    ginv = _fraction_inverse(lat.gram_rows())
    lims = [int(floor(sqrt(float(bound * ginv[i][i]) + 1e-9))) for i in range(n)]
    out = []
    g = lat.gram_rows()

    def rec(i, prefix):
        if i == n:
            v = list(prefix)
            nrm = sum(a * b for a, b in zip(v, mat_vec(g, v)))
            if 0 < nrm <= bound:
                first = next(x for x in v if x)
                if first > 0:
                    out.append((tuple(v), nrm))
            return
        for x in range(-lims[i], lims[i] + 1):
            rec(i + 1, prefix + [x])

    rec(0, [])
    return sorted(out)
