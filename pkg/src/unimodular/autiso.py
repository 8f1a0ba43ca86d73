"""Automorphism group order and isometry testing by backtracking.

The full group order factors as |O(L)| = |W(R_2(L))| * |O(L; rho)|, so the
search only ever runs on the (usually tiny) stabilizer of the Weyl vector:
it looks for maps preserving the pair of forms (G, 4(rho.x)(rho.y)) on a
spanning set of short vectors, which yields +-O(L; rho).  Orders come out
of the orbit-stabilizer chain built during the search; the group is never
stored element by element.

Candidate pruning uses per-vector environment fingerprints: the multiset of
(inner product, norm, |2 rho . u|) against the whole short-vector set,
sharpened by a few Weisfeiler-Leman refinement rounds over the dot graph.
Fingerprints are hashed by summing fixed random weights, which is a sound
filter: a true image always matches, extras are caught by the exact search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import rootsys, shortvec
from .core import GramLattice, det, mat_inverse_unimodular
from .intmat import bareiss_det, hnf, lll_gram, mat_mul

_FP_SEED = 0x5EED
_WL_ROUNDS = 3
_AUT_CACHE = {}


@dataclass(frozen=True)
class AutResult:
    full_order: int
    weyl_order: int
    reduced_order: int
    generators: tuple  # matrices generating +-O(L; rho), lattice basis rows


def _transpose(m):
    return [list(r) for r in zip(*m)]


def _rank_of(rows, n):
    return len(hnf([list(r) for r in rows], n))


class _VectorEnv:
    """Short-vector data for one lattice: the full exact dot matrix, the
    pair-form values, and refined per-vector fingerprints."""

    def __init__(self, lat: GramLattice, weyl2, bound=None):
        self.lat = lat
        n = lat.rank
        if bound is None:
            bound = 2
            while True:
                sv = shortvec.short_vectors(lat, bound)
                rows = [list(v) for v, _ in sv.pairs]
                if rows and _rank_of(rows, n) == n:
                    break
                bound += 1
                if bound > 16:
                    raise RuntimeError("short vectors never span the space")
        else:
            sv = shortvec.short_vectors(lat, bound)
        self.bound = bound
        signed = []
        for v, _ in sv.pairs:
            signed.append(list(v))
            signed.append([-t for t in v])
        m = len(signed)
        self.sv = np.array(signed, dtype=np.int64).reshape(m, n)
        g = np.array(lat.gram_rows(), dtype=np.int64)
        gs = self.sv @ g
        self.norms = np.einsum("ij,ij->i", gs, self.sv)
        self.weyl2 = [int(t) for t in weyl2]
        w = g @ np.array(self.weyl2, dtype=np.int64)
        self.fw = self.sv @ w  # 2 rho . v_i; the second form is fw_i fw_j
        # |u.v| <= bound by Cauchy-Schwarz: the whole dot matrix fits in int8
        dots = np.rint(self.sv.astype(np.float64) @ gs.T.astype(np.float64))
        self.dots = dots.astype(np.int8)
        self.fingerprint = self._refined_hashes()
        self.index = {tuple(int(t) for t in row): i for i, row in enumerate(self.sv)}

    def _refined_hashes(self):
        m = len(self.sv)
        if m == 0:
            return np.zeros(0, dtype=np.uint64)
        rng = np.random.default_rng(_FP_SEED)
        width = 2 * self.bound + 1
        fw_abs = np.abs(self.fw)
        uniq = {v: i for i, v in enumerate(sorted(set(int(t) for t in fw_abs)))}
        colors = np.array(
            [int(self.norms[i]) * len(uniq) + uniq[int(fw_abs[i])] for i in range(m)],
            dtype=np.uint64,
        )
        block = max(1, 8_000_000 // m)
        for rnd in range(_WL_ROUNDS + 1):
            # recolor by the multiset of (dot, color(u)) pairs over all u;
            # uint64 wraparound is deliberate (commutative multiset hash)
            vals, colors_small = np.unique(colors, return_inverse=True)
            ncol = len(vals)
            weights = rng.integers(1, 1 << 63, size=width * ncol, dtype=np.uint64)
            shift = (width * colors_small.astype(np.int64))[None, :]
            sums = np.zeros(m, dtype=np.uint64)
            for lo in range(0, m, block):
                hi = min(lo + block, m)
                codes = (self.dots[lo:hi].astype(np.int64) + self.bound) + shift
                sums[lo:hi] = weights[codes].sum(axis=1, dtype=np.uint64)
            new = sums + colors * np.uint64(0x9E3779B97F4A7C15)
            if rnd > 0 and len(vals) == len(np.unique(new)):
                break
            colors = new
        return colors

    def static_candidates(self, norm, fw_sq, fp):
        mask = (self.norms == norm) & (self.fw * self.fw == fw_sq)
        if fp is not None:
            mask &= self.fingerprint == fp
        return np.nonzero(mask)[0]

    def apply_rows(self, t):
        """Index permutation of the short vectors under the matrix t."""
        imgs = self.sv @ np.array(t, dtype=np.int64)
        return np.array([self.index[tuple(int(v) for v in row)] for row in imgs], dtype=np.int64)


class _BaseData:
    """A base drawn from the short vectors, its pairwise data, and the
    exact inverse (of a Q-spanning sub-base) used to lift assignments."""

    def __init__(self, env: _VectorEnv, base, span_pos, zgen):
        self.env = env
        self.base = base
        self.span_pos = span_pos
        self.zgen = zgen
        bmat = [[int(t) for t in env.sv[base[p]]] for p in span_pos]
        self.bmat = bmat
        self.bdet = bareiss_det(bmat)
        self.badj = _adjugate(bmat)  # badj @ bmat = bdet * I
        self.g0 = [[int(env.dots[i, j]) for j in base] for i in base]
        self.fw0 = [int(env.fw[i]) for i in base]

    def lift_matrix(self, images, env2=None):
        """T acting on coordinate rows with base -> images, or None.

        Product consistency over a Z-generating base already certifies the
        assignment (positive definiteness turns equal Grams into a genuine
        linear isometry), so for zgen bases this never fails; the checks
        stay on as cheap insurance for the fallback Q-spanning case.
        """
        env2 = env2 or self.env
        x = [[int(v) for v in env2.sv[images[p]]] for p in self.span_pos]
        num = mat_mul(self.badj, x)
        t = []
        for row in num:
            out = []
            for v in row:
                q, r = divmod(v, self.bdet)
                if r:
                    return None
                out.append(q)
            t.append(out)
        # extra base vectors must map consistently (free when zgen)
        for p, i in enumerate(self.base):
            if p in self.span_pos:
                continue
            vec = [int(v) for v in self.env.sv[i]]
            img = [int(v) for v in env2.sv[images[p]]]
            if [sum(vec[a] * t[a][b] for a in range(len(t))) for b in range(len(t))] != img:
                return None
        g1 = self.env.lat.gram_rows()
        g2 = env2.lat.gram_rows()
        if mat_mul(mat_mul(t, g2), _transpose(t)) != g1:
            return None
        return t


def _adjugate(m):
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[col])]
    d = bareiss_det(m)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            val = aug[i][n + j] * d
            assert val.denominator == 1
            row.append(int(val))
        out.append(row)
    return out


class _EchelonAccumulator:
    """Incremental HNF over Z for membership tests while picking a base."""

    def __init__(self, n):
        self.n = n
        self.rows = []  # echelon rows, pivot columns increasing
        self.piv = []

    def residue(self, vec):
        v = list(vec)
        for row, p in zip(self.rows, self.piv):
            if v[p] and v[p] % row[p] == 0:
                q = v[p] // row[p]
                v = [a - q * b for a, b in zip(v, row)]
        return v

    def contains(self, vec):
        return not any(self.residue(vec))

    def add(self, vec):
        import bisect

        v = list(vec)
        while True:
            j = next((k for k, x in enumerate(v) if x), None)
            if j is None:
                return
            pos = bisect.bisect_left(self.piv, j)
            if pos < len(self.piv) and self.piv[pos] == j:
                row = self.rows[pos]
                a, b = row[j], v[j]
                if b % a == 0:
                    q = b // a
                    v = [x - q * y for x, y in zip(v, row)]
                else:
                    from .intmat import xgcd

                    g, x0, y0 = xgcd(a, b)
                    ag, bg = a // g, b // g
                    newrow = [x0 * ra + y0 * va for ra, va in zip(row, v)]
                    v = [-bg * ra + ag * va for ra, va in zip(row, v)]
                    self.rows[pos] = newrow
            else:
                self.rows.insert(pos, v)
                self.piv.insert(pos, j)
                return

    def is_full(self):
        # generates Z^n iff n pivots all equal 1... and echelon is identity-like
        if len(self.rows) < self.n:
            return False
        from .intmat import bareiss_det

        d = 1
        for row, p in zip(self.rows, self.piv):
            d *= row[p]
        return abs(d) == 1


def _choose_base(env: _VectorEnv):
    """Base from the short vectors, rarest fingerprints first.

    Prefers a Z-generating set (possibly more than n vectors): pairwise
    product consistency on such a set forces any assignment to be a genuine
    lattice automorphism, so the search never wastes time on non-integral
    lifts.  Falls back to a Q-spanning set when the short vectors only
    generate a finite-index sublattice.

    Returns (base_indices, span_positions, z_generating).
    """
    n = env.lat.rank
    fps, counts_arr = np.unique(env.fingerprint, return_counts=True)
    countmap = dict(zip(map(int, fps), map(int, counts_arr)))
    order = sorted(
        range(len(env.sv)),
        key=lambda i: (countmap[int(env.fingerprint[i])], int(env.norms[i]), i),
    )
    base, span_pos, rows = [], [], []
    ech = _EchelonAccumulator(n)
    rank = 0
    for i in order:
        vec = [int(t) for t in env.sv[i]]
        if ech.contains(vec):
            continue
        newrank = _rank_of(rows + [vec], n)
        if newrank > rank or True:
            # vector enlarges the generated lattice; keep it
            if newrank > rank:
                span_pos.append(len(base))
                rows.append(vec)
                rank = newrank
            base.append(i)
            ech.add(vec)
        if rank == n and ech.is_full():
            break
    zgen = ech.is_full()
    if rank < n:
        raise RuntimeError("short vectors do not span the space")
    if not zgen:
        # drop non-spanning extras: keep only the Q-spanning core
        base = [base[p] for p in span_pos]
        span_pos = list(range(n))
    return base, span_pos, zgen


def _prefix_candidates(bd: _BaseData, j, fixed, env2=None):
    """Candidates for base position j given images of positions 0..k-1.

    For the automorphism search env2 is the base's own environment and the
    dot constraints are int8 gathers; cross-lattice searches use matvecs.
    """
    env2 = env2 or bd.env
    fp = int(bd.env.fingerprint[bd.base[j]])
    arr = env2.static_candidates(bd.g0[j][j], bd.fw0[j] ** 2, fp)
    for i, img in enumerate(fixed):
        if len(arr) == 0:
            break
        dots = env2.dots[img, arr]
        keep = (dots == bd.g0[j][i]) & (env2.fw[arr] * int(env2.fw[img]) == bd.fw0[j] * bd.fw0[i])
        arr = arr[keep]
    return arr


def _extend(bd: _BaseData, fixed, env2=None):
    """Complete a partial assignment to a full forms-preserving lattice map.

    Returns the lifted matrix (None if no completion lifts integrally); the
    DFS keeps searching past completions whose lift fails.
    """
    env2 = env2 or bd.env
    n = len(bd.base)
    k = len(fixed)
    cand = [None] * n
    for j in range(k, n):
        cand[j] = _prefix_candidates(bd, j, fixed, env2)
        if len(cand[j]) == 0:
            return None
    fixed = list(fixed)
    found = [None]
    dots_m = env2.dots
    fw = env2.fw

    def rec():
        j = len(fixed)
        if j == n:
            t = bd.lift_matrix(fixed, env2)
            if t is not None:
                found[0] = t
                return True
            return False
        for img in cand[j]:
            img = int(img)
            fwi = int(fw[img])
            saved = cand[j + 1 : n]
            ok = True
            for t in range(j + 1, n):
                sub = cand[t]
                keep = (dots_m[img, sub] == bd.g0[t][j]) & (fw[sub] * fwi == bd.fw0[t] * bd.fw0[j])
                cand[t] = sub[keep]
                if len(cand[t]) == 0:
                    ok = False
                    break
            if ok:
                fixed.append(img)
                if rec():
                    return True
                fixed.pop()
            cand[j + 1 : n] = saved
        return False

    rec()
    return found[0]


def _pair_group_order(lat: GramLattice, weyl2):
    """Order and generators of the group preserving (G, weyl pair form)."""
    n = lat.rank
    if n == 0:
        return 1, []
    env = _VectorEnv(lat, weyl2)
    base, span_pos, zgen = _choose_base(env)
    bd = _BaseData(env, base, span_pos, zgen)
    gens = []  # (matrix, permutation of short vectors)

    order = 1
    for level in range(len(base) - 1, -1, -1):
        prefix = [bd.base[t] for t in range(level)]
        active = [perm for _, perm in gens if all(int(perm[b]) == b for b in prefix)]
        start = bd.base[level]
        orbit = {int(start)}
        frontier = [int(start)]
        while frontier:
            new = []
            for idx in frontier:
                for perm in active:
                    p = int(perm[idx])
                    if p not in orbit:
                        orbit.add(p)
                        new.append(p)
            frontier = new
        for img in _prefix_candidates(bd, level, prefix):
            img = int(img)
            if img in orbit:
                continue
            t = _extend(bd, prefix + [img])
            if t is None:
                continue
            perm = env.apply_rows(t)
            gens.append((t, perm))
            active.append(perm)
            frontier = list(orbit)
            while frontier:
                new = []
                for idx in frontier:
                    for pm in active:
                        p = int(pm[idx])
                        if p not in orbit:
                            orbit.add(p)
                            new.append(p)
                frontier = new
        order *= len(orbit)
    return order, [g for g, _ in gens]


def aut_order(lat: GramLattice) -> AutResult:
    """|O(L)| = |W(R_2)| x |O(L; rho)| via the pair-form backtracking."""
    key = lat.gram
    if key in _AUT_CACHE:
        return _AUT_CACHE[key]
    if lat.rank == 0:
        return AutResult(1, 1, 1, ())
    g2, u = lll_gram(lat.gram_rows())
    red = GramLattice(tuple(map(tuple, g2)))
    datum = rootsys.root_datum_of(red)
    w = rootsys.weyl_order(datum.cls)
    found, gens = _pair_group_order(red, datum.weyl2)
    if any(datum.weyl2):
        assert found % 2 == 0, "-id always preserves the pair of forms"
        reduced = found // 2
    else:
        reduced = found
    uinv = mat_inverse_unimodular(u)
    gens_orig = tuple(tuple(tuple(r) for r in mat_mul(mat_mul(uinv, t), u)) for t in gens)
    res = AutResult(w * reduced, w, reduced, gens_orig)
    _AUT_CACHE[key] = res
    return res


def brute_force_aut_order(lat: GramLattice):
    """Oracle for small rank: count all Gram-preserving basis images."""
    n = lat.rank
    if n == 0:
        return 1
    if n > 5:
        raise ValueError("brute force oracle is for rank <= 5")
    g2, _ = lll_gram(lat.gram_rows())
    red = GramLattice(tuple(map(tuple, g2)))
    g = red.gram_rows()
    bound = max(g[i][i] for i in range(n))
    signed = shortvec.short_vectors(red, bound).all_vectors_signed()
    count = 0

    def rec(images):
        nonlocal count
        i = len(images)
        if i == n:
            if bareiss_det([list(v) for v in images]) in (1, -1):
                count += 1
            return
        for v in signed:
            if red.norm(v) != g[i][i]:
                continue
            if all(red.inner(v, images[t]) == g[i][t] for t in range(i)):
                rec(images + [v])

    rec([])
    return count


def is_isometric(l1: GramLattice, l2: GramLattice):
    """(answer, witness): witness W satisfies W G2 W^T = G1 (row action).

    Quick rejects (determinant, r_i counts, root class, fingerprint
    multisets) come first; the backtracking then matches the pair
    (G, Weyl form) of both sides, which loses no isometries because any
    isometry can be composed with a Weyl element carrying rho_1 to rho_2.
    """
    if l1.rank != l2.rank:
        return False, None
    if l1.rank == 0:
        return True, ()
    if det(l1) != det(l2):
        return False, None
    g1r, u1 = lll_gram(l1.gram_rows())
    g2r, u2 = lll_gram(l2.gram_rows())
    a = GramLattice(tuple(map(tuple, g1r)))
    b = GramLattice(tuple(map(tuple, g2r)))
    if shortvec.r_counts(a, 3) != shortvec.r_counts(b, 3):
        return False, None
    da = rootsys.root_datum_of(a)
    db = rootsys.root_datum_of(b)
    if da.cls != db.cls:
        return False, None
    enva = _VectorEnv(a, da.weyl2)
    if shortvec.r_counts(a, enva.bound) != shortvec.r_counts(b, enva.bound):
        return False, None
    envb = _VectorEnv(b, db.weyl2, bound=enva.bound)
    if sorted(map(int, enva.fingerprint)) != sorted(map(int, envb.fingerprint)):
        return False, None
    base, span_pos, zgen = _choose_base(enva)
    bd = _BaseData(enva, base, span_pos, zgen)
    t = _extend_cross(bd, envb)
    if t is None:
        return False, None
    w = mat_mul(mat_mul(mat_inverse_unimodular(u1), t), u2)
    assert mat_mul(mat_mul(w, l2.gram_rows()), _transpose(w)) == l1.gram_rows()
    return True, w


def _extend_cross(bd: _BaseData, env2: _VectorEnv):
    """Like _extend with no prefix, but images drawn from a second lattice."""
    n = len(bd.base)
    cand = []
    for j in range(n):
        fp = int(bd.env.fingerprint[bd.base[j]])
        arr = env2.static_candidates(bd.g0[j][j], bd.fw0[j] ** 2, fp)
        if len(arr) == 0:
            return None
        cand.append(arr)
    fixed = []
    found = [None]
    dots_m = env2.dots
    fw = env2.fw

    def rec():
        j = len(fixed)
        if j == n:
            t = bd.lift_matrix(fixed, env2)
            if t is not None:
                found[0] = t
                return True
            return False
        for img in cand[j]:
            img = int(img)
            fwi = int(fw[img])
            saved = cand[j + 1 : n]
            ok = True
            for t in range(j + 1, n):
                sub = cand[t]
                keep = (dots_m[img, sub] == bd.g0[t][j]) & (fw[sub] * fwi == bd.fw0[t] * bd.fw0[j])
                cand[t] = sub[keep]
                if len(cand[t]) == 0:
                    ok = False
                    break
            if ok:
                fixed.append(img)
                if rec():
                    return True
                fixed.pop()
            cand[j + 1 : n] = saved
        return False

    rec()
    return found[0]
