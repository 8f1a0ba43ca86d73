"""Layered isometry invariants built on the norm <= 3 configuration.

The ladder: root system and r_i counts first, then the delta_s invariants
(norm-3 counts of orthogonal complements of size-s root components), then
delta_{s,p} which refines each term by the mod-p rank of the adjacency
graph of the complement's short vectors.  Fingerprints serialize these
canonically; ties are never declared isometries, the classifier always
confirms with an explicit isometry test.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import rootsys, shortvec
from .core import GramLattice, characteristic_rep, det, lll_reduce, orthogonal_complement
from .rootsys import EMPTY, RootSystemClass

# root systems (rank 27 in the source material) whose delta_{s,p} ladder
# must be escalated to s <= 7 and p in {5, 7}
ESCALATION_CLASSES = frozenset(
    rootsys.cls(s).components
    for s in [
        "3A1", "6A1", "7A1", "3A1 A2", "5A1 A2", "7A1 A2",
        "4A1 2A2", "6A1 2A2", "8A1 2A2", "5A1 3A2",
    ]
)


def _root_components(lat: GramLattice):
    """Irreducible components of R_2(L) as lists of simple-basis rows."""
    datum = rootsys.root_datum_of(lat)
    if not datum.basis:
        return datum, []
    g = lat.gram_rows()
    basis = [list(b) for b in datum.basis]
    m = len(basis)
    adj = [[False] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if lat.inner(basis[i], basis[j]) != 0:
                adj[i][j] = adj[j][i] = True
    seen = [False] * m
    comps = []
    for s in range(m):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in range(m):
                if adj[v][w] and not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append([basis[i] for i in comp])
    return datum, comps


def delta_s(lat: GramLattice, s: int):
    """Multiset of (class of C, |R_3(C-perp in L)|) over size-s components C.

    delta_0 is {(empty, r_3(L))}; the result is a canonically sorted tuple.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    if s == 0:
        return ((EMPTY, shortvec.r_counts(lat, 3)[3]),)
    datum, comps = _root_components(lat)
    out = []
    for chosen in combinations(range(len(comps)), s):
        rows = [r for i in chosen for r in comps[i]]
        comp_rows = orthogonal_complement(lat, rows)
        sub = lll_reduce(lat.sublattice(comp_rows))
        m = shortvec.r_counts(GramLattice(sub.gram), 3)[3]
        cls_c = _class_of_rows(lat, [comps[i] for i in chosen])
        out.append((cls_c, m))
    return tuple(sorted(out, key=lambda t: (str(t[0]), t[1])))


def _class_of_rows(lat, component_bases):
    comps = []
    for basis_rows in component_bases:
        sub = [[lat.inner(u, v) for v in basis_rows] for u in basis_rows]
        comps.extend(_cartan_class(sub).components)
    return RootSystemClass(tuple(comps))


def _cartan_class(cartan):
    """Classify an irreducible simple-root Gram (Cartan) matrix as ADE."""
    m = len(cartan)
    adj = [[j for j in range(m) if j != i and cartan[i][j] != 0] for i in range(m)]
    degs = [len(a) for a in adj]
    branch = [i for i in range(m) if degs[i] >= 3]
    if not branch:
        return rootsys.cls(f"A{m}")
    b = branch[0]
    arms = []
    for start in adj[b]:
        ln, prev, cur = 1, b, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            ln += 1
        arms.append(ln)
    arms.sort()
    if arms[:2] == [1, 1]:
        return rootsys.cls(f"D{m}")
    return rootsys.cls(f"E{m}")


def graph_rank_mod_p(lat: GramLattice, p: int):
    """Rank over F_p of the |x.y|-weighted adjacency matrix of R_{<=3}/+-."""
    if p < 2:
        raise ValueError("p must be a prime")
    sv = shortvec.short_vectors(lat, 3)
    vecs = [list(v) for v, _ in sv.pairs]
    m = len(vecs)
    if m == 0:
        return 0
    arr = np.array(vecs, dtype=np.int64)
    g = np.array(lat.gram_rows(), dtype=np.int64)
    dots = np.abs(arr @ g @ arr.T) % p
    return _rank_mod_p(dots.astype(np.int64), p)


def _rank_mod_p(a, p):
    a = a % p
    m, ncol = a.shape
    rank = 0
    row = 0
    for col in range(ncol):
        piv = None
        for r in range(row, m):
            if a[r, col] % p:
                piv = r
                break
        if piv is None:
            continue
        a[[row, piv]] = a[[piv, row]]
        inv = pow(int(a[row, col]), -1, p)
        a[row] = (a[row] * inv) % p
        colvals = a[row + 1 :, col].copy()
        nz = np.nonzero(colvals)[0]
        if len(nz):
            a[row + 1 :][nz] = (a[row + 1 :][nz] - np.outer(colvals[nz], a[row])) % p
        row += 1
        rank += 1
        if row == m:
            break
    return rank


def delta_sp(lat: GramLattice, s: int, p: int):
    """delta_s refined by the mod-p graph rank of each complement."""
    if s == 0:
        sub = lll_reduce(GramLattice(lat.gram))
        return ((EMPTY, shortvec.r_counts(sub, 3)[3], graph_rank_mod_p(sub, p)),)
    datum, comps = _root_components(lat)
    out = []
    for chosen in combinations(range(len(comps)), s):
        rows = [r for i in chosen for r in comps[i]]
        comp_rows = orthogonal_complement(lat, rows)
        sub = lll_reduce(lat.sublattice(comp_rows))
        plain = GramLattice(sub.gram)
        m = shortvec.r_counts(plain, 3)[3]
        r = graph_rank_mod_p(plain, p)
        out.append((_class_of_rows(lat, [comps[i] for i in chosen]), m, r))
    return tuple(sorted(out, key=lambda t: (str(t[0]),) + t[1:]))


def exc_set(lat: GramLattice):
    """(|Exc(L)|, representatives): characteristic vectors of norm n mod 8.

    Uses a shifted enumeration of the coset xi/2 + L; the count is 0 when
    the minimal characteristic norm exceeds the residue (non-exceptional).
    """
    n = lat.rank
    if n == 0:
        return (1, [()])  # the zero lattice is even: Char = {0}
    rho = n % 8
    xi = characteristic_rep(lat).xi
    assert (lat.norm(list(xi)) - n) % 8 == 0, "char norm must be n mod 8"
    t = tuple(Fraction(x, 2) for x in xi)
    min_q, vecs = shortvec.coset_min_vectors(lat, t)
    if 4 * min_q != rho:
        return (0, [])
    reps = []
    for v in vecs:
        doubled = tuple(int(2 * c) for c in v)
        reps.append(doubled)
    return (len(reps), sorted(reps))


def r3_consistency(lat: GramLattice):
    """The theta relation for 24 <= n <= 28, r_1 = 0; exact both sides."""
    n = lat.rank
    if not 24 <= n <= 28:
        raise ValueError("relation holds for 24 <= n <= 28")
    rc = shortvec.r_counts(lat, 3)
    if rc[1] != 0:
        raise ValueError("relation needs r_1(L) = 0")
    lhs = Fraction(rc[3])
    exc_size, _ = exc_set(lat)
    rhs = Fraction(4, 3) * n * (n * n - 69 * n + 1208) + 2 * (n - 24) * rc[2] - Fraction(2 ** (36 - n)) * exc_size
    return lhs == rhs


@dataclass(frozen=True)
class InvariantFingerprint:
    """Canonical layered invariant record; deeper layers cost more."""

    rank: int
    root_class: str
    r1: int
    r2: int
    r3: int
    depth: int
    delta1: tuple = ()
    delta2: tuple = ()
    delta_sp: tuple = ()

    def payload(self):
        return json.dumps(
            {
                "rank": self.rank,
                "root": self.root_class,
                "r": [self.r1, self.r2, self.r3],
                "depth": self.depth,
                "d1": [[str(c), m] for c, m in self.delta1],
                "d2": [[str(c), m] for c, m in self.delta2],
                "dsp": [
                    [s_, p_, [[str(c)] + list(rest) for c, *rest in terms]]
                    for s_, p_, terms in self.delta_sp
                ],
            },
            sort_keys=True,
        )

    def hash64(self):
        return int.from_bytes(hashlib.blake2b(self.payload().encode(), digest_size=8).digest(), "big")


def fingerprint(lat: GramLattice, depth: int = 1) -> InvariantFingerprint:
    """Deterministic fingerprint; depth 1 = root system and r_i, depth 2
    adds delta_1/delta_2, depth 3 adds the delta_{s,p} ladder (s <= 3,
    p = 5, escalated for the known hard root systems)."""
    if depth not in (1, 2, 3):
        raise ValueError("depth must be 1, 2 or 3")
    rc = shortvec.r_counts(lat, 3)
    root = rootsys.root_system_of(lat)
    d1 = d2 = dsp = ()
    if depth >= 2:
        d1 = delta_s(lat, 1)
        d2 = delta_s(lat, 2)
    if depth >= 3:
        if root.components in ESCALATION_CLASSES:
            dsp = tuple(
                (s, p) + (delta_sp(lat, s, p),) for p in (5, 7) for s in range(0, 8)
            )
        else:
            dsp = tuple((s, 5, delta_sp(lat, s, 5)) for s in range(0, 4))
    return InvariantFingerprint(
        rank=lat.rank,
        root_class=str(root),
        r1=rc[1],
        r2=rc[2],
        r3=rc[3],
        depth=depth,
        delta1=d1,
        delta2=d2,
        delta_sp=dsp,
    )
