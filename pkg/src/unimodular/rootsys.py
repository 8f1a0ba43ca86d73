"""ADE root systems: identification, Weyl data, visible systems, d-kernels.

Root system classes are canonical multisets of irreducible (letter, rank)
components, with the usual low-rank coincidences normalized away at
construction (D_2 = 2A_1, D_3 = A_3, empty ranks dropped).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd

from .core import GramLattice
from .intmat import mat_vec
from . import shortvec

_E_WEYL = {6: 51840, 7: 2903040, 8: 696729600}
_E_ROOTS = {6: 72, 7: 126, 8: 240}


@dataclass(frozen=True)
class RootSystemClass:
    """Multiset of irreducible ADE types, canonically normalized."""

    components: tuple  # sorted tuple of (letter, rank)

    def __post_init__(self):
        comps = []
        for letter, rank in self.components:
            comps.extend(_normalize(letter, rank))
        comps.sort()
        object.__setattr__(self, "components", tuple(comps))

    @property
    def rank(self):
        return sum(r for _, r in self.components)

    def counts(self):
        out = {}
        for c in self.components:
            out[c] = out.get(c, 0) + 1
        return out

    def union(self, other):
        return RootSystemClass(self.components + other.components)

    def remove(self, other):
        """Multiset difference; raises if other is not a sub-multiset."""
        mine = list(self.components)
        for c in other.components:
            mine.remove(c)
        return RootSystemClass(tuple(mine))

    def contains_components(self, other):
        mine = self.counts()
        return all(mine.get(c, 0) >= m for c, m in other.counts().items())

    def root_count(self):
        return sum(_irreducible_root_count(c) for c in self.components)

    def __str__(self):
        if not self.components:
            return "empty"
        parts = []
        for (letter, rank), mult in sorted(self.counts().items()):
            parts.append(f"{mult if mult > 1 else ''}{letter}{rank}")
        return " ".join(parts)


def _normalize(letter, rank):
    if rank < 0:
        raise ValueError("negative rank")
    if letter == "A":
        return [("A", rank)] if rank >= 1 else []
    if letter == "D":
        if rank <= 1:
            return []
        if rank == 2:
            return [("A", 1), ("A", 1)]
        if rank == 3:
            return [("A", 3)]
        return [("D", rank)]
    if letter == "E":
        if rank not in (6, 7, 8):
            raise ValueError(f"E_{rank} does not exist")
        return [("E", rank)]
    raise ValueError(f"unknown type {letter!r}")


def cls(spec):
    """Shorthand constructor: cls("A1 A1 D4") or cls([("A",1),("D",4)])."""
    if isinstance(spec, RootSystemClass):
        return spec
    if isinstance(spec, str):
        comps = []
        for tok in spec.split():
            mult = ""
            i = 0
            while tok[i].isdigit():
                mult += tok[i]
                i += 1
            letter = tok[i]
            rank = int(tok[i + 1 :])
            comps.extend([(letter, rank)] * (int(mult) if mult else 1))
        return RootSystemClass(tuple(comps))
    return RootSystemClass(tuple(spec))


EMPTY = RootSystemClass(())


def _irreducible_root_count(comp):
    letter, k = comp
    if letter == "A":
        return k * (k + 1)
    if letter == "D":
        return 2 * k * (k - 1)
    return _E_ROOTS[k]


def weyl_order(c: RootSystemClass):
    """|W(R)|: (k+1)! for A_k, 2^(k-1) k! for D_k, fixed E constants."""
    out = 1
    for letter, k in cls(c).components:
        if letter == "A":
            out *= factorial(k + 1)
        elif letter == "D":
            out *= 2 ** (k - 1) * factorial(k)
        else:
            out *= _E_WEYL[k]
    return out


@dataclass(frozen=True)
class RootDatum:
    """Roots plus derived Weyl data; weyl2 is twice the Weyl vector."""

    pairs: tuple  # one representative per +- pair, basis coordinates
    positive: tuple
    weyl2: tuple
    basis: tuple
    cls: RootSystemClass


def identify(roots, gram, _seed=0):
    """Classify a closed set of norm-2 vectors as an ADE root system.

    ``roots`` holds one vector per +-pair (or the full signed set), in the
    basis whose Gram matrix is ``gram``.  Raises ValueError if the input is
    not a root system.
    """
    g = [list(r) for r in gram]
    n = len(g)
    seen = set()
    pairs = []
    for v in roots:
        v = tuple(int(x) for x in v)
        neg = tuple(-x for x in v)
        if v in seen or neg in seen:
            continue
        seen.add(v)
        pairs.append(v)
    if not pairs:
        return RootDatum((), (), tuple([0] * n), (), EMPTY)
    for v in pairs:
        if _norm(g, v) != 2:
            raise ValueError("input contains a vector of norm != 2")

    primes = _first_primes(n)
    rng = random.Random(_seed)
    for _ in range(64):
        phi = [p for p in primes]
        vals = [sum(p * x for p, x in zip(phi, v)) for v in pairs]
        if all(vals):
            break
        primes = [p * (2 * rng.randint(1, 997) + 1) for p in primes]
    else:
        raise ValueError("could not split roots into positive/negative")
    positive = [v if val > 0 else tuple(-x for x in v) for v, val in zip(pairs, vals)]
    weyl2 = [sum(v[i] for v in positive) for i in range(n)]
    gw = mat_vec(g, weyl2)
    basis = [v for v in positive if sum(a * b for a, b in zip(gw, v)) == 2]

    comps = _dynkin_components(basis, g)
    classes = []
    for comp in comps:
        classes.append(_classify_component(comp, basis, g))
    out = RootSystemClass(tuple(classes))
    if out.root_count() != 2 * len(pairs):
        raise ValueError("root count mismatch: input is not closed under reflections")
    if len(pairs) <= 200:
        _check_closure(pairs, g)
    return RootDatum(tuple(pairs), tuple(positive), tuple(weyl2), tuple(basis), out)


def root_system_of(lat: GramLattice):
    """Root system class of R_2(L)."""
    sv = shortvec.short_vectors(lat, 2)
    return identify(sv.vectors_of_norm(2), lat.gram_rows()).cls


def root_datum_of(lat: GramLattice):
    sv = shortvec.short_vectors(lat, 2)
    return identify(sv.vectors_of_norm(2), lat.gram_rows())


def _norm(g, v):
    return sum(a * b for a, b in zip(v, mat_vec(g, list(v))))


def _first_primes(n):
    out = []
    k = 2
    while len(out) < n:
        if all(k % p for p in out):
            out.append(k)
        k += 1
    return out


def _dynkin_components(basis, g):
    m = len(basis)
    adj = [[] for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            p = sum(a * b for a, b in zip(basis[i], mat_vec(g, list(basis[j]))))
            if p not in (0, -1):
                raise ValueError("simple roots with product outside {0,-1}")
            if p == -1:
                adj[i].append(j)
                adj[j].append(i)
    seen = [False] * m
    comps = []
    for s in range(m):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append((comp, adj))
    return comps


def _classify_component(comp_adj, basis, g):
    comp, adj = comp_adj
    size = len(comp)
    degs = {v: len([w for w in adj[v] if w in comp]) for v in comp}
    edge_count = sum(degs.values()) // 2
    if edge_count != size - 1:
        raise ValueError("Dynkin component is not a tree")
    branch = [v for v in comp if degs[v] >= 3]
    if not branch:
        return ("A", size)
    if len(branch) > 1 or degs[branch[0]] > 3:
        raise ValueError("diagram is not of ADE shape")
    b = branch[0]
    arms = []
    for start in adj[b]:
        length = 1
        prev, cur = b, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return ("D", size)
    if arms[0] == 1 and arms[1] == 2 and size in (6, 7, 8):
        return ("E", size)
    raise ValueError("diagram is not of ADE shape")


def _check_closure(pairs, g):
    allv = set()
    for v in pairs:
        allv.add(v)
        allv.add(tuple(-x for x in v))
    for a in allv:
        for b in allv:
            p = sum(x * y for x, y in zip(a, mat_vec(g, list(b))))
            refl = tuple(x - p * y for x, y in zip(b, a))
            if refl not in allv:
                raise ValueError("root set not closed under reflections")


# ---------------------------------------------------------------------------
# visible root systems of M_d(x)


@dataclass(frozen=True)
class VisibleShape:
    """Equivalence data of x mod d: i ~ j iff x_i = +-x_j (mod d)."""

    m: int  # coordinates = d/2 (mod d); 0 for d odd
    m_prime: int  # coordinates = 0 (mod d)
    partition: tuple  # sizes of the remaining classes, descending


def visible_shape(x, d):
    if d < 1:
        raise ValueError("d must be >= 1")
    x = [v % d for v in x]
    m = sum(1 for v in x if d % 2 == 0 and v * 2 == d)
    m_prime = sum(1 for v in x if v == 0)
    rest = {}
    for v in x:
        if v == 0 or (d % 2 == 0 and 2 * v == d):
            continue
        key = min(v, d - v)
        rest[key] = rest.get(key, 0) + 1
    part = tuple(sorted(rest.values(), reverse=True))
    return VisibleShape(m, m_prime, part)


def visible_root_system(x, d):
    """Prop: R_2(M_d(x)) = D_m D_m' A_{a_1 - 1} A_{a_2 - 1} ..."""
    sh = visible_shape(x, d)
    comps = []
    if sh.m:
        comps.append(("D", sh.m))
    if sh.m_prime:
        comps.append(("D", sh.m_prime))
    for a in sh.partition:
        if a >= 2:
            comps.append(("A", a - 1))
    return RootSystemClass(tuple(comps))


# ---------------------------------------------------------------------------
# Venkov map, detecting and safe predicates

_D_EVEN_QM = lambda k: [Fraction(0), Fraction(1, 2), Fraction(k, 8), Fraction(k, 8)]
_D_ODD_QM = lambda k: [Fraction(0), Fraction(k, 8), Fraction(1, 2), Fraction(k, 8)]


def residue_qm_values(comp):
    """qm on the residue group of one irreducible component, as a list."""
    letter, k = comp
    if letter == "A":
        return [Fraction(i * (k + 1 - i), 2 * (k + 1)) for i in range(k + 1)]
    if letter == "D":
        return _D_EVEN_QM(k) if k % 2 == 0 else _D_ODD_QM(k)
    if k == 6:
        return [Fraction(0), Fraction(2, 3), Fraction(2, 3)]
    if k == 7:
        return [Fraction(0), Fraction(3, 4)]
    return [Fraction(0)]


def venkov_qm(c, element):
    """Sum of per-component qm values; element gives one residue index each."""
    c = cls(c)
    if len(element) != len(c.components):
        raise ValueError("need one residue index per component")
    total = Fraction(0)
    for comp, idx in zip(c.components, element):
        vals = residue_qm_values(comp)
        if not 0 <= idx < len(vals):
            raise ValueError(f"residue index {idx} out of range for {comp}")
        total += vals[idx]
    return total


def residue_order(c):
    out = 1
    for comp in cls(c).components:
        out *= len(residue_qm_values(comp))
    return out


def is_detecting(c, limit=10**6):
    """Exhaustive check: every x in res(S) with qm(x) in (1/2)Z has qm <= 1."""
    c = cls(c)
    if residue_order(c) > limit:
        raise ValueError("residue group too large for exhaustive check")
    value_lists = [residue_qm_values(comp) for comp in c.components]
    for combo in itertools.product(*value_lists):
        qm = sum(combo, Fraction(0))
        if (2 * qm).denominator == 1 and qm > 1:
            return False
    return True


def safe_witness(r, s):
    """Sufficient criterion: (R,S) is safe when S is detecting.

    S must be a sub-multiset of R's components (its orthogonal complement in
    R is the rest).  Returns False when the criterion does not certify
    safety; that is "not certified", not a proof of unsafety.
    """
    r, s = cls(r), cls(s)
    if not r.contains_components(s):
        raise ValueError("S is not a component sub-multiset of R")
    if not s.components:
        return True
    return is_detecting(s)


# ---------------------------------------------------------------------------
# d-kernels via Kac coordinates on the affine diagram


def _affine_diagram(comp):
    """(heights, edges) of the affine Dynkin diagram, vertex 0 affine."""
    letter, n = comp
    if letter == "A":
        if n == 1:
            return [1, 1], [(0, 1)]
        h = [1] * (n + 1)
        edges = [(i, (i + 1) % (n + 1)) for i in range(n + 1)]
        return h, edges
    if letter == "D":
        h = [1] + [0] * n
        edges = [(0, 2), (1, 2)]
        h[1] = 1
        for i in range(2, n - 1):
            h[i] = 2
            if i + 1 <= n - 2:
                edges.append((i, i + 1))
        edges.append((n - 2, n - 1))
        edges.append((n - 2, n))
        h[n - 1] = h[n] = 1
        return h, edges
    if n == 6:
        h = [1, 1, 2, 2, 3, 2, 1]
        edges = [(1, 3), (3, 4), (4, 5), (5, 6), (2, 4), (0, 2)]
        return h, edges
    if n == 7:
        h = [1, 2, 2, 3, 4, 3, 2, 1]
        edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (2, 4), (0, 1)]
        return h, edges
    h = [1, 2, 3, 4, 6, 5, 4, 3, 2]
    edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4), (0, 8)]
    return h, edges


def _kac_solvable(heights, d):
    """Is sum x_j h_j = d solvable with x_j >= 1 and gcd(d, {x_j}) = 1?"""
    heights = sorted(heights)
    suffix_min = [0] * (len(heights) + 1)
    for i in range(len(heights) - 1, -1, -1):
        suffix_min[i] = suffix_min[i + 1] + heights[i]

    def rec(i, rem, g):
        if i == len(heights):
            return rem == 0 and g == 1
        if rem < suffix_min[i]:
            return False
        hmax = (rem - suffix_min[i + 1]) // heights[i]
        for x in range(1, hmax + 1):
            if rec(i + 1, rem - x * heights[i], gcd(g, gcd(x, d)) if g != 1 else 1):
                return True
        return False

    return rec(0, d, d)


def _diagram_minus(comp, drop):
    """Class of the diagram with vertex set ``drop`` removed."""
    h, edges = _affine_diagram(comp)
    vertices = [v for v in range(len(h)) if v not in drop]
    adj = {v: [] for v in vertices}
    for a, b in edges:
        if a in adj and b in adj:
            adj[a].append(b)
            adj[b].append(a)
    if comp == ("A", 1) and len(vertices) == 2:
        # affine A_1 has a double bond; removing nothing never happens (J != {})
        raise AssertionError
    seen = set()
    comps = []
    for s in vertices:
        if s in seen:
            continue
        stack, nodes = [s], []
        seen.add(s)
        while stack:
            v = stack.pop()
            nodes.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(nodes)
    out = []
    for nodes in comps:
        degs = {v: len([w for w in adj[v] if w in nodes]) for v in nodes}
        branch = [v for v in nodes if degs[v] >= 3]
        if not branch:
            out.append(("A", len(nodes)))
            continue
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
            out.append(("D", len(nodes)))
        else:
            out.append(("E", len(nodes)))
    return RootSystemClass(tuple(out))


@lru_cache(maxsize=None)
def _irreducible_d_kernels(comp, d):
    letter, n = comp
    if d == 1:
        return frozenset({RootSystemClass((comp,))})
    out = set()
    if letter == "A" and n >= 2:
        # cycle of n+1 vertices, all heights 1: remove s vertices with gaps
        for s in range(2, min(d, n + 1) + 1):
            for gaps in _partitions(n + 1 - s, s):
                out.add(RootSystemClass(tuple(("A", a) for a in gaps if a >= 1)))
        return frozenset(out)
    h, _ = _affine_diagram(comp)
    idx = list(range(len(h)))
    for r in range(1, len(idx) + 1):
        for drop in itertools.combinations(idx, r):
            if _kac_solvable([h[j] for j in drop], d):
                out.add(_diagram_minus(comp, set(drop)))
    return frozenset(out)


def _partitions(total, parts):
    """Weakly decreasing tuples of ``parts`` nonnegative ints summing to total."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        if first * parts < total:
            break
        for rest in _partitions(total - first, parts - 1):
            if rest[0] <= first:
                yield (first,) + rest


def d_kernels(c, d):
    """All d-kernels of the class, up to isomorphism.

    Components combine through divisors d_i | d with lcm {d_i} = d, each
    contributing one of its own d_i-kernels.
    """
    c = cls(c)
    if d < 1:
        raise ValueError("d must be >= 1")
    divisors = [k for k in range(1, d + 1) if d % k == 0]
    comps = c.components
    results = set()

    def rec(i, lcm_so_far, acc):
        if i == len(comps):
            if lcm_so_far == d:
                merged = RootSystemClass(tuple(itertools.chain(*acc)))
                results.add(merged)
            return
        for di in divisors:
            new_lcm = lcm_so_far * di // gcd(lcm_so_far, di)
            if d % new_lcm != 0:
                continue
            # prune: remaining components must still be able to reach lcm d
            for ker in _irreducible_d_kernels(comps[i], di):
                rec(i + 1, new_lcm, acc + [ker.components])

    if not comps:
        return {EMPTY} if d == 1 else set()
    rec(0, 1, [])
    return results


def d_kernels_brute(c, d, _cache={}):
    """Oracle: kernels of all surjections Q(R) -> Z/d, by enumeration.

    Only sensible for small rank and d; used to validate d_kernels.
    """
    from .core import standard_lattice

    c = cls(c)
    key = (c.components, d)
    if key in _cache:
        return _cache[key]
    grams = []
    for letter, k in c.components:
        grams.append(standard_lattice(letter, k))
    n = c.rank
    g = [[0] * n for _ in range(n)]
    ofs = 0
    for lat in grams:
        for i in range(lat.rank):
            for j in range(lat.rank):
                g[ofs + i][ofs + j] = lat.gram[i][j]
        ofs += lat.rank
    lat = GramLattice(tuple(map(tuple, g)))
    roots = shortvec.short_vectors(lat, 2).vectors_of_norm(2)
    out = set()
    for xi in itertools.product(range(d), repeat=n):
        vals = [sum(a * b for a, b in zip(xi, v)) % d for v in roots]
        if gcd(d, gcd(*[gcd(x, d) for x in xi]) if xi else d) != 1 and d > 1:
            continue
        kernel_roots = [v for v, val in zip(roots, vals) if val == 0]
        out.add(identify(kernel_roots, g).cls if kernel_roots else EMPTY)
    _cache[key] = out
    return out
