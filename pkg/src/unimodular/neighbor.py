"""Cyclic d-neighbors of Z^n.

A neighbor form (d, x, eps) encodes the unimodular lattice
N_d(x; eps) = M_d(x) + Z xtilde/d, where M_d(x) is the index-d sublattice of
Z^n orthogonal to x mod d and xtilde = x + r d y is an isotropic lift.  For
d odd there is exactly one neighbor per isotropic line and eps is fixed at
0; for d even the two lifts give the two neighbors eps = 0, 1.

eps bookkeeping follows the representative warning: replacing x by x + d v
turns eps into eps + v.v, so every re-representation of x transports eps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

from .core import GramLattice, from_rows, is_even
from .intmat import hnf, mat_mul, mat_vec, right_kernel, xgcd
from .rootsys import RootSystemClass, visible_root_system, visible_shape


@dataclass(frozen=True)
class NeighborForm:
    """The triple (d, x, eps); x stored with coordinates in [0, d)."""

    n: int
    d: int
    x: tuple
    eps: int = 0

    def __post_init__(self):
        x = tuple(int(v) for v in self.x)
        object.__setattr__(self, "x", x)
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if len(x) != self.n:
            raise ValueError("x must have length n")
        if any(not 0 <= v < self.d for v in x) and self.d > 1:
            raise ValueError("coordinates must lie in [0, d); use from_raw to normalize")
        if self.d == 1 and any(x):
            raise ValueError("d = 1 forms store the zero vector")
        g = self.d
        for v in x:
            g = gcd(g, v)
        if g != 1 and self.d > 1:
            raise ValueError("x is not d-primitive")
        e = 1 if self.d % 2 else 2
        if sum(v * v for v in x) % (e * self.d) != 0:
            raise ValueError("x is not d-isotropic")
        if self.eps not in (0, 1):
            raise ValueError("eps must be 0 or 1")
        if self.d % 2 == 1 and self.eps:
            raise ValueError("eps is only meaningful for even d")

    @property
    def e(self):
        return 1 if self.d % 2 else 2

    def eps_variants(self):
        """The distinct neighbors over this line: one for d odd, or when
        some x_i = d/2 (the two eps are then isometric); two otherwise."""
        if self.d % 2 or any(2 * v == self.d for v in self.x):
            return [NeighborForm(self.n, self.d, self.x, 0)]
        return [NeighborForm(self.n, self.d, self.x, 0), NeighborForm(self.n, self.d, self.x, 1)]

    def to_record(self):
        return {"n": self.n, "d": self.d, "x": list(self.x), "eps": self.eps}

    @staticmethod
    def from_record(rec):
        return NeighborForm(rec["n"], rec["d"], tuple(rec["x"]), rec.get("eps", 0))

    def __str__(self):
        return f"N_{self.d}({','.join(map(str, self.x))};{self.eps})"


def from_raw(n, d, x, eps=0):
    """Build a form from arbitrary integer coordinates, transporting eps."""
    x = [int(v) for v in x]
    shifts = 0
    out = []
    for v in x:
        k, rem = divmod(v, d)
        out.append(rem)
        shifts += k * k
    if d % 2 == 0:
        eps = (eps + shifts) % 2
    else:
        eps = 0
    return NeighborForm(n, d, tuple(out), eps)


def canonical_line(x, d, eps=0):
    """The d-ordered representative 0 <= x_1 <= ... <= x_n <= d/2.

    Sign flips are free (O(I_n) action); each flip of a coordinate v > d/2
    lands at d - v, which is a flip followed by a +d shift, so eps gains 1.
    Returns (coordinates, eps); works on any d-primitive vector.
    """
    x = [int(v) % d for v in x]
    flips = 0
    out = []
    for v in x:
        if 2 * v > d:
            out.append(d - v)
            flips += 1
        else:
            out.append(v)
    out.sort()
    eps = (eps + flips) % 2 if d % 2 == 0 else 0
    return tuple(out), eps


def canonical_form(f: NeighborForm) -> NeighborForm:
    """canonical_line applied to a valid form, returned as a form."""
    coords, eps = canonical_line(f.x, f.d, f.eps)
    return NeighborForm(f.n, f.d, coords, eps)


def line_orbit_key(x, d):
    """Canonical key of the O(I_n)-orbit of the line generated by x.

    Unit rescalings of x generate the same subgroup of (Z/d)^n, so the key
    minimizes the d-ordered representative over them.  Two d-ordered vectors
    with equal keys give rise to the same neighbors up to O(I_n).
    """
    best = None
    for lam in range(1, d):
        if gcd(lam, d) != 1:
            continue
        cand = canonical_line([lam * v for v in x], d)[0]
        if best is None or cand < best:
            best = cand
    return best if best is not None else tuple(v % d for v in x)


def m_lattice(f: NeighborForm) -> GramLattice:
    """The visible part M_d(x) = {v in Z^n : x.v = 0 mod d}, det d^2."""
    n, d, x = f.n, f.d, f.x
    if d == 1:
        return from_rows([[int(i == j) for j in range(n)] for i in range(n)], 1)
    ker = right_kernel([list(x) + [-d]], n + 1)
    rows = hnf([w[:n] for w in ker], n)
    lat = from_rows(rows, 1)
    from .core import det

    assert det(lat) == d * d, "M_d(x) must have determinant d^2"
    return lat


def _solve_unit_combination(w, d):
    """Deterministic y with w.y = 1 mod d.

    Smallest index with an invertible coordinate wins; otherwise an extended
    gcd chain over the coordinates in index order.
    """
    n = len(w)
    for i in range(n):
        if gcd(w[i] % d, d) == 1:
            t = pow(w[i] % d, -1, d)
            y = [0] * n
            y[i] = t
            return y
    g = 0
    coeff = [0] * n
    for i in range(n):
        g2, a, b = xgcd(g, w[i])
        coeff = [a * c for c in coeff]
        coeff[i] = b
        g = g2
    if gcd(g % d, d) != 1:
        raise ValueError("vector has no unit pairing mod d")
    t = pow(g % d, -1, d)
    return [c * t for c in coeff]


def build(f: NeighborForm) -> GramLattice:
    """N_d(x; eps) as an embedded unimodular lattice (denominator d)."""
    n, d, x = f.n, f.d, list(f.x)
    if d == 1:
        return from_rows([[int(i == j) for j in range(n)] for i in range(n)], 1)
    m = m_lattice(f)
    y = _solve_unit_combination(x, d)
    xx = sum(v * v for v in x)
    if d % 2:
        # xtilde.xtilde = x.x + 2rd mod d^2, so r = -(x.x/d)/2 mod d
        r = (-((d + 1) // 2) * (xx // d)) % d
    else:
        # r also pins the eps label: xtilde.x = x.x/2 + eps d^2/2 mod d^2
        r = (-(xx // (2 * d)) + f.eps * (d // 2)) % d
    xt = [a + r * d * b for a, b in zip(x, y)]
    assert sum(v * v for v in xt) % (d * d) == 0
    rows = [[d * v for v in row] for row in m.embedding[1]] + [xt]
    basis = hnf(rows, n)
    lat = from_rows(basis, d)
    from .core import det

    assert det(lat) == 1, "neighbor must be unimodular"
    return lat


def is_even_neighbor(f: NeighborForm) -> bool:
    """Parity of N_d(x; eps) from the congruence, without building it."""
    if f.d % 2:
        return False  # odd-d neighbors of the odd lattice I_n stay odd
    if any(v % 2 == 0 for v in f.x):
        return False
    s = sum(v * v for v in f.x)
    return (s - f.d * (2 + f.d) * f.eps) % (4 * f.d) == 0


def add_Im(f: NeighborForm, m: int) -> NeighborForm:
    """N_d(x 0^m) = N_d(x) perp I_m, same d and eps."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return NeighborForm(f.n + m, f.d, f.x + (0,) * m, f.eps)


def neighbor_of(lat: GramLattice, x, dp, eps=0) -> GramLattice:
    """A cyclic dp-neighbor of an arbitrary embedded unimodular lattice.

    ``x`` is given in the basis of ``lat``; the result is embedded in the
    same ambient Q^n with denominator lat_denominator * dp.
    """
    from .core import det

    if det(lat) != 1:
        raise ValueError("base lattice must be unimodular")
    n = lat.rank
    x = [int(v) for v in x]
    e = 1 if dp % 2 else 2
    xx = lat.norm(x)
    if xx % (e * dp) != 0:
        raise ValueError("x is not dp-isotropic in the base lattice")
    if dp == 1:
        return lat
    w = mat_vec(lat.gram_rows(), x)  # v -> x.v is w . coords
    g = dp
    for v in w:
        g = gcd(g, v)
    if g != 1:
        raise ValueError("x is not dp-primitive")
    ker = right_kernel([w + [-dp]], n + 1)
    m_rows = hnf([row[:n] for row in ker], n)
    y = _solve_unit_combination(w, dp)
    if dp % 2:
        r = (-((dp + 1) // 2) * (xx // dp)) % dp
    else:
        r = (-(xx // (2 * dp)) + eps * (dp // 2)) % dp
    xt = [a + r * dp * b for a, b in zip(x, y)]
    assert lat.norm(xt) % (dp * dp) == 0
    rows = [[dp * v for v in row] for row in m_rows] + [xt]
    basis = hnf(rows, n)
    dnm, b = lat.embedding
    ambient = mat_mul(basis, [list(r_) for r_ in b])
    out = from_rows(ambient, dnm * dp)
    assert det(out) == 1
    return out


def lattice_line(lat: GramLattice, big_d: int):
    """The line l(N) = (D N + D Z^n)/D Z^n for an embedded neighbor of I_n.

    Returns a generator of the cyclic subgroup of (Z/D)^n, as a vector with
    entries in [0, D).
    """
    dnm, rows = lat.embedding
    if big_d % dnm != 0:
        raise ValueError("denominator must divide D")
    scale = big_d // dnm
    gens = [[scale * v for v in row] for row in rows]

    def order(vec):
        g = big_d
        for v in vec:
            g = gcd(g, v % big_d)
        return big_d // g

    best = None
    for gen in gens:
        if best is None or order(gen) > order(best):
            best = gen
        if order(best) == big_d:
            break
    if order(best) < big_d:
        for gen in gens:
            for t in range(1, 64):
                cand = [a + t * b for a, b in zip(best, gen)]
                if order(cand) > order(best):
                    best = cand
                if order(best) == big_d:
                    break
            if order(best) == big_d:
                break
    if order(best) != big_d:
        raise ValueError("could not find a cyclic generator: is the lattice a D-neighbor?")
    return [v % big_d for v in best]


def compose(f_outer: NeighborForm, inner: GramLattice, d_inner: int) -> NeighborForm:
    """Express a d'-neighbor of N_d(x) as a dd'-neighbor of I_n.

    ``inner`` must be an embedded lattice produced as a d'-neighbor of
    build(f_outer) with gcd(d, d') = 1.  The recovered form satisfies
    y = x mod d.
    """
    d, dp = f_outer.d, d_inner
    if gcd(d, dp) != 1:
        raise ValueError("moduli must be coprime")
    if dp == 1:
        return f_outer
    big_d = d * dp
    z = lattice_line(inner, big_d)
    # normalize so that z = x (mod d), convenient but not required
    cand = from_raw(f_outer.n, big_d, z)
    if big_d % 2 == 0:
        for eps in (0, 1):
            form = NeighborForm(f_outer.n, big_d, cand.x, eps)
            if _same_embedded_lattice(build(form), inner):
                return form
        raise AssertionError("neither eps reproduces the inner lattice")
    form = cand
    assert _same_embedded_lattice(build(form), inner)
    return form


def _same_embedded_lattice(a: GramLattice, b: GramLattice):
    da, ra = a.embedding
    db, rb = b.embedding
    scale = da * db // gcd(da, db)
    ha = hnf([[v * (scale // da) for v in row] for row in ra])
    hb = hnf([[v * (scale // db) for v in row] for row in rb])
    return ha == hb


def add_Dm_candidates(f: NeighborForm, m: int, visible_exact=True):
    """Stream the 2d-neighbor forms of I_{n+m} gluing a D_m onto N_d(x).

    d must be odd and m >= 2; candidates satisfy y = x mod d on the first n
    coordinates and y_i = d mod 2d on the last m.  With ``visible_exact``
    the stream is filtered to visible root system R^v(x) + D_m.
    """
    if f.d % 2 == 0:
        raise ValueError("base form must have odd d")
    if m < 2:
        raise ValueError("need m >= 2 to glue a D_m")
    d = f.d
    n = f.n
    target = None
    if visible_exact:
        target = visible_root_system(f.x, d).union(RootSystemClass((("D", m),)))
    tail = (d,) * m
    for bits in itertools.product((0, 1), repeat=n):
        y = tuple(v + d * b for v, b in zip(f.x, bits)) + tail
        if sum(v * v for v in y) % (4 * d) != 0:
            continue
        if target is not None and visible_root_system(y, 2 * d) != target:
            continue
        # y_i = d appears m >= 2 times, so the two eps give isometric
        # neighbors and a single form per line suffices
        yield NeighborForm(n + m, 2 * d, y, 0)


def companions(f: NeighborForm):
    """The two companions of N_d(x): the N_{2d}(y; eps) with y odd, y = x mod d.

    Requires d odd and n = 4 mod 8 (the even part then has three unimodular
    overlattices).
    """
    if f.d % 2 == 0:
        raise ValueError("companions need odd d")
    if f.n % 8 != 4:
        raise ValueError("companions exist for n = 4 mod 8")
    d = f.d
    y = tuple(v if v % 2 else v + d for v in f.x)
    return (NeighborForm(f.n, 2 * d, y, 0), NeighborForm(f.n, 2 * d, y, 1))


def visible_isometry_group(f: NeighborForm):
    """(H, kernel_order): image and kernel size of nu on O(I_n; line).

    H is the subgroup of (Z/d)* preserving the multiset {+-x_i}, the kernel
    is O(I_m) x O(I_m') x prod S_{a_i}.
    """
    d = f.d
    classes = {}
    for v in f.x:
        key = min(v % d, (d - v) % d)
        classes[key] = classes.get(key, 0) + 1
    h = []
    for lam in range(1, d):
        if gcd(lam, d) != 1:
            continue
        mapped = {}
        for key, cnt in classes.items():
            nk = min(lam * key % d, (d - lam * key) % d)
            mapped[nk] = mapped.get(nk, 0) + cnt
        if mapped == classes:
            h.append(lam)
    sh = visible_shape(f.x, d)
    from math import factorial

    kernel = 2**sh.m * factorial(sh.m) * 2**sh.m_prime * factorial(sh.m_prime)
    for a in sh.partition:
        kernel *= factorial(a)
    return sorted(h), kernel


def stable_line(n, q, k, p, omega, d_coprime, y_tail, scales=None):
    """A p*d-isotropic line fixed by a product of k q-cycles.

    The cycles act on the first q*k coordinates in consecutive blocks; x is
    a geometric progression of ratio omega (order q mod p) on each block and
    0 mod p elsewhere, glued by CRT to the d-isotropic vector y_tail (which
    must be constant on each block).  The resulting neighbor has the cycle
    permutation as a visible isometry with nu = omega mod p, nu = 1 mod d.
    """
    if q * k > n:
        raise ValueError("need q*k <= n")
    if p % q != 1:
        raise ValueError("p must be 1 mod q")
    if gcd(p, d_coprime) != 1:
        raise ValueError("p must be coprime to d")
    if pow(omega, q, p) != 1 or any(pow(omega, j, p) == 1 for j in range(1, q)):
        raise ValueError("omega must have exact order q mod p")
    y_tail = [int(v) for v in y_tail]
    if len(y_tail) != n:
        raise ValueError("y_tail must have length n")
    e = 1 if d_coprime % 2 else 2
    if sum(v * v for v in y_tail) % (e * d_coprime) != 0:
        raise ValueError("y_tail must be d-isotropic")
    if scales is None:
        scales = [1] * k
    x_mod_p = [0] * n
    for j in range(k):
        if len({y_tail[j * q + s] % d_coprime for s in range(q)}) != 1:
            raise ValueError("y_tail must be constant on each cycle block")
        for s in range(q):
            x_mod_p[j * q + s] = scales[j] * pow(omega, s, p) % p
    if q == 2 and sum(v * v for v in x_mod_p) % p != 0:
        raise ValueError("for q = 2 the mod-p part must be isotropic")
    big_d = p * d_coprime
    z = []
    for a, b in zip(x_mod_p, y_tail):
        # CRT: z = a mod p, z = b mod d_coprime
        g, u, v = xgcd(p, d_coprime)
        z.append((a * v * d_coprime + b * u * p) % big_d)
    return from_raw(n, big_d, z)


def cycle_permutation(n, q, k):
    """The visible isometry of stable_line as a permutation of 0..n-1."""
    perm = list(range(n))
    for j in range(k):
        for s in range(q):
            perm[j * q + s] = j * q + (s + 1) % q
    return perm


def permute_form(f: NeighborForm, perm):
    """Form for the permuted line x o perm^{-1} (an O(I_n) image)."""
    x = [0] * f.n
    for i in range(f.n):
        x[perm[i]] = f.x[i]
    return NeighborForm(f.n, f.d, tuple(x), f.eps)


def is_visible_char_form(f: NeighborForm, r: int):
    """Does e = (0^{n-r}, 1^r) lie in Char(N_d(x; eps))?  (d even.)

    Conditions: (i) the last r coordinates sum to 0 mod d, (ii) x_i odd
    for i <= n-r and even after, (iii) the eps congruence mod 4d.
    """
    n, d, x = f.n, f.d, f.x
    if d % 2:
        raise ValueError("visible characteristic vectors need d even")
    if not 1 <= r < n:
        raise ValueError("need 1 <= r < n")
    head, tail = x[: n - r], x[n - r :]
    if sum(tail) % d != 0:
        return False
    if any(v % 2 == 0 for v in head) or any(v % 2 for v in tail):
        return False
    lhs = 2 * sum(tail)
    rhs = sum(v * v for v in x) + d * f.eps * (2 + d)
    return (lhs - rhs) % (4 * d) == 0


def visible_char_stream(n, r, d, head_values=None, tail_values=None):
    """Stream forms with the visible characteristic vector (0^{n-r}, 1^r).

    head_values / tail_values bound the search space: sorted tuples are
    drawn from them (defaults: odd values in [1, d/2] for the head, even
    values in [2, d) for the tail).  Intended for small searches; each
    output satisfies is_visible_char_form.
    """
    if d % 2:
        raise ValueError("d must be even")
    if n % 8 != r % 8:
        raise ValueError("need r = n mod 8 for characteristic norms")
    if head_values is None:
        head_values = [v for v in range(1, d // 2 + 1) if v % 2 == 1]
    if tail_values is None:
        tail_values = [v for v in range(2, d) if v % 2 == 0]
    for head in itertools.combinations_with_replacement(head_values, n - r):
        for tail in itertools.combinations_with_replacement(tail_values, r):
            if sum(tail) % d != 0:
                continue
            x = head + tail
            s = sum(v * v for v in x)
            if s % (2 * d) != 0:
                continue
            g = d
            for v in x:
                g = gcd(g, v)
            if g != 1:
                continue
            for eps in (0, 1):
                f = NeighborForm(n, d, x, eps)
                if is_visible_char_form(f, r):
                    yield f


# ---------------------------------------------------------------------------
# line enumeration


@dataclass(frozen=True)
class IsotropicLinePattern:
    """Prescribed shape of a line: forced-equal classes, d/2 block, singles.

    ``sizes`` lists the forced equivalence classes (mod +-) of size >= 1;
    ``half_d`` forces that many coordinates to d/2; ``free`` is shorthand
    for that many singleton classes.  All class values are pairwise distinct
    mod +-, and one unforced class may sit at d/2 when half_d = 0 (a pair of
    equal coordinates at d/2 is still a pair).
    """

    sizes: tuple = ()
    half_d: int = 0
    free: int = 0

    def total(self):
        return sum(self.sizes) + self.half_d + self.free

    def all_sizes(self):
        return tuple(sorted(tuple(self.sizes) + (1,) * self.free, reverse=True))

    @staticmethod
    def parse(text):
        """Parse "8*2+10*1" or "8*2+10*1+4*h" (h = the d/2 block)."""
        sizes = []
        half = 0
        for term in text.split("+"):
            cnt, _, what = term.partition("*")
            if what == "h":
                half += int(cnt)
            else:
                sizes.extend([int(what)] * int(cnt))
        return IsotropicLinePattern(tuple(sorted(sizes, reverse=True)), half, 0)


def _sorted_tuples(values, length):
    return itertools.combinations_with_replacement(values, length)


def _pattern_lines(n, d, pattern):
    sizes = pattern.all_sizes()
    if pattern.total() != n:
        raise ValueError("pattern must cover all n coordinates")
    half = d // 2 if d % 2 == 0 else None
    pool = list(range(1, (d - 1) // 2 + 1)) if d % 2 else list(range(1, d // 2))
    groups = []
    for s in sorted(set(sizes), reverse=True):
        groups.append((s, sizes.count(s)))

    def assignments(gi, used, half_used):
        if gi == len(groups):
            yield []
            return
        size, count = groups[gi]
        avail = [v for v in pool if v not in used]
        for combo in itertools.combinations(avail, count):
            for rest in assignments(gi + 1, used | set(combo), half_used):
                yield [(size, v) for v in combo] + rest
        if half is not None and not half_used and pattern.half_d == 0:
            # one class of this size may occupy d/2
            for combo in itertools.combinations(avail, count - 1):
                for rest in assignments(gi + 1, used | set(combo), True):
                    yield [(size, v) for v in combo] + [(size, half)] + rest

    for assign in assignments(0, set(), False):
        coords = []
        for size, v in assign:
            coords.extend([v] * size)
        if pattern.half_d:
            if half is None:
                return
            coords.extend([half] * pattern.half_d)
        coords.sort()
        yield tuple(coords)


def enumerate_lines(n, d, pattern=None, allow_zero=False, normalize_first=False,
                    start=0, stride=1, offset=0):
    """Stream d-ordered d-isotropic forms, optionally biased by a pattern.

    Lines are indexed in a fixed deterministic order; the (start, stride,
    offset) cursor makes shards disjoint and resumption exact: a shard
    yields the lines with index = offset mod stride and index >= start.
    Emitted forms carry eps = 0; expand with eps_variants().

    ``normalize_first`` keeps only vectors where the value 1 occurs with
    maximal multiplicity (an exact dedup for d prime, a lossy heuristic for
    composite d); distinct emitted vectors may still generate the same line,
    so downstream classification dedups by invariants regardless.
    """
    e = 1 if d % 2 else 2
    if pattern is not None:
        source = _pattern_lines(n, d, pattern)
    else:
        lo = 0 if allow_zero else 1
        source = _sorted_tuples(range(lo, d // 2 + 1), n)
    idx = -1
    for coords in source:
        g = d
        s = 0
        ok = True
        for v in coords:
            g = gcd(g, v)
            s += v * v
            if v == 0 and not allow_zero:
                ok = False
        if not ok or g != 1 or s % (e * d) != 0:
            continue
        if normalize_first:
            counts = {}
            for v in coords:
                counts[v] = counts.get(v, 0) + 1
            if counts.get(1, 0) != max(counts.values()):
                continue
        idx += 1
        if idx < start or (idx - offset) % stride:
            continue
        yield NeighborForm(n, d, coords, 0)
