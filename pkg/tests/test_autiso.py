import random
from math import factorial

import pytest

from unimodular.autiso import AutResult, aut_order, brute_force_aut_order, is_isometric
from unimodular.core import GramLattice, standard_lattice
from unimodular.intmat import identity, mat_mul, transpose
from unimodular.neighbor import NeighborForm, build


def random_basis_change(lat, rng, steps=30):
    u = identity(lat.rank)
    for _ in range(steps):
        i, j = rng.sample(range(lat.rank), 2)
        c = rng.choice([-1, 1])
        u[i] = [a + c * b for a, b in zip(u[i], u[j])]
    g = mat_mul(mat_mul(u, lat.gram_rows()), transpose(u))
    return GramLattice(tuple(map(tuple, g)))


def test_aut_in():
    for n in (1, 2, 3, 5, 8):
        res = aut_order(standard_lattice("I", n))
        assert res.full_order == 2**n * factorial(n)
        assert res.full_order == res.weyl_order * res.reduced_order


def test_aut_e8():
    res = aut_order(standard_lattice("E", 8))
    assert res.full_order == 696729600
    assert res.reduced_order == 1
    assert res.weyl_order == 696729600


def test_aut_small_roots():
    assert aut_order(standard_lattice("A", 2)).full_order == 12  # W(A2) x {+-1}
    assert aut_order(standard_lattice("D", 4)).full_order == 1152  # triality x W
    assert aut_order(standard_lattice("A", 1)).full_order == 2


def test_aut_matches_brute_force():
    rng = random.Random(41)
    lats = [
        standard_lattice("I", 2),
        standard_lattice("I", 3),
        standard_lattice("I", 4),
        standard_lattice("A", 2),
        standard_lattice("A", 3),
        standard_lattice("D", 4),
        GramLattice(((2, 0), (0, 3))),
        GramLattice(((1, 0, 0), (0, 2, 1), (0, 1, 2))),
    ]
    for lat in lats:
        want = brute_force_aut_order(lat)
        got = aut_order(lat).full_order
        assert got == want, lat
        skew = random_basis_change(lat, rng)
        assert aut_order(skew).full_order == want


def test_aut_generators_are_isometries():
    lat = standard_lattice("D", 4)
    res = aut_order(lat)
    g = lat.gram_rows()
    for t in res.generators:
        tm = [list(r) for r in t]
        assert mat_mul(mat_mul(tm, g), transpose(tm)) == g


def test_aut_direct_sum_no_exchange():
    # A2 perp I3: no isometry mixes the factors, so orders multiply
    a2 = standard_lattice("A", 2)
    n = 5
    g = [[0] * n for _ in range(n)]
    for i in range(2):
        for j in range(2):
            g[i][j] = a2.gram[i][j]
    for i in range(2, 5):
        g[i][i] = 1
    lat = GramLattice(tuple(map(tuple, g)))
    assert aut_order(lat).full_order == aut_order(a2).full_order * 2**3 * factorial(3)
    assert aut_order(lat).full_order == brute_force_aut_order(lat)


def test_is_isometric_basic():
    rng = random.Random(7)
    d5 = standard_lattice("D", 5)
    ok, w = is_isometric(d5, random_basis_change(d5, rng))
    assert ok
    assert is_isometric(standard_lattice("I", 4), standard_lattice("I", 4))[0]
    ok, _ = is_isometric(standard_lattice("A", 2), GramLattice(((2, 1), (1, 2))))
    assert ok
    no, w = is_isometric(standard_lattice("I", 8), build(NeighborForm(8, 2, (1,) * 8)))
    assert not no and w is None


def test_is_isometric_witness_equation():
    rng = random.Random(11)
    e6 = standard_lattice("E", 6)
    other = random_basis_change(e6, rng)
    ok, w = is_isometric(e6, other)
    assert ok
    assert mat_mul(mat_mul(w, other.gram_rows()), transpose(w)) == e6.gram_rows()


def test_n2_18_is_e8():
    ok, w = is_isometric(build(NeighborForm(8, 2, (1,) * 8)), standard_lattice("E", 8))
    assert ok and w is not None


def test_cor38_collapse():
    # x_i = d/2 for some i: the two eps give isometric neighbors
    x = (1, 1, 1, 1, 1, 1, 1, 1, 2, 2)
    l0 = build(NeighborForm(10, 4, x, 0))
    l1 = build(NeighborForm(10, 4, x, 1))
    assert is_isometric(l0, l1)[0]


def test_is_isometric_equivalence_spotcheck():
    rng = random.Random(2)
    pool = []
    for f in [
        NeighborForm(8, 2, (1,) * 8),
        NeighborForm(8, 3, (0, 0, 1, 1, 1, 1, 1, 1)),
        NeighborForm(8, 5, (1, 1, 1, 2, 2, 2, 3, 1)),
    ]:
        try:
            pool.append(build(f))
        except ValueError:
            pass
    pool.append(standard_lattice("I", 8))
    for lat in list(pool):
        pool.append(random_basis_change(lat, rng))
    # symmetry
    for a in pool[:4]:
        for b in pool[:4]:
            assert is_isometric(a, b)[0] == is_isometric(b, a)[0]
    # transitivity via basis changes of the same lattice
    a, b = pool[0], random_basis_change(pool[0], rng)
    c = random_basis_change(pool[0], rng)
    assert is_isometric(a, b)[0] and is_isometric(b, c)[0] and is_isometric(a, c)[0]


def test_aut_invariant_under_basis_change_neighbor():
    rng = random.Random(3)
    lat = build(NeighborForm(8, 3, (0, 0, 1, 1, 1, 1, 1, 1)))
    plain = GramLattice(lat.gram)
    res1 = aut_order(plain)
    res2 = aut_order(random_basis_change(plain, rng))
    assert res1.full_order == res2.full_order
