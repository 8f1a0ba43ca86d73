import random

import pytest

from unimodular import core
from unimodular.core import (
    GramLattice,
    characteristic_rep,
    det,
    even_part,
    gram_from_json,
    gram_to_json,
    is_even,
    lll_reduce,
    saturate,
    split_norm_one,
    standard_lattice,
)
from unimodular.intmat import identity, mat_mul, transpose
from unimodular import shortvec


def random_unimodular(n, rng, steps=25):
    u = identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1])
        u[i] = [a + c * b for a, b in zip(u[i], u[j])]
    return u


def test_det_examples():
    assert det(standard_lattice("I", 4)) == 1
    assert det(standard_lattice("E", 8)) == 1
    assert det(GramLattice(((2, -1), (-1, 2)))) == 3


def test_det_basis_change_invariant():
    rng = random.Random(5)
    a2 = standard_lattice("A", 2)
    d4 = standard_lattice("D", 4)
    for lat in (a2, d4, standard_lattice("E", 6)):
        for _ in range(5):
            u = random_unimodular(lat.rank, rng)
            g2 = mat_mul(mat_mul(u, lat.gram_rows()), transpose(u))
            assert det(GramLattice(tuple(map(tuple, g2)))) == det(lat)


def test_is_even_examples():
    assert not is_even(standard_lattice("I", 1))
    assert is_even(standard_lattice("E", 8))
    assert is_even(standard_lattice("D", 4))


def test_standard_lattices_root_counts():
    assert shortvec.r_counts(standard_lattice("E", 8), 2)[2] == 240
    assert shortvec.r_counts(standard_lattice("E", 7), 2)[2] == 126
    assert shortvec.r_counts(standard_lattice("E", 6), 2)[2] == 72
    assert shortvec.r_counts(standard_lattice("A", 2), 2)[2] == 6
    assert shortvec.r_counts(standard_lattice("D", 5), 2)[2] == 40
    assert det(standard_lattice("E", 7)) == 2
    assert det(standard_lattice("E", 6)) == 3


def test_characteristic_rep():
    i5 = standard_lattice("I", 5)
    xi = characteristic_rep(i5).xi
    assert all(x % 2 == 1 for x in xi)
    e8 = standard_lattice("E", 8)
    xi = characteristic_rep(e8).xi
    assert all(x % 2 == 0 for x in xi)
    # xi . v = v . v mod 2 for random v
    rng = random.Random(1)
    for lat in (i5, e8, standard_lattice("I", 3)):
        xi = list(characteristic_rep(lat).xi)
        for _ in range(100):
            v = [rng.randint(-4, 4) for _ in range(lat.rank)]
            assert (lat.inner(xi, v) - lat.norm(v)) % 2 == 0


def test_characteristic_needs_odd_det():
    with pytest.raises(ValueError):
        characteristic_rep(standard_lattice("A", 1))


def test_even_part_of_in_is_dn():
    for n in (1, 2, 5, 8):
        ev = even_part(standard_lattice("I", n))
        assert det(ev) == 4
        assert is_even(ev)
        if n >= 2:
            assert shortvec.r_counts(ev, 2)[2] == 2 * n * (n - 1)
        else:
            assert ev.gram == ((4,),)
    e8 = standard_lattice("E", 8)
    assert even_part(e8) is e8


def test_saturate():
    i3 = standard_lattice("I", 3)
    sat, index = saturate(i3, [[2, 0, 0], [0, 2, 0], [0, 0, 2]])
    assert sat == identity(3)
    assert index == 8
    sat, index = saturate(i3, [[1, 1, 0]])
    assert sat == [[1, 1, 0]]
    assert index == 1
    sat2, index2 = saturate(i3, sat)
    assert (sat2, index2) == (sat, 1)  # idempotent


def test_split_norm_one():
    m, b = split_norm_one(standard_lattice("I", 5))
    assert (m, b.rank) == (5, 0)
    # E8 perp I2 via block gram
    e8 = standard_lattice("E", 8)
    n = 10
    g = [[0] * n for _ in range(n)]
    for i in range(8):
        for j in range(8):
            g[i][j] = e8.gram[i][j]
    g[8][8] = g[9][9] = 1
    m, b = split_norm_one(GramLattice(tuple(map(tuple, g))))
    assert m == 2
    assert b.rank == 8
    assert det(b) == 1
    assert is_even(b)
    assert shortvec.r_counts(b, 2)[2] == 240


def test_lll_preserves_det_and_short_vectors():
    rng = random.Random(9)
    d5 = standard_lattice("D", 5)
    u = random_unimodular(5, rng, steps=40)
    skew = GramLattice(tuple(map(tuple, mat_mul(mat_mul(u, d5.gram_rows()), transpose(u)))))
    red = lll_reduce(skew)
    assert det(red) == det(d5)
    assert shortvec.r_counts(red, 3) == shortvec.r_counts(d5, 3)
    assert max(red.gram[i][i] for i in range(5)) <= max(skew.gram[i][i] for i in range(5))


def test_lll_identity_unchanged():
    i6 = standard_lattice("I", 6)
    assert lll_reduce(i6).gram == i6.gram


def test_lll_recovers_orthonormal_at_rank8():
    rng = random.Random(23)
    i8 = standard_lattice("I", 8)
    u = random_unimodular(8, rng, steps=60)
    skew = GramLattice(tuple(map(tuple, mat_mul(mat_mul(u, i8.gram_rows()), transpose(u)))))
    red = lll_reduce(skew)
    assert red.gram == i8.gram  # identity up to signed permutation of basis


def test_gram_json_roundtrip():
    e6 = standard_lattice("E", 6)
    s = gram_to_json(e6)
    assert gram_from_json(s).gram == e6.gram
    assert '"2"' in s  # decimal strings


def test_embedding_validation():
    with pytest.raises(ValueError):
        GramLattice(((1, 0), (0, 1)), (2, ((1, 0), (0, 1))))
