from fractions import Fraction
from math import factorial

import pytest

from unimodular.massbook import (
    MassLedger,
    OverdrawError,
    ledger_insert,
    mass_full,
    mass_no_norm_one,
    reduced_mass,
)
from unimodular.rootsys import cls


def test_mass_no_norm_one_table():
    assert mass_no_norm_one(8) == Fraction(1, 696729600)
    assert mass_no_norm_one(16) == Fraction(5213041, 277667181515243520000)
    assert mass_no_norm_one(13) == 0
    assert mass_no_norm_one(0) == 1
    with pytest.raises(ValueError):
        mass_no_norm_one(29)


def test_mass_full():
    assert mass_full(0) == 1
    assert mass_full(1) == Fraction(1, 2)
    assert mass_full(8) == Fraction(1, 696729600) + Fraction(1, 2**8 * factorial(8))
    # n < 8: only I_n
    for n in range(1, 8):
        assert mass_full(n) == Fraction(1, 2**n * factorial(n))


def test_reduced_mass():
    assert reduced_mass(696729600, cls("E8")) == 1
    assert reduced_mass(2**5 * factorial(5), cls("D5")) == Fraction(1, 2)
    with pytest.raises(ValueError):
        reduced_mass(7, cls("A1"))


def test_ledger_two_class_genus():
    target = mass_full(8)
    ledger = MassLedger(target)
    assert ledger_insert(ledger, {"d": 1}, ("I8",), 2**8 * factorial(8))
    assert not ledger.exhausted
    assert ledger_insert(ledger, {"d": 2}, ("E8",), 696729600)
    assert ledger.exhausted
    assert ledger.remaining == 0
    # duplicate is a notice, not an error
    assert not ledger_insert(ledger, {"d": 2}, ("E8",), 696729600)
    assert len(ledger.entries) == 2


def test_ledger_overdraw():
    ledger = MassLedger(Fraction(1, 10))
    with pytest.raises(OverdrawError):
        ledger_insert(ledger, {}, ("x",), 5)


def test_ledger_10a1_subledger():
    # reduced-mass accounting of the seven 10A1 classes in rank 26
    target = Fraction(4424507, 116121600)
    ledger = MassLedger(target)
    masses = [
        Fraction(1, 64),
        Fraction(1, 96),
        Fraction(1, 96),
        Fraction(1, 640),
        Fraction(1, 12288),
    ]
    for i, m in enumerate(masses):
        ledger.insert((i,), {}, 0, m)
    assert ledger.remaining == Fraction(17, 116121600)
    ledger.insert((5,), {}, 0, Fraction(1, 7372800))
    ledger.insert((6,), {}, 0, Fraction(1, 92897280))
    assert ledger.exhausted


def test_ledger_jsonl_roundtrip():
    ledger = MassLedger(mass_full(8))
    ledger_insert(ledger, {"n": 8, "d": 1, "x": [0] * 8, "eps": 0}, ("I8", 3), 2**8 * factorial(8))
    text = ledger.to_jsonl()
    back = MassLedger.from_jsonl(text)
    assert back.target == ledger.target
    assert back.remaining == ledger.remaining
    assert back.entries[0].aut_order == ledger.entries[0].aut_order
