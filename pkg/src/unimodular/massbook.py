"""Exact-rational mass bookkeeping for the classification driver.

The target masses come from the published table of masses of unimodular
lattices with no norm-1 vector; the full-genus mass follows from the
generating function identity sum mass(L'_n) x^n = e^{-x/2} sum mass(L_n) x^n,
i.e. mass(L_n) = sum_m mass(L'_{n-m}) / (2^m m!).  The ledger keeps an exact
running remainder; classification stops exactly at zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .rootsys import RootSystemClass, weyl_order

# mass(L'_n): unimodular lattices of rank n with no vector of norm 1;
# absent ranks have mass 0 (no such lattice)
_MASS_NO_NORM_ONE = {
    0: "1",
    8: "1/696729600",
    12: "1/980995276800",
    14: "1/16855282483200",
    15: "1/41845579776000",
    16: "5213041/277667181515243520000",
    17: "1/49662885888000",
    18: "1073351/32780153373327360000",
    19: "37813/450541700775936000",
    20: "4060488226549/11479871952566228090880000",
    21: "138813595637/54497004983156736000000",
    22: "1475568922019/45471119389159682211840",
    23: "21569773276937492389/28590262351867673365708800000",
    24: "4261904533831299496396870055017/129477933340026851560636148613120000000",
    25: "103079509578355844357599/37291646545914356563968000000",
    26: "15661211867944570315962162816169/34253421518525622105988399104000000",
    27: "18471746857358122138056975582390629/121385562506275173338096389324800000",
    28: "1722914776839913679032185321786744287148737/16573175467523436999761427022479360000000",
}


def mass_no_norm_one(n: int) -> Fraction:
    """Mass of the rank-n unimodular lattices with r_1 = 0 (0 if none)."""
    if n < 0 or n > 28:
        raise ValueError("masses are tabulated for 0 <= n <= 28")
    return Fraction(_MASS_NO_NORM_ONE.get(n, "0"))


def mass_full(n: int) -> Fraction:
    """Mass of all rank-n unimodular lattices, via the I_m splitting."""
    if n < 0 or n > 28:
        raise ValueError("masses are tabulated for 0 <= n <= 28")
    return sum(
        (mass_no_norm_one(n - m) / (2**m * factorial(m)) for m in range(n + 1)),
        Fraction(0),
    )


def reduced_mass(aut_order: int, root_class: RootSystemClass) -> Fraction:
    """rmass = |W(R_2)| / |O(L)|; the Weyl order must divide |O(L)|."""
    w = weyl_order(root_class)
    if aut_order % w != 0:
        raise ValueError("Weyl group order does not divide |O(L)|: bad input")
    return Fraction(w, aut_order)


@dataclass
class LedgerEntry:
    key: tuple  # fingerprint hash data for dedup
    form: dict  # neighbor form record building the class
    aut_order: int
    mass: Fraction


class OverdrawError(RuntimeError):
    """The ledger went negative: a duplicate slipped through or the target
    mass is wrong; either way an invariant failed upstream."""


@dataclass
class MassLedger:
    """Exact accounting of target mass minus discovered classes.

    The single mutable object of the classifier: one writer, many readers.
    """

    target: Fraction
    entries: list = field(default_factory=list)

    def __post_init__(self):
        self.target = Fraction(self.target)

    @property
    def remaining(self) -> Fraction:
        return self.target - sum((e.mass for e in self.entries), Fraction(0))

    @property
    def exhausted(self) -> bool:
        return self.remaining == 0

    def has_key(self, key):
        return any(e.key == key for e in self.entries)

    def insert(self, key, form, aut_order, mass) -> bool:
        """Insert a new class; returns False (duplicate notice) on a known
        key; raises OverdrawError if the remainder would go negative."""
        if self.has_key(key):
            return False
        mass = Fraction(mass)
        if self.remaining - mass < 0:
            raise OverdrawError(
                f"mass overdraw: remaining {self.remaining}, inserting {mass}"
            )
        self.entries.append(LedgerEntry(key, form, aut_order, mass))
        return True

    def to_jsonl(self) -> str:
        head = json.dumps({"target": f"{self.target.numerator}/{self.target.denominator}"})
        lines = [head]
        for e in self.entries:
            lines.append(
                json.dumps(
                    {
                        "key": list(e.key),
                        "form": e.form,
                        "aut_order": str(e.aut_order),
                        "mass": f"{e.mass.numerator}/{e.mass.denominator}",
                    }
                )
            )
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_jsonl(text: str) -> "MassLedger":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = json.loads(lines[0])
        ledger = MassLedger(Fraction(head["target"]))
        for ln in lines[1:]:
            rec = json.loads(ln)
            ledger.entries.append(
                LedgerEntry(
                    tuple(rec["key"]),
                    rec["form"],
                    int(rec["aut_order"]),
                    Fraction(rec["mass"]),
                )
            )
        if ledger.remaining < 0:
            raise OverdrawError("persisted ledger is overdrawn")
        return ledger


def ledger_insert(ledger: MassLedger, form, fingerprint_key, aut_order) -> bool:
    """Spec-surface wrapper: mass is 1/|O|; see MassLedger.insert."""
    return ledger.insert(fingerprint_key, form, aut_order, Fraction(1, aut_order))
