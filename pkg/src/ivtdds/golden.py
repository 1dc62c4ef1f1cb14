"""Published 3-adic simulation tables, kept verbatim, and a differ against them.

Entries are ``j(point)``; ``point`` is the attractor representative or the
steady state, depending on the column.  The text is copied as printed,
including its irregular separators, and parsed with a tolerant regex.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .adds import AttractorTable, Variant

COLUMNS = ("attractors", "unique_steady", "locally_stable", "globally_stable")

_TYPE_I = """\
A=1,B=0\t0(0),1(0),2(0),6(0),7(0),8(0),9(0),10(0),11(0)\t0(0),6(0), 9(0)\t0(0)\t0(0)
A=1,B=1\t0(1),1(1),6(3),7(1)\t0(1),1(1)\t0(1)\t0(1)
A=1,B=2\t0(2),2(2),9(2),11(2)\t0(2),2(2)\t0(2)\t0(2)
A=2,B=2\t0(2),1(2),18(6)\t0(2),1(2)\t0(2)\t0(2)
A=2,B=0\t0(0),1(0),2(0),3(0),4(0),18(0), 19(0),20(0)\t0(0),18(0)\t0(0)\t0(0)
A=2,B=1\t0(1),2(1),3(3)\t0(1),2(1)\t0(1)\t0(1)
"""

_TYPE_II = """\
a=1,b=0\t0(0),1(0),2(0),6(0),7(0),8(0),9(0),10(0),11(0)\t0(0),6(0), 9(0)\t0(0)\t0(0)
a=1,b=1\t0(0),1(0),6(2),7(0)\t0(0),1(0)\t0(0)\t0(0)
a=1,b=2\t0(0),2(0),9(0),11(0)\t0(0),2(0)\t0(0)\t0(0)
a=2,b=2\t0(0),1(0),18(2)\t0(0),1(0)\t0(0)\t0(0)
a=2,b=0\t0(0),1(0),2(0),3(0),4(0),18(0), 19(0),20(0)\t0(0),3(0)18(0)\t0(0)\t0(0)
a=2,b=1\t0(0),2(0),3(1)\t0(0),2(0)\t0(0)\t0(0)
"""

_ENTRY = re.compile(r"(\d+)\((\d+)\)")
_COEFF = re.compile(r"[AaBb]=(\d+)")

Entries = tuple[tuple[int, int], ...]


def _parse(text: str) -> dict[tuple[int, int], dict[str, Entries]]:
    out = {}
    for line in text.strip().splitlines():
        head, *cols = line.split("\t")
        mul, add = (int(v) for v in _COEFF.findall(head))
        out[(mul, add)] = {
            name: tuple((int(j), int(v)) for j, v in _ENTRY.findall(col))
            for name, col in zip(COLUMNS, cols)
        }
    return out


PUBLISHED = {
    Variant.TYPE_I: _parse(_TYPE_I),
    Variant.TYPE_II: _parse(_TYPE_II),
}


def published_table(variant) -> dict[tuple[int, int], dict[str, Entries]]:
    return PUBLISHED[Variant.parse(variant)]


@dataclass(frozen=True)
class Discrepancy:
    variant: Variant
    mul: int
    add: int
    column: str
    missing: Entries  # printed but not measured
    extra: Entries  # measured but not printed

    def message(self) -> str:
        a, b = ("A", "B") if self.variant is Variant.TYPE_I else ("a", "b")
        parts = []
        if self.extra:
            parts.append("measured but not in published table: " + fmt_entries(self.extra))
        if self.missing:
            parts.append("published but not measured: " + fmt_entries(self.missing))
        return (f"type-{self.variant.value} row {a}={self.mul},{b}={self.add} "
                f"column {self.column}: " + "; ".join(parts))


def fmt_entries(entries) -> str:
    return ",".join(f"{j}({v})" for j, v in entries)


def measured_columns(table: AttractorTable) -> dict[tuple[int, int], dict[str, Entries]]:
    return {
        (row.mul, row.add): {name: tuple(getattr(row, name)) for name in COLUMNS}
        for row in table.rows
    }


def diff_against_published(table: AttractorTable) -> list[Discrepancy]:
    """Compare a measured table with the published one, row by row.

    Only 3-adic rows that appear in the published table are compared.
    """
    if table.p != 3:
        return []
    pub = published_table(table.variant)
    found = []
    for key, cols in measured_columns(table).items():
        if key not in pub:
            continue
        for name in COLUMNS:
            got, want = set(cols[name]), set(pub[key][name])
            if got != want:
                found.append(Discrepancy(table.variant, key[0], key[1], name,
                                         tuple(sorted(want - got)), tuple(sorted(got - want))))
    return found
