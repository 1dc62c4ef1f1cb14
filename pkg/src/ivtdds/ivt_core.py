"""Base-p digit codec and Integral Value Transformations.

A rule of base ``p`` and arity ``k`` is a truth table over ``p**k`` slots.
The canonical index ``j`` stores the table as its base-p digits, least
significant digit first::

    table[t] = (j // p**t) % p

so for ``p=3`` the rule ``j=7`` is ``[1, 2, 0]`` (0->1, 1->2, 2->0).

Applying a rule replaces each digit of ``x`` *in place* and re-reads the
result as a base-p number; leading zeros in the output simply collapse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ArityMismatch, DigitOutOfRange, IndexOutOfRange, InvalidBase, ValueOverflow

#: values are unsigned 64-bit; anything larger is reported, never wrapped
U64_MAX = 2**64 - 1


def check_width(value: int) -> int:
    if value < 0 or value > U64_MAX:
        raise ValueOverflow(f"value {value} outside unsigned 64-bit range")
    return value


def _check_base(p: int) -> None:
    if p < 2:
        raise InvalidBase(f"base must be >= 2, got {p}")


@dataclass(frozen=True)
class DigitString:
    """Most-significant-first base-p digits of a non-negative integer."""

    p: int
    digits: tuple[int, ...]

    def __iter__(self):
        return iter(self.digits)

    def __len__(self) -> int:
        return len(self.digits)

    def __str__(self) -> str:
        return f"({''.join(map(str, self.digits))})_{self.p}"


def digits_of(x: int, p: int) -> DigitString:
    _check_base(p)
    if x < 0:
        raise DigitOutOfRange(f"negative value {x}")
    if x == 0:
        return DigitString(p, (0,))
    out = []
    while x:
        x, r = divmod(x, p)
        out.append(r)
    out.reverse()
    return DigitString(p, tuple(out))


def digit_length(x: int, p: int) -> int:
    n = 1
    while x >= p:
        x //= p
        n += 1
    return n


def value_of(digits: Iterable[int] | DigitString, p: int | None = None) -> int:
    """Read a most-significant-first digit sequence; leading zeros are fine."""
    if isinstance(digits, DigitString):
        p = digits.p if p is None else p
        digits = digits.digits
    if p is None:
        raise InvalidBase("base required for a plain digit sequence")
    _check_base(p)
    v = 0
    for d in digits:
        if not 0 <= d < p:
            raise DigitOutOfRange(f"digit {d} not valid in base {p}")
        v = v * p + d
    return v


@dataclass(frozen=True)
class LocalRule:
    """Digit substitution table ``f_j`` of base ``p`` and arity ``k``."""

    p: int
    k: int
    table: tuple[int, ...]

    def __post_init__(self):
        _check_base(self.p)
        if self.k < 1:
            raise ArityMismatch(f"arity must be >= 1, got {self.k}")
        if len(self.table) != self.p**self.k:
            raise ArityMismatch(
                f"table has {len(self.table)} entries, expected {self.p ** self.k}"
            )
        for d in self.table:
            if not 0 <= d < self.p:
                raise DigitOutOfRange(f"table entry {d} not valid in base {self.p}")

    @property
    def j(self) -> int:
        return index_from_rule(self)

    def __call__(self, x: int) -> int:
        return apply(self, x)

    def zero_preimages(self) -> list[int]:
        """Digits (k=1) or slots sent to 0."""
        return [t for t, d in enumerate(self.table) if d == 0]


def rule_count(p: int, k: int = 1) -> int:
    _check_base(p)
    return p ** (p**k)


def rule_from_index(p: int, k: int, j: int) -> LocalRule:
    n = rule_count(p, k)
    if not 0 <= j < n:
        raise IndexOutOfRange(f"rule index {j} outside [0, {n}) for p={p}, k={k}")
    table = []
    for _ in range(p**k):
        j, d = divmod(j, p)
        table.append(d)
    return LocalRule(p, k, tuple(table))


def index_from_rule(rule: LocalRule) -> int:
    j = 0
    for d in reversed(rule.table):
        j = j * rule.p + d
    return j


def rule(p: int, j: int) -> LocalRule:
    """Shorthand for the one-dimensional rule ``f_j``."""
    return rule_from_index(p, 1, j)


def apply(r: LocalRule, x: int) -> int:
    if r.k != 1:
        raise ArityMismatch(f"apply needs a k=1 rule, got k={r.k}; use apply_k")
    check_width(x)
    p, table = r.p, r.table
    if x == 0:
        return table[0]
    # walk from the least significant digit; positions are preserved
    out, place = 0, 1
    while x:
        x, d = divmod(x, p)
        out += table[d] * place
        place *= p
    return out


def apply_k(r: LocalRule, xs: Sequence[int]) -> int:
    """k-dimensional application; operands are left-padded to a common width.

    Slot for the digit column ``(d_1, ..., d_k)`` is ``sum(d_i * p**(i-1))``.
    """
    if len(xs) != r.k:
        raise ArityMismatch(f"rule has arity {r.k} but got {len(xs)} operands")
    p = r.p
    for x in xs:
        check_width(x)
    width = max(digit_length(x, p) for x in xs)
    cols = [digits_of(x, p).digits for x in xs]
    cols = [(0,) * (width - len(c)) + c for c in cols]
    out = 0
    for pos in range(width):
        slot = 0
        for i in reversed(range(r.k)):
            slot = slot * p + cols[i][pos]
        out = out * p + r.table[slot]
    return out
