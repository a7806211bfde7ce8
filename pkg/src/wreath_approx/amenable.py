"""Amenable acting groups, Følner sets and the permutation model σ: H → Sym(B).

Three backends are built in: the integers, the lattices Z^d and finite groups
given by a multiplication table.  Each has a total order on its elements
(``key``) which fixes the canonical matching of boundary points used by σ.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Iterable, Sequence

from .groups import GroupError, Permutation, TableGroup, validate_table_group


class NoFolnerSet(RuntimeError):
    pass


MAX_FOLNER_SIZE = 2_000_000


class IntegerLine:
    kind = "Z"

    def identity(self) -> int:
        return 0

    def mul(self, a: int, b: int) -> int:
        return a + b

    def inv(self, a: int) -> int:
        return -a

    def key(self, a: int):
        return a

    def validate(self, a) -> int:
        if isinstance(a, bool) or not isinstance(a, int):
            raise GroupError(f"{a!r} is not an element of Z")
        return a

    def to_json(self, a: int):
        return a

    def from_json(self, x) -> int:
        return self.validate(x)

    def describe(self) -> dict:
        return {"kind": "Z"}

    def __eq__(self, other):
        return isinstance(other, IntegerLine)

    def __hash__(self):
        return hash("Z")


class IntegerLattice:
    kind = "Zd"

    def __init__(self, d: int):
        if d < 1:
            raise GroupError("Z^d needs d >= 1")
        self.d = d

    def identity(self) -> tuple[int, ...]:
        return (0,) * self.d

    def mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)

    def key(self, a):
        return a

    def validate(self, a) -> tuple[int, ...]:
        t = tuple(a)
        if len(t) != self.d or not all(isinstance(x, int) and not isinstance(x, bool) for x in t):
            raise GroupError(f"{a!r} is not an element of Z^{self.d}")
        return t

    def to_json(self, a):
        return list(a)

    def from_json(self, x):
        return self.validate(x)

    def describe(self) -> dict:
        return {"kind": "Zd", "d": self.d}

    def __eq__(self, other):
        return isinstance(other, IntegerLattice) and other.d == self.d

    def __hash__(self):
        return hash(("Zd", self.d))


class FiniteTable:
    """A finite group given by a multiplication table; no metric is needed."""

    kind = "finite"

    def __init__(self, table: TableGroup):
        if not table.valid:
            raise GroupError(f"invalid group table: {table.violations[0]}")
        self.table = table

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "FiniteTable":
        return cls(validate_table_group(len(rows), rows))

    def identity(self) -> int:
        return self.table.identity_index

    def mul(self, a: int, b: int) -> int:
        return self.table.mul(a, b)

    def inv(self, a: int) -> int:
        return self.table.inv(a)

    def key(self, a: int):
        return a

    def validate(self, a) -> int:
        if isinstance(a, bool) or not isinstance(a, int) or not 0 <= a < self.table.order:
            raise GroupError(f"{a!r} is not an element of the order-{self.table.order} table group")
        return a

    def elements(self) -> range:
        return range(self.table.order)

    def to_json(self, a):
        return a

    def from_json(self, x):
        return self.validate(x)

    def describe(self) -> dict:
        return {"kind": "finite", "table": self.table.mul_table.tolist()}

    def __eq__(self, other):
        return isinstance(other, FiniteTable) and other.table is self.table

    def __hash__(self):
        return id(self.table)


Backend = Any  # IntegerLine | IntegerLattice | FiniteTable


def boundary_ratio(H: Backend, B: Sequence[Hashable], h) -> Fraction:
    """|hB △ B| / |B| for a finite set B of distinct elements."""
    if not B:
        raise GroupError("boundary ratio of an empty set")
    members = set(B)
    if len(members) != len(B):
        raise GroupError("Følner candidate has repeated elements")
    h = H.validate(h)
    escaped = sum(1 for b in B if H.mul(h, b) not in members)
    # |hB \ B| = |B \ hB| since translation is a bijection
    return Fraction(2 * escaped, len(B))


@dataclass(frozen=True)
class FolnerSet:
    H: Backend = field(compare=False, repr=False)
    elements: tuple
    for_set: tuple
    bound: Fraction

    def __post_init__(self):
        if not self.elements:
            raise GroupError("empty Følner set")
        for h in self.for_set:
            r = boundary_ratio(self.H, self.elements, h)
            if r > self.bound:
                raise NoFolnerSet(f"boundary ratio {r} for {h!r} exceeds {self.bound}")

    def __len__(self) -> int:
        return len(self.elements)

    def ratios(self) -> list[tuple[Any, Fraction]]:
        return [(h, boundary_ratio(self.H, self.elements, h)) for h in self.for_set]


def _box_ratio(h: Sequence[int], side: int) -> Fraction:
    inter = 1
    for x in h:
        inter *= max(side - abs(x), 0)
    return 2 * (1 - Fraction(inter, side ** len(h)))


def _check_size(n: int) -> None:
    if n > MAX_FOLNER_SIZE:
        raise NoFolnerSet(f"Følner set of size {n} exceeds the limit {MAX_FOLNER_SIZE}")


def folner_for(H: Backend, targets: Iterable, bound) -> FolnerSet:
    """A Følner set whose boundary ratio is at most ``bound`` for every target.

    Z gets the shortest interval {0..N-1} (ratio 2|h|/N, solved analytically);
    Z^d the smallest cube {0..L-1}^d found by scanning L; a finite group the
    whole group. Sets larger than ``MAX_FOLNER_SIZE`` raise NoFolnerSet.
    """
    bound = Fraction(bound)
    if bound <= 0:
        raise GroupError("Følner bound must be positive")
    targets = tuple(H.validate(t) for t in targets)
    if isinstance(H, IntegerLine):
        m = max((abs(t) for t in targets), default=0)
        n = max(1, math.ceil(2 * m / bound)) if m else 1
        _check_size(n)
        elements = tuple(range(n))
    elif isinstance(H, IntegerLattice):
        side = 1
        while any(_box_ratio(t, side) > bound for t in targets):
            side += 1
            _check_size(side ** H.d)
        axes = [range(side)] * H.d
        elements = tuple(itertools.product(*axes))
    elif isinstance(H, FiniteTable):
        elements = tuple(H.elements())
    else:
        raise NoFolnerSet(f"no Følner rule for backend {H!r}")
    return FolnerSet(H, elements, targets, bound)


def canonical_gamma(H: Backend, stray: list, free: list) -> dict:
    """Match translates that left B to the positions they vacated, both in backend order."""
    return dict(zip(sorted(stray, key=H.key), sorted(free, key=H.key)))


def build_sigma(H: Backend, B: FolnerSet | Sequence, h, gamma=canonical_gamma) -> Permutation:
    """σ(h) on positions of B: b ↦ hb when hb ∈ B, otherwise γ_h(hb).

    ``gamma`` builds the bijection hB \\ B → B \\ hB; it is a parameter only so
    that mutation tests can substitute a broken matching.
    """
    elements = B.elements if isinstance(B, FolnerSet) else tuple(B)
    h = H.validate(h)
    pos = {b: i for i, b in enumerate(elements)}
    translates = [H.mul(h, b) for b in elements]
    hit = {t for t in translates if t in pos}
    stray = [t for t in translates if t not in pos]
    free = [b for b in elements if b not in hit]
    match = gamma(H, stray, free)
    return tuple(pos[t] if t in pos else pos[match[t]] for t in translates)


def parse_backend(spec: dict) -> Backend:
    kind = spec.get("kind")
    if kind == "Z":
        return IntegerLine()
    if kind == "Zd":
        return IntegerLattice(int(spec["d"]))
    if kind == "finite":
        if "table" in spec:
            return FiniteTable.from_rows(spec["table"])
        if "cyclic" in spec:
            n = int(spec["cyclic"])
            return FiniteTable.from_rows([[(a + b) % n for b in range(n)] for a in range(n)])
    raise GroupError(f"unknown acting-group spec {spec!r}")
