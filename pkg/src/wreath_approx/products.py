"""Approximations of the power G^W by a single group of the target class.

Elements of every product context here are *sparse*: a tuple of
``(position, factor_element)`` pairs sorted by position, listing only
non-identity factors.  That keeps |W| in the hundreds cheap even though the
groups being modelled (Sym(A^W), U(H^{⊗W}), ...) are astronomically large;
each distance is computed exactly from the factors.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from functools import reduce

import numpy as np

from .groups import (
    GeneralLinearPrime,
    GroupError,
    MetricGroup,
    SymmetricGroup,
    TableGroup,
    UnitaryGroup,
    perm_identity,
    perm_matrix,
)


class SparseProduct(MetricGroup):
    factor: MetricGroup

    def __init__(self, factor: MetricGroup, size: int):
        if size < 0:
            raise GroupError("negative window size")
        self.factor = factor
        self.size = size

    def make(self, entries) -> tuple:
        fid = self.factor.is_identity
        out = []
        for w, x in sorted(entries, key=lambda e: e[0]):
            if not 0 <= w < self.size:
                raise GroupError(f"coordinate {w} outside window of size {self.size}")
            if not fid(x):
                out.append((w, x))
        return tuple(out)

    def identity(self) -> tuple:
        return ()

    def mul(self, a, b):
        da, db = dict(a), dict(b)
        one = self.factor.identity()
        fm = self.factor.mul
        return self.make((w, fm(da.get(w, one), db.get(w, one))) for w in sorted(da.keys() | db.keys()))

    def inv(self, a):
        return tuple((w, self.factor.inv(x)) for w, x in a)

    def eq(self, a, b) -> bool:
        return (len(a) == len(b) and all(w == v for (w, _), (v, _) in zip(a, b))
                and all(self.factor.eq(x, y) for (_, x), (_, y) in zip(a, b)))

    def pairs(self, a, b):
        """Factor pairs over the union of the two supports."""
        da, db = dict(a), dict(b)
        one = self.factor.identity()
        return [(da.get(w, one), db.get(w, one)) for w in sorted(da.keys() | db.keys())]

    def random_element(self, rng: random.Random):
        if self.size == 0:
            return ()
        k = rng.randint(0, min(self.size, 3))
        ws = rng.sample(range(self.size), k)
        return self.make((w, self.factor.random_element(rng)) for w in ws)

    def dense_factors(self, a) -> list:
        d = dict(a)
        one = self.factor.identity()
        return [d.get(w, one) for w in range(self.size)]


class DiagonalSymmetric(SparseProduct):
    """Sym(A)^W acting coordinatewise on A^W, inside Sym(A^W) with Hamming distance.

    A point of A^W is fixed by the pair (a, b) exactly when every coordinate
    agrees, so the agreeing fraction is the product of coordinate agreements.
    """

    kind = "DiagonalSymmetric"

    def __init__(self, factor: SymmetricGroup, size: int):
        if not isinstance(factor, SymmetricGroup):
            raise GroupError("diagonal product needs a symmetric-group factor")
        super().__init__(factor, size)
        self.points = factor.n ** size

    def dist(self, a, b) -> Fraction:
        agree = Fraction(1)
        for x, y in self.pairs(a, b):
            agree *= 1 - self.factor.dist(x, y)
        return 1 - agree

    def materialize(self, a) -> tuple[int, ...]:
        """The permutation of A^W, mixed radix with coordinate 0 most significant."""
        if self.points > 1 << 16:
            raise GroupError(f"refusing to materialize a permutation of {self.points} points")
        n = self.factor.n
        fs = self.dense_factors(a)
        out = []
        for pt in itertools.product(range(n), repeat=self.size):
            idx = 0
            for w, c in enumerate(pt):
                idx = idx * n + fs[w][c]
            out.append(idx)
        return tuple(out)


class MaxProduct(SparseProduct):
    """Direct product with the max-of-coordinates metric (weakly sofic combiner)."""

    kind = "MaxProduct"

    def __init__(self, factor: MetricGroup, size: int):
        super().__init__(factor, size)
        self.diameter = factor.diameter
        self.exact = factor.exact

    def dist(self, a, b):
        ds = [self.factor.dist(x, y) for x, y in self.pairs(a, b)]
        return max(ds, default=Fraction(0) if self.exact else 0.0)


class BlockDiagonal(SparseProduct):
    """Block-diagonal direct sum in GL_{n|W|}(F_p); rank distance is the coordinate mean."""

    kind = "BlockDiagonal"

    def __init__(self, factor: GeneralLinearPrime, size: int):
        if not isinstance(factor, GeneralLinearPrime):
            raise GroupError("block-diagonal product needs a GL factor")
        super().__init__(factor, size)

    def dist(self, a, b) -> Fraction:
        if self.size == 0:
            return Fraction(0)
        return sum((self.factor.dist(x, y) for x, y in self.pairs(a, b)), Fraction(0)) / self.size

    def materialize(self, a) -> np.ndarray:
        n = self.factor.n
        out = np.zeros((n * self.size, n * self.size), dtype=np.int64)
        for w, x in enumerate(self.dense_factors(a)):
            out[w * n:(w + 1) * n, w * n:(w + 1) * n] = x
        return out


class RegularProduct(SparseProduct):
    """The regular representation of G^W as permutation matrices over F_p.

    Elements are sparse tuples of group-table indices.  For c in G^W the left
    multiplication permutation has every cycle of length ord(c), so
    rank(P_c - I) = n(1 - 1/ord(c)) over any field.
    """

    kind = "RegularPermMatrix"

    def __init__(self, group: TableGroup, size: int, p: int):
        self.group = group
        self.p = p
        super().__init__(_TableFactor(group), size)
        self.points = group.order ** size

    def order(self, c) -> int:
        return math.lcm(*(self.group.element_order(x) for _, x in c)) if c else 1

    def dist(self, a, b) -> Fraction:
        return 1 - Fraction(1, self.order(self.mul(self.inv(a), b)))

    def materialize(self, a) -> np.ndarray:
        if self.points > 1 << 12:
            raise GroupError(f"refusing to materialize a {self.points}-dimensional matrix")
        m = self.group.order
        fs = self.dense_factors(a)
        perm = []
        for pt in itertools.product(range(m), repeat=self.size):
            idx = 0
            for w, c in enumerate(pt):
                idx = idx * m + self.group.mul(fs[w], c)
            perm.append(idx)
        return perm_matrix(tuple(perm), self.p)


class _TableFactor(MetricGroup):
    """Group law of a table group with the discrete metric; used as a factor."""

    kind = "TableLaw"

    def __init__(self, group: TableGroup):
        self.group = group

    def identity(self):
        return self.group.identity_index

    def mul(self, a, b):
        return self.group.mul(a, b)

    def inv(self, a):
        return self.group.inv(a)

    def dist(self, a, b):
        return Fraction(int(a != b))

    def random_element(self, rng):
        return rng.randrange(self.group.order)


class TensorUnitary(SparseProduct):
    """U(n)^W acting on (C^n)^{⊗W}; normalized traces multiply over factors."""

    kind = "TensorUnitary"
    exact = False
    diameter = Fraction(2)

    def __init__(self, factor: UnitaryGroup, size: int):
        if not isinstance(factor, UnitaryGroup):
            raise GroupError("tensor product needs a unitary factor")
        super().__init__(factor, size)

    def inner_trace(self, a, b) -> complex:
        """Normalized trace of a* b."""
        t = 1 + 0j
        for x, y in self.pairs(a, b):
            t *= complex(np.trace(x.conj().T @ y)) / self.factor.n
        return t

    def trace(self, a) -> complex:
        t = 1 + 0j
        for _, x in a:
            t *= complex(np.trace(x)) / self.factor.n
        return t

    def dist(self, a, b) -> float:
        return math.sqrt(max(0.0, 2.0 - 2.0 * self.inner_trace(a, b).real))

    def materialize(self, a) -> np.ndarray:
        if self.factor.n ** self.size > 1 << 10:
            raise GroupError("refusing to materialize a large tensor product")
        return reduce(np.kron, self.dense_factors(a), np.eye(1, dtype=complex))


class TrivialGroup(SparseProduct):
    """The one-point group, used when the window is empty."""

    kind = "Trivial"

    def __init__(self):
        super().__init__(SymmetricGroup(1), 0)

    def dist(self, a, b):
        return Fraction(0)

    def materialize(self, a):
        return perm_identity(1)
