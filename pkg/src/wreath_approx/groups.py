"""Finite and finite-dimensional groups carrying bi-invariant metrics.

Five carriers are provided: symmetric groups with the normalized Hamming
distance, GL_n over a prime field with the rank distance, unitary groups with
the normalized Hilbert-Schmidt distance, finite groups given by tables with an
explicit metric, and (in :mod:`wreath_approx.wreath`) permutational wreath
products.  Every carrier is an immutable context object exposing ``identity``,
``mul``, ``inv``, ``eq`` and ``dist``.

Permutations are tuples of images, composed right to left:
``perm_mul(a, b)[i] == a[b[i]]``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .linalg import (
    FieldError,
    as_field_matrix,
    check_prime,
    inverse_mod_p,
    matmul_mod_p,
    rank_mod_p,
)

Permutation = tuple[int, ...]

UNITARY_TOL = 1e-9
DIST_TOL = 1e-9
EXHAUSTIVE_LIMIT = 256
RANDOM_TRIPLES = 10_000


class GroupError(ValueError):
    """Invalid element, mismatched carrier, or failed group axiom."""


# -- permutations -----------------------------------------------------------


def check_perm(p: Sequence[int], n: int | None = None) -> Permutation:
    t = tuple(int(x) for x in p)
    if n is not None and len(t) != n:
        raise GroupError(f"permutation of size {len(t)} where {n} expected")
    if sorted(t) != list(range(len(t))):
        raise GroupError(f"{list(t)} is not a permutation of range({len(t)})")
    return t


def perm_mul(a: Permutation, b: Permutation) -> Permutation:
    if len(a) != len(b):
        raise GroupError(f"cannot compose permutations of sizes {len(a)} and {len(b)}")
    return tuple(a[i] for i in b)


def perm_inv(a: Permutation) -> Permutation:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def perm_identity(n: int) -> Permutation:
    return tuple(range(n))


def perm_hamming(s: Permutation, t: Permutation) -> Fraction:
    """Normalized Hamming distance |{a : s(a) != t(a)}| / n."""
    if len(s) != len(t):
        raise GroupError(f"Hamming distance between sizes {len(s)} and {len(t)}")
    if not s:
        return Fraction(0)
    return Fraction(sum(1 for x, y in zip(s, t) if x != y), len(s))


def perm_cycles(a: Permutation) -> list[list[int]]:
    seen = [False] * len(a)
    out = []
    for start in range(len(a)):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = a[i]
        out.append(cyc)
    return out


def perm_order(a: Permutation) -> int:
    return math.lcm(*(len(c) for c in perm_cycles(a))) if a else 1


def perm_matrix(a: Permutation, p: int | None = None) -> np.ndarray:
    """Matrix P with P[a[i], i] = 1, so perm_matrix(a) @ perm_matrix(b) = perm_matrix(a∘b)."""
    n = len(a)
    m = np.zeros((n, n), dtype=np.int64 if p is not None else complex)
    m[list(a), list(range(n))] = 1
    return m


# -- matrices ---------------------------------------------------------------


def rank_distance(a: np.ndarray, b: np.ndarray, p: int) -> Fraction:
    """rank(a - b) / n over F_p."""
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise GroupError(f"rank distance between shapes {a.shape} and {b.shape}")
    n = a.shape[0]
    if n == 0:
        return Fraction(0)
    return Fraction(rank_mod_p(np.mod(a - b, p), p), n)


def hs_norm(a: np.ndarray) -> float:
    n = a.shape[0]
    return math.sqrt(float(np.sum(np.abs(a) ** 2)) / n)


def unitary_deviation(u: np.ndarray) -> float:
    n = u.shape[0]
    return float(np.max(np.abs(u @ u.conj().T - np.eye(n))))


def hs_distance(u: np.ndarray, v: np.ndarray, strict: bool = False) -> float:
    """Normalized Hilbert-Schmidt distance sqrt((1/n) Σ |u - v|²)."""
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise GroupError(f"HS distance between shapes {u.shape} and {v.shape}")
    if strict:
        for m in (u, v):
            dev = unitary_deviation(m)
            if dev > UNITARY_TOL:
                raise GroupError(f"matrix is not unitary (deviation {dev:.3g})")
    return hs_norm(u - v)


def normalized_trace(u: np.ndarray) -> complex:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise GroupError(f"trace of non-square shape {u.shape}")
    return complex(np.trace(u)) / u.shape[0]


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorisation of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# -- table groups -----------------------------------------------------------


@dataclass(frozen=True)
class TableGroup:
    """A finite group given by its multiplication table, optionally with a metric."""

    order: int
    mul_table: np.ndarray
    inv_table: tuple[int, ...]
    identity_index: int
    metric_table: tuple[tuple[Fraction, ...], ...] | None
    valid: bool = True
    violations: tuple[tuple[str, tuple[int, ...]], ...] = field(default=())

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        return self.inv_table[a]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity_index:
            x = self.mul(x, a)
            k += 1
        return k


def _metric_as_integers(metric: Sequence[Sequence[Fraction]]) -> tuple[np.ndarray, int]:
    den = 1
    for row in metric:
        for x in row:
            den = math.lcm(den, x.denominator)
    ints = np.array([[int(x * den) for x in row] for row in metric], dtype=object)
    return ints, den


def validate_table_group(
    order: int,
    mul_table: Sequence[Sequence[int]],
    metric_table: Sequence[Sequence[Any]] | None = None,
    *,
    seed: int = 0,
) -> TableGroup:
    """Check the group law (and metric, if given) of a multiplication table.

    Checks are exhaustive up to order 256 and use 10**4 random triples beyond.
    Each failed axiom is recorded in ``violations`` with a witness tuple and
    the result has ``valid`` False.
    """
    m = np.asarray(mul_table, dtype=np.int64)
    if order < 1 or m.shape != (order, order):
        raise GroupError(f"multiplication table of shape {m.shape} for order {order}")
    if m.min() < 0 or m.max() >= order:
        raise GroupError("multiplication table has entries out of range")
    violations: list[tuple[str, tuple[int, ...]]] = []
    rng = random.Random(seed)
    exhaustive = order <= EXHAUSTIVE_LIMIT

    def triples():
        if exhaustive:
            return itertools.product(range(order), repeat=3)
        return ((rng.randrange(order), rng.randrange(order), rng.randrange(order))
                for _ in range(RANDOM_TRIPLES))

    # associativity, vectorised over c
    if exhaustive:
        for a in range(order):
            left = m[m[a, :], :]          # (ab)c for all b, c
            right = m[a, m]               # a(bc)
            bad = np.argwhere(left != right)
            if bad.size:
                b, c = (int(x) for x in bad[0])
                violations.append(("associativity", (a, b, c)))
                break
    else:
        for a, b, c in triples():
            if m[m[a, b], c] != m[a, m[b, c]]:
                violations.append(("associativity", (a, b, c)))
                break

    ids = [e for e in range(order)
           if np.array_equal(m[e], np.arange(order)) and np.array_equal(m[:, e], np.arange(order))]
    identity_index = ids[0] if ids else 0
    if not ids:
        violations.append(("identity", (0,)))
    inv_table = [0] * order
    for a in range(order):
        hits = np.nonzero(m[a] == identity_index)[0]
        if hits.size != 1 or m[int(hits[0]), a] != identity_index:
            violations.append(("inverse", (a,)))
        else:
            inv_table[a] = int(hits[0])

    metric = None
    if metric_table is not None:
        metric = tuple(tuple(Fraction(x) for x in row) for row in metric_table)
        if len(metric) != order or any(len(r) != order for r in metric):
            raise GroupError("metric table shape does not match the group order")
        d, _ = _metric_as_integers(metric)
        diam = max(max(r) for r in metric)
        if diam > 1:
            a, b = next((a, b) for a in range(order) for b in range(order) if metric[a][b] == diam)
            violations.append(("diameter", (a, b)))
        for a in range(order):
            if metric[a][a] != 0:
                violations.append(("identity_of_indiscernibles", (a, a)))
                break
        done = set()
        for a, b in itertools.product(range(order), repeat=2):
            if metric[a][b] != metric[b][a] and "symmetry" not in done:
                violations.append(("symmetry", (a, b)))
                done.add("symmetry")
            if a != b and metric[a][b] <= 0 and "identity_of_indiscernibles" not in done:
                violations.append(("identity_of_indiscernibles", (a, b)))
                done.add("identity_of_indiscernibles")
        if exhaustive:
            di = d.astype(np.int64)
            for g in range(order):
                checks = (
                    ("triangle", di[:, g][:, None] + di[g, :][None, :] < di, lambda x, y: (x, g, y)),
                    ("left_invariance", di[np.ix_(m[g], m[g])] != di, lambda x, y: (g, x, y)),
                    ("right_invariance", di[np.ix_(m[:, g], m[:, g])] != di, lambda x, y: (g, x, y)),
                )
                for name, bad, witness in checks:
                    if name not in done and bad.any():
                        x, y = (int(v) for v in np.argwhere(bad)[0])
                        violations.append((name, witness(x, y)))
                        done.add(name)
        else:
            for g, x, y in triples():
                if "triangle" not in done and d[x, y] > d[x, g] + d[g, y]:
                    violations.append(("triangle", (x, g, y)))
                    done.add("triangle")
                if "left_invariance" not in done and d[m[g, x], m[g, y]] != d[x, y]:
                    violations.append(("left_invariance", (g, x, y)))
                    done.add("left_invariance")
                if "right_invariance" not in done and d[m[x, g], m[y, g]] != d[x, y]:
                    violations.append(("right_invariance", (g, x, y)))
                    done.add("right_invariance")
    m.setflags(write=False)
    return TableGroup(order, m, tuple(inv_table), identity_index, metric,
                      valid=not violations, violations=tuple(violations))


def cyclic_table(n: int, discrete_metric: bool = True) -> TableGroup:
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    metric = ([[Fraction(int(a != b)) for b in range(n)] for a in range(n)]
              if discrete_metric else None)
    return validate_table_group(n, table, metric)


def discrete_metric(order: int) -> list[list[Fraction]]:
    return [[Fraction(int(a != b)) for b in range(order)] for a in range(order)]


# -- contexts ---------------------------------------------------------------


class MetricGroup:
    """Common surface of every carrier.

    ``exact`` is True when ``dist`` returns :class:`~fractions.Fraction`.
    """

    kind: str = "abstract"
    exact: bool = True
    diameter: Fraction = Fraction(1)

    def identity(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return a == b

    def dist(self, a, b):
        raise NotImplementedError

    def is_identity(self, a) -> bool:
        return self.eq(a, self.identity())

    def random_element(self, rng: random.Random):
        raise NotImplementedError

    def check_bi_invariance(self, samples: int = 8, seed: int = 0) -> None:
        rng = random.Random(seed)
        for _ in range(samples):
            g, x, y = (self.random_element(rng) for _ in range(3))
            d = self.dist(x, y)
            for d2 in (self.dist(self.mul(g, x), self.mul(g, y)),
                       self.dist(self.mul(x, g), self.mul(y, g))):
                if self.exact and d2 != d or not self.exact and abs(d2 - d) > DIST_TOL:
                    raise GroupError(f"{self.kind}: metric not bi-invariant on a sampled triple")


class SymmetricGroup(MetricGroup):
    kind = "Symmetric"

    def __init__(self, n: int):
        if n < 1:
            raise GroupError("symmetric group needs n >= 1")
        self.n = n
        self.check_bi_invariance()

    def identity(self) -> Permutation:
        return perm_identity(self.n)

    def validate(self, a) -> Permutation:
        return check_perm(a, self.n)

    def mul(self, a, b):
        if len(a) != self.n or len(b) != self.n:
            raise GroupError(f"element size mismatch for Sym({self.n})")
        return perm_mul(a, b)

    def inv(self, a):
        return perm_inv(a)

    def dist(self, a, b) -> Fraction:
        return perm_hamming(a, b)

    def random_element(self, rng):
        p = list(range(self.n))
        rng.shuffle(p)
        return tuple(p)

    def elements(self):
        return itertools.permutations(range(self.n))

    def __repr__(self):
        return f"SymmetricGroup({self.n})"


class GeneralLinearPrime(MetricGroup):
    """GL_n(F_p) with the rank distance."""

    kind = "GeneralLinearPrime"

    def __init__(self, n: int, p: int):
        check_prime(p)
        if n < 1:
            raise GroupError("GL_n needs n >= 1")
        self.n, self.p = n, p
        self.check_bi_invariance(samples=4)

    def _freeze(self, a: np.ndarray) -> np.ndarray:
        a.setflags(write=False)
        return a

    def identity(self):
        return self._freeze(np.eye(self.n, dtype=np.int64))

    def validate(self, a) -> np.ndarray:
        try:
            m = as_field_matrix(a, self.p)
        except FieldError as e:
            raise GroupError(str(e)) from None
        if m.shape != (self.n, self.n):
            raise GroupError(f"matrix of shape {m.shape} in GL_{self.n}")
        if rank_mod_p(m, self.p) != self.n:
            raise GroupError("matrix is singular mod p")
        return self._freeze(m)

    def _check(self, *ms):
        for m in ms:
            if m.shape != (self.n, self.n):
                raise GroupError(f"matrix of shape {m.shape} in GL_{self.n}(F_{self.p})")

    def mul(self, a, b):
        self._check(a, b)
        return self._freeze(matmul_mod_p(a, b, self.p))

    def inv(self, a):
        self._check(a)
        try:
            return self._freeze(inverse_mod_p(a, self.p))
        except FieldError as e:
            raise GroupError(str(e)) from None

    def eq(self, a, b) -> bool:
        return np.array_equal(a, b)

    def dist(self, a, b) -> Fraction:
        self._check(a, b)
        return rank_distance(a, b, self.p)

    def random_element(self, rng):
        while True:
            m = np.array([[rng.randrange(self.p) for _ in range(self.n)] for _ in range(self.n)],
                         dtype=np.int64)
            if rank_mod_p(m, self.p) == self.n:
                return self._freeze(m)

    def __repr__(self):
        return f"GeneralLinearPrime(n={self.n}, p={self.p})"


class UnitaryGroup(MetricGroup):
    """U(n) with the normalized Hilbert-Schmidt distance (diameter 2)."""

    kind = "Unitary"
    exact = False
    diameter = Fraction(2)

    def __init__(self, n: int, strict: bool = True):
        if n < 1:
            raise GroupError("U(n) needs n >= 1")
        self.n = n
        self.strict = strict
        self.check_bi_invariance()

    def identity(self):
        return np.eye(self.n, dtype=complex)

    def validate(self, a) -> np.ndarray:
        u = np.asarray(a, dtype=complex)
        if u.shape != (self.n, self.n):
            raise GroupError(f"matrix of shape {u.shape} in U({self.n})")
        dev = unitary_deviation(u)
        if dev > UNITARY_TOL:
            raise GroupError(f"matrix is not unitary (deviation {dev:.3g})")
        return u

    def mul(self, a, b):
        if a.shape != b.shape or a.shape[0] != self.n:
            raise GroupError(f"matrix shape mismatch in U({self.n})")
        return a @ b

    def inv(self, a):
        return a.conj().T

    def eq(self, a, b) -> bool:
        return a.shape == b.shape and float(np.max(np.abs(a - b))) <= UNITARY_TOL

    def dist(self, a, b) -> float:
        return hs_distance(a, b, strict=False)

    def trace(self, a) -> complex:
        return normalized_trace(a)

    def random_element(self, rng):
        return random_unitary(self.n, np.random.default_rng(rng.randrange(2**32)))

    def __repr__(self):
        return f"UnitaryGroup({self.n})"


class TableContext(MetricGroup):
    """A validated :class:`TableGroup` whose metric is the table metric."""

    kind = "Table"

    def __init__(self, table: TableGroup):
        if not table.valid:
            raise GroupError(f"invalid table group: {table.violations[0]}")
        if table.metric_table is None:
            raise GroupError("table group carries no metric")
        self.table = table
        self.diameter = max(max(r) for r in table.metric_table)

    def identity(self) -> int:
        return self.table.identity_index

    def validate(self, a) -> int:
        a = int(a)
        if not 0 <= a < self.table.order:
            raise GroupError(f"index {a} outside group of order {self.table.order}")
        return a

    def mul(self, a, b) -> int:
        return self.table.mul(a, b)

    def inv(self, a) -> int:
        return self.table.inv(a)

    def dist(self, a, b) -> Fraction:
        return self.table.metric_table[a][b]

    def random_element(self, rng):
        return rng.randrange(self.table.order)

    def __repr__(self):
        return f"TableContext(order={self.table.order})"
