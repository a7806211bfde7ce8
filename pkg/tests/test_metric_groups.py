from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import GF
from sympy.polys.matrices import DomainMatrix

from wreath_approx.groups import (
    GeneralLinearPrime,
    GroupError,
    SymmetricGroup,
    TableContext,
    UnitaryGroup,
    cyclic_table,
    hs_distance,
    normalized_trace,
    perm_hamming,
    perm_inv,
    perm_matrix,
    perm_mul,
    random_unitary,
    rank_distance,
    validate_table_group,
)
from wreath_approx.linalg import FieldError, inverse_mod_p, rank_mod_p


def sympy_rank(m, p):
    rows = [[GF(p)(int(x)) for x in row] for row in m]
    return DomainMatrix(rows, (len(rows), len(rows[0])), GF(p)).rank()


# -- permutations -------------------------------------------------------------


def test_perm_mul_involution():
    assert perm_mul((1, 0), (1, 0)) == (0, 1)


def test_perm_inverse_example():
    assert perm_inv((2, 0, 1)) == (1, 2, 0)
    assert perm_inv((0, 1, 2)) == (0, 1, 2)


@pytest.mark.parametrize("s, t, want", [
    ((0, 1, 2), (0, 1, 2), Fraction(0)),
    ((1, 0, 2), (0, 1, 2), Fraction(2, 3)),
    ((1, 2, 0), (0, 1, 2), Fraction(1)),
])
def test_perm_hamming_examples(s, t, want):
    assert perm_hamming(s, t) == want


def test_perm_hamming_size_mismatch():
    with pytest.raises(GroupError):
        perm_hamming((0, 1), (0, 1, 2))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_hamming_metric_axioms_exhaustive(n):
    elems = list(itertools.permutations(range(n)))
    for a, b, c in itertools.product(elems, repeat=3):
        d = perm_hamming
        assert d(a, b) == d(b, a)
        assert (d(a, b) == 0) == (a == b)
        assert d(a, c) <= d(a, b) + d(b, c)
        assert d(perm_mul(c, a), perm_mul(c, b)) == d(a, b) == d(perm_mul(a, c), perm_mul(b, c))


# -- prime-field matrices -----------------------------------------------------


def test_gl_mul_and_inverse_examples():
    G = GeneralLinearPrime(2, 5)
    a = G.validate([[2, 0], [0, 1]])
    b = G.validate([[3, 0], [0, 1]])
    assert np.array_equal(G.mul(a, b), np.eye(2, dtype=np.int64))
    assert np.array_equal(G.inv(a), b)


def test_gl_rejects_singular_and_mismatch():
    G = GeneralLinearPrime(2, 5)
    with pytest.raises(GroupError):
        G.validate([[1, 2], [2, 4]])
    with pytest.raises(GroupError):
        G.mul(G.identity(), GeneralLinearPrime(3, 5).identity())


def test_non_prime_modulus_rejected():
    with pytest.raises((GroupError, FieldError)):
        GeneralLinearPrime(2, 6)


@pytest.mark.parametrize("a, b, want", [
    ([[0, 1], [1, 0]], [[1, 0], [0, 1]], Fraction(1, 2)),
    ([[2, 0], [0, 2]], [[1, 0], [0, 1]], Fraction(1)),
    ([[1, 0], [0, 1]], [[1, 0], [0, 1]], Fraction(0)),
])
def test_rank_distance_examples(a, b, want):
    assert rank_distance(np.array(a), np.array(b), 5) == want


@pytest.mark.parametrize("p", [2, 5])
def test_rank_metric_axioms_small(p):
    rng = random.Random(p)
    G = GeneralLinearPrime(2, p)
    elems = [G.random_element(rng) for _ in range(12)]
    for a, b, c in itertools.product(elems, repeat=3):
        d = G.dist
        assert d(a, b) == d(b, a)
        assert (d(a, b) == 0) == bool(np.array_equal(a, b))
        assert d(a, c) <= d(a, b) + d(b, c)
        assert d(G.mul(c, a), G.mul(c, b)) == d(a, b) == d(G.mul(a, c), G.mul(b, c))


@pytest.mark.parametrize("p", [2, 5])
def test_rank_bounds_hamming_on_sym4(p):
    elems = list(itertools.permutations(range(4)))
    for s, t in itertools.product(elems, repeat=2):
        assert rank_distance(perm_matrix(s, p), perm_matrix(t, p), p) >= perm_hamming(s, t) / 2


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3, 5, 7, 13]), st.integers(1, 6), st.integers(1, 6), st.data())
def test_rank_matches_sympy(p, r, c, data):
    m = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    assert rank_mod_p(np.array(m, dtype=np.int64), p) == sympy_rank(m, p)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_inverse_mod_p(seed):
    G = GeneralLinearPrime(3, 7)
    a = G.random_element(random.Random(seed))
    assert np.array_equal((a @ inverse_mod_p(a, 7)) % 7, np.eye(3, dtype=np.int64))


# -- unitaries ---------------------------------------------------------------


def test_hs_distance_examples():
    i2 = np.eye(2, dtype=complex)
    assert hs_distance(i2, i2) == 0
    assert hs_distance(i2, -i2) == pytest.approx(2.0, abs=1e-12)
    assert hs_distance(i2, np.diag([1, -1]).astype(complex)) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_hs_strict_rejects_non_unitary():
    with pytest.raises(GroupError):
        hs_distance(np.eye(2, dtype=complex), 2 * np.eye(2, dtype=complex), strict=True)


def test_normalized_trace_examples():
    assert normalized_trace(np.eye(3)) == pytest.approx(1)
    assert normalized_trace(np.diag([1, -1])) == pytest.approx(0)
    assert normalized_trace(perm_matrix((1, 2, 0))) == pytest.approx(0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_hs_trace_identity(n, seed):
    u = random_unitary(n, np.random.default_rng(seed))
    lhs = hs_distance(u, np.eye(n)) ** 2
    assert lhs == pytest.approx(2 - 2 * normalized_trace(u).real, abs=1e-9)


@pytest.mark.parametrize("ctx", [SymmetricGroup(5), GeneralLinearPrime(3, 5), UnitaryGroup(3),
                                 TableContext(cyclic_table(6))], ids=repr)
def test_bi_invariance_sampled(ctx):
    rng = random.Random(7)
    for _ in range(200):
        g, x, y = (ctx.random_element(rng) for _ in range(3))
        d = ctx.dist(x, y)
        for d2 in (ctx.dist(ctx.mul(g, x), ctx.mul(g, y)), ctx.dist(ctx.mul(x, g), ctx.mul(y, g))):
            if ctx.exact:
                assert d2 == d
            else:
                assert abs(d2 - d) <= 1e-9


# -- table groups -----------------------------------------------------------


def test_table_z2_valid():
    t = validate_table_group(2, [[0, 1], [1, 0]], [[0, 1], [1, 0]])
    assert t.valid and t.violations == ()


def test_table_z3_discrete_valid():
    t = validate_table_group(3, [[(a + b) % 3 for b in range(3)] for a in range(3)],
                             [[int(a != b) for b in range(3)] for a in range(3)])
    assert t.valid


def test_table_diameter_violation():
    t = validate_table_group(2, [[0, 1], [1, 0]], [[0, 2], [2, 0]])
    assert not t.valid
    assert t.violations[0][0] == "diameter"


def test_table_non_associative_reported_with_witness():
    # a Latin square with identity 0 that is not associative
    rows = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    t = validate_table_group(5, rows)
    names = [v[0] for v in t.violations]
    assert "associativity" in names
    a, b, c = dict(t.violations)["associativity"]
    assert rows[rows[a][b]][c] != rows[a][rows[b][c]]


def test_table_not_bi_invariant():
    # Z/4 with d(x, y) depending on x alone is not left invariant
    rows = [[(a + b) % 4 for b in range(4)] for a in range(4)]
    metric = [[Fraction(0) if a == b else (Fraction(1) if 0 in (a, b) else Fraction(1, 2))
               for b in range(4)] for a in range(4)]
    t = validate_table_group(4, rows, metric)
    assert not t.valid
    assert {"left_invariance", "right_invariance"} & {v[0] for v in t.violations}


def test_table_triangle_violation():
    rows = [[(a + b) % 3 for b in range(3)] for a in range(3)]
    # symmetric, but d(0,2) > d(0,1) + d(1,2)
    metric = [[0, "1/4", 1], ["1/4", 0, "1/4"], [1, "1/4", 0]]
    t = validate_table_group(3, rows, [[Fraction(x) for x in r] for r in metric])
    assert "triangle" in {v[0] for v in t.violations}


def test_table_randomized_path_for_large_order():
    t = cyclic_table(300)
    assert t.valid and t.order == 300


def test_table_context_requires_valid_metric():
    with pytest.raises(GroupError):
        TableContext(validate_table_group(2, [[0, 1], [1, 0]]))
