from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from wreath_approx.embeddings import (
    dense,
    psi,
    psi_block_trace,
    psi_lin,
    psi_sym,
    psi_uni,
    target_context,
)
from wreath_approx.groups import (
    GeneralLinearPrime,
    GroupError,
    SymmetricGroup,
    UnitaryGroup,
    cyclic_table,
    hs_distance,
    normalized_trace,
    perm_hamming,
    rank_distance,
)
from wreath_approx.products import BlockDiagonal, DiagonalSymmetric, MaxProduct, RegularProduct, TensorUnitary
from wreath_approx.wreath import WreathContext, WreathElement

S2 = SymmetricGroup(2)


def test_psi_sym_size_one_is_base():
    ctx = WreathContext(SymmetricGroup(3), range(1))
    g = WreathElement(((2, 0, 1),), (0,))
    assert psi_sym(ctx, g) == (2, 0, 1)


def test_psi_sym_identity():
    ctx = WreathContext(SymmetricGroup(3), range(2))
    assert psi_sym(ctx, ctx.identity()) == tuple(range(6))


def test_psi_sym_exhaustive_isometry():
    ctx = WreathContext(S2, range(2))
    elems = [WreathElement(x, p) for x in itertools.product([(0, 1), (1, 0)], repeat=2)
             for p in itertools.permutations(range(2))]
    pairs = 0
    for a, b in itertools.product(elems, repeat=2):
        assert perm_hamming(psi_sym(ctx, a), psi_sym(ctx, b)) == ctx.dist(a, b)
        pairs += 1
    assert pairs == 64


def test_psi_lin_identity_and_witnesses():
    G = GeneralLinearPrime(1, 5)
    ctx = WreathContext(G, range(2))
    assert np.array_equal(psi_lin(ctx, ctx.identity()), np.eye(2, dtype=np.int64))
    one, two = np.array([[1]]), np.array([[2]])
    a, b = WreathElement((one, one), (1, 0)), WreathElement((one, one), (0, 1))
    assert ctx.dist(a, b) == 1 and rank_distance(psi_lin(ctx, a), psi_lin(ctx, b), 5) == Fraction(1, 2)
    a, b = WreathElement((two, two), (0, 1)), WreathElement((one, one), (0, 1))
    assert ctx.dist(a, b) == 1 and rank_distance(psi_lin(ctx, a), psi_lin(ctx, b), 5) == 1


def test_psi_uni_identity_and_kind_checks():
    ctx = WreathContext(UnitaryGroup(2), range(3))
    assert np.allclose(psi_uni(ctx, ctx.identity()), np.eye(6))
    with pytest.raises(GroupError):
        psi_uni(WreathContext(S2, range(2)), WreathContext(S2, range(2)).identity())
    with pytest.raises(GroupError):
        psi_sym(ctx, ctx.identity())


def test_block_trace_examples():
    U = UnitaryGroup(2)
    ctx = WreathContext(U, range(3))
    rng = random.Random(2)
    xs = tuple(U.random_element(rng) for _ in range(3))
    g = WreathElement(xs, (0, 1, 2))
    assert psi_block_trace(ctx, g) == pytest.approx(sum(normalized_trace(x) for x in xs) / 3, abs=1e-12)
    assert psi_block_trace(ctx, WreathElement(xs, (1, 2, 0))) == 0
    z = np.diag([1, -1]).astype(complex)
    g = WreathElement((z, xs[1], xs[2]), (0, 2, 1))
    assert psi_block_trace(ctx, g) == pytest.approx(0, abs=1e-12)


def test_two_regular_rank_lemma_small_exhaustive():
    # every 4×4 0/1 pattern with two ones per row and column, over F_2 and F_3
    from wreath_approx.props import elimination_rank

    rows = [r for r in itertools.product((0, 1), repeat=4) if sum(r) == 2]
    for m in itertools.product(rows, repeat=4):
        if all(sum(col) == 2 for col in zip(*m)):
            for p in (2, 3):
                assert 2 * elimination_rank(m, p) >= 4


# -- block-monomial (lazy) images agree with the dense matrices -----------------


def _wreath_pairs(ctx, n, seed):
    rng = random.Random(seed)
    return [(ctx.random_element(rng), ctx.random_element(rng)) for _ in range(n)]


def test_lazy_hamming_matches_dense():
    ctx = WreathContext(SymmetricGroup(3), range(3))
    tgt = target_context(ctx, "sofic")
    for a, b in _wreath_pairs(ctx, 200, 1):
        assert tgt.dist(psi(ctx, a), psi(ctx, b)) == perm_hamming(psi_sym(ctx, a), psi_sym(ctx, b))
        assert tgt.eq(tgt.mul(psi(ctx, a), psi(ctx, b)), psi(ctx, ctx.mul(a, b)))


def test_lazy_rank_matches_dense():
    ctx = WreathContext(GeneralLinearPrime(2, 3), range(4))
    tgt = target_context(ctx, "linear_sofic")
    for a, b in _wreath_pairs(ctx, 200, 2):
        want = rank_distance(psi_lin(ctx, a), psi_lin(ctx, b), 3)
        assert tgt.dist(psi(ctx, a), psi(ctx, b)) == want


def test_lazy_hs_matches_dense():
    ctx = WreathContext(UnitaryGroup(2), range(3))
    tgt = target_context(ctx, "hyperlinear")
    for a, b in _wreath_pairs(ctx, 200, 3):
        want = hs_distance(psi_uni(ctx, a), psi_uni(ctx, b))
        assert tgt.dist(psi(ctx, a), psi(ctx, b)) == pytest.approx(want, abs=1e-9)
        assert tgt.trace(psi(ctx, a)) == pytest.approx(normalized_trace(psi_uni(ctx, a)), abs=1e-9)


def test_target_context_requires_scaled_metric():
    with pytest.raises(GroupError):
        target_context(WreathContext(S2, range(2)), "hyperlinear")
    with pytest.raises(GroupError):
        target_context(WreathContext(S2, range(2)), "weakly_sofic")


# -- products over a window agree with their materialized forms ----------------


def test_diagonal_symmetric_matches_dense():
    ctx = DiagonalSymmetric(SymmetricGroup(3), 3)
    rng = random.Random(4)
    for _ in range(100):
        a, b = ctx.random_element(rng), ctx.random_element(rng)
        assert ctx.dist(a, b) == perm_hamming(ctx.materialize(a), ctx.materialize(b))
        ab = ctx.materialize(ctx.mul(a, b))
        ma, mb = ctx.materialize(a), ctx.materialize(b)
        assert ab == tuple(ma[i] for i in mb)


def test_regular_product_matches_dense():
    Z3 = cyclic_table(3)
    ctx = RegularProduct(Z3, 3, 2)
    rng = random.Random(5)
    for _ in range(60):
        a, b = ctx.random_element(rng), ctx.random_element(rng)
        assert ctx.dist(a, b) == rank_distance(ctx.materialize(a), ctx.materialize(b), 2)


def test_block_diagonal_matches_dense():
    ctx = BlockDiagonal(GeneralLinearPrime(2, 5), 3)
    rng = random.Random(6)
    for _ in range(100):
        a, b = ctx.random_element(rng), ctx.random_element(rng)
        assert ctx.dist(a, b) == rank_distance(ctx.materialize(a), ctx.materialize(b), 5)


def test_tensor_unitary_matches_dense():
    ctx = TensorUnitary(UnitaryGroup(2), 3)
    rng = random.Random(7)
    for _ in range(100):
        a, b = ctx.random_element(rng), ctx.random_element(rng)
        assert ctx.dist(a, b) == pytest.approx(hs_distance(ctx.materialize(a), ctx.materialize(b)), abs=1e-9)
        assert ctx.trace(a) == pytest.approx(normalized_trace(ctx.materialize(a)), abs=1e-9)


def test_max_product_distance():
    ctx = MaxProduct(SymmetricGroup(3), 4)
    a = ctx.make([(0, (1, 0, 2)), (2, (1, 2, 0))])
    assert ctx.dist(a, ctx.identity()) == 1
    assert ctx.dist(ctx.make([(0, (1, 0, 2))]), ctx.identity()) == Fraction(2, 3)


def test_materialize_refuses_huge():
    ctx = DiagonalSymmetric(SymmetricGroup(2), 50)
    with pytest.raises(GroupError):
        ctx.materialize(ctx.identity())


def test_lazy_wreath_over_lazy_base_matches_dense():
    base = DiagonalSymmetric(SymmetricGroup(2), 2)
    ctx = WreathContext(base, range(3))
    tgt = target_context(ctx, "sofic")
    for a, b in _wreath_pairs(ctx, 100, 8):
        assert tgt.dist(psi(ctx, a), psi(ctx, b)) == perm_hamming(dense(tgt, ctx, a), dense(tgt, ctx, b))


def test_lazy_rank_over_regular_product_matches_dense():
    base = RegularProduct(cyclic_table(2), 3, 2)
    ctx = WreathContext(base, range(3))
    tgt = target_context(ctx, "linear_sofic")
    for a, b in _wreath_pairs(ctx, 60, 9):
        assert tgt.dist(psi(ctx, a), psi(ctx, b)) == rank_distance(psi_lin(ctx, a), psi_lin(ctx, b), 2)


def test_lazy_hs_over_tensor_base_matches_dense():
    base = TensorUnitary(UnitaryGroup(2), 2)
    ctx = WreathContext(base, range(3))
    tgt = target_context(ctx, "hyperlinear")
    for a, b in _wreath_pairs(ctx, 60, 10):
        want = hs_distance(psi_uni(ctx, a), psi_uni(ctx, b))
        assert tgt.dist(psi(ctx, a), psi(ctx, b)) == pytest.approx(want, abs=1e-9)
