"""Homomorphisms ψ from K ≀_B Sym(B) into a single group of the target class.

All three maps share one shape: ψ(x, τ) is block monomial, with block
column b holding x_{τ(b)} in block row τ(b).  ``psi_sym``, ``psi_lin`` and
``psi_uni`` build the dense permutation / matrix.  :func:`psi` returns the
same image as a :class:`BlockMonomial`, whose distances are computed from the
blocks; that is what lets the pipelines work over bases such as Sym(A^W) with
|A^W| = 2^50.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groups import (
    DIST_TOL,
    GeneralLinearPrime,
    GroupError,
    MetricGroup,
    SymmetricGroup,
    UnitaryGroup,
    normalized_trace,
    perm_identity,
    perm_inv,
)
from .products import BlockDiagonal, DiagonalSymmetric, RegularProduct, TensorUnitary
from .wreath import WreathContext, WreathElement


@dataclass(frozen=True)
class BlockMonomial:
    dest: tuple[int, ...]   # column b has its only nonzero block in row dest[b]
    blocks: tuple


class MonomialContext(MetricGroup):
    """Block-monomial elements over ``base`` with one of three metrics.

    ``hamming``: the base acts on a set A, the element on A × B by
    (a, b) ↦ (blocks[b](a), dest[b]); disagreements are counted fibre by fibre.
    ``rank``: normalized rank of the difference, from the cycle structure of
    M⁻¹M' (see :meth:`rank_distance`).  ``hs``: normalized Hilbert-Schmidt
    distance, from the block norms.
    """

    def __init__(self, base: MetricGroup, size: int, metric: str):
        if metric not in ("hamming", "rank", "hs"):
            raise GroupError(f"unknown monomial metric {metric!r}")
        self.base = base
        self.size = size
        self.metric = metric
        self.kind = f"Monomial[{metric}]"
        self.exact = metric != "hs"
        self.diameter = Fraction(2) if metric == "hs" else Fraction(1)

    def identity(self) -> BlockMonomial:
        return BlockMonomial(perm_identity(self.size), (self.base.identity(),) * self.size)

    def mul(self, m: BlockMonomial, n: BlockMonomial) -> BlockMonomial:
        bm = self.base.mul
        dest = tuple(m.dest[n.dest[b]] for b in range(self.size))
        blocks = tuple(bm(m.blocks[n.dest[b]], n.blocks[b]) for b in range(self.size))
        return BlockMonomial(dest, blocks)

    def inv(self, m: BlockMonomial) -> BlockMonomial:
        bi = self.base.inv
        blocks = [None] * self.size
        for b, c in enumerate(m.dest):
            blocks[c] = bi(m.blocks[b])
        return BlockMonomial(perm_inv(m.dest), tuple(blocks))

    def eq(self, m, n) -> bool:
        return m.dest == n.dest and all(self.base.eq(x, y) for x, y in zip(m.blocks, n.blocks))

    def dist(self, m: BlockMonomial, n: BlockMonomial):
        if self.metric == "hamming":
            return self.hamming_distance(m, n)
        if self.metric == "rank":
            return self.rank_distance(m, n)
        return self.hs_distance(m, n)

    def hamming_distance(self, m, n) -> Fraction:
        d = self.base.dist
        total = Fraction(0)
        for b in range(self.size):
            total += 1 if m.dest[b] != n.dest[b] else d(m.blocks[b], n.blocks[b])
        return total / self.size

    def rank_distance(self, m, n) -> Fraction:
        """rank(M - N)/size(M), with size(M) = |B|·n.

        rank(M - N) = rank(I - C) for C = M⁻¹N.  A fixed vector of C on a
        cycle b₀ → … → b_{k-1} of C.dest is determined by its b₀ component,
        which must be fixed by the return block R = C_{b_{k-1}} ⋯ C_{b₀}; so
        the cycle contributes (k - 1)·n + rank(I - R) to the rank.  Base
        distances from the identity are exactly rank(I - R)/n.
        """
        c = self.mul(self.inv(m), n)
        one = self.base.identity()
        seen = [False] * self.size
        total = Fraction(0)
        for start in range(self.size):
            if seen[start]:
                continue
            r, b, k = one, start, 0
            while not seen[b]:
                seen[b] = True
                r = self.base.mul(c.blocks[b], r)
                b = c.dest[b]
                k += 1
            total += (k - 1) + self.base.dist(r, one)
        return total / self.size

    def hs_distance(self, m, n) -> float:
        """‖M - N‖₂ from blocks: a column whose block rows differ contributes ‖x‖² + ‖y‖² = 2."""
        d = self.base.dist
        sq = 0.0
        for b in range(self.size):
            sq += 2.0 if m.dest[b] != n.dest[b] else d(m.blocks[b], n.blocks[b]) ** 2
        return math.sqrt(sq / self.size)

    def trace(self, m: BlockMonomial) -> complex:
        return block_trace(self.base, m.dest, m.blocks)

    def random_element(self, rng: random.Random) -> BlockMonomial:
        dest = list(range(self.size))
        rng.shuffle(dest)
        return BlockMonomial(tuple(dest), tuple(self.base.random_element(rng) for _ in range(self.size)))


def block_trace(base: MetricGroup, dest, blocks) -> complex:
    tr = getattr(base, "trace", None)
    if tr is None:
        raise GroupError(f"base {base!r} has no trace")
    total = 0j
    for b, c in enumerate(dest):
        if c == b:
            total += tr(blocks[b])
    return total / len(dest)


_METRIC_FOR_CLASS = {"sofic": "hamming", "linear_sofic": "rank", "hyperlinear": "hs"}


def target_context(ctx: WreathContext, cls: str) -> MonomialContext:
    if cls not in _METRIC_FOR_CLASS:
        raise GroupError(f"no embedding for class {cls!r}")
    metric = _METRIC_FOR_CLASS[cls]
    if metric == "hs" and ctx.scale != Fraction(1, 2):
        raise GroupError("unitary embedding needs the 1/2-scaled wreath metric")
    return MonomialContext(ctx.base, ctx.size, metric)


def psi(ctx: WreathContext, g: WreathElement) -> BlockMonomial:
    """ψ(x, τ) as a block-monomial: dest = τ, blocks[b] = x_{τ(b)}."""
    return BlockMonomial(g.perm, tuple(g.tuple[c] for c in g.perm))


def _dense_base(base: MetricGroup, x):
    if isinstance(base, (DiagonalSymmetric, BlockDiagonal, RegularProduct, TensorUnitary)):
        return base.materialize(x)
    return x


def psi_sym(ctx: WreathContext, g: WreathElement) -> tuple[int, ...]:
    """ψ(α, β)(a, b) = (α_{β(b)}(a), β(b)) on A × B, point (a, b) at index a·|B| + b."""
    base = ctx.base
    if isinstance(base, SymmetricGroup):
        na = base.n
    elif isinstance(base, DiagonalSymmetric):
        na = base.points
    else:
        raise GroupError(f"psi_sym needs a symmetric base, got {base!r}")
    nb = ctx.size
    alphas = [_dense_base(base, x) for x in g.tuple]
    out = [0] * (na * nb)
    for a in range(na):
        for b in range(nb):
            c = g.perm[b]
            out[a * nb + b] = alphas[c][a] * nb + c
    return tuple(out)


def _block_matrix(ctx: WreathContext, g: WreathElement, dtype) -> np.ndarray:
    blocks = [np.asarray(_dense_base(ctx.base, x)) for x in g.tuple]
    n = blocks[0].shape[0]
    nb = ctx.size
    out = np.zeros((nb * n, nb * n), dtype=dtype)
    for b in range(nb):
        c = g.perm[b]
        out[c * n:(c + 1) * n, b * n:(b + 1) * n] = blocks[c]
    return out


def psi_lin(ctx: WreathContext, g: WreathElement) -> np.ndarray:
    """Block (b', b) is U_{τ(b)} when b' = τ(b) and 0 otherwise, over F_p."""
    if not isinstance(ctx.base, (GeneralLinearPrime, BlockDiagonal, RegularProduct)):
        raise GroupError(f"psi_lin needs a GL base, got {ctx.base!r}")
    return _block_matrix(ctx, g, np.int64)


def psi_uni(ctx: WreathContext, g: WreathElement) -> np.ndarray:
    if not isinstance(ctx.base, (UnitaryGroup, TensorUnitary)):
        raise GroupError(f"psi_uni needs a unitary base, got {ctx.base!r}")
    if ctx.scale != Fraction(1, 2):
        raise GroupError("psi_uni needs the 1/2-scaled wreath metric")
    m = _block_matrix(ctx, g, complex)
    dev = float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))
    if dev > 1e-9:
        raise GroupError(f"psi_uni produced a non-unitary matrix (deviation {dev:.3g})")
    return m


def psi_block_trace(ctx: WreathContext, g: WreathElement):
    """(1/|B|) Σ_{τ(b) = b} tr(U_b).

    Normalized (complex) for unitary bases; for GL_n(F_p) bases the sum of
    unnormalized block traces mod p, since 1/n need not exist in F_p.
    """
    base = ctx.base
    if isinstance(base, GeneralLinearPrime):
        return sum(int(np.trace(g.tuple[b])) for b in range(ctx.size) if g.perm[b] == b) % base.p
    if isinstance(base, (UnitaryGroup, TensorUnitary)):
        return block_trace(base, g.perm, [g.tuple[c] for c in g.perm])
    raise GroupError(f"block trace needs a unitary or linear base, got {base!r}")


def direct_trace(m: np.ndarray) -> complex:
    return normalized_trace(m)


def dense(target: MonomialContext, ctx: WreathContext, g: WreathElement):
    """Dense form of ψ(g) matching ``target.metric``; for cross-checks on small cases."""
    if target.metric == "hamming":
        return psi_sym(ctx, g)
    if target.metric == "rank":
        return psi_lin(ctx, g)
    return psi_uni(ctx, g)


__all__ = [
    "BlockMonomial", "MonomialContext", "block_trace", "dense", "psi", "psi_block_trace",
    "psi_lin", "psi_sym", "psi_uni", "target_context", "DIST_TOL",
]
