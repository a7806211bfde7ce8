"""Permutational wreath products K ≀_B Sym(B) with the metric d̃.

An element is ``WreathElement(tuple, perm)``: ``tuple[i]`` is the base entry at
position ``i`` of the ordered index set and ``perm`` a permutation of the
positions.  The product is

    (x, τ)(y, ρ) = (x · (τ·y), τρ),   (τ·y)_b = y_{τ⁻¹(b)}

and the distance is

    d̃((x, τ), (y, ρ)) = d_Hamm(τ, ρ) + scale · (1/|B|) Σ_{τ(b) = ρ(b)} d(x_{τ(b)}, y_{τ(b)}).

``scale`` is 1 for bases of diameter at most 1 and 1/2 for the unitary base
(diameter 2), which keeps the diameter of the wreath product equal to 1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .groups import GroupError, MetricGroup, perm_hamming, perm_identity, perm_inv, perm_mul


@dataclass(frozen=True)
class WreathElement:
    tuple: tuple
    perm: tuple[int, ...]


class WreathContext(MetricGroup):
    kind = "Wreath"

    def __init__(self, base: MetricGroup, index: Sequence[Any], check: bool = True):
        self.base = base
        self.index = tuple(index)
        self.size = len(self.index)
        if self.size == 0:
            raise GroupError("wreath product over an empty index set")
        if base.diameter <= 1:
            self.scale = Fraction(1)
        elif base.diameter == 2 and base.kind in ("Unitary", "TensorUnitary"):
            self.scale = Fraction(1, 2)
        else:
            raise GroupError(f"base {base!r} has diameter {base.diameter}; need <= 1 or a unitary base")
        self.exact = base.exact
        self.diameter = Fraction(1)
        if check:
            self.check_bi_invariance(samples=4)

    def element(self, entries: Sequence, perm: Sequence[int]) -> WreathElement:
        if len(entries) != self.size or len(perm) != self.size:
            raise GroupError(f"wreath element of sizes ({len(entries)}, {len(perm)}), expected {self.size}")
        return WreathElement(tuple(entries), tuple(perm))

    def identity(self) -> WreathElement:
        one = self.base.identity()
        return WreathElement((one,) * self.size, perm_identity(self.size))

    def _check(self, *els: WreathElement) -> None:
        for e in els:
            if len(e.tuple) != self.size or len(e.perm) != self.size:
                raise GroupError(f"wreath element size mismatch (|B| = {self.size})")

    def mul(self, a: WreathElement, b: WreathElement) -> WreathElement:
        self._check(a, b)
        tinv = perm_inv(a.perm)
        bm = self.base.mul
        entries = tuple(bm(a.tuple[i], b.tuple[tinv[i]]) for i in range(self.size))
        return WreathElement(entries, perm_mul(a.perm, b.perm))

    def inv(self, a: WreathElement) -> WreathElement:
        # (x, τ)^{-1} = (τ^{-1}·x^{-1}, τ^{-1});  (τ^{-1}·z)_b = z_{τ(b)}
        self._check(a)
        bi = self.base.inv
        entries = tuple(bi(a.tuple[a.perm[i]]) for i in range(self.size))
        return WreathElement(entries, perm_inv(a.perm))

    def eq(self, a: WreathElement, b: WreathElement) -> bool:
        return a.perm == b.perm and all(self.base.eq(x, y) for x, y in zip(a.tuple, b.tuple))

    def dist(self, a: WreathElement, b: WreathElement):
        return wreath_tilde_distance(self, a, b)

    def random_element(self, rng: random.Random) -> WreathElement:
        perm = list(range(self.size))
        rng.shuffle(perm)
        return WreathElement(tuple(self.base.random_element(rng) for _ in range(self.size)), tuple(perm))

    def __repr__(self):
        return f"WreathContext({self.base!r}, |B|={self.size})"


def wreath_mul(ctx: WreathContext, a: WreathElement, b: WreathElement) -> WreathElement:
    return ctx.mul(a, b)


def wreath_inv(ctx: WreathContext, a: WreathElement) -> WreathElement:
    return ctx.inv(a)


def wreath_tilde_distance(ctx: WreathContext, a: WreathElement, b: WreathElement):
    ctx._check(a, b)
    ham = perm_hamming(a.perm, b.perm)
    agree = [a.perm[i] for i in range(ctx.size) if a.perm[i] == b.perm[i]]
    if not agree:
        return ham if ctx.exact else float(ham)
    d = ctx.base.dist
    total = sum((d(a.tuple[c], b.tuple[c]) for c in agree), Fraction(0) if ctx.exact else 0.0)
    if ctx.exact:
        return ham + ctx.scale * total / ctx.size
    return float(ham) + float(ctx.scale) * total / ctx.size
