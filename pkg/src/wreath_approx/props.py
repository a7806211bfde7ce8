"""Property suite for the embeddings ψ, the permutation model σ and the rank lemmas.

Every check takes the implementation under test as a parameter, so a
deliberately broken variant can be fed through the same suite and must be
caught with a concrete witness.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from .amenable import IntegerLine, boundary_ratio, build_sigma, canonical_gamma, folner_for
from .embeddings import psi_block_trace, psi_lin, psi_sym, psi_uni
from .groups import (
    GeneralLinearPrime,
    SymmetricGroup,
    UnitaryGroup,
    hs_distance,
    hs_norm,
    normalized_trace,
    perm_hamming,
    perm_mul,
    rank_distance,
)
from .linalg import rank_mod_p
from .serialize import wreath_to_json
from .wreath import WreathContext, WreathElement

MAX_INDEX_SIZE = 6
DEFAULT_SIZES = (2, 3)
DEFAULT_PAIRS = 1000


@dataclass
class PropertyResult:
    name: str
    passed: bool
    checked: int
    witness: Any = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"{status}  {self.name}  ({self.checked} cases)"
        if self.witness is not None:
            out += f"\n      witness: {self.witness}"
        return out


@dataclass
class _Check:
    name: str
    checked: int = 0
    witness: Any = None

    def fail(self, witness) -> None:
        if self.witness is None:
            self.witness = witness

    def result(self) -> PropertyResult:
        return PropertyResult(self.name, self.witness is None, self.checked, self.witness)


def _all_elements(ctx: WreathContext, base_elems: Sequence) -> list[WreathElement]:
    return [WreathElement(tuple(xs), tuple(p))
            for xs in itertools.product(base_elems, repeat=ctx.size)
            for p in itertools.permutations(range(ctx.size))]


def _pairs(ctx: WreathContext, rng: random.Random, count: int):
    for _ in range(count):
        yield ctx.random_element(rng), ctx.random_element(rng)


def _wj(g: WreathElement):
    return wreath_to_json(g)


# -- ψ into symmetric groups --------------------------------------------------


def check_psi_sym(psi_fn: Callable = psi_sym, *, seed: int = 0, sizes: Sequence[int] = DEFAULT_SIZES,
                  pairs: int = DEFAULT_PAIRS) -> list[PropertyResult]:
    iso, hom = _Check("psi_sym isometry"), _Check("psi_sym homomorphism")
    rng = random.Random(seed)
    cases = []
    small = WreathContext(SymmetricGroup(2), range(2))
    elems = _all_elements(small, list(SymmetricGroup(2).elements()))
    cases.append((small, itertools.product(elems, repeat=2)))
    for s in sizes:
        ctx = WreathContext(SymmetricGroup(3), range(s))
        cases.append((ctx, _pairs(ctx, rng, pairs)))
    for ctx, it in cases:
        for a, b in it:
            pa, pb = psi_fn(ctx, a), psi_fn(ctx, b)
            iso.checked += 1
            dt, dh = ctx.dist(a, b), perm_hamming(pa, pb)
            if dt != dh:
                iso.fail({"a": _wj(a), "b": _wj(b), "d_tilde": str(dt), "d_hamm": str(dh)})
            hom.checked += 1
            if perm_mul(pa, pb) != psi_fn(ctx, ctx.mul(a, b)):
                hom.fail({"a": _wj(a), "b": _wj(b)})
    return [iso.result(), hom.result()]


# -- ψ into GL over F_p -------------------------------------------------------


def check_psi_lin(psi_fn: Callable = psi_lin, *, seed: int = 0, sizes: Sequence[int] = DEFAULT_SIZES,
                  pairs: int = DEFAULT_PAIRS) -> list[PropertyResult]:
    sand, hom, wit = (_Check("psi_lin rank sandwich"), _Check("psi_lin homomorphism"),
                      _Check("psi_lin bounds attained"))
    rng = random.Random(seed)
    cases = []
    gl12 = GeneralLinearPrime(1, 2)
    small = WreathContext(gl12, range(2))
    elems = _all_elements(small, [gl12.identity()])
    cases.append((small, 2, list(itertools.product(elems, repeat=2))))
    for s in sizes:
        gl = GeneralLinearPrime(2, 5)
        ctx = WreathContext(gl, range(s))
        cases.append((ctx, 5, _pairs(ctx, rng, pairs)))
    for ctx, p, it in cases:
        for a, b in it:
            ma, mb = psi_fn(ctx, a), psi_fn(ctx, b)
            dt, dr = ctx.dist(a, b), rank_distance(ma, mb, p)
            sand.checked += 1
            if not dt / 2 <= dr <= dt:
                sand.fail({"a": _wj(a), "b": _wj(b), "d_tilde": str(dt), "d_rk": str(dr)})
            hom.checked += 1
            if not np.array_equal((ma @ mb) % p, psi_fn(ctx, ctx.mul(a, b)) % p):
                hom.fail({"a": _wj(a), "b": _wj(b)})

    gl15 = GeneralLinearPrime(1, 5)
    ctx = WreathContext(gl15, range(2))
    one, two = np.array([[1]]), np.array([[2]])
    for a, b, want in (
        (WreathElement((one, one), (1, 0)), WreathElement((one, one), (0, 1)), "lower"),
        (WreathElement((two, two), (0, 1)), WreathElement((one, one), (0, 1)), "upper"),
    ):
        wit.checked += 1
        dt, dr = ctx.dist(a, b), rank_distance(psi_fn(ctx, a), psi_fn(ctx, b), 5)
        ok = dr == dt / 2 if want == "lower" else dr == dt
        if not ok:
            wit.fail({"bound": want, "a": _wj(a), "b": _wj(b), "d_tilde": str(dt), "d_rk": str(dr)})
    return [sand.result(), hom.result(), wit.result()]


# -- ψ into unitary groups ------------------------------------------------------


def check_psi_uni(psi_fn: Callable = psi_uni, *, seed: int = 0, sizes: Sequence[int] = DEFAULT_SIZES,
                  pairs: int = DEFAULT_PAIRS, tol: float = 1e-9) -> list[PropertyResult]:
    sand, hom, norm, trace = (_Check("psi_uni HS sandwich"), _Check("psi_uni homomorphism"),
                              _Check("psi_uni norm identity"), _Check("psi_uni block trace"))
    rng = random.Random(seed)
    for s in sizes:
        ctx = WreathContext(UnitaryGroup(2), range(s))
        for a, b in _pairs(ctx, rng, pairs):
            ma, mb = psi_fn(ctx, a), psi_fn(ctx, b)
            dt, dh = ctx.dist(a, b), hs_distance(ma, mb)
            sand.checked += 1
            if not (dt - tol <= dh <= 2 * math.sqrt(dt) + tol):
                sand.fail({"a": _wj(a), "b": _wj(b), "d_tilde": dt, "d_hs": dh})
            hom.checked += 1
            dev = float(np.max(np.abs(ma @ mb - psi_fn(ctx, ctx.mul(a, b)))))
            if dev > tol:
                hom.fail({"a": _wj(a), "b": _wj(b), "deviation": dev})
            norm.checked += 1
            lhs = hs_norm(ma) ** 2
            rhs = sum(hs_norm(x) ** 2 for x in a.tuple) / ctx.size
            if abs(lhs - rhs) > tol:
                norm.fail({"a": _wj(a), "lhs": lhs, "rhs": rhs})
            trace.checked += 1
            if abs(psi_block_trace(ctx, a) - normalized_trace(ma)) > tol:
                trace.fail({"a": _wj(a)})
    return [sand.result(), hom.result(), norm.result(), trace.result()]


# -- σ -------------------------------------------------------------------------


def check_sigma(gamma: Callable = canonical_gamma, *, seed: int = 0, trials: int = 100,
                eps: Fraction = Fraction(1, 2)) -> list[PropertyResult]:
    """σ on integer intervals is translation mod N; σ(h) is a permutation; defect ≤ 2·bound."""
    valid, trans, defect = (_Check("sigma is a permutation"), _Check("sigma translation on intervals"),
                            _Check("sigma multiplicativity"))
    rng = random.Random(seed)
    H = IntegerLine()
    for _ in range(trials):
        n = rng.randint(1, 40)
        h = rng.randint(-2 * n, 2 * n)
        s = build_sigma(H, tuple(range(n)), h, gamma=gamma)
        valid.checked += 1
        if sorted(s) != list(range(n)):
            valid.fail({"N": n, "h": h, "sigma": list(s)})
            continue
        trans.checked += 1
        if 0 <= abs(h) <= n and s != tuple((i + h) % n for i in range(n)):
            trans.fail({"N": n, "h": h, "sigma": list(s)})
    bound = eps / 6
    targets = list(range(-2, 3))
    B = folner_for(H, targets, bound)
    F_H = [-1, 0, 1]
    for a, b in itertools.product(F_H, repeat=2):
        sa, sb = build_sigma(H, B, a, gamma=gamma), build_sigma(H, B, b, gamma=gamma)
        defect.checked += 1
        d = perm_hamming(perm_mul(sa, sb), build_sigma(H, B, a + b, gamma=gamma))
        if d > 2 * bound:
            defect.fail({"h": a, "h'": b, "defect": str(d), "bound": str(2 * bound)})
    return [valid.result(), trans.result(), defect.result()]


# -- rank lemmas and oracles -------------------------------------------------


def elimination_rank(rows: Sequence[Sequence[int]], p: int) -> int:
    """Plain row reduction over F_p on lists of ints; independent of :mod:`linalg`."""
    m = [[x % p for x in row] for row in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], p - 2, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def two_regular_pattern(n: int, rng: random.Random, p: int) -> np.ndarray:
    """Random n×n matrix with exactly two nonzero entries in every row and column (n ≥ 2)."""
    a = list(range(n))
    rng.shuffle(a)
    while True:
        b = list(range(n))
        rng.shuffle(b)
        if all(x != y for x, y in zip(a, b)):
            break
    m = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        m[i, a[i]] = rng.randrange(1, p)
        m[i, b[i]] = rng.randrange(1, p)
    return m


def check_rank(*, seed: int = 0, matrices: int = 10_000, patterns: int = 500,
               max_size: int = 12) -> list[PropertyResult]:
    oracle, lemma = _Check("rank agrees with elimination oracle"), _Check("two-per-row rank lemma")
    rng = random.Random(seed)
    for _ in range(matrices):
        p = rng.choice((2, 3, 5, 7, 11))
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        m = [[rng.randrange(p) for _ in range(c)] for _ in range(r)]
        oracle.checked += 1
        got, want = rank_mod_p(np.array(m, dtype=np.int64), p), elimination_rank(m, p)
        if got != want:
            oracle.fail({"p": p, "matrix": m, "rank": got, "oracle": want})
    for _ in range(patterns):
        n = rng.randint(2, max_size)
        p = rng.choice((2, 3, 5, 7))
        m = two_regular_pattern(n, rng, p)
        lemma.checked += 1
        r = elimination_rank(m.tolist(), p)
        if 2 * r < n:
            lemma.fail({"p": p, "matrix": m.tolist(), "rank": r})
    return [oracle.result(), lemma.result()]


def set_boundary_ratio(B: Sequence, h: int) -> Fraction:
    s = set(B)
    moved = {h + b for b in B}
    return Fraction(len(s ^ moved), len(s))


def check_boundary(*, seed: int = 0, trials: int = 1000) -> list[PropertyResult]:
    chk = _Check("boundary ratio agrees with set oracle")
    rng = random.Random(seed)
    H = IntegerLine()
    for _ in range(trials):
        B = rng.sample(range(-30, 30), rng.randint(1, 25))
        h = rng.randint(-20, 20)
        chk.checked += 1
        got, want = boundary_ratio(H, B, h), set_boundary_ratio(B, h)
        if got != want:
            chk.fail({"B": B, "h": h, "ratio": str(got), "oracle": str(want)})
    return [chk.result()]


def run_properties(seed: int = 0, sizes: Sequence[int] = DEFAULT_SIZES, pairs: int = DEFAULT_PAIRS, *,
                   psi_sym_fn: Callable = psi_sym, psi_lin_fn: Callable = psi_lin,
                   psi_uni_fn: Callable = psi_uni, gamma: Callable = canonical_gamma,
                   rank_matrices: int = 10_000) -> list[PropertyResult]:
    sizes = tuple(sizes)
    if not sizes or any(not 1 <= s <= MAX_INDEX_SIZE for s in sizes):
        raise ValueError(f"index sizes must lie in 1..{MAX_INDEX_SIZE}")
    if pairs < 0:
        raise ValueError("pairs must be non-negative")
    out: list[PropertyResult] = []
    out += check_psi_sym(psi_sym_fn, seed=seed, sizes=sizes, pairs=pairs)
    out += check_psi_lin(psi_lin_fn, seed=seed, sizes=sizes, pairs=pairs)
    out += check_psi_uni(psi_uni_fn, seed=seed, sizes=sizes, pairs=pairs)
    out += check_sigma(gamma, seed=seed)
    out += check_rank(seed=seed, matrices=rank_matrices)
    out += check_boundary(seed=seed)
    return out


# -- deliberately broken variants, for mutation testing -------------------------


def psi_lin_transposed(ctx: WreathContext, g: WreathElement) -> np.ndarray:
    """ψ_lin with block U_{τ(b)} placed at (b, τ(b)) instead of (τ(b), b)."""
    m = psi_lin(ctx, g)
    n = m.shape[0] // ctx.size
    out = np.zeros_like(m)
    for b in range(ctx.size):
        c = g.perm[b]
        out[b * n:(b + 1) * n, c * n:(c + 1) * n] = m[c * n:(c + 1) * n, b * n:(b + 1) * n]
    return out


def gamma_reversed(H, stray: list, free: list) -> dict:
    return dict(zip(sorted(stray, key=H.key), sorted(free, key=H.key, reverse=True)))


def gamma_collapsed(H, stray: list, free: list) -> dict:
    first = min(free, key=H.key) if free else None
    return {s: first for s in stray}


__all__ = [
    "PropertyResult", "run_properties", "check_psi_sym", "check_psi_lin", "check_psi_uni",
    "check_sigma", "check_rank", "check_boundary", "elimination_rank", "set_boundary_ratio",
    "two_regular_pattern", "psi_lin_transposed", "gamma_reversed", "gamma_collapsed",
]
