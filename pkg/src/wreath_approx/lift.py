"""Elements of G ≀≀ H and the lift Φ: G ≀≀ H → K ≀_B Sym(B).

Only finitely supported x ∈ ∏_H G are represented; every set the
construction touches (shifts, products of finitely many elements) stays
finitely supported.

The shift is θ_h(f)(k) = f(k·h).  For abelian H this is f(h·k); in general
it is the form that makes θ an action (θ_h θ_h' = θ_{hh'}), which the
semidirect product law (x, h)(x', h') = (x·θ_h(x'), hh') needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .amenable import FolnerSet, build_sigma, folner_for
from .groups import (
    GeneralLinearPrime,
    GroupError,
    MetricGroup,
    SymmetricGroup,
    TableContext,
    TableGroup,
    UnitaryGroup,
    perm_hamming,
    perm_identity,
    perm_matrix,
)
from .products import (
    BlockDiagonal,
    DiagonalSymmetric,
    MaxProduct,
    RegularProduct,
    SparseProduct,
    TensorUnitary,
    TrivialGroup,
)
from .wreath import WreathContext, WreathElement

CLASSES = ("weakly_sofic", "sofic", "linear_sofic", "hyperlinear")


class LiftError(RuntimeError):
    pass


# -- approximations of G ----------------------------------------------------


@dataclass
class GApprox:
    """A map φ from a group into a metric group with φ(1) = 1.

    ``rho`` is the declared freeness function ε' ↦ ρ(ε') when the map carries
    one; ``regular`` marks a regular-representation embedding of a finite
    group, which unlocks the exact linear-sofic combiner.
    """

    target: MetricGroup
    fn: Callable[[Any], Any]
    cls: str
    source_identity: Any = 0
    exact: bool = False
    regular: bool = False
    rho: Callable[[Fraction], Fraction] | None = None
    rho_label: str = "measured"
    group: TableGroup | None = None
    p: int | None = None
    label: str = ""

    def __post_init__(self):
        if self.cls not in CLASSES:
            raise LiftError(f"unknown approximation class {self.cls!r}")
        if not self.target.is_identity(self.fn(self.source_identity)):
            raise LiftError("approximation does not send 1 to 1")
        if self.exact and self.group is not None and self.group.order ** 2 <= 4096:
            g = self.group
            for a, b in itertools.product(range(g.order), repeat=2):
                if not self.target.eq(self.target.mul(self.fn(a), self.fn(b)), self.fn(g.mul(a, b))):
                    raise LiftError(f"map flagged exact is not multiplicative at ({a}, {b})")

    def __call__(self, g):
        return self.fn(g)


def _left_regular(group: TableGroup) -> list[tuple[int, ...]]:
    return [tuple(group.mul(g, x) for x in range(group.order)) for g in range(group.order)]


def cayley_embedding(group: TableGroup) -> GApprox:
    """Left regular representation G → Sym(|G|); every g ≠ 1 moves every point."""
    images = _left_regular(group)
    return GApprox(SymmetricGroup(group.order), images.__getitem__, "sofic",
                   source_identity=group.identity_index, exact=True,
                   rho=lambda e: 1 - e, rho_label="1 - eps", group=group, label="cayley")


def table_embedding(group: TableGroup) -> GApprox:
    """G into itself with its table metric; freeness is the least nonzero distance from 1."""
    ctx = TableContext(group)
    e = group.identity_index
    alpha = min((group.metric_table[e][g] for g in range(group.order) if g != e), default=Fraction(1))
    return GApprox(ctx, int, "weakly_sofic", source_identity=e, exact=True,
                   rho=lambda _e: alpha, rho_label=f"constant {alpha}", group=group, label="table")


def regular_matrix_embedding(group: TableGroup, p: int) -> GApprox:
    """Regular representation as permutation matrices over F_p."""
    ctx = GeneralLinearPrime(group.order, p)
    images = [ctx.validate(perm_matrix(q, p)) for q in _left_regular(group)]
    e = group.identity_index
    floor = min((1 - Fraction(1, group.element_order(g)) for g in range(group.order) if g != e),
                default=Fraction(1))
    return GApprox(ctx, images.__getitem__, "linear_sofic", source_identity=e, exact=True,
                   regular=True, rho=lambda _e: floor, rho_label=f"constant {floor}",
                   group=group, p=p, label="regular_matrix")


def regular_unitary_embedding(group: TableGroup) -> GApprox:
    """Regular representation as unitary permutation matrices (trace 0 off the identity)."""
    ctx = UnitaryGroup(group.order)
    images = [perm_matrix(q).astype(complex) for q in _left_regular(group)]
    return GApprox(ctx, images.__getitem__, "hyperlinear", source_identity=group.identity_index,
                   exact=True, group=group, label="regular_unitary")


def fourier_embedding(n: int) -> GApprox:
    """Z/n ↦ diag(ω^{kj})_j, the regular representation diagonalised; n = 2 gives diag(1, -1)."""
    from .groups import cyclic_table

    ctx = UnitaryGroup(n)
    w = np.exp(2j * np.pi / n)
    images = [np.diag([w ** (k * j) for j in range(n)]) for k in range(n)]
    if n == 2:
        images = [np.eye(2, dtype=complex), np.diag([1.0 + 0j, -1.0 + 0j])]
    return GApprox(ctx, images.__getitem__, "hyperlinear", source_identity=0, exact=True,
                   group=cyclic_table(n), label="fourier")


# -- G ≀≀ H -------------------------------------------------------------------


@dataclass(frozen=True)
class UWPElement:
    support: tuple  # ((h, g), ...) sorted by the H order, g never the identity
    h: Any


class UnrestrictedWreath:
    """The group G ≀≀ H restricted to finitely supported coordinates."""

    def __init__(self, G: TableGroup, H):
        self.G = G
        self.H = H

    def element(self, support: Iterable[tuple[Any, int]] | dict, h) -> UWPElement:
        items = support.items() if isinstance(support, dict) else support
        merged: dict = {}
        for k, g in items:
            k = self.H.validate(k)
            if k in merged:
                raise GroupError(f"repeated support point {k!r}")
            merged[k] = int(g)
        return self._make(merged, self.H.validate(h))

    def _make(self, f: dict, h) -> UWPElement:
        e = self.G.identity_index
        items = sorted(((k, g) for k, g in f.items() if g != e), key=lambda kv: self.H.key(kv[0]))
        return UWPElement(tuple(items), h)

    def identity(self) -> UWPElement:
        return UWPElement((), self.H.identity())

    def is_identity(self, a: UWPElement) -> bool:
        return not a.support and a.h == self.H.identity()

    def theta(self, h, f: dict) -> dict:
        hinv = self.H.inv(h)
        return {self.H.mul(k, hinv): g for k, g in f.items()}

    def mul(self, a: UWPElement, b: UWPElement) -> UWPElement:
        f = dict(a.support)
        for k, g in self.theta(a.h, dict(b.support)).items():
            f[k] = self.G.mul(f.get(k, self.G.identity_index), g)
        return self._make(f, self.H.mul(a.h, b.h))

    def inv(self, a: UWPElement) -> UWPElement:
        hinv = self.H.inv(a.h)
        f = {k: self.G.inv(g) for k, g in a.support}
        return self._make(self.theta(hinv, f), hinv)

    def to_json(self, a: UWPElement) -> dict:
        return {"support": [[self.H.to_json(k), g] for k, g in a.support], "h": self.H.to_json(a.h)}

    def from_json(self, doc: dict) -> UWPElement:
        return self.element([(self.H.from_json(k), g) for k, g in doc.get("support", [])],
                            self.H.from_json(doc.get("h", self.H.to_json(self.H.identity()))))


def shift_theta(uw: UnrestrictedWreath, h, f: UWPElement | dict) -> tuple:
    """θ_h f as a sorted support list; (θ_h f)(k) = f(k·h)."""
    fd = dict(f.support) if isinstance(f, UWPElement) else dict(f)
    return uw._make(uw.theta(uw.H.validate(h), fd), uw.H.identity()).support


def uwp_mul(uw: UnrestrictedWreath, a: UWPElement, b: UWPElement) -> UWPElement:
    return uw.mul(a, b)


def closure_f0(uw: UnrestrictedWreath, F: Sequence[UWPElement]) -> list[UWPElement]:
    """F ∪ {1} ∪ F⁻¹, first occurrence order."""
    out: list[UWPElement] = []
    for a in [*F, uw.identity(), *(uw.inv(x) for x in F)]:
        if a not in out:
            out.append(a)
    return out


def window_set(uw: UnrestrictedWreath, F: Sequence[UWPElement], B: FolnerSet | Sequence) -> list[dict]:
    """The finite set {θ_{b⁻¹}(x) : x ∈ proj(F₀), b ∈ B} of finitely supported maps."""
    elements = B.elements if isinstance(B, FolnerSet) else B
    out: list[dict] = []
    seen = set()
    for a in closure_f0(uw, F):
        for b in elements:
            f = uw.theta(uw.H.inv(b), dict(a.support))
            key = tuple(sorted(f.items(), key=lambda kv: uw.H.key(kv[0])))
            if key not in seen:
                seen.add(key)
                out.append(f)
    return out


def support_window(uw: UnrestrictedWreath, F: Sequence[UWPElement], B: FolnerSet | Sequence) -> list:
    """W: the union of supports of θ_{b⁻¹}(x) over x ∈ proj(F₀), b ∈ B, in H order."""
    pts = {k for f in window_set(uw, F, B) for k in f}
    return sorted(pts, key=uw.H.key)


# -- product approximations ---------------------------------------------------


@dataclass
class ProductApprox:
    """φ on ∏_H G: restrict to the window W, then apply the class combiner."""

    window: tuple
    coord: GApprox
    combiner: str
    context: SparseProduct
    coordinate_budget: Fraction
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self._pos = {k: i for i, k in enumerate(self.window)}
        self._regular = isinstance(self.context, RegularProduct)

    def __call__(self, f: dict | UWPElement):
        items = f.support if isinstance(f, UWPElement) else f.items()
        pos = self._pos
        if self._regular:
            return self.context.make((pos[k], g) for k, g in items if k in pos)
        phi = self.coord.fn
        return self.context.make((pos[k], phi(g)) for k, g in items if k in pos)


def combine_product_approx(cls: str, coord: GApprox, window: Sequence, eps: Fraction) -> ProductApprox:
    eps = Fraction(eps)
    if eps <= 0:
        raise LiftError("product approximation budget must be positive")
    if coord.cls != cls and not (cls == "weakly_sofic"):
        raise LiftError(f"{coord.cls} approximation cannot feed the {cls} combiner")
    window = tuple(window)
    size = len(window)
    notes: list[str] = []
    if size == 0:
        return ProductApprox(window, coord, "trivial", TrivialGroup(), eps, ["empty window"])
    t = coord.target
    if cls == "sofic":
        if not isinstance(t, SymmetricGroup):
            raise LiftError("sofic combiner needs a symmetric-group valued approximation")
        ctx, budget, kind = DiagonalSymmetric(t, size), eps / size, "diagonal"
    elif cls == "weakly_sofic":
        if t.diameter > 1:
            raise LiftError("weakly sofic combiner needs a base of diameter <= 1")
        ctx, budget, kind = MaxProduct(t, size), eps, "max"
    elif cls == "linear_sofic":
        if coord.regular and coord.group is not None:
            ctx, budget, kind = RegularProduct(coord.group, size, coord.p), eps, "regular"
            notes.append("regular representation of G^W: exact, freeness >= 1/2")
        else:
            if not isinstance(t, GeneralLinearPrime):
                raise LiftError("linear sofic combiner needs a GL-valued approximation")
            ctx, budget, kind = BlockDiagonal(t, size), eps, "block_diagonal"
            notes.append(f"block-diagonal sum: freeness degraded to rho/{size}; "
                         "class constant 1/4 - eps not certified")
    elif cls == "hyperlinear":
        if not isinstance(t, UnitaryGroup):
            raise LiftError("hyperlinear combiner needs a unitary-valued approximation")
        ctx, budget, kind = TensorUnitary(t, size), eps / size, "tensor"
    else:
        raise LiftError(f"unknown class {cls!r}")
    return ProductApprox(window, coord, kind, ctx, budget, notes)


# -- the lift Φ ---------------------------------------------------------------


@dataclass
class Lift:
    """Φ(x, h) = ((φ θ_{b⁻¹}(x))_{b ∈ B}, σ(h)) together with everything it was built from."""

    uw: UnrestrictedWreath
    cls: str
    epsilon: Fraction
    F0: list[UWPElement]
    F_H: list
    folner: FolnerSet
    window: list
    product: ProductApprox
    context: WreathContext
    folner_bound: Fraction
    coordinate_budget: Fraction
    sigma_fn: Callable = field(default=build_sigma, repr=False)
    _sigma: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def sigma(self, h) -> tuple[int, ...]:
        if h not in self._sigma:
            self._sigma[h] = self.sigma_fn(self.uw.H, self.folner, h)
        return self._sigma[h]

    def __call__(self, a: UWPElement) -> WreathElement:
        if a in self._cache:
            return self._cache[a]
        uw = self.uw
        x = dict(a.support)
        entries = tuple(self.product(uw.theta(uw.H.inv(b), x)) for b in self.folner.elements)
        out = WreathElement(entries, self.sigma(a.h))
        self._cache[a] = out
        return out

    def window_elements(self) -> list:
        return [self.product(f) for f in window_set(self.uw, self.F0, self.folner)]


def _projected_squares(uw: UnrestrictedWreath, F0: Sequence[UWPElement]) -> tuple[list, list]:
    H = uw.H
    F_H: list = []
    for a in F0:
        if a.h not in F_H:
            F_H.append(a.h)
    sq = {H.mul(h, k) for h in F_H for k in F_H}
    return F_H, sorted(sq, key=H.key)


def build_phi(uw: UnrestrictedWreath, F: Sequence[UWPElement], eps, cls: str, coord: GApprox, *,
              folner_bound: Fraction | None = None, coordinate_budget: Fraction | None = None,
              sigma_fn: Callable = build_sigma) -> Lift:
    """Følner bound ε/6 on F_H², product budget ε/3 unless overridden."""
    eps = Fraction(eps)
    if not 0 < eps:
        raise LiftError("epsilon must be positive")
    if cls not in CLASSES:
        raise LiftError(f"unknown class {cls!r}")
    fb = eps / 6 if folner_bound is None else Fraction(folner_bound)
    cb = eps / 3 if coordinate_budget is None else Fraction(coordinate_budget)
    F0 = closure_f0(uw, F)
    F_H, squares = _projected_squares(uw, F0)
    B = folner_for(uw.H, squares, fb)
    W = support_window(uw, F0, B)
    product = combine_product_approx(cls, coord, W, cb)
    ctx = WreathContext(product.context, B.elements, check=False)
    return Lift(uw, cls, eps, F0, F_H, B, W, product, ctx, fb, cb, sigma_fn=sigma_fn)


def build_phi_hyperlinear(uw: UnrestrictedWreath, F: Sequence[UWPElement], eps, coord: GApprox,
                          **kw) -> Lift:
    """Følner bound ε²/24 and coordinate budget ε²/12; the wreath metric is the 1/2-scaled d̃."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise LiftError("hyperlinear lift needs 0 < epsilon < 1")
    if coord.cls != "hyperlinear":
        raise LiftError("hyperlinear lift needs a unitary approximation")
    budget = eps ** 2 / 12
    if coord.group is not None:
        t = coord.target
        worst = max((abs(t.trace(coord(g))) for g in range(coord.group.order)
                     if g != coord.group.identity_index), default=0.0)
        if worst > float(budget) + 1e-9:
            raise LiftError(f"coordinate approximation is not trace preserving (|tr| = {worst:.3g})")
    return build_phi(uw, F, eps, "hyperlinear", coord, folner_bound=eps ** 2 / 24,
                     coordinate_budget=budget, **kw)


def sigma_defect(lift: Lift) -> Fraction:
    """max over h, h' ∈ F_H of d_Hamm(σ(h)σ(h'), σ(hh'))."""
    H = lift.uw.H
    worst = Fraction(0)
    for h, k in itertools.product(lift.F_H, repeat=2):
        a, b = lift.sigma(h), lift.sigma(k)
        worst = max(worst, perm_hamming(tuple(a[i] for i in b), lift.sigma(H.mul(h, k))))
    return worst


def sigma_freeness(lift: Lift) -> Fraction:
    H = lift.uw.H
    vals = [perm_hamming(lift.sigma(h), perm_identity(len(lift.folner))) for h in lift.F_H
            if h != H.identity()]
    return min(vals, default=Fraction(1))
