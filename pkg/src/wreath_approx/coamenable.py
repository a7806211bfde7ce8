"""Groups with a co-amenable subgroup: the coset action and the map Φ: G → K ≀_B Sym(B).

A coset space presents the action of G on G/H through the same small
interface as the acting groups of :mod:`wreath_approx.amenable`
(``validate``, ``mul`` = action, ``key`` = order on cosets), so
:func:`~wreath_approx.amenable.boundary_ratio`, :class:`FolnerSet` and
:func:`~wreath_approx.amenable.build_sigma` apply unchanged.  Cosets are
labelled by their section representative τ(c), the least element of the coset
in the backend order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Sequence

from .amenable import FolnerSet, NoFolnerSet, boundary_ratio, build_sigma
from .groups import (
    GroupError,
    MetricGroup,
    SymmetricGroup,
    TableGroup,
    check_perm,
    perm_identity,
    perm_inv,
    perm_mul,
)
from .lift import CLASSES, GApprox, LiftError
from .wreath import WreathContext, WreathElement


class CoamenableError(RuntimeError):
    pass


# -- enumerable groups ------------------------------------------------------


class PermutationBackend:
    """Sym({0..n-1}); elements are image tuples ordered lexicographically."""

    kind = "symmetric"

    def __init__(self, n: int):
        self.n = n

    def identity(self):
        return perm_identity(self.n)

    def mul(self, a, b):
        return perm_mul(a, b)

    def inv(self, a):
        return perm_inv(a)

    def key(self, a):
        return a

    def validate(self, a):
        return check_perm(a, self.n)

    def elements(self):
        return itertools.permutations(range(self.n))

    def to_json(self, a):
        return list(a)


class CyclicBackend:
    kind = "cyclic"

    def __init__(self, n: int):
        self.n = n

    def identity(self):
        return 0

    def mul(self, a, b):
        return (a + b) % self.n

    def inv(self, a):
        return -a % self.n

    def key(self, a):
        return a

    def validate(self, a):
        if isinstance(a, bool) or not isinstance(a, int) or not 0 <= a < self.n:
            raise GroupError(f"{a!r} is not an element of Z/{self.n}")
        return a

    def elements(self):
        return range(self.n)

    def to_json(self, a):
        return a


class TableBackend:
    kind = "table"

    def __init__(self, table: TableGroup):
        self.table = table

    def identity(self):
        return self.table.identity_index

    def mul(self, a, b):
        return self.table.mul(a, b)

    def inv(self, a):
        return self.table.inv(a)

    def key(self, a):
        return a

    def validate(self, a):
        if isinstance(a, bool) or not isinstance(a, int) or not 0 <= a < self.table.order:
            raise GroupError(f"{a!r} is not a table index")
        return a

    def elements(self):
        return range(self.table.order)

    def to_json(self, a):
        return a


# -- coset spaces ---------------------------------------------------------------


class FiniteCosetSpace:
    """G/H for an enumerable finite G and a subgroup given by its elements."""

    def __init__(self, G, subgroup: Iterable):
        self.G = G
        sub = [G.validate(h) for h in subgroup]
        self.subgroup = frozenset(sub)
        e = G.identity()
        if e not in self.subgroup:
            raise CoamenableError("subgroup does not contain the identity")
        for a, b in itertools.product(sub, repeat=2):
            if G.mul(a, G.inv(b)) not in self.subgroup:
                raise CoamenableError(f"subgroup is not closed: {a!r}·{b!r}⁻¹")
        self._rep: dict = {}
        for g in G.elements():
            if g in self._rep:
                continue
            coset = [G.mul(g, h) for h in sub]
            rep = min(coset, key=G.key)
            for x in coset:
                self._rep[x] = rep
        self._cosets = sorted(set(self._rep.values()), key=G.key)
        self.horizon = None

    def in_subgroup(self, g) -> bool:
        return g in self.subgroup

    def pi(self, g):
        return self._rep[g]

    def section(self, c):
        return c

    def cosets(self) -> list:
        return list(self._cosets)

    # acting-group interface used by boundary_ratio / build_sigma
    def validate(self, g):
        return self.G.validate(g)

    def mul(self, g, c):
        return self._rep[self.G.mul(g, c)]

    def key(self, c):
        return self.G.key(c)


class PointStabilizerCosets:
    """Finitely supported permutations of ℕ modulo the stabilizer of 0, truncated at ``horizon``.

    G is realised as Sym({0..N-1}); the coset of g is labelled by the point
    g(0) and the section sends c to the lexicographically least permutation
    with 0 ↦ c, namely (c, 0, 1, …, c-1, c+1, …, N-1).
    """

    def __init__(self, horizon: int):
        if horizon < 2:
            raise CoamenableError("horizon must be at least 2")
        self.horizon = horizon
        self.G = PermutationBackend(horizon)

    def in_subgroup(self, g) -> bool:
        return g[0] == 0

    def pi(self, g) -> int:
        return g[0]

    def section(self, c: int):
        rest = [x for x in range(self.horizon) if x != c]
        return (c, *rest)

    def cosets(self) -> list:
        return list(range(self.horizon))

    def validate(self, g):
        return self.G.validate(g)

    def mul(self, g, c: int) -> int:
        return g[c]

    def key(self, c):
        return c


def coset_action(space, g, c):
    """g.c = π(g·τ(c))."""
    return space.pi(space.G.mul(space.G.validate(g), space.section(c)))


def folner_targets(space, F: Sequence) -> list:
    """F ∪ F⁻¹ ∪ F² ∪ (F⁻¹)², first occurrence order."""
    G = space.G
    inv = [G.inv(f) for f in F]
    out: list = []
    for g in [*F, *inv, *(G.mul(a, b) for a in F for b in F), *(G.mul(a, b) for a in inv for b in inv)]:
        if g not in out:
            out.append(g)
    return out


def folner_cosets(space, targets: Sequence, bound) -> FolnerSet:
    """All cosets for a finite space; otherwise the shortest prefix {0..M-1} within the horizon."""
    bound = Fraction(bound)
    if bound <= 0:
        raise CoamenableError("Følner bound must be positive")
    targets = tuple(space.validate(t) for t in targets)
    if isinstance(space, FiniteCosetSpace):
        return FolnerSet(space, tuple(space.cosets()), targets, bound)
    cosets = space.cosets()
    for m in range(1, len(cosets) + 1):
        cand = tuple(cosets[:m])
        if all(boundary_ratio(space, cand, t) <= bound for t in targets):
            return FolnerSet(space, cand, targets, bound)
    raise NoFolnerSet(f"no Følner set within horizon {space.horizon}")


def build_sigma_cosets(space, B: FolnerSet, g, gamma=None):
    if gamma is None:
        return build_sigma(space, B, g)
    return build_sigma(space, B, g, gamma=gamma)


# -- approximations of the subgroup ---------------------------------------------


def restrict_stabilizer(n: int, cls: str = "sofic") -> GApprox:
    """Stab(0) ≤ Sym(n) → Sym(n-1), forgetting the fixed point 0."""
    target = SymmetricGroup(n - 1)

    def fn(g):
        return tuple(x - 1 for x in g[1:])

    return GApprox(target, fn, cls, source_identity=perm_identity(n), exact=True, label="restrict")


def subgroup_cayley(space, cls: str = "sofic") -> GApprox:
    """Left regular representation of a finite subgroup on its own elements."""
    G = space.G
    elems = sorted(space.subgroup, key=G.key)
    pos = {h: i for i, h in enumerate(elems)}
    target = SymmetricGroup(len(elems))
    images = {h: tuple(pos[G.mul(h, x)] for x in elems) for h in elems}
    return GApprox(target, images.__getitem__, cls, source_identity=G.identity(), exact=True,
                   rho=lambda e: 1 - e, rho_label="1 - eps", label="cayley")


def subgroup_regular_matrix(space, p: int = 2) -> GApprox:
    """Regular representation of a finite subgroup as permutation matrices over F_p."""
    from .groups import validate_table_group
    from .lift import regular_matrix_embedding

    G = space.G
    elems = sorted(space.subgroup, key=G.key)
    pos = {h: i for i, h in enumerate(elems)}
    table = validate_table_group(len(elems), [[pos[G.mul(a, b)] for b in elems] for a in elems])
    inner = regular_matrix_embedding(table, p)
    return GApprox(inner.target, lambda h: inner.fn(pos[h]), "linear_sofic",
                   source_identity=G.identity(), exact=True, rho=inner.rho,
                   rho_label=inner.rho_label, label="regular_matrix")


# -- the map Φ ----------------------------------------------------------------


@dataclass
class CoamenableLift:
    space: Any
    F: list
    epsilon: Fraction
    cosets: FolnerSet
    reps: tuple
    phi_H: GApprox
    context: WreathContext
    F_H: list
    folner_bound: Fraction
    sigma_fn: Callable = field(default=build_sigma, repr=False)
    _sigma: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def sigma(self, g):
        if g not in self._sigma:
            self._sigma[g] = self.sigma_fn(self.space, self.cosets, g)
        return self._sigma[g]

    def coordinate(self, g, b):
        """b⁻¹ g τπ(g⁻¹ b), which lies in H for a consistent section/quotient pair."""
        G = self.space.G
        sp = self.space
        h = G.mul(G.mul(G.inv(b), g), sp.section(sp.pi(G.mul(G.inv(g), b))))
        if not sp.in_subgroup(h):
            raise CoamenableError(f"coordinate {h!r} for b = {b!r} is not in the subgroup")
        return h

    def __call__(self, g) -> WreathElement:
        if g in self._cache:
            return self._cache[g]
        entries = tuple(self.phi_H(self.coordinate(g, b)) for b in self.reps)
        out = WreathElement(entries, self.sigma(g))
        self._cache[g] = out
        return out


def subgroup_window(space, F: Sequence, reps: Sequence) -> list:
    """F_H = (B⁻¹ F B) ∩ H."""
    G = space.G
    out: list = []
    for f in F:
        for b in reps:
            for c in reps:
                h = G.mul(G.mul(G.inv(b), f), c)
                if space.in_subgroup(h) and h not in out:
                    out.append(h)
    return out


def build_phi_coamenable(space, F: Sequence, eps, phi_H: GApprox, *,
                         sigma_fn: Callable = build_sigma) -> CoamenableLift:
    """Følner bound ε/4 over F ∪ F⁻¹ ∪ F² ∪ (F⁻¹)², B = τ(B̄)."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise CoamenableError("epsilon must lie in (0, 1)")
    F = [space.validate(f) for f in F]
    fb = eps / 4
    cos = folner_cosets(space, folner_targets(space, F), fb)
    reps = tuple(space.section(c) for c in cos.elements)
    for c, r in zip(cos.elements, reps):
        if space.pi(r) != c:
            raise CoamenableError(f"section and quotient disagree at coset {c!r}")
    ctx = WreathContext(phi_H.target, reps, check=False)
    lift = CoamenableLift(space, F, eps, cos, reps, phi_H, ctx,
                          subgroup_window(space, F, reps), fb, sigma_fn=sigma_fn)
    return lift


def coset_sigma_defect(lift: CoamenableLift) -> Fraction:
    from .groups import perm_hamming

    G = lift.space.G
    worst = Fraction(0)
    for a, b in itertools.product(lift.F, repeat=2):
        sa, sb = lift.sigma(a), lift.sigma(b)
        worst = max(worst, perm_hamming(tuple(sa[i] for i in sb), lift.sigma(G.mul(a, b))))
    return worst


def measured_rho(lift: CoamenableLift) -> Fraction:
    """min over F_H \\ {1} of d(φ(h), 1); 1 when F_H has no nontrivial element."""
    t = lift.phi_H.target
    one = t.identity()
    e = lift.space.G.identity()
    vals = [t.dist(lift.phi_H(h), one) for h in lift.F_H if h != e]
    return min(vals, default=Fraction(1))


def parse_space(spec: dict, horizon: int | None = None):
    """Coset space from a config: ``G`` and ``subgroup`` documents."""
    g = spec["G"]
    sub = spec.get("subgroup", {})
    kind = g.get("kind")
    if kind == "fsym":
        n = int(g.get("horizon", horizon or spec.get("horizon", 0)))
        if sub.get("kind", "stabilizer") != "stabilizer" or int(sub.get("point", 0)) != 0:
            raise CoamenableError("fsym backend supports only the stabilizer of 0")
        return PointStabilizerCosets(n)
    if kind == "symmetric":
        G = PermutationBackend(int(g["n"]))
    elif kind == "cyclic":
        G = CyclicBackend(int(g["n"]))
    elif kind == "table":
        from .groups import validate_table_group

        G = TableBackend(validate_table_group(len(g["table"]), g["table"]))
    else:
        raise CoamenableError(f"unknown group spec {g!r}")
    skind = sub.get("kind")
    if skind == "stabilizer":
        if kind != "symmetric":
            raise CoamenableError("stabilizer subgroups need a symmetric group")
        pt = int(sub.get("point", 0))
        elems = [p for p in G.elements() if p[pt] == pt]
    elif skind == "elements":
        elems = [tuple(x) if isinstance(x, list) else x for x in sub["elements"]]
    else:
        raise CoamenableError(f"unknown subgroup spec {sub!r}")
    return FiniteCosetSpace(G, elems)
