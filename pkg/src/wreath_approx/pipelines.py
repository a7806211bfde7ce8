"""End-to-end constructions: config → map → certificate.

:func:`run_lift` builds Φ: G ≀≀ H → K ≀_B Sym(B) for one of the four classes
and, except for the weakly sofic class, composes with the matching ψ.  The
headline certificate is taken at the final target; the wreath-level
measurements are checked as well and recorded under ``extra["wreath"]``.

Target-level bounds follow from the wreath-level ones through the metric
relations of ψ: isometric (sofic), d̃/2 ≤ d_rk ≤ d̃ (linear sofic) and
d̃ ≤ d_HS ≤ 2√d̃ (hyperlinear).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any

from .amenable import parse_backend
from .certify import (
    Certificate,
    check_bounds,
    measure_defect,
    measure_freeness,
    measure_orthogonality,
    measure_trace,
)
from .coamenable import (
    CoamenableError,
    FiniteCosetSpace,
    PointStabilizerCosets,
    build_phi_coamenable,
    coset_sigma_defect,
    measured_rho,
    parse_space,
    restrict_stabilizer,
    subgroup_cayley,
    subgroup_regular_matrix,
)
from .embeddings import psi, target_context
from .groups import GroupError, TableGroup, cyclic_table, discrete_metric, validate_table_group
from .lift import (
    CLASSES,
    GApprox,
    Lift,
    LiftError,
    UnrestrictedWreath,
    build_phi,
    build_phi_hyperlinear,
    cayley_embedding,
    fourier_embedding,
    regular_matrix_embedding,
    regular_unitary_embedding,
    sigma_defect,
    sigma_freeness,
    table_embedding,
)
from .serialize import rational_from_json

DEFAULT_APPROX = {
    "weakly_sofic": "table",
    "sofic": "cayley",
    "linear_sofic": "regular_matrix",
    "hyperlinear": "fourier",
}


class ConfigError(ValueError):
    """The configuration document is malformed or inconsistent."""


def _require(config: dict, key: str):
    if key not in config:
        raise ConfigError(f"config is missing {key!r}")
    return config[key]


def parse_epsilon(config: dict) -> Fraction:
    try:
        eps = rational_from_json(_require(config, "epsilon"))
    except GroupError as exc:
        raise ConfigError(str(exc)) from exc
    if eps <= 0:
        raise ConfigError("epsilon must be positive")
    return eps


def parse_table(spec: dict, *, need_metric: bool) -> TableGroup:
    kind = spec.get("kind")
    if kind == "cyclic":
        t = cyclic_table(int(spec["n"]))
    elif kind == "table":
        rows = spec["mul_table"]
        metric = spec.get("metric_table")
        if metric is not None:
            metric = [[rational_from_json(x) for x in row] for row in metric]
        elif need_metric:
            metric = discrete_metric(len(rows))
        t = validate_table_group(len(rows), rows, metric)
    else:
        raise ConfigError(f"unknown G spec {spec!r}")
    if not t.valid:
        raise ConfigError(f"G is not a valid metric group: {t.violations[0]}")
    return t


def make_coordinate(cls: str, G: TableGroup, spec: dict | str | None) -> GApprox:
    if isinstance(spec, str) or spec is None:
        spec = {"kind": spec or DEFAULT_APPROX[cls]}
    kind = spec.get("kind")
    if kind == "cayley":
        return cayley_embedding(G)
    if kind == "table":
        return table_embedding(G)
    if kind == "regular_matrix":
        coord = regular_matrix_embedding(G, int(spec.get("p", 2)))
        if spec.get("combiner") == "block_diagonal":
            coord.regular = False
        return coord
    if kind == "regular_unitary":
        return regular_unitary_embedding(G)
    if kind == "fourier":
        if G.order != 2 and any(G.mul(a, b) != (a + b) % G.order
                                for a in range(G.order) for b in range(G.order)):
            raise ConfigError("fourier approximation needs the cyclic group table")
        return fourier_embedding(G.order)
    raise ConfigError(f"unknown approximation {spec!r}")


def _product_rho(lift: Lift, eps: Fraction) -> tuple[Any, str]:
    """Freeness ρ(ε/3) of the approximation of ∏_H G on the window set."""
    prod = lift.product
    coord = prod.coord
    if prod.combiner == "trivial":
        return Fraction(1), "vacuous"
    if coord.rho is not None and prod.combiner in ("diagonal", "max", "regular"):
        return coord.rho(eps / 3), f"declared ({coord.rho_label})"
    if coord.rho is not None and prod.combiner == "block_diagonal":
        return coord.rho(eps / 3) / len(prod.window), f"declared ({coord.rho_label}) / |W|"
    ctx = prod.context
    one = ctx.identity()
    vals = [ctx.dist(x, one) for x in lift.window_elements() if not ctx.is_identity(x)]
    return min(vals, default=Fraction(1)), "measured"


def _uw_json(uw: UnrestrictedWreath, F) -> list:
    return [uw.to_json(a) for a in F]


def run_lift(config: dict) -> Certificate:
    cls = _require(config, "class")
    if cls not in CLASSES:
        raise ConfigError(f"unknown class {cls!r}")
    eps = parse_epsilon(config)
    if eps > 1:
        raise ConfigError("epsilon must lie in (0, 1]")
    if cls == "hyperlinear" and eps >= 1:
        raise ConfigError("hyperlinear pipeline needs epsilon < 1")
    try:
        H = parse_backend(_require(config, "H"))
        G = parse_table(_require(config, "G"), need_metric=cls == "weakly_sofic")
        uw = UnrestrictedWreath(G, H)
        F = [uw.from_json(doc) for doc in _require(config, "F")]
    except (GroupError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config: {exc}") from exc
    coord = make_coordinate(cls, G, config.get("approx"))
    if cls == "hyperlinear":
        lift = build_phi_hyperlinear(uw, F, eps, coord)
    else:
        lift = build_phi(uw, F, eps, cls, coord)

    F0 = lift.F0
    wctx = lift.context
    w_defect = measure_defect(lift, F0, wctx, uw.mul)
    w_free = measure_freeness(lift, F0, wctx, uw.is_identity)
    rho, rho_source = _product_rho(lift, eps)
    rho_tilde = min(1 - eps / 3, rho)
    s_bound = 2 * lift.folner_bound
    s_defect, s_free = sigma_defect(lift), sigma_freeness(lift)

    notes = list(lift.product.notes)
    if cls == "hyperlinear":
        w_cert = Certificate(cls, [], eps, w_defect, w_free, float(eps ** 2 / 4), 0.0,
                             defect_strict=False)
        notes.append("wreath-level freeness replaced by the trace condition")
    else:
        w_cert = Certificate(cls, [], eps, w_defect, w_free, 5 * eps / 6, rho_tilde)
    check_bounds(w_cert)

    constants = {
        "folner_bound": lift.folner_bound,
        "coordinate_budget": lift.coordinate_budget,
        "per_coordinate_budget": lift.product.coordinate_budget,
        "folner_size": len(lift.folner),
        "window_size": len(lift.window),
        "combiner": lift.product.combiner,
        "approximation": coord.label,
    }
    extra: dict[str, Any] = {
        "H": H.describe(),
        "folner_set": [H.to_json(b) for b in lift.folner.elements],
        "sigma": {"defect": s_defect, "freeness": s_free, "defect_bound": s_bound,
                  "freeness_bound": 1 - eps / 3},
        "wreath": {"defect": w_defect, "freeness": w_free,
                   "defect_bound": w_cert.theoretical_defect_bound,
                   "freeness_bound": w_cert.theoretical_freeness_bound,
                   "pass": w_cert.passed, "failures": w_cert.failures},
        "rho": rho,
    }
    base = dict(cls=cls, F=_uw_json(uw, F), epsilon=eps, seed=config.get("seed"),
                constants=constants, extra=extra, notes=notes, rho_source=rho_source)

    if cls == "weakly_sofic":
        extra["target"] = "wreath"
        cert = Certificate(measured_defect=w_defect, measured_freeness=w_free,
                           theoretical_defect_bound=5 * eps / 6,
                           theoretical_freeness_bound=rho_tilde, **base)
    else:
        tctx = target_context(wctx, cls)
        extra["target"] = tctx.kind

        def target_map(a):
            return psi(wctx, lift(a))

        t_defect = measure_defect(target_map, F0, tctx, uw.mul)
        t_free = measure_freeness(target_map, F0, tctx, uw.is_identity)
        if cls == "sofic":
            cert = Certificate(measured_defect=t_defect, measured_freeness=t_free,
                               theoretical_defect_bound=5 * eps / 6,
                               theoretical_freeness_bound=rho_tilde, **base)
        elif cls == "linear_sofic":
            cert = Certificate(measured_defect=t_defect, measured_freeness=t_free,
                               theoretical_defect_bound=5 * eps / 6,
                               theoretical_freeness_bound=rho_tilde / 2, **base)
        else:
            tr = measure_trace(target_map, F0, tctx, uw.is_identity)
            orth = measure_orthogonality(target_map, F0, tctx, uw.is_identity)
            cert = Certificate(measured_defect=t_defect, measured_freeness=t_free,
                               theoretical_defect_bound=float(eps),
                               theoretical_freeness_bound=math.sqrt(2 - 2 * float(eps)),
                               defect_strict=False, measured_trace_max=tr,
                               trace_bound=float(eps), orthogonality=orth, **base)
            extra["orthogonality_window"] = [math.sqrt(max(0.0, 2 - 2 * tr)), math.sqrt(2 + 2 * tr)]

    check_bounds(cert)
    _merge_failures(cert, "wreath", w_cert)
    if s_defect > s_bound:
        cert.failures.append(f"sigma defect {s_defect} exceeds {s_bound}")
    if cls != "hyperlinear" and s_free < 1 - eps / 3:
        cert.failures.append(f"sigma freeness {s_free} below {1 - eps / 3}")
    orth_win = extra.get("orthogonality_window")
    if orth_win and cert.orthogonality is not None:
        lo, hi = cert.orthogonality
        if lo < orth_win[0] - 1e-9 or hi > orth_win[1] + 1e-9:
            cert.failures.append("orthogonality extremes inconsistent with the trace bound")
    cert.passed = not cert.failures
    return cert


def _merge_failures(cert: Certificate, label: str, other: Certificate) -> None:
    cert.failures.extend(f"{label}: {f}" for f in other.failures)


# -- co-amenable subgroups ----------------------------------------------------


def _parse_g_element(space, x):
    if isinstance(x, list):
        x = tuple(int(v) for v in x)
    return space.validate(x)


def run_coamenable(config: dict) -> Certificate:
    cls = config.get("class", "sofic")
    if cls not in ("weakly_sofic", "sofic", "linear_sofic"):
        raise ConfigError(f"co-amenable pipeline supports weakly_sofic, sofic, linear_sofic; got {cls!r}")
    eps = parse_epsilon(config)
    if eps >= 1:
        raise ConfigError("epsilon must lie in (0, 1)")
    section = config.get("section", "min-representative")
    if section != "min-representative":
        raise ConfigError(f"unsupported section {section!r}")
    try:
        space = parse_space(config, config.get("horizon"))
        F = [_parse_g_element(space, x) for x in _require(config, "F")]
    except (CoamenableError, GroupError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config: {exc}") from exc

    phi_kind = config.get("phi")
    stabilizer = isinstance(space, PointStabilizerCosets) or (
        config.get("subgroup", {}).get("kind") == "stabilizer"
        and int(config["subgroup"].get("point", 0)) == 0)
    if phi_kind is None:
        phi_kind = "regular_matrix" if cls == "linear_sofic" else ("restrict" if stabilizer else "cayley")
    if phi_kind == "restrict":
        if not stabilizer:
            raise ConfigError("restrict approximation needs the stabilizer of 0")
        n = space.horizon if isinstance(space, PointStabilizerCosets) else space.G.n
        phi_H = restrict_stabilizer(n, "sofic")
    elif phi_kind == "cayley":
        if not isinstance(space, FiniteCosetSpace):
            raise ConfigError("cayley approximation needs a finite subgroup")
        phi_H = subgroup_cayley(space)
    elif phi_kind == "regular_matrix":
        if not isinstance(space, FiniteCosetSpace):
            raise ConfigError("regular_matrix approximation needs a finite subgroup")
        phi_H = subgroup_regular_matrix(space, int(config.get("p", 2)))
    else:
        raise ConfigError(f"unknown subgroup approximation {phi_kind!r}")
    if cls == "linear_sofic" and phi_kind != "regular_matrix":
        raise ConfigError("linear sofic co-amenable pipeline needs the regular_matrix approximation")
    if cls != "linear_sofic" and phi_kind == "regular_matrix":
        raise ConfigError("regular_matrix approximation is for the linear sofic class")

    lift = build_phi_coamenable(space, F, eps, phi_H)
    G = space.G
    e = G.identity()
    wctx = lift.context

    def is_one(g):
        return g == e

    w_defect = measure_defect(lift, F, wctx, G.mul)
    w_free = measure_freeness(lift, F, wctx, is_one)
    if phi_H.rho is not None:
        rho, rho_source = phi_H.rho(eps / 3), f"declared ({phi_H.rho_label})"
    else:
        rho, rho_source = measured_rho(lift), "measured"
    free_bound = (1 - eps / 3) * rho
    s_defect = coset_sigma_defect(lift)
    w_cert = Certificate(cls, [], eps, w_defect, w_free, 5 * eps / 6, free_bound,
                         freeness_strict=True)
    check_bounds(w_cert)

    constants = {
        "folner_bound": lift.folner_bound,
        "folner_size": len(lift.cosets),
        "horizon": space.horizon,
        "section": section,
        "approximation": phi_H.label,
    }
    extra: dict[str, Any] = {
        "cosets": [_enc_g(c) for c in lift.cosets.elements],
        "F_H_size": len(lift.F_H),
        "sigma": {"defect": s_defect, "defect_bound": eps / 4},
        "wreath": {"defect": w_defect, "freeness": w_free, "defect_bound": 5 * eps / 6,
                   "freeness_bound": free_bound, "pass": w_cert.passed, "failures": w_cert.failures},
        "rho": rho,
    }
    base = dict(cls=cls, F=[_enc_g(f) for f in F], epsilon=eps, seed=config.get("seed"),
                constants=constants, extra=extra, notes=[], rho_source=rho_source,
                freeness_strict=True)
    if cls == "weakly_sofic":
        extra["target"] = "wreath"
        cert = Certificate(measured_defect=w_defect, measured_freeness=w_free,
                           theoretical_defect_bound=5 * eps / 6,
                           theoretical_freeness_bound=free_bound, **base)
    else:
        tctx = target_context(wctx, cls)
        extra["target"] = tctx.kind

        def target_map(g):
            return psi(wctx, lift(g))

        t_defect = measure_defect(target_map, F, tctx, G.mul)
        t_free = measure_freeness(target_map, F, tctx, is_one)
        half = Fraction(1, 2) if cls == "linear_sofic" else Fraction(1)
        cert = Certificate(measured_defect=t_defect, measured_freeness=t_free,
                           theoretical_defect_bound=5 * eps / 6,
                           theoretical_freeness_bound=free_bound * half, **base)
    check_bounds(cert)
    _merge_failures(cert, "wreath", w_cert)
    if s_defect > eps / 4:
        cert.failures.append(f"sigma defect {s_defect} exceeds {eps / 4}")
    cert.passed = not cert.failures
    return cert


def _enc_g(g):
    return list(g) if isinstance(g, tuple) else g


def summary(cert: Certificate) -> str:
    """A short fixed-width report of a certificate."""
    from .certify import _enc

    rows = [
        ("class", cert.cls),
        ("epsilon", _enc(cert.epsilon)),
        ("defect", f"{_enc(cert.measured_defect)}  (bound {_enc(cert.theoretical_defect_bound)}"
                   f"{', strict' if cert.defect_strict and cert.exact else ''})"),
        ("freeness", f"{_enc(cert.measured_freeness)}  (bound {_enc(cert.theoretical_freeness_bound)}"
                     f"{', strict' if cert.freeness_strict else ''})"),
    ]
    if cert.trace_bound is not None:
        rows.append(("trace max", f"{cert.measured_trace_max!r}  (bound {cert.trace_bound!r})"))
    if cert.orthogonality is not None:
        rows.append(("orthogonality", f"[{cert.orthogonality[0]!r}, {cert.orthogonality[1]!r}]"))
    rows.append(("rho", f"{_enc(cert.extra.get('rho'))} ({cert.rho_source})"))
    for k, v in cert.constants.items():
        rows.append((k, str(_enc(v))))
    rows.append(("result", "PASS" if cert.passed else "FAIL"))
    width = max(len(k) for k, _ in rows)
    lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
    lines.extend(f"  failure: {f}" for f in cert.failures)
    lines.extend(f"  note: {n}" for n in cert.notes)
    return "\n".join(lines) + "\n"
