"""Measured multiplicativity, freeness and trace of a map over a finite set.

A :class:`Certificate` records the measurements next to the bounds the
construction guarantees.  Rational classes are compared exactly; the unitary
class with absolute tolerance 1e-9.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from .groups import DIST_TOL, MetricGroup

SCHEMA_VERSION = "1"


class CertificateError(ValueError):
    pass


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("WREATH_APPROX_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items):
    items = list(items)
    n = _workers()
    if n == 1 or len(items) < 64:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _max(values, exact: bool):
    return max(values, default=Fraction(0) if exact else 0.0)


def measure_defect(phi: Callable, F0: Sequence, ctx: MetricGroup, domain_mul: Callable):
    """max over ordered pairs (g, g') ∈ F0 × F0 of d(φ(g)φ(g'), φ(gg'))."""
    pairs = [(a, b) for a in F0 for b in F0]

    def one(pair):
        a, b = pair
        return ctx.dist(ctx.mul(phi(a), phi(b)), phi(domain_mul(a, b)))

    return _max(_map(one, pairs), ctx.exact)


def measure_freeness(phi: Callable, F0: Sequence, ctx: MetricGroup, is_identity: Callable):
    """min over F0 \\ {1} of d(φ(g), 1); the diameter when nothing is left."""
    one = ctx.identity()
    vals = _map(lambda a: ctx.dist(phi(a), one), [a for a in F0 if not is_identity(a)])
    if not vals:
        return ctx.diameter if ctx.exact else float(ctx.diameter)
    return min(vals)


def measure_trace(phi: Callable, F0: Sequence, ctx: MetricGroup, is_identity: Callable) -> float:
    """max over F0 \\ {1} of |tr φ(g)|; 0 when nothing is left."""
    tr = getattr(ctx, "trace", None)
    if tr is None:
        raise CertificateError(f"{ctx!r} is not unitary valued")
    return max((abs(tr(phi(a))) for a in F0 if not is_identity(a)), default=0.0)


def measure_orthogonality(phi: Callable, F0: Sequence, ctx: MetricGroup,
                          is_identity: Callable) -> tuple[float, float] | None:
    """(min, max) of ‖φ(g) - 1‖₂ over F0 \\ {1}, or None for an empty range."""
    if getattr(ctx, "trace", None) is None:
        raise CertificateError(f"{ctx!r} is not unitary valued")
    one = ctx.identity()
    vals = [float(ctx.dist(phi(a), one)) for a in F0 if not is_identity(a)]
    if not vals:
        return None
    return min(vals), max(vals)


@dataclass
class Certificate:
    cls: str
    F: list
    epsilon: Fraction
    measured_defect: Any
    measured_freeness: Any
    theoretical_defect_bound: Any
    theoretical_freeness_bound: Any
    defect_strict: bool = True
    freeness_strict: bool = False
    measured_trace_max: float | None = None
    trace_bound: float | None = None
    orthogonality: tuple[float, float] | None = None
    seed: int | None = None
    constants: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    rho_source: str = "declared"
    passed: bool | None = None
    failures: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return isinstance(self.measured_defect, Fraction)

    def to_json(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "class": self.cls,
            "F": self.F,
            "epsilon": _enc(self.epsilon),
            "measured_defect": _enc(self.measured_defect),
            "measured_freeness": _enc(self.measured_freeness),
            "measured_trace_max": _enc(self.measured_trace_max),
            "trace_bound": _enc(self.trace_bound),
            "orthogonality": _enc(self.orthogonality),
            "theoretical_defect_bound": _enc(self.theoretical_defect_bound),
            "theoretical_freeness_bound": _enc(self.theoretical_freeness_bound),
            "defect_strict": self.defect_strict,
            "freeness_strict": self.freeness_strict,
            "rho_source": self.rho_source,
            "seed": self.seed,
            "constants": _enc(self.constants),
            "extra": _enc(self.extra),
            "notes": list(self.notes),
            "pass": self.passed,
            "failures": list(self.failures),
        }
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _enc(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, dict):
        return {str(k): _enc(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_enc(v) for v in x]
    return x


def check_bounds(cert: Certificate) -> Certificate:
    """Set ``passed``: defect within bound, freeness above bound, trace within bound."""
    for name in ("measured_defect", "measured_freeness", "theoretical_defect_bound",
                 "theoretical_freeness_bound"):
        if getattr(cert, name) is None:
            raise CertificateError(f"certificate is missing {name}")
    if cert.trace_bound is not None and cert.measured_trace_max is None:
        raise CertificateError("certificate is missing measured_trace_max")
    exact = all(isinstance(getattr(cert, n), Fraction) for n in
                ("measured_defect", "measured_freeness", "theoretical_defect_bound",
                 "theoretical_freeness_bound"))
    tol = Fraction(0) if exact else DIST_TOL
    failures = []
    d, db = cert.measured_defect, cert.theoretical_defect_bound
    if cert.defect_strict and exact:
        ok = d < db
    else:
        ok = d <= db + tol
    if not ok:
        failures.append(f"defect {_enc(d)} exceeds bound {_enc(db)}")
    f, fb = cert.measured_freeness, cert.theoretical_freeness_bound
    if not (f > fb if cert.freeness_strict and exact else f >= fb - tol):
        failures.append(f"freeness {_enc(cert.measured_freeness)} below bound "
                        f"{_enc(cert.theoretical_freeness_bound)}")
    if cert.trace_bound is not None and not cert.measured_trace_max <= cert.trace_bound + DIST_TOL:
        failures.append(f"trace {cert.measured_trace_max!r} exceeds bound {cert.trace_bound!r}")
    cert.failures = failures
    cert.passed = not failures
    return cert
