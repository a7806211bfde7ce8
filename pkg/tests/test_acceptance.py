"""Acceptance criteria 1 to 10, each with its tolerance and runtime limit.

One PASS/FAIL line per criterion is printed in the pytest terminal summary,
or directly when this file is run as a script.
"""

from __future__ import annotations

import json
import math
import time
from fractions import Fraction
from pathlib import Path

import pytest

from wreath_approx import props
from wreath_approx.pipelines import run_coamenable, run_lift

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
RESULTS: dict[int, str] = {}


def load(name: str) -> dict:
    return json.loads((CONFIGS / name).read_text(encoding="utf-8"))


def record(n: int, title: str, ok: bool, elapsed: float, limit: float | None, detail: str = "") -> None:
    timed = elapsed < limit if limit is not None else True
    status = "PASS" if ok and timed else "FAIL"
    budget = f" (< {limit:g} s)" if limit is not None else ""
    RESULTS[n] = f"{status}  criterion {n:2d}  {title}: {detail}  [{elapsed:.2f} s{budget}]"
    assert ok, RESULTS[n]
    assert timed, RESULTS[n]


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _suite_ok(results):
    return all(r.passed for r in results), ", ".join(f"{r.name} x{r.checked}" for r in results)


def test_criterion_01_psi_sym_isometry():
    res, dt = timed(lambda: props.check_psi_sym(seed=0, sizes=(3,), pairs=1000))
    ok, detail = _suite_ok(res)
    ok = ok and res[0].checked == 64 + 1000
    record(1, "psi_sym isometry", ok, dt, 1.0, detail)


def test_criterion_02_rank_sandwich():
    res, dt = timed(lambda: props.check_psi_lin(seed=0, sizes=(3,), pairs=1000))
    ok, detail = _suite_ok(res)
    ok = ok and res[2].checked == 2
    record(2, "rank sandwich", ok, dt, 5.0, detail)


def test_criterion_03_hs_sandwich():
    res, dt = timed(lambda: props.check_psi_uni(seed=0, sizes=(3,), pairs=1000, tol=1e-9))
    ok, detail = _suite_ok(res)
    record(3, "HS sandwich and norm identity", ok, dt, 5.0, detail)


def test_criterion_04_sofic_pipeline():
    cert, dt = timed(lambda: run_lift(load("sofic.json")))
    eps = Fraction(1, 2)
    d, f = cert.measured_defect, cert.measured_freeness
    ok = (isinstance(d, Fraction) and d < 5 * eps / 6 and f >= 1 - eps / 3 and cert.passed
          and cert.extra["target"] == "Monomial[hamming]")
    record(4, "sofic lift", ok, dt, 30.0, f"defect {d} < 5/12, freeness {f} >= 5/6")


def test_criterion_05_weakly_sofic_pipeline():
    cert, dt = timed(lambda: run_lift(load("weakly_sofic.json")))
    ok = cert.epsilon == 1 and cert.passed and cert.measured_freeness >= Fraction(2, 3)
    ok = ok and cert.extra["target"] == "wreath"
    record(5, "weakly sofic lift", ok, dt, 30.0,
           f"defect {cert.measured_defect} < 5/6, freeness {cert.measured_freeness} >= 2/3")


def test_criterion_06_linear_sofic_pipeline():
    cert, dt = timed(lambda: run_lift(load("linear_sofic.json")))
    eps = cert.epsilon
    d, f = cert.measured_defect, cert.measured_freeness
    ok = cert.passed and f >= Fraction(1, 2) and d < 5 * eps / 6
    record(6, "linear sofic lift", ok, dt, 60.0, f"defect {d} < {5 * eps / 6}, freeness {f} >= 1/2")


def test_criterion_07_hyperlinear_pipeline():
    cert, dt = timed(lambda: run_lift(load("hyperlinear.json")))
    eps = float(cert.epsilon)
    tr, d = cert.measured_trace_max, cert.measured_defect
    lo, hi = cert.orthogonality
    ok = (cert.passed and cert.constants["folner_bound"] == cert.epsilon ** 2 / 24
          and tr <= eps + 1e-9 and d <= eps + 1e-9
          and lo >= math.sqrt(max(0.0, 2 - 2 * tr)) - 1e-9 and hi <= math.sqrt(2 + 2 * tr) + 1e-9)
    record(7, "hyperlinear lift", ok, dt, 60.0,
           f"|tr| max {tr:.3g}, defect {d:.4f} <= {eps}, orthogonality [{lo:.6f}, {hi:.6f}]")


def test_criterion_08_coamenable_pipeline():
    cert, dt = timed(lambda: run_coamenable(load("coamenable_sym6.json")))
    eps = cert.epsilon
    rho = Fraction(cert.extra["rho"])
    sig = Fraction(cert.extra["sigma"]["defect"])
    d, f = cert.measured_defect, cert.measured_freeness
    ok = cert.passed and sig <= eps / 4 and d < eps and f > (1 - eps / 3) * rho
    record(8, "co-amenable lift", ok, dt, 30.0,
           f"sigma defect {sig} <= {eps / 4}, defect {d} < {eps}, freeness {f} > {(1 - eps / 3) * rho}")


def test_criterion_09_oracles():
    res, dt = timed(lambda: props.check_rank(seed=0, matrices=10_000, max_size=12)
                    + props.check_boundary(seed=0, trials=1000))
    ok, detail = _suite_ok(res)
    ok = ok and res[0].checked == 10_000 and res[2].checked == 1000
    record(9, "oracle cross-checks", ok, dt, None, detail)


def test_criterion_10_mutations():
    def run():
        lin = [r for r in props.check_psi_lin(props.psi_lin_transposed, seed=0, sizes=(3,), pairs=1000)
               if not r.passed]
        sig = [r for r in props.check_sigma(props.gamma_reversed, seed=0) if not r.passed]
        col = [r for r in props.check_sigma(props.gamma_collapsed, seed=0) if not r.passed]
        return lin, sig, col

    (lin, sig, col), dt = timed(run)
    ok = all(fails and all(r.witness is not None for r in fails) for fails in (lin, sig, col))
    detail = "; ".join(f"{label}: {', '.join(r.name for r in fails) or 'undetected'}"
                       for label, fails in (("transposed psi_lin", lin), ("reversed gamma", sig),
                                            ("collapsed gamma", col)))
    record(10, "mutation sensitivity", ok, dt, None, detail)


if __name__ == "__main__":
    import sys

    code = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                code = 1
    for n in sorted(RESULTS):
        print(RESULTS[n])
    sys.exit(code)
