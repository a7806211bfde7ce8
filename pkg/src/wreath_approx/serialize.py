"""JSON forms of the data types.

Matrices are row-major; prime-field entries are integers, complex entries
``[re, im]`` pairs; rationals are ``"p/q"`` strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import numpy as np

from .groups import GroupError, TableGroup, validate_table_group
from .wreath import WreathElement


def rational_to_json(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def rational_from_json(s) -> Fraction:
    """Accepts "p/q", "p", or an int; floats are refused to keep arithmetic exact."""
    if isinstance(s, bool) or isinstance(s, float):
        raise GroupError(f"rational must be a string or integer, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise GroupError(f"rational must be a string or integer, got {s!r}")
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise GroupError(f"bad rational {s!r}") from exc


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return [[int(x) for x in row] for row in m]


def matrix_from_json(rows: list, *, complex_entries: bool | None = None) -> np.ndarray:
    if complex_entries is None:
        complex_entries = bool(rows) and bool(rows[0]) and isinstance(rows[0][0], list)
    if complex_entries:
        return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    return np.array(rows, dtype=np.int64)


def table_to_json(t: TableGroup) -> dict:
    doc: dict[str, Any] = {"order": t.order, "mul_table": t.mul_table.tolist()}
    if t.metric_table is not None:
        doc["metric_table"] = [[rational_to_json(x) for x in row] for row in t.metric_table]
    return doc


def table_from_json(doc: dict) -> TableGroup:
    metric = doc.get("metric_table")
    if metric is not None:
        metric = [[rational_from_json(x) for x in row] for row in metric]
    return validate_table_group(int(doc["order"]), doc["mul_table"], metric)


def element_to_json(x):
    if isinstance(x, np.ndarray):
        return matrix_to_json(x)
    if isinstance(x, Fraction):
        return rational_to_json(x)
    if isinstance(x, tuple):
        return [element_to_json(v) for v in x]
    return x


def wreath_to_json(g: WreathElement) -> dict:
    return {"tuple": [element_to_json(x) for x in g.tuple], "perm": list(g.perm)}


def wreath_from_json(doc: dict, decode=lambda x: x) -> WreathElement:
    return WreathElement(tuple(decode(x) for x in doc["tuple"]), tuple(int(i) for i in doc["perm"]))


def dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
