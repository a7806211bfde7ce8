"""Exact linear algebra over prime fields.

Matrices are numpy int64 arrays with entries in [0, p).  Row operations are
vectorised over whole rows; every intermediate is reduced mod p so products
stay below 2**62 for the moduli we accept.
"""

from __future__ import annotations

import numpy as np

MAX_PRIME = 1 << 24


class FieldError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> None:
    if not is_prime(p):
        raise FieldError(f"modulus {p} is not prime")
    if p >= MAX_PRIME:
        raise FieldError(f"modulus {p} exceeds supported bound {MAX_PRIME}")


def as_field_matrix(entries, p: int) -> np.ndarray:
    a = np.asarray(entries, dtype=np.int64)
    if a.ndim != 2:
        raise FieldError(f"expected a 2-d array, got shape {a.shape}")
    return np.mod(a, p)


def row_reduce(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``mat`` over F_p.

    Returns the reduced matrix and the list of pivot columns.
    """
    r = np.mod(np.array(mat, dtype=np.int64), p)
    rows, cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        inv = pow(int(r[row, col]), -1, p)
        r[row] = (r[row] * inv) % p
        factors = r[:, col].copy()
        factors[row] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            r[hit] = (r[hit] - np.outer(factors[hit], r[row])) % p
        pivots.append(col)
        row += 1
    return r, pivots


def rank_mod_p(mat: np.ndarray, p: int) -> int:
    if mat.size == 0:
        return 0
    return len(row_reduce(mat, p)[1])


def inverse_mod_p(mat: np.ndarray, p: int) -> np.ndarray:
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise FieldError(f"inverse of non-square matrix {mat.shape}")
    aug = np.concatenate([np.mod(mat, p), np.eye(n, dtype=np.int64)], axis=1)
    red, pivots = row_reduce(aug, p)
    if pivots[:n] != list(range(n)):
        raise FieldError("matrix is singular mod p")
    return red[:, n:].copy()


def matmul_mod_p(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # entries < 2**24, so each product < 2**48; reduce per column block to
    # keep partial sums inside int64 for any dimension we can store
    n = a.shape[1]
    if n * (p - 1) ** 2 < (1 << 62):
        return (a @ b) % p
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(n):
        out = (out + np.outer(a[:, k], b[k]) % p) % p
    return out
