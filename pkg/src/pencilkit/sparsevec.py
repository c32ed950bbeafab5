"""Finitely supported vectors over an integer index set.

Vectors are plain ``dict[int, complex]`` objects mapping a (logical) basis
index to a coefficient.  Entries that become numerically exact zeros are
dropped so that supports stay finite and iteration stays cheap.  The inner
product is linear in the first argument and conjugate-linear in the second.
"""

from __future__ import annotations

import math

SparseVec = dict[int, complex]


def vec(*pairs: tuple[int, complex]) -> SparseVec:
    return {j: complex(c) for j, c in pairs if c != 0}


def basis_vec(j: int, c: complex = 1.0) -> SparseVec:
    return {j: complex(c)} if c != 0 else {}


def vec_add(*vs: SparseVec) -> SparseVec:
    out: SparseVec = {}
    for v in vs:
        for j, c in v.items():
            s = out.get(j, 0.0) + c
            if s == 0:
                out.pop(j, None)
            else:
                out[j] = s
    return out


def vec_scale(c: complex, v: SparseVec) -> SparseVec:
    if c == 0:
        return {}
    return {j: c * x for j, x in v.items()}


def vec_sub(a: SparseVec, b: SparseVec) -> SparseVec:
    return vec_add(a, vec_scale(-1.0, b))


def vec_inner(a: SparseVec, b: SparseVec) -> complex:
    if len(b) < len(a):
        return complex(sum(a[j] * b[j].conjugate() for j in b if j in a))
    return complex(sum(a[j] * b[j].conjugate() for j in a if j in b))


def vec_norm(v: SparseVec) -> float:
    return math.sqrt(sum(abs(c) ** 2 for c in v.values()))


def vec_allclose(a: SparseVec, b: SparseVec, tol: float = 1e-12) -> bool:
    return vec_norm(vec_sub(a, b)) <= tol


def vec_support(v: SparseVec) -> list[int]:
    return sorted(v)
