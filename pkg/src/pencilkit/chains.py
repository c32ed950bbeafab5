"""Singular chains and singular vector polynomials for sectioned pencils.

Extraction works on dense (possibly rectangular) sections only: a chain
x_0..x_k with A x_0 = 0, A x_{j+1} = E x_j, E x_k = 0 is found as a null
vector of a block-Toeplitz system, scanning degrees upward so the returned
chain has minimal length.  Section-level verdicts are statements about the
section; they do not automatically lift to the infinite object.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .operators import Pencil, Space
from .sparsevec import SparseVec, vec_add, vec_norm, vec_scale
from .sections import SectionedPencil

__all__ = [
    "VectorPolynomial",
    "ChainReport",
    "extract_right_chain",
    "extract_left_chain",
    "chain_to_polynomial",
    "verify_singular_polynomial",
    "reduce_polynomial",
    "polynomial_roots_check",
]

ROOT_CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class VectorPolynomial:
    """Polynomial with finitely supported vector coefficients a_0..a_k.

    The trailing coefficient of a nonzero polynomial is nonzero (trimmed at
    construction).  ``evaluate`` returns sum_j lam^j a_j as a sparse vector.
    """

    coeffs: tuple[SparseVec, ...]
    space: Space

    @staticmethod
    def make(coeffs: list[SparseVec], space: Space) -> "VectorPolynomial":
        trimmed = list(coeffs)
        while trimmed and not trimmed[-1]:
            trimmed.pop()
        return VectorPolynomial(tuple(dict(c) for c in trimmed), space)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        if self.is_zero:
            raise ValueError("zero polynomial has no degree")
        return len(self.coeffs) - 1

    def evaluate(self, lam: complex) -> SparseVec:
        out: SparseVec = {}
        power = 1.0 + 0.0j
        for c in self.coeffs:
            out = vec_add(out, vec_scale(power, c))
            power *= lam
        return out

    def reversal(self) -> "VectorPolynomial":
        return VectorPolynomial.make(list(self.coeffs[::-1]), self.space)

    def coefficient_matrix(self) -> tuple[np.ndarray, list[int]]:
        """Dense (k+1) x |support| matrix of coefficients and the support."""
        support = sorted({j for c in self.coeffs for j in c})
        mat = np.zeros((len(self.coeffs), len(support)), dtype=complex)
        pos = {j: i for i, j in enumerate(support)}
        for d, c in enumerate(self.coeffs):
            for j, v in c.items():
                mat[d, pos[j]] = v
        return mat, support


@dataclass(frozen=True)
class ChainReport:
    """Extracted singular chain with per-link residual norms."""

    side: str
    chain: tuple[np.ndarray, ...]
    minimal_index: int
    residuals: tuple[float, ...]
    window_indices: tuple[int, ...]
    space: Space

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "minimal_index": self.minimal_index,
            "residuals": list(self.residuals),
            "window_indices": list(self.window_indices),
            "vectors": [[[z.real, z.imag] for z in v] for v in self.chain],
        }


def _chain_system(E: np.ndarray, A: np.ndarray, d: int) -> np.ndarray:
    """Block matrix whose null vectors are chains of length d.

    Unknown x_0..x_d (stacked); rows enforce A x_0 = 0, then
    E x_{j-1} - A x_j = 0 for j = 1..d, then E x_d = 0.
    """
    m, k = A.shape
    T = np.zeros(((d + 2) * m, (d + 1) * k), dtype=complex)
    T[:m, :k] = A
    for j in range(1, d + 1):
        T[j * m : (j + 1) * m, (j - 1) * k : j * k] = E
        T[j * m : (j + 1) * m, j * k : (j + 1) * k] = -A
    T[(d + 1) * m :, d * k :] = E
    return T


def _link_residuals(E: np.ndarray, A: np.ndarray, chain: list[np.ndarray]) -> list[float]:
    res = [float(np.linalg.norm(A @ chain[0]))]
    for j in range(1, len(chain)):
        res.append(float(np.linalg.norm(A @ chain[j] - E @ chain[j - 1])))
    res.append(float(np.linalg.norm(E @ chain[-1])))
    return res


def extract_right_chain(s: SectionedPencil, tol: float = 1e-10) -> ChainReport | None:
    """Minimal-length right singular chain of a dense section, if one exists.

    Returns None for regular sections.  Link residuals are bounded by
    tol * (||E|| + ||A||); chain vectors are checked for linear
    independence at the same scale.
    """
    E, A = s.E_mat, s.A_mat
    m, k = A.shape
    scale = np.linalg.norm(E, 2) + np.linalg.norm(A, 2)
    if scale == 0:
        scale = 1.0
    thr = tol * scale
    for d in range(k):
        T = _chain_system(E, A, d)
        _, svals, vh = scipy.linalg.svd(T)
        smin = svals[-1] if len(svals) >= T.shape[1] else 0.0
        if smin > thr:
            continue
        null = vh[-1].conj()
        chain = [null[j * k : (j + 1) * k] for j in range(d + 1)]
        norm = max(np.linalg.norm(v) for v in chain)
        chain = [v / norm for v in chain]
        stackmat = np.column_stack(chain)
        indep = scipy.linalg.svdvals(stackmat)[-1] if d > 0 else np.linalg.norm(chain[0])
        if indep <= tol:
            continue  # degenerate null vector; a genuine chain shows at higher d
        return ChainReport(
            side="right",
            chain=tuple(chain),
            minimal_index=d,
            residuals=tuple(_link_residuals(E, A, chain)),
            window_indices=s.window_in.indices,
            space=s.window_in.space,
        )
    return None


def extract_left_chain(s: SectionedPencil, tol: float = 1e-10) -> ChainReport | None:
    """Right chain of the adjoint section, reported as a left chain."""
    rep = extract_right_chain(s.adjoint(), tol)
    if rep is None:
        return None
    return ChainReport(
        side="left",
        chain=rep.chain,
        minimal_index=rep.minimal_index,
        residuals=rep.residuals,
        window_indices=s.window_out.indices,
        space=s.window_out.space,
    )


def chain_to_polynomial(report: ChainReport) -> VectorPolynomial:
    """p(lambda) = sum_j lambda^j x_j over the logical indices of the window."""
    coeffs = []
    for v in report.chain:
        coeffs.append({j: complex(c) for j, c in zip(report.window_indices, v) if c != 0})
    return VectorPolynomial.make(coeffs, report.space)


def _default_probes(degree: int) -> list[complex]:
    base = [0.0, 1.0, -1.0, 2.0j, 1.0 + 1.0j, -2.0, 3.0, 0.5 - 1.5j]
    probes = list(base)
    t = 2
    while len(probes) < degree + 2:
        probes.append(complex(t, -t / 2))
        t += 1
    return probes[: max(degree + 2, 3)]


def verify_singular_polynomial(
    target: Pencil | SectionedPencil,
    q: VectorPolynomial,
    side: str = "right",
    probes: list[complex] | None = None,
) -> float:
    """Max over probes of ||(lam E - A) q(lam)|| (or the adjoint pencil for side left).

    For a degree-k polynomial, k+2 distinct probes certify identical
    vanishing, since a nonzero vector polynomial of degree <= k+1 cannot
    have k+2 roots.
    """
    if q.is_zero:
        raise ValueError("zero polynomial")
    if probes is None:
        probes = _default_probes(q.degree)
    if len(probes) != len(set(probes)):
        raise ValueError("probe list contains repeated values")
    if not probes:
        raise ValueError("probes must be nonempty")

    if isinstance(target, SectionedPencil):
        sec = target.adjoint() if side == "left" else target
        pos = {j: i for i, j in enumerate(sec.window_in.indices)}
        worst = 0.0
        for lam in probes:
            val = q.evaluate(lam)
            x = np.zeros(sec.window_in.dim, dtype=complex)
            for j, c in val.items():
                if j not in pos:
                    raise ValueError(f"polynomial support index {j} outside section window")
                x[pos[j]] = c
            worst = max(worst, float(np.linalg.norm(sec.evaluate(lam) @ x)))
        return worst

    pencil = target.adjoint() if side == "left" else target
    worst = 0.0
    for lam in probes:
        worst = max(worst, vec_norm(pencil.evaluate_action(lam, q.evaluate(lam))))
    return worst


def _poly_eval_scalar(coeffs: np.ndarray, z: complex) -> complex:
    out = 0.0 + 0.0j
    for c in coeffs[::-1]:
        out = out * z + c
    return complex(out)


def _deflate(coeffs: np.ndarray, root: complex) -> np.ndarray:
    """Synthetic division of sum_d coeffs[d] lam^d by (lam - root)."""
    k = len(coeffs) - 1
    out = np.zeros(k, dtype=complex)
    carry = coeffs[k]
    for d in range(k - 1, -1, -1):
        out[d] = carry
        carry = coeffs[d] + carry * root
    return out


def reduce_polynomial(q: VectorPolynomial) -> VectorPolynomial:
    """Divide out the scalar GCD of the coordinate polynomials.

    Coordinates are taken in an orthonormal frame of the coefficient span;
    common roots are matched numerically with clustering tolerance 1e-8 and
    removed by deflation, together with common lambda factors and trailing
    zero coefficients.  The result and its reversal are root-free, and the
    operation is idempotent.
    """
    if q.is_zero:
        raise ValueError("cannot reduce the zero polynomial")
    mat, support = q.coefficient_matrix()
    # orthonormal frame of the coefficient span
    u, svals, vh = scipy.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(svals > max(mat.shape) * svals[0] * 2.0**-52)) if svals.size else 0
    rank = max(rank, 1)
    coords = u[:, :rank] * svals[:rank]  # (k+1) x rank; rows = coefficient coords
    frame = vh[:rank]

    scale = np.abs(coords).max()
    small = 1e-12 * scale

    def trim(c: np.ndarray) -> np.ndarray:
        while c.shape[0] > 1 and np.all(np.abs(c[-1]) <= small):
            c = c[:-1]
        return c

    coords = trim(coords)
    while coords.shape[0] > 1 and np.all(np.abs(coords[0]) <= small):
        coords = coords[1:]  # common factor lambda

    # common finite roots across all coordinate polynomials
    changed = True
    while changed and coords.shape[0] > 1:
        changed = False
        lead = next(i for i in range(rank) if np.abs(coords[:, i]).max() > small)
        roots = np.roots(coords[::-1, lead])
        for r in roots:
            bound = max(1.0, abs(r)) ** (coords.shape[0] - 1)
            if all(
                abs(_poly_eval_scalar(coords[:, i], r))
                <= ROOT_CLUSTER_TOL * max(np.abs(coords[:, i]).max(), small) * bound
                for i in range(rank)
            ):
                coords = np.column_stack([_deflate(coords[:, i], r) for i in range(rank)])
                coords = trim(coords)
                while coords.shape[0] > 1 and np.all(np.abs(coords[0]) <= small):
                    coords = coords[1:]
                changed = True
                break

    reduced = coords @ frame
    out_coeffs: list[SparseVec] = []
    for row in reduced:
        out_coeffs.append(
            {j: complex(c) for j, c in zip(support, row) if abs(c) > small}
        )
    result = VectorPolynomial.make(out_coeffs, q.space)
    if result.is_zero:  # numerically everything cancelled; keep the input
        return q
    return result


def polynomial_roots_check(
    q: VectorPolynomial, grid: list[complex], tol: float = 1e-2
) -> bool:
    """Falsification probe: True iff neither q nor rev q dips below tol on the grid.

    Not a proof of root-freeness; a False verdict exhibits a near-root.
    """
    rev = q.reversal()
    for lam in grid:
        if vec_norm(q.evaluate(lam)) <= tol or vec_norm(rev.evaluate(lam)) <= tol:
            return False
    return True
