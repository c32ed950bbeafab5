"""Finite sections of pencils and the stacked-sigma_min singularity certificate.

A section compresses a pencil onto the canonical basis window of size ``n``:
indices ``1..n`` for l2N and finite spaces, the symmetric window ``-n..n``
for l2Z.  l2Z windows are stored in the interleaved order 0, -1, 1, -2, 2,
... so that nested windows are storage prefixes of one another; the window
object records both storage and logical orderings.

The distance-to-singularity certificate is the smallest singular value of
the stacked matrix [A; E].  The Frobenius-nearest singular pencil itself is
not computed (NP-hard in general); if the certificate tends to zero along a
window schedule, so does the true distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .operators import Pencil, Space, StructuredOperator

__all__ = [
    "SectionWindow",
    "SectionedPencil",
    "section",
    "operator_matrix",
    "distance_to_singularity_bound",
    "joint_kernel_defect",
    "numerical_rank_tol",
]

EPS = 2.0**-52


@dataclass(frozen=True)
class SectionWindow:
    """Basis window of a space, with logical indices in storage order."""

    space: Space
    n: int
    indices: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.indices)

    def sorted_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.indices))

    def storage_permutation(self) -> np.ndarray:
        """Permutation taking storage order to ascending logical order."""
        return np.argsort(np.asarray(self.indices))

    def position(self, j: int) -> int:
        return self.indices.index(j)


def window_for(space: Space, n: int) -> SectionWindow:
    if n < 1:
        raise ValueError("window size must be >= 1")
    if space.kind == "l2Z":
        idx = tuple(space.canonical_index(p) for p in range(2 * n + 1))
    elif space.kind == "finite":
        idx = tuple(range(1, min(n, space.dim) + 1))  # type: ignore[arg-type]
    else:
        idx = tuple(range(1, n + 1))
    return SectionWindow(space, n, idx)


def operator_matrix(
    op: StructuredOperator, window_out: SectionWindow, window_in: SectionWindow
) -> np.ndarray:
    """Compression matrix with entries <op e_j, e_i> over the given windows."""
    rows = {j: i for i, j in enumerate(window_out.indices)}
    mat = np.zeros((window_out.dim, window_in.dim), dtype=complex)
    for col, j in enumerate(window_in.indices):
        for i, c in op.apply_basis(j).items():
            r = rows.get(i)
            if r is not None:
                mat[r, col] = c
    return mat


@dataclass(frozen=True)
class SectionedPencil:
    """Dense compression Q_n (lambda E - A)|_{ran P_n} of a pencil."""

    window_in: SectionWindow
    window_out: SectionWindow
    E_mat: np.ndarray
    A_mat: np.ndarray
    source: Pencil | None = None
    notes: tuple[str, ...] = ()

    @property
    def shape(self) -> tuple[int, int]:
        return self.E_mat.shape  # type: ignore[return-value]

    @property
    def is_square(self) -> bool:
        return self.E_mat.shape[0] == self.E_mat.shape[1]

    def evaluate(self, lam: complex) -> np.ndarray:
        return lam * self.E_mat - self.A_mat

    def stacked(self) -> np.ndarray:
        return np.vstack([self.A_mat, self.E_mat])

    def reverse(self) -> "SectionedPencil":
        return SectionedPencil(
            self.window_in, self.window_out, self.A_mat, self.E_mat, self.source, self.notes
        )

    def adjoint(self) -> "SectionedPencil":
        return SectionedPencil(
            self.window_out,
            self.window_in,
            self.E_mat.conj().T,
            self.A_mat.conj().T,
            None,
            self.notes,
        )

    def with_notes(self, *notes: str) -> "SectionedPencil":
        return SectionedPencil(
            self.window_in, self.window_out, self.E_mat, self.A_mat, self.source,
            self.notes + notes,
        )


def section(p: Pencil, n: int, notes: tuple[str, ...] = ()) -> SectionedPencil:
    """Orthogonal compression of a pencil onto the canonical window of size n."""
    win_in = window_for(p.space_in, n)
    win_out = window_for(p.space_out, n)
    return SectionedPencil(
        window_in=win_in,
        window_out=win_out,
        E_mat=operator_matrix(p.E, win_out, win_in),
        A_mat=operator_matrix(p.A, win_out, win_in),
        source=p,
        notes=notes,
    )


def numerical_rank_tol(mat: np.ndarray) -> float:
    """Default rank tolerance: k * sigma_max * 2^-52."""
    if mat.size == 0:
        return 0.0
    smax = scipy.linalg.svdvals(mat)[0] if min(mat.shape) else 0.0
    return max(mat.shape) * smax * EPS


@dataclass(frozen=True)
class StackedCertificate:
    """sigma_min of the stacked [A; E] matrix with its minimizing unit vector."""

    value: float
    witness: np.ndarray
    singular_values: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]


def _stacked_certificate(s: SectionedPencil) -> StackedCertificate:
    stacked = s.stacked()
    _, svals, vh = scipy.linalg.svd(stacked)
    k = s.E_mat.shape[1]
    if len(svals) < k:  # rectangular with fewer rows than columns
        svals = np.concatenate([svals, np.zeros(k - len(svals))])
    return StackedCertificate(value=float(svals[-1]), witness=vh[-1].conj(), singular_values=svals)


def distance_to_singularity_bound(s: SectionedPencil) -> StackedCertificate:
    """Certificate controlling the Frobenius distance to the nearest singular pencil.

    Returns sigma_min([A; E]) together with the minimizing unit vector; if
    this value tends to 0 along a window schedule, the true distance to
    singularity of the sections tends to 0 as well.
    """
    return _stacked_certificate(s)


def joint_kernel_defect(s: SectionedPencil) -> StackedCertificate:
    """Same quantity reported as the joint-kernel defect with its witness.

    The witness x satisfies ||E x||^2 + ||A x||^2 = value^2.
    """
    return _stacked_certificate(s)
