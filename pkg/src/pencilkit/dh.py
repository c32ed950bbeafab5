"""Dissipative-Hamiltonian structure checks and singularity classification.

All checks run on dense sections of the pencil lambda E - B Q.  Structure
conditions: Q*E selfadjoint and nonnegative, B dissipative (Hermitian part
negative semidefinite, a complete criterion for matrices), Q invertible;
when a split B = J - R is supplied, J anti-selfadjoint and R selfadjoint
nonnegative.  Maximal dissipativity is automatic in finite dimensions and
is therefore reported, not tested.

Classification at section level: a nontrivial common kernel of E and BQ is
equivalent to a constant right singular polynomial and to
sigma_min(lam E - BQ) = 0 at every right-half-plane probe; a small stacked
sigma_min without an exact kernel is evidence of approximate singularity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .operators import DHStructure, Pencil
from .sections import SectionedPencil, numerical_rank_tol, operator_matrix

__all__ = [
    "DHSectionMats",
    "DHDiagnostics",
    "DHReport",
    "dh_section_mats",
    "verify_dh_structure",
    "dh_common_kernel",
    "dh_kernel_EJR",
    "dh_classify",
    "DEFAULT_HALF_PLANE_PROBES",
]

DEFAULT_HALF_PLANE_PROBES = (1.0 + 0.0j, 2.0 + 0.0j, 1.0 + 1.0j, 1.0 - 1.0j, 0.01 + 10.0j)


@dataclass(frozen=True)
class DHSectionMats:
    E: np.ndarray
    B: np.ndarray
    Q: np.ndarray
    BQ: np.ndarray
    J: np.ndarray | None
    R: np.ndarray | None


def dh_section_mats(s: SectionedPencil, dh: DHStructure) -> DHSectionMats:
    """Compress the dH factors onto the section's window.

    BQ is formed as the product of the compressed factors; the compression
    of the product can differ, and the mismatch against A_mat is surfaced
    in the diagnostics.
    """
    if dh is None:
        raise ValueError("pencil carries no dissipative-Hamiltonian metadata")
    if not s.is_square or s.window_in.indices != s.window_out.indices:
        raise ValueError("dH checks need a square section on a common window")
    w = s.window_in
    B = operator_matrix(dh.B, w, w)
    Q = operator_matrix(dh.Q, w, w)
    J = operator_matrix(dh.J, w, w) if dh.J is not None else None
    R = operator_matrix(dh.R, w, w) if dh.R is not None else None
    return DHSectionMats(E=s.E_mat, B=B, Q=Q, BQ=B @ Q, J=J, R=R)


@dataclass(frozen=True)
class DHDiagnostics:
    qe_selfadjoint_defect: float
    qe_min_eig: float
    b_sym_max_eig: float
    q_sigma_min: float
    j_skew_defect: float | None
    r_selfadjoint_defect: float
    r_min_eig: float | None
    bq_vs_a_defect: float
    tol: float
    structure_ok: bool

    def failures(self) -> list[str]:
        out = []
        if self.qe_selfadjoint_defect > self.tol:
            out.append("Q*E not selfadjoint")
        if self.qe_min_eig < -self.tol:
            out.append("Q*E not nonnegative")
        if self.b_sym_max_eig > self.tol:
            out.append("B not dissipative")
        if self.q_sigma_min <= self.tol:
            out.append("Q not invertible")
        if self.j_skew_defect is not None and self.j_skew_defect > self.tol:
            out.append("J not anti-selfadjoint")
        if self.r_min_eig is not None and (
            self.r_min_eig < -self.tol or self.r_selfadjoint_defect > self.tol
        ):
            out.append("R not selfadjoint nonnegative")
        return out


def _herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def verify_dh_structure(
    s: SectionedPencil, dh: DHStructure, tol: float = 1e-10
) -> DHDiagnostics:
    """Margins of the structure conditions on one section."""
    mats = dh_section_mats(s, dh)
    qe = mats.Q.conj().T @ mats.E
    qe_defect = float(np.linalg.norm(qe - qe.conj().T, 2))
    qe_min = float(np.linalg.eigvalsh(_herm(qe))[0])
    b_sym_max = float(np.linalg.eigvalsh(_herm(mats.B))[-1])
    q_smin = float(scipy.linalg.svdvals(mats.Q)[-1])
    j_defect = None
    r_defect = 0.0
    r_min = None
    if mats.J is not None:
        j_defect = float(np.linalg.norm(mats.J + mats.J.conj().T, 2))
    if mats.R is not None:
        r_defect = float(np.linalg.norm(mats.R - mats.R.conj().T, 2))
        r_min = float(np.linalg.eigvalsh(_herm(mats.R))[0])
    bq_defect = float(np.linalg.norm(mats.BQ - s.A_mat, 2))
    diag = DHDiagnostics(
        qe_selfadjoint_defect=qe_defect,
        qe_min_eig=qe_min,
        b_sym_max_eig=b_sym_max,
        q_sigma_min=q_smin,
        j_skew_defect=j_defect,
        r_selfadjoint_defect=r_defect,
        r_min_eig=r_min,
        bq_vs_a_defect=bq_defect,
        tol=tol,
        structure_ok=False,
    )
    ok = not diag.failures()
    return DHDiagnostics(**{**diag.__dict__, "structure_ok": ok})


def _kernel_of(mat: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical nullspace."""
    if tol is None:
        tol = numerical_rank_tol(mat)
    _, svals, vh = scipy.linalg.svd(mat)
    cols = mat.shape[1]
    rank = int(np.sum(svals > tol))
    return vh[rank:].conj().T if rank < cols else np.zeros((cols, 0), dtype=complex)


def dh_common_kernel(
    s: SectionedPencil, dh: DHStructure, tol: float | None = None
) -> tuple[int, np.ndarray]:
    """Orthonormal basis of ker E intersect ker(BQ), via the stacked matrix."""
    mats = dh_section_mats(s, dh)
    basis = _kernel_of(np.vstack([mats.E, mats.BQ]), tol)
    return basis.shape[1], basis


def subspace_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between the column spans; 0 for two empty spans."""
    if a.shape[1] != b.shape[1]:
        return float(np.pi / 2)
    if a.shape[1] == 0:
        return 0.0
    angles = scipy.linalg.subspace_angles(a, b)
    return float(angles[0]) if angles.size else 0.0


def dh_kernel_EJR(
    s: SectionedPencil, dh: DHStructure, tol: float | None = None
) -> tuple[int, np.ndarray]:
    """Kernel of E^2 + R^2 - J^2 (Q = I, split supplied); checked against the stack.

    Raises if the structure preconditions fail or if the two kernel
    computations disagree beyond a 1e-8 subspace angle.
    """
    if not dh.q_is_identity:
        raise ValueError("E/J/R kernel formula requires Q = identity")
    if not dh.has_split:
        raise ValueError("requires the split B = J - R")
    diag = verify_dh_structure(s, dh)
    e_defect = float(np.linalg.norm(s.E_mat - s.E_mat.conj().T, 2))
    e_min = float(np.linalg.eigvalsh(_herm(s.E_mat))[0])
    if diag.failures() or e_defect > diag.tol or e_min < -diag.tol:
        raise ValueError("structure preconditions fail: " + "; ".join(diag.failures() or ["E not selfadjoint nonnegative"]))
    mats = dh_section_mats(s, dh)
    m = s.E_mat @ s.E_mat + mats.R @ mats.R - mats.J @ mats.J
    m = _herm(m)
    evals, evecs = np.linalg.eigh(m)
    thr = tol if tol is not None else max(m.shape) * max(abs(evals[0]), evals[-1], 1e-300) * 2.0**-52
    kdim = int(np.sum(evals <= thr))
    basis = evecs[:, :kdim]
    stacked = _kernel_of(np.vstack([s.E_mat, mats.J, mats.R]), tol)
    if basis.shape[1] != stacked.shape[1] or subspace_angle(basis, stacked) > 1e-8:
        raise ValueError("E^2+R^2-J^2 kernel disagrees with ker E ∩ ker J ∩ ker R")
    return kdim, basis


@dataclass(frozen=True)
class DHReport:
    diagnostics: DHDiagnostics
    common_kernel_dim: int
    kernel_basis: np.ndarray
    probe_sigma_min: tuple[tuple[complex, float], ...]
    half_plane_min_sigma: float
    stacked_sigma_min: float
    classification: str

    def to_json(self) -> dict:
        d = self.diagnostics
        return {
            "structure_ok": d.structure_ok,
            "margins": {
                "qe_selfadjoint_defect": d.qe_selfadjoint_defect,
                "qe_min_eig": d.qe_min_eig,
                "b_sym_max_eig": d.b_sym_max_eig,
                "q_sigma_min": d.q_sigma_min,
                "j_skew_defect": d.j_skew_defect,
                "r_min_eig": d.r_min_eig,
                "bq_vs_a_defect": d.bq_vs_a_defect,
            },
            "common_kernel_dim": self.common_kernel_dim,
            "half_plane_min_sigma": self.half_plane_min_sigma,
            "stacked_sigma_min": self.stacked_sigma_min,
            "probe_sigma_min": [
                [[lam.real, lam.imag], sv] for lam, sv in self.probe_sigma_min
            ],
            "classification": self.classification,
            "note": "maximal dissipativity is automatic in finite dimensions; "
            "verdicts describe the section only",
        }


def dh_classify(
    s: SectionedPencil,
    dh: DHStructure,
    probes: tuple[complex, ...] = DEFAULT_HALF_PLANE_PROBES,
    tol: float = 1e-10,
    tol_ap: float | None = None,
) -> DHReport:
    """Classify a dH section: point_singular / approx_singular_evidence / regular_candidate."""
    for lam in probes:
        if complex(lam).real <= 0:
            raise ValueError(f"probe {lam} not in the open right half plane")
    diag = verify_dh_structure(s, dh, tol)
    mats = dh_section_mats(s, dh)
    kdim, basis = dh_common_kernel(s, dh)
    probe_vals = []
    for lam in probes:
        sv = float(scipy.linalg.svdvals(complex(lam) * mats.E - mats.BQ)[-1])
        probe_vals.append((complex(lam), sv))
    stacked = np.vstack([mats.E, mats.BQ])
    stacked_smin = float(scipy.linalg.svdvals(stacked)[-1])
    scale = max(float(np.linalg.norm(mats.E, 2)), float(np.linalg.norm(mats.BQ, 2)), 1e-300)
    ta = tol_ap if tol_ap is not None else 1e-6 * scale
    if kdim >= 1:
        classification = "point_singular"
    elif stacked_smin <= ta:
        classification = "approx_singular_evidence"
    else:
        classification = "regular_candidate"
    return DHReport(
        diagnostics=diag,
        common_kernel_dim=kdim,
        kernel_basis=basis,
        probe_sigma_min=tuple(probe_vals),
        half_plane_min_sigma=min(v for _, v in probe_vals),
        stacked_sigma_min=stacked_smin,
        classification=classification,
    )
