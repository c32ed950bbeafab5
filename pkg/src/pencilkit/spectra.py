"""Pointwise classification of lambda values for sectioned pencils.

A point is classified from sigma_min(lambda E - A) of the section (and of
its conjugate transpose, which differs only for rectangular sections).
Infinity is handled exclusively through the reversal pencil: the verdict at
infinity is the verdict of lambda A - E at zero.  Verdicts are section
statements; convergence across growing windows is the only evidence offered
about the infinite object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .sections import SectionedPencil

__all__ = [
    "INFINITY",
    "PointClassification",
    "SpectraGrid",
    "classify_point",
    "spectra_grid",
    "regularity_disc",
]

INFINITY = math.inf

DEFAULT_TOL_POINT_FACTOR = 1e-10
DEFAULT_TOL_AP_FACTOR = 1e-6

VERDICTS = ("point_singular", "approx_singular_only", "singular_only", "regular")


@dataclass(frozen=True)
class PointClassification:
    lam: complex | float
    sigma_min: float
    sigma_min_adjoint: float
    verdict: str
    tol_point: float
    tol_ap: float

    def to_json(self) -> dict:
        lam = "inf" if self.lam == INFINITY else [complex(self.lam).real, complex(self.lam).imag]
        return {
            "lambda": lam,
            "sigma_min": self.sigma_min,
            "sigma_min_adjoint": self.sigma_min_adjoint,
            "verdict": self.verdict,
        }


def classify_point(
    s: SectionedPencil,
    lam: complex | float,
    tol_point: float | None = None,
    tol_ap: float | None = None,
) -> PointClassification:
    """Classify a point (or infinity, via the reversal) for one section."""
    if lam == INFINITY:
        inner = classify_point(s.reverse(), 0.0, tol_point, tol_ap)
        return PointClassification(
            INFINITY, inner.sigma_min, inner.sigma_min_adjoint, inner.verdict,
            inner.tol_point, inner.tol_ap,
        )
    mat = s.evaluate(complex(lam))
    svals = scipy.linalg.svdvals(mat)
    smax = float(svals[0]) if svals.size else 0.0
    rows, cols = mat.shape
    smin = float(svals[-1]) if svals.size == cols else 0.0
    smin_adj = float(svals[-1]) if svals.size == rows else 0.0
    tp = DEFAULT_TOL_POINT_FACTOR * smax if tol_point is None else tol_point
    ta = DEFAULT_TOL_AP_FACTOR * smax if tol_ap is None else tol_ap
    if smin <= tp:
        verdict = "point_singular"
    elif smin <= ta:
        verdict = "approx_singular_only"
    elif min(smin, smin_adj) <= ta:
        verdict = "singular_only"
    else:
        verdict = "regular"
    return PointClassification(lam, smin, smin_adj, verdict, tp, ta)


@dataclass(frozen=True)
class SpectraGrid:
    rectangle: tuple[float, float, float, float]
    steps: tuple[int, int]
    points: tuple[PointClassification, ...]
    notes: tuple[str, ...] = ()

    def rows(self):
        for pc in self.points:
            lam = complex(pc.lam)
            yield (lam.real, lam.imag, pc.sigma_min, pc.sigma_min_adjoint, pc.verdict)


def spectra_grid(
    s: SectionedPencil,
    rect: tuple[float, float, float, float],
    steps: tuple[int, int],
    tol_point: float | None = None,
    tol_ap: float | None = None,
) -> SpectraGrid:
    """classify_point on an inclusive rectangular grid, row-major by re then im."""
    re_min, re_max, im_min, im_max = rect
    n_re, n_im = steps
    if n_re < 2 or n_im < 2:
        raise ValueError("need at least 2 steps per axis")
    res = np.linspace(re_min, re_max, n_re)
    ims = np.linspace(im_min, im_max, n_im)
    points = tuple(
        classify_point(s, complex(re, im), tol_point, tol_ap) for re in res for im in ims
    )
    return SpectraGrid(rect, steps, points, notes=s.notes)


def regularity_disc(s: SectionedPencil, lam: complex, tol: float | None = None) -> float:
    """Radius sigma_min(lam E - A) / ||E|| of guaranteed section regularity around lam.

    Every point strictly inside the disc is regular for the same section.
    """
    if not s.is_square:
        raise ValueError("regularity disc needs a square section")
    mat = s.evaluate(lam)
    svals = scipy.linalg.svdvals(mat)
    smin = float(svals[-1])
    thr = tol if tol is not None else DEFAULT_TOL_AP_FACTOR * float(svals[0])
    if smin <= thr:
        raise ValueError(f"section not invertible at {lam}")
    e_norm = float(np.linalg.norm(s.E_mat, 2))
    if e_norm == 0.0:
        return math.inf
    return smin / e_norm
