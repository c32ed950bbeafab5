import math

import numpy as np
import pytest

from pencilkit import (
    INFINITY,
    DenseBlock,
    Diagonal,
    Identity,
    L2N,
    Pencil,
    WeightRule,
    Zero,
    classify_point,
    finite,
    regularity_disc,
    section,
    spectra_grid,
)


def _diag_pencil():
    # E = I, A = diag(1/j): eigenvalues are exactly 1/j
    return Pencil(E=Identity(L2N), A=Diagonal(L2N, WeightRule("reciprocal_index")))


def test_point_singular_at_exact_eigenvalue():
    s = section(_diag_pencil(), 4)
    pc = classify_point(s, 0.25)
    assert pc.verdict == "point_singular"
    assert pc.sigma_min <= 1e-15


def test_regular_away_from_spectrum():
    s = section(_diag_pencil(), 4)
    pc = classify_point(s, 2.0)
    # sigma_min = min_j |2 - 1/j| = 1 for the identity-E pencil
    assert pc.verdict == "regular"
    assert pc.sigma_min == pytest.approx(1.0, abs=1e-14)


def test_infinity_goes_through_the_reversal():
    # E = 0, A = I on a 1-dim space: infinity is a point singularity
    p = Pencil(E=Zero(finite(1)), A=Identity(finite(1)))
    pc = classify_point(section(p, 1), INFINITY)
    assert pc.lam == INFINITY and pc.verdict == "point_singular"
    # and the diagonal pencil (E invertible) is regular at infinity
    assert classify_point(section(_diag_pencil(), 4), INFINITY).verdict == "regular"


def test_rectangular_section_separates_sides():
    # 1 x 2 block: columns outnumber rows, so sigma_min (right side) is 0
    e = np.array([[1.0, 0.0]])
    a = np.array([[0.0, 1.0]])
    p = Pencil(E=DenseBlock(finite(2), finite(1), e), A=DenseBlock(finite(2), finite(1), a))
    pc = classify_point(section(p, 2), 0.5)
    assert pc.sigma_min == 0.0
    assert pc.sigma_min_adjoint > 0.5
    assert pc.verdict == "point_singular"


def test_grid_is_row_major_re_then_im():
    s = section(_diag_pencil(), 3)
    g = spectra_grid(s, (-1.0, 1.0, -2.0, 2.0), (2, 3))
    pts = [complex(pc.lam) for pc in g.points]
    assert pts == [
        complex(-1, -2), complex(-1, 0), complex(-1, 2),
        complex(1, -2), complex(1, 0), complex(1, 2),
    ]


def test_grid_step_validation():
    s = section(_diag_pencil(), 3)
    with pytest.raises(ValueError):
        spectra_grid(s, (-1.0, 1.0, -1.0, 1.0), (1, 3))


def test_regularity_disc_radius_and_refusal():
    s = section(_diag_pencil(), 4)
    r = regularity_disc(s, 2.0)
    assert r == pytest.approx(1.0, abs=1e-14)  # sigma_min 1, ||E|| = 1
    # every lambda strictly inside the disc stays regular
    for lam in (1.5, 2.9, 2.0 + 0.9j):
        assert classify_point(s, lam).verdict == "regular"
    with pytest.raises(ValueError):
        regularity_disc(s, 0.25)  # singular point
