import numpy as np
import pytest
import scipy.linalg

from pencilkit import (
    DenseBlock,
    DHStructure,
    Identity,
    Pencil,
    dh_classify,
    dh_common_kernel,
    dh_kernel_EJR,
    finite,
    section,
    subspace_angle,
    verify_dh_structure,
)


def _random_dh(seed: int, dim: int = 4, engineered_kernel: bool = False) -> Pencil:
    """E selfadjoint nonnegative, B = J - R with J skew and R PSD, Q = I."""
    rng = np.random.default_rng(seed)

    def spd():
        m = rng.standard_normal((dim, dim))
        return m @ m.T + dim * np.eye(dim)

    e, r = spd(), spd()
    k = rng.standard_normal((dim, dim))
    j = k - k.T
    if engineered_kernel:
        v = rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        proj = np.eye(dim) - np.outer(v, v)
        e, r, j = proj @ e @ proj, proj @ r @ proj, proj @ j @ proj
    sp = finite(dim)
    b = j - r
    return Pencil(
        E=DenseBlock(sp, sp, e),
        A=DenseBlock(sp, sp, b),
        dh=DHStructure(
            B=DenseBlock(sp, sp, b),
            Q=Identity(sp),
            J=DenseBlock(sp, sp, j),
            R=DenseBlock(sp, sp, r),
        ),
    )


def test_structure_diagnostics_pass_on_valid_instance():
    p = _random_dh(0)
    diag = verify_dh_structure(section(p, 4), p.dh)
    assert diag.structure_ok and diag.failures() == []
    assert diag.qe_min_eig > 0 and diag.b_sym_max_eig < 0
    assert diag.bq_vs_a_defect <= 1e-12


def test_structure_violations_are_named():
    dim = 3
    sp = finite(dim)
    e = np.eye(dim)
    b = np.eye(dim)  # Hermitian part positive: not dissipative
    p = Pencil(
        E=DenseBlock(sp, sp, e),
        A=DenseBlock(sp, sp, b),
        dh=DHStructure(B=DenseBlock(sp, sp, b), Q=Identity(sp)),
    )
    diag = verify_dh_structure(section(p, dim), p.dh)
    assert not diag.structure_ok
    assert "B not dissipative" in diag.failures()


def test_common_kernel_matches_engineering():
    p = _random_dh(7, engineered_kernel=True)
    s = section(p, 4)
    kdim, basis = dh_common_kernel(s, p.dh)
    assert kdim == 1
    # the basis vector is annihilated by both factors
    assert np.linalg.norm(s.E_mat @ basis[:, 0]) <= 1e-10
    assert np.linalg.norm(s.A_mat @ basis[:, 0]) <= 1e-10


def test_no_kernel_for_spd_instance():
    p = _random_dh(7)
    kdim, basis = dh_common_kernel(section(p, 4), p.dh)
    assert kdim == 0 and basis.shape == (4, 0)


def test_kernel_EJR_agrees_with_stack():
    for seed in (1, 2, 3):
        p = _random_dh(seed, engineered_kernel=True)
        s = section(p, 4)
        kdim, basis = dh_kernel_EJR(s, p.dh)
        assert kdim == 1
        from pencilkit.dh import dh_section_mats

        mats = dh_section_mats(s, p.dh)
        stacked = np.vstack([s.E_mat, mats.J, mats.R])
        _, svals, vh = scipy.linalg.svd(stacked)
        stack_basis = vh[-1:].conj().T
        assert subspace_angle(basis, stack_basis) <= 1e-8


def test_kernel_EJR_preconditions():
    p = _random_dh(5)
    s = section(p, 4)
    no_split = DHStructure(B=p.dh.B, Q=p.dh.Q)
    with pytest.raises(ValueError):
        dh_kernel_EJR(s, no_split)
    not_identity = DHStructure(B=p.dh.B, Q=p.dh.B, J=p.dh.J, R=p.dh.R)
    with pytest.raises(ValueError):
        dh_kernel_EJR(s, not_identity)


def test_classification_branches():
    singular = _random_dh(11, engineered_kernel=True)
    rep = dh_classify(section(singular, 4), singular.dh)
    assert rep.classification == "point_singular"
    assert rep.half_plane_min_sigma <= 1e-10

    regular = _random_dh(11)
    rep = dh_classify(section(regular, 4), regular.dh)
    assert rep.classification == "regular_candidate"
    assert rep.stacked_sigma_min > 0.1

    # forcing a generous tolerance flips the regular case to evidence-only
    rep = dh_classify(section(regular, 4), regular.dh, tol_ap=1e6)
    assert rep.classification == "approx_singular_evidence"


def test_probes_must_sit_in_right_half_plane():
    p = _random_dh(3)
    with pytest.raises(ValueError):
        dh_classify(section(p, 4), p.dh, probes=(-1.0 + 0j,))


def test_report_serializes():
    p = _random_dh(4)
    rep = dh_classify(section(p, 4), p.dh)
    d = rep.to_json()
    assert d["structure_ok"] is True
    assert d["classification"] == "regular_candidate"
    assert "maximal dissipativity" in d["note"]


def test_subspace_angle_edge_cases():
    a = np.zeros((3, 0))
    assert subspace_angle(a, a) == 0.0
    b = np.eye(3)[:, :1]
    assert subspace_angle(a, b) == pytest.approx(np.pi / 2)
