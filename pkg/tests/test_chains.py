import numpy as np
import pytest

from pencilkit import (
    DenseBlock,
    Diagonal,
    Identity,
    L2N,
    Pencil,
    VectorPolynomial,
    WeightRule,
    basis_vec,
    chain_to_polynomial,
    extract_left_chain,
    extract_right_chain,
    finite,
    polynomial_roots_check,
    reduce_polynomial,
    section,
    vec_norm,
    vec_sub,
    verify_singular_polynomial,
)


def _kronecker(k: int) -> Pencil:
    e = np.zeros((k, k + 1))
    a = np.zeros((k, k + 1))
    for i in range(k):
        e[i, i] = 1.0
        a[i, i + 1] = 1.0
    return Pencil(E=DenseBlock(finite(k + 1), finite(k), e), A=DenseBlock(finite(k + 1), finite(k), a))


# --- polynomials ----------------------------------------------------------


def test_polynomial_trimming_and_degree():
    p = VectorPolynomial.make([basis_vec(1), {}, {}], finite(2))
    assert p.degree == 0
    z = VectorPolynomial.make([{}], finite(2))
    assert z.is_zero
    with pytest.raises(ValueError):
        z.degree


def test_polynomial_evaluate_and_reversal():
    p = VectorPolynomial.make([basis_vec(1), basis_vec(2, 2.0)], finite(2))
    assert p.evaluate(3.0) == {1: 1.0, 2: 6.0}
    rev = p.reversal()
    assert rev.evaluate(0.0) == {2: 2.0}
    assert p.reversal().reversal().coeffs == p.coeffs


def test_coefficient_matrix_support():
    p = VectorPolynomial.make([basis_vec(4), basis_vec(7, 2.0j)], L2N)
    mat, support = p.coefficient_matrix()
    assert support == [4, 7]
    assert mat[0, 0] == 1.0 and mat[1, 1] == 2.0j


# --- chain extraction -----------------------------------------------------


@pytest.mark.parametrize("k", [1, 2, 3])
def test_kronecker_chain_minimal_index(k):
    s = section(_kronecker(k), k + 1)
    rep = extract_right_chain(s)
    assert rep is not None and rep.minimal_index == k
    # oracle: the links hold against the explicit matrices
    assert max(rep.residuals) <= 1e-12


def test_regular_section_has_no_chain():
    p = Pencil(E=Identity(L2N), A=Diagonal(L2N, WeightRule("reciprocal_index")))
    assert extract_right_chain(section(p, 5)) is None


def test_kronecker_has_no_left_chain():
    # the adjoint block has full column rank, so no left chain exists
    assert extract_left_chain(section(_kronecker(2), 3)) is None


def test_chain_polynomial_verifies_on_pencil_and_section():
    p = _kronecker(2)
    s = section(p, 3)
    poly = chain_to_polynomial(extract_right_chain(s))
    assert verify_singular_polynomial(p, poly, side="right") <= 1e-12
    assert verify_singular_polynomial(s, poly, side="right") <= 1e-12


def test_verify_rejects_repeated_probes():
    poly = VectorPolynomial.make([basis_vec(1)], finite(2))
    with pytest.raises(ValueError):
        verify_singular_polynomial(_kronecker(1), poly, probes=[1.0, 1.0, 2.0])


# --- reduction and roots --------------------------------------------------


def test_reduce_strips_common_linear_factor():
    # (lam - 2) * (v + lam w) with independent v, w
    v, w = basis_vec(1), basis_vec(2)
    coeffs = [{1: -2.0}, {1: 1.0, 2: -2.0}, {2: 1.0}]
    q = VectorPolynomial.make(coeffs, finite(2))
    r = reduce_polynomial(q)
    assert r.degree == 1
    # reduced polynomial proportional to v + lam w
    assert abs(r.coeffs[0].get(2, 0.0)) <= 1e-10
    assert abs(r.coeffs[1].get(1, 0.0)) <= 1e-10


def test_reduce_strips_common_lambda_factor():
    q = VectorPolynomial.make([{}, basis_vec(1), basis_vec(2)], finite(2))
    r = reduce_polynomial(q)
    assert r.degree == 1
    assert vec_norm(vec_sub(r.coeffs[0], basis_vec(1))) <= 1e-12


def test_reduce_is_idempotent_on_root_free_input():
    q = VectorPolynomial.make([basis_vec(1), basis_vec(2)], finite(2))
    r = reduce_polynomial(q)
    assert len(r.coeffs) == len(q.coeffs)
    assert all(vec_norm(vec_sub(a, b)) <= 1e-12 for a, b in zip(r.coeffs, q.coeffs))


def test_roots_check_flags_near_root():
    # q(lam) = (lam - 1/2) e_1 vanishes on the grid point 1/2
    q = VectorPolynomial.make([basis_vec(1, -0.5), basis_vec(1)], finite(1))
    assert not polynomial_roots_check(q, [0.5])
    assert polynomial_roots_check(q, [3.0])
    # the reversal has its own root at lam = 2
    assert not polynomial_roots_check(q, [2.0])
