import numpy as np
import pytest

from oracles import all_words, gram_schmidt_basis, hankel_kernel, toeplitz_kernel

from ncpoly.errors import PositivityError, ValidationError
from ncpoly.functional import MomentFunctional, from_representation, gram
from ncpoly.orthopoly import (DETERMINANT_CAP, OrthoBasis, determinant_formula,
                              evaluate, orthogonalize, orthonormality_residual,
                              szego_recursion, word_product)
from ncpoly.words import EMPTY, Word, words_up_to

from test_functional import random_representation


def random_toeplitz(rng, n_gen, max_degree, scale=0.1):
    c = {EMPTY: 1.0 + 0.0j}
    for w in words_up_to(max_degree, n_gen):
        if len(w):
            c[w] = complex(scale * rng.standard_normal(),
                           scale * rng.standard_normal())
    return MomentFunctional(n_generators=n_gen, kind="toeplitz",
                            max_degree=max_degree, moments=c)


def as_matrix(basis, words):
    A = np.zeros((len(words), len(words)), dtype=complex)
    for i, w in enumerate(words):
        for j, t in enumerate(words):
            A[i, j] = basis.coeffs[w].get(t, 0.0)
    return A


def test_orthogonalize_matches_gram_schmidt_oracle_hankel():
    rng = np.random.default_rng(10)
    mats, v = random_representation(rng, 2, 16)
    f = from_representation(mats, v, max_degree=4)
    basis = orthogonalize(f, 2)
    words = words_up_to(2, 2)
    K = hankel_kernel({w.letters: f.moment(w) for w in words_up_to(4, 2)})
    oracle = gram_schmidt_basis(K, [w.letters for w in words])
    assert np.max(np.abs(as_matrix(basis, words) - oracle)) < 1e-9


def test_orthogonalize_matches_gram_schmidt_oracle_toeplitz():
    rng = np.random.default_rng(11)
    f = random_toeplitz(rng, 2, 3)
    basis = orthogonalize(f, 3)
    words = words_up_to(3, 2)
    K = toeplitz_kernel({w.letters: f.moments[w] for w in words})
    oracle = gram_schmidt_basis(K, [w.letters for w in words])
    assert np.max(np.abs(as_matrix(basis, words) - oracle)) < 1e-9


def test_basis_is_triangular_with_positive_leading():
    rng = np.random.default_rng(12)
    f = random_toeplitz(rng, 2, 3)
    basis = orthogonalize(f, 3)
    words = words_up_to(3, 2)
    A = as_matrix(basis, words)
    assert np.max(np.abs(np.triu(A, k=1))) == 0.0
    diag = np.diag(A)
    assert np.all(diag.real > 0)
    assert np.max(np.abs(diag.imag)) == 0.0


def test_orthonormality_residual_is_small():
    rng = np.random.default_rng(13)
    mats, v = random_representation(rng, 2, 16)
    f = from_representation(mats, v, max_degree=6)
    basis = orthogonalize(f, 3)
    assert orthonormality_residual(basis, gram(f, 3)) < 1e-9


def test_orthogonalize_refuses_singular_gram():
    # a 2-dimensional representation cannot carry 3 independent words
    rng = np.random.default_rng(14)
    mats, v = random_representation(rng, 1, 2)
    f = from_representation(mats, v, max_degree=4)
    with pytest.raises(PositivityError):
        orthogonalize(f, 2)


def test_determinant_formula_agrees_with_cholesky():
    rng = np.random.default_rng(15)
    for n_gen in (1, 2, 3):
        mats, v = random_representation(rng, n_gen, 16)
        f = from_representation(mats, v, max_degree=4)
        basis = orthogonalize(f, 2)
        for w in words_up_to(2, n_gen):
            row = determinant_formula(f, w)
            ref = basis.coeffs[w]
            scale = max(1.0, max(abs(c) for c in ref.values()))
            for t in set(row) | set(ref):
                assert abs(row.get(t, 0.0) - ref.get(t, 0.0)) < 1e-8 * scale


def test_determinant_formula_cap():
    rng = np.random.default_rng(16)
    mats, v = random_representation(rng, 3, 48)
    f = from_representation(mats, v, max_degree=6)
    # the full level-3 order over three letters has 40 words, past the cap
    assert 1 + 3 + 9 + 27 > DETERMINANT_CAP
    with pytest.raises(ValidationError):
        determinant_formula(f, Word((3, 3, 3)))


def test_empty_word_polynomial_is_the_constant():
    rng = np.random.default_rng(17)
    f = random_toeplitz(rng, 2, 2)
    assert determinant_formula(f, EMPTY) == {EMPTY: 1.0}


def test_szego_requires_toeplitz():
    rng = np.random.default_rng(18)
    mats, v = random_representation(rng, 2, 16)
    f = from_representation(mats, v, max_degree=4)
    with pytest.raises(ValidationError):
        szego_recursion(f, 2)


def test_szego_matches_orthogonalize():
    rng = np.random.default_rng(19)
    for trial in range(5):
        f = random_toeplitz(rng, 2, 3, scale=0.08)
        direct = orthogonalize(f, 3)
        ladder, data = szego_recursion(f, 3)
        words = words_up_to(3, 2)
        dev = np.max(np.abs(as_matrix(direct, words) - as_matrix(ladder, words)))
        assert dev < 1e-8
        assert all(abs(g) < 1 for g in data.gammas.values())


def test_szego_first_gamma_is_first_moment():
    # hand-checked on the one-variable ladder: the length-one parameter
    # coincides with c_1 itself
    c = {EMPTY: 1.0 + 0.0j, Word((1,)): -0.5 + 0.0j, Word((1, 1)): 0.0j}
    f = MomentFunctional(n_generators=1, kind="toeplitz", max_degree=2, moments=c)
    _, data = szego_recursion(f, 2)
    assert abs(data.gammas[Word((1,))] - (-0.5)) < 1e-12


def test_szego_zero_data_gives_monomials():
    c = {w: (1.0 + 0.0j if len(w) == 0 else 0.0j) for w in words_up_to(3, 2)}
    f = MomentFunctional(n_generators=2, kind="toeplitz", max_degree=3, moments=c)
    basis, data = szego_recursion(f, 3)
    words = words_up_to(3, 2)
    assert np.max(np.abs(as_matrix(basis, words) - np.eye(len(words)))) == 0.0
    assert all(g == 0 for g in data.gammas.values())


def test_szego_rejects_contradictory_data():
    # |c_1| >= 1 cannot come from a positive stationary kernel
    c = {EMPTY: 1.0 + 0.0j, Word((1,)): 1.2 + 0.0j, Word((1, 1)): 0.0j}
    f = MomentFunctional(n_generators=1, kind="toeplitz", max_degree=2, moments=c)
    with pytest.raises(PositivityError):
        szego_recursion(f, 2)


def test_evaluate_matches_scalar_polynomial():
    rng = np.random.default_rng(20)
    f = random_toeplitz(rng, 1, 3)
    basis = orthogonalize(f, 3)
    z = 0.3 - 0.4j
    point = np.array([[[z]]])
    for w in words_up_to(3, 1):
        val = evaluate(basis, w, point)[0, 0]
        ref = sum(a * z ** len(t) for t, a in basis.coeffs[w].items())
        assert abs(val - ref) < 1e-12


def test_evaluate_respects_noncommutativity():
    rng = np.random.default_rng(21)
    mats, v = random_representation(rng, 2, 16)
    f = from_representation(mats, v, max_degree=4)
    basis = orthogonalize(f, 2)
    X = rng.standard_normal((2, 3, 3)) + 1j * rng.standard_normal((2, 3, 3))
    w = Word((1, 2))
    val = evaluate(basis, w, X)
    ref = sum(a * word_product(X, t, {}) for t, a in basis.coeffs[w].items())
    assert np.max(np.abs(val - ref)) < 1e-12


def test_word_product_order():
    X = np.array([[[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]])
    # Z_{1.2} = Z_1 Z_2 hits the upper-left unit, Z_{2.1} the lower-right
    P12 = word_product(X, Word((1, 2)), {})
    P21 = word_product(X, Word((2, 1)), {})
    assert P12[0, 0] == 1.0 and P12[1, 1] == 0.0
    assert P21[1, 1] == 1.0 and P21[0, 0] == 0.0


def test_matrix_rejects_levels_beyond_basis():
    rng = np.random.default_rng(22)
    f = random_toeplitz(rng, 2, 2)
    basis = orthogonalize(f, 2)
    with pytest.raises(ValidationError):
        basis.matrix(3)


def test_basis_matrix_matches_oracle_layout():
    rng = np.random.default_rng(23)
    f = random_toeplitz(rng, 2, 2)
    basis = orthogonalize(f, 2)
    words = words_up_to(2, 2)
    assert [w.letters for w in words] == all_words(2, 2)
    A = basis.matrix()
    assert np.max(np.abs(A - as_matrix(basis, words))) == 0.0
