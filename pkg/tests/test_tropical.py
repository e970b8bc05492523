"""Max-plus semiring, polynomials, and the coalition polynomial."""

import itertools
import math

import numpy as np
import pytest

from tropcap.errors import BudgetExceeded, ContractViolation
from tropcap.tropical import (
    TROPICAL_ONE,
    TROPICAL_ZERO,
    TropicalMonomial,
    TropicalPolynomial,
    TropicalRationalFunction,
    build_sym_trop_k,
    coalitions,
    relu_unit_rational,
    tropical_add,
    tropical_mul,
)


def test_semiring_identities():
    assert tropical_add(3.0, TROPICAL_ZERO) == 3.0
    assert tropical_mul(3.0, TROPICAL_ONE) == 3.0
    assert tropical_add(2.0, 5.0) == 5.0
    assert tropical_mul(2.0, 5.0) == 7.0
    # Annihilation: zero absorbs under multiplication.
    assert tropical_mul(4.0, TROPICAL_ZERO) == TROPICAL_ZERO


def test_monomial_is_affine():
    m = TropicalMonomial(1.5, np.array([2.0, -1.0]))
    x = np.array([0.5, 3.0])
    assert abs(m.evaluate(x) - (1.5 + 2.0 * 0.5 - 3.0)) < 1e-12


def test_polynomial_is_pointwise_max():
    P = TropicalPolynomial(np.array([[1.0], [-1.0]]), np.array([0.0, 0.0]))
    # max(x, -x) = |x|
    for v in (-2.0, -0.5, 0.0, 1.7):
        assert abs(P.evaluate(np.array([v])) - abs(v)) < 1e-12
    X = np.array([[-2.0], [0.25], [4.0]])
    assert np.allclose(P.evaluate_batch(X), [2.0, 0.25, 4.0])


def test_polynomial_convexity_on_segments():
    rng = np.random.default_rng(1)
    P = TropicalPolynomial(rng.normal(size=(6, 3)), rng.normal(size=6))
    for _ in range(50):
        a, b = rng.normal(size=3), rng.normal(size=3)
        lam = rng.uniform()
        mid = lam * a + (1 - lam) * b
        assert P.evaluate(mid) <= lam * P.evaluate(a) + (1 - lam) * P.evaluate(b) + 1e-9


def test_singular_locus_is_the_crease():
    P = TropicalPolynomial(np.array([[1.0], [-1.0]]), np.array([0.0, 0.0]))
    assert P.on_singular_locus(np.array([0.0]))
    assert not P.on_singular_locus(np.array([0.5]))
    # The tie band is relative: at |x| ~ 1e-10 both terms tie within tolerance.
    assert P.on_singular_locus(np.array([1e-10]))


def test_argmax_terms_reports_all_ties():
    P = TropicalPolynomial(np.array([[1.0], [1.0], [-1.0]]), np.array([0.0, 0.0, 0.0]))
    val, idx = P.argmax_terms(np.array([2.0]))
    assert val == 2.0
    assert idx == (0, 1)


def test_rational_function_difference():
    rng = np.random.default_rng(2)
    P = TropicalPolynomial(rng.normal(size=(4, 2)), rng.normal(size=4))
    Q = TropicalPolynomial(rng.normal(size=(3, 2)), rng.normal(size=3))
    R = TropicalRationalFunction(P, Q)
    x = rng.normal(size=2)
    assert abs(R.evaluate(x) - (P.evaluate(x) - Q.evaluate(x))) < 1e-12


def test_relu_unit_rational_matches_relu():
    w = np.array([1.0, -2.0])
    b = 0.3
    R = relu_unit_rational(w, b)
    rng = np.random.default_rng(3)
    for _ in range(100):
        x = rng.normal(size=2)
        assert abs(R.evaluate(x) - max(0.0, w @ x + b)) < 1e-12


def test_coalitions_are_lexicographic():
    sets = coalitions(4, 2)
    assert sets == list(itertools.combinations(range(4), 2))


def test_sym_trop_terms_and_value():
    rng = np.random.default_rng(4)
    W = rng.normal(size=(5, 3))
    b = rng.normal(size=5)
    P = build_sym_trop_k(W, b, 2)
    assert P.n_terms == math.comb(5, 2)
    # Term i matches the i-th coalition: summed rows and biases.
    for i, c in enumerate(coalitions(5, 2)):
        assert np.allclose(P.exponents[i], W[list(c)].sum(axis=0))
        assert abs(P.coefficients[i] - b[list(c)].sum()) < 1e-12
    # Its value is the best coalition sum.
    for _ in range(50):
        x = rng.normal(size=3)
        z = W @ x + b
        brute = max(z[list(c)].sum() for c in coalitions(5, 2))
        assert abs(P.evaluate(x) - brute) < 1e-9


def test_sym_trop_k_edges():
    W = np.eye(3)
    b = np.zeros(3)
    full = build_sym_trop_k(W, b, 3)
    assert full.n_terms == 1  # only one coalition of everything
    with pytest.raises(ContractViolation):
        build_sym_trop_k(W, b, 0)
    with pytest.raises(ContractViolation):
        build_sym_trop_k(W, b, 4)


def test_sym_trop_budget_refusal():
    W = np.ones((30, 2))
    b = np.zeros(30)
    with pytest.raises(BudgetExceeded) as e:
        build_sym_trop_k(W, b, 15)
    assert e.value.size == math.comb(30, 15)
