"""Max-plus building blocks: monomials, polynomials, rational functions.

In the max-plus semiring addition is ``max`` and multiplication is
``+``, so a monomial is an affine function ``c + <a, x>`` and a
polynomial is a pointwise maximum of finitely many affine functions --
a convex piecewise-linear map.  Differences of two such polynomials
(rational functions) are exactly the piecewise-linear maps that ReLU
networks and sparsely gated expert layers compute, which is why region
counting questions reduce to combinatorics of these objects.

Exponents here are arbitrary real vectors (network weight rows), not
integer tuples as in the classical algebraic setting; nothing below
needs integrality.

The locus where a polynomial's maximum is attained at least twice is
where the map fails to be linear; membership is decided with a relative
tie tolerance so that floating-point evaluation is reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, ContractViolation

TROPICAL_ZERO = float("-inf")  # additive identity: max(x, -inf) = x
TROPICAL_ONE = 0.0  # multiplicative identity: x + 0 = x

COALITION_BUDGET = 100_000  # refuse to expand more monomials than this


def tropical_add(a: float, b: float) -> float:
    """Semiring addition: max(a, b)."""
    return a if a >= b else b


def tropical_mul(a: float, b: float) -> float:
    """Semiring multiplication: a + b, with -inf absorbing."""
    if a == TROPICAL_ZERO or b == TROPICAL_ZERO:
        return TROPICAL_ZERO
    return a + b


@dataclass
class TropicalMonomial:
    """One affine term ``coefficient + <exponent, x>``."""

    coefficient: float
    exponent: np.ndarray

    def __post_init__(self):
        self.exponent = np.asarray(self.exponent, dtype=np.float64).reshape(-1)
        self.coefficient = float(self.coefficient)
        if not np.all(np.isfinite(self.exponent)) or not math.isfinite(self.coefficient):
            raise ContractViolation("monomial data must be finite")

    @property
    def dim(self) -> int:
        return self.exponent.shape[0]

    def evaluate(self, x: np.ndarray) -> float:
        return self.coefficient + float(np.dot(self.exponent, x))


@dataclass
class TropicalPolynomial:
    """A pointwise maximum of affine terms.

    Stored in matrix form: ``exponents`` is (m, d) and ``coefficients``
    is (m,), and evaluation is a single matrix product so term order --
    and therefore floating-point output -- is fixed by construction.
    """

    exponents: np.ndarray
    coefficients: np.ndarray
    tie_tol: float = field(default=1e-9, repr=False)

    def __post_init__(self):
        self.exponents = np.atleast_2d(np.asarray(self.exponents, dtype=np.float64))
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64).reshape(-1)
        if self.exponents.shape[0] != self.coefficients.shape[0]:
            raise ContractViolation("one coefficient per exponent row required")
        if self.exponents.shape[0] == 0:
            raise ContractViolation("a tropical polynomial needs at least one term")
        if not (np.all(np.isfinite(self.exponents)) and np.all(np.isfinite(self.coefficients))):
            raise ContractViolation("polynomial data must be finite")

    @classmethod
    def from_monomials(cls, monomials: list[TropicalMonomial]) -> "TropicalPolynomial":
        dims = {m.dim for m in monomials}
        if len(dims) > 1:
            raise ContractViolation("monomials live in different dimensions")
        return cls(
            np.array([m.exponent for m in monomials]),
            np.array([m.coefficient for m in monomials]),
        )

    @property
    def n_terms(self) -> int:
        return self.exponents.shape[0]

    @property
    def dim(self) -> int:
        return self.exponents.shape[1]

    def term_values(self, x: np.ndarray) -> np.ndarray:
        """Value of every affine term at ``x``, in term order."""
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.shape[0] != self.dim:
            raise ContractViolation(
                f"point has dimension {x.shape[0]}, polynomial expects {self.dim}"
            )
        return self.exponents @ x + self.coefficients

    def evaluate(self, x: np.ndarray) -> float:
        return float(np.max(self.term_values(x)))

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        """Values at each row of ``X`` (n, d) -> (n,)."""
        X = np.asarray(X, dtype=np.float64)
        return np.max(X @ self.exponents.T + self.coefficients, axis=1)

    def argmax_terms(self, x: np.ndarray) -> tuple[float, tuple[int, ...]]:
        """Value and the set of term indices attaining it.

        A term counts as attaining the maximum when it comes within
        ``tie_tol * max(1, |value|)`` of it, so nearly coincident
        maxima are reported as ties instead of depending on rounding.
        """
        vals = self.term_values(x)
        top = float(np.max(vals))
        band = self.tie_tol * max(1.0, abs(top))
        return top, tuple(int(i) for i in np.nonzero(vals >= top - band)[0])

    def on_singular_locus(self, x: np.ndarray) -> bool:
        """True when the maximum is attained by two or more terms."""
        return len(self.argmax_terms(x)[1]) >= 2


@dataclass
class TropicalRationalFunction:
    """A difference ``P - Q`` of two tropical polynomials.

    This is the general form of a piecewise-linear map; its
    nonlinearity locus is contained in the union of the two singular
    loci.
    """

    numerator: TropicalPolynomial
    denominator: TropicalPolynomial

    def __post_init__(self):
        if self.numerator.dim != self.denominator.dim:
            raise ContractViolation("numerator and denominator dimensions differ")

    @property
    def dim(self) -> int:
        return self.numerator.dim

    def evaluate(self, x: np.ndarray) -> float:
        return self.numerator.evaluate(x) - self.denominator.evaluate(x)

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        return self.numerator.evaluate_batch(X) - self.denominator.evaluate_batch(X)

    def on_singular_locus(self, x: np.ndarray) -> bool:
        return self.numerator.on_singular_locus(x) or self.denominator.on_singular_locus(x)


def eval_polynomial(P: TropicalPolynomial, x: np.ndarray) -> tuple[float, tuple[int, ...]]:
    """Evaluate ``P`` at ``x`` returning (value, attaining term indices)."""
    return P.argmax_terms(x)


def on_singular_locus(P: TropicalPolynomial, x: np.ndarray) -> bool:
    """True when at least two terms of ``P`` attain the maximum at ``x``."""
    return P.on_singular_locus(x)


def relu_unit_rational(w: np.ndarray, b: float) -> TropicalRationalFunction:
    """``max(w.x + b, 0)`` as a rational function with trivial denominator."""
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    num = TropicalPolynomial(np.vstack([w, np.zeros_like(w)]), np.array([float(b), 0.0]))
    den = TropicalPolynomial(np.zeros((1, w.shape[0])), np.array([0.0]))
    return TropicalRationalFunction(num, den)


def coalitions(n_experts: int, k: int) -> list[tuple[int, ...]]:
    """All size-k index sets in lexicographic order."""
    return list(itertools.combinations(range(n_experts), k))


def build_sym_trop_k(
    W: np.ndarray,
    b: np.ndarray,
    k: int,
    *,
    budget: int = COALITION_BUDGET,
) -> TropicalPolynomial:
    """The k-th elementary symmetric max-plus polynomial of router logits.

    Given logits ``z_i = <w_i, x> + b_i``, the polynomial is the maximum
    over all size-k index sets I of ``sum_{i in I} z_i``, i.e. the best
    achievable sum of k logits.  Term i corresponds to the i-th set in
    ``coalitions(N, k)`` order: its exponent is the sum of the selected
    weight rows and its coefficient the sum of the selected biases.

    Refuses (rather than hangs) when the number of sets exceeds
    ``budget``.
    """
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    n = W.shape[0]
    if b.shape[0] != n:
        raise ContractViolation("one bias per router row required")
    if not 1 <= k <= n:
        raise ContractViolation(f"k must be in 1..{n}, got {k}")
    size = math.comb(n, k)
    if size > budget:
        raise BudgetExceeded(
            f"{size} coalitions exceed the expansion budget of {budget}", size, budget
        )
    sets = coalitions(n, k)
    idx = np.array(sets, dtype=np.intp).reshape(size, k)
    return TropicalPolynomial(W[idx].sum(axis=1), b[idx].sum(axis=1))
