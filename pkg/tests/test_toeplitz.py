import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyfock.fock import TruncatedBasis
from polyfock.quadrature import integrate_adaptive
from polyfock.symbols import OrderConstraintError, SymbolExpr
from polyfock.toeplitz import (
    BasisMismatchError,
    MatrixQuadratureError,
    OperatorMatrix,
    adjoint_residual,
    analyse_norms,
    compose,
    guard_degree,
    interior_indices,
    norm_scan,
    operator_norm,
    power_iteration,
    toeplitz_matrix,
    toeplitz_product,
)

Z = SymbolExpr.monomial(1, 0)
ZB = SymbolExpr.monomial(0, 1)
ONE = SymbolExpr.constant(1.0)


def exp_pair(a, c=1.0):
    return SymbolExpr.exponential(z=a), SymbolExpr.exponential(z=-a, coeff=c)


def test_constant_symbol_is_identity():
    b = TruncatedBasis(3, 12)
    assert np.allclose(toeplitz_matrix(ONE, b, b).entries, np.eye(b.size), atol=1e-12)


def test_shift_oracle():
    b = TruncatedBasis(1, 15)
    M = toeplitz_matrix(Z, b, b).entries
    want = np.diag(np.sqrt(np.arange(1, 16)), -1)
    assert np.allclose(M, want, atol=1e-12)


def test_entries_against_entrywise_quadrature():
    dom, cod = TruncatedBasis(2, 5), TruncatedBasis(3, 4)
    phi = SymbolExpr.exponential(z=0.4 - 0.1j) * (1 + ZB)
    M = toeplitz_matrix(phi, dom, cod).entries
    for i in range(dom.size):
        for j in range(cod.size):
            ref = integrate_adaptive(lambda w: phi(w) * dom.values(w)[..., i] * cod.values(w)[..., j].conj(), tol=1e-12).value
            assert abs(M[j, i] - ref) < 1e-10


def test_real_symbol_gives_self_adjoint_matrix():
    b = TruncatedBasis(2, 10)
    phi = Z * ZB + SymbolExpr.exponential(z=0.2, zbar=0.2)
    M = toeplitz_matrix(phi, b, b).entries
    assert np.max(np.abs(M - M.conj().T)) < 1e-10


@settings(max_examples=15, deadline=None)
@given(a=st.builds(complex, st.floats(-2, 2), st.floats(-2, 2)), lam=st.floats(-0.5, 0.5))
def test_linearity(a, lam):
    b = TruncatedBasis(2, 8)
    p1 = SymbolExpr.exponential(z=lam) * ZB
    p2 = Z * Z + 3
    lhs = toeplitz_matrix(a * p1 + p2, b, b).entries
    rhs = a * toeplitz_matrix(p1, b, b).entries + toeplitz_matrix(p2, b, b).entries
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.abs(rhs).max())


def test_analytic_symbol_is_lower_triangular():
    b = TruncatedBasis(1, 20)
    M = toeplitz_matrix(SymbolExpr.exponential(z=0.7) + Z * Z, b, b).entries
    assert np.max(np.abs(np.triu(M, 1))) < 1e-10


def test_compose_oracles():
    b = TruncatedBasis(1, 12)
    Tz, Tzb = toeplitz_matrix(Z, b, b), toeplitz_matrix(ZB, b, b)
    p = np.arange(13)
    # T_z T_zbar e_p = p e_p; T_zbar T_z e_p = (p + 1) e_p except at the truncation edge
    assert np.allclose(np.diag(compose(Tz, Tzb).entries), p, atol=1e-10)
    assert np.allclose(np.diag(compose(Tzb, Tz).entries)[:-1], p[:-1] + 1, atol=1e-10)
    I = OperatorMatrix.identity(b)
    assert np.array_equal(compose(I, Tz).entries, Tz.entries)
    other = TruncatedBasis(2, 3)
    rect = toeplitz_matrix(Z, b, other)
    assert compose(rect, Tz).shape == (other.size, b.size)
    with pytest.raises(BasisMismatchError):
        compose(Tz, rect)


def test_operator_matrix_validation():
    b = TruncatedBasis(1, 3)
    with pytest.raises(ValueError):
        OperatorMatrix(b, b, np.zeros((3, 4)))
    with pytest.raises(ValueError):
        OperatorMatrix(b, b, np.full((4, 4), np.nan))
    A = OperatorMatrix(b, TruncatedBasis(2, 3), np.arange(32.0).reshape(8, 4).astype(complex))
    assert A.adjoint().domain == A.codomain and np.array_equal(A.adjoint().entries, A.entries.T)


def test_product_of_constants_is_inclusion():
    T = toeplitz_product(ONE, ONE, 2, 2, 2, 10)
    assert T.codomain.max_analytic_degree == 10 + guard_degree(10)
    want = np.zeros(T.shape)
    for i, lab in enumerate(T.domain.index_list):
        want[T.codomain.position(*lab), i] = 1
    assert np.allclose(T.entries, want, atol=1e-12)


def test_product_order_violation():
    with pytest.raises(OrderConstraintError):
        toeplitz_product(ZB, ONE, 1, 1, 1, 10)
    with pytest.raises(OrderConstraintError):
        toeplitz_product(ONE, ONE, 1, 2, 1, 10)


def test_operator_norm_examples(rng):
    b = TruncatedBasis(1, 4)
    assert operator_norm(OperatorMatrix.identity(b)) == pytest.approx(1.0)
    assert operator_norm(np.diag([3.0, 1, 4, 1, 5])) == pytest.approx(5.0)
    A = rng.standard_normal((8, 6)) + 1j * rng.standard_normal((8, 6))
    ref = math.sqrt(np.linalg.eigvalsh(A.conj().T @ A).max())
    assert operator_norm(A, method="svd") == pytest.approx(ref, rel=1e-10)
    assert operator_norm(A, 1e-13, method="power") == pytest.approx(ref, rel=1e-10)
    assert power_iteration(A, 1e-13) == pytest.approx(ref, rel=1e-10)
    assert operator_norm(A) == pytest.approx(operator_norm(A.conj().T), rel=1e-12)
    assert operator_norm(np.zeros((3, 3))) == 0.0
    with pytest.raises(ValueError):
        operator_norm(A, method="qr")


def test_norm_equals_adjoint_norm_for_product():
    T = toeplitz_product(*exp_pair(0.4, 2.0), 1, 1, 1, 20)
    assert operator_norm(T) == pytest.approx(operator_norm(T.adjoint()), rel=1e-12)


@pytest.mark.parametrize("a,c", [(0.5, 1.0), (0.3 - 0.4j, 2.0), (1.0, 0.5j)])
def test_bounded_plateau_matches_exact_norm(a, c):
    # T_f T_conj(g) = c-bar e^{|a|^2/2} times a unitary Weyl translation on F^2_1
    scan = norm_scan(*exp_pair(a, c), 1, 1, 1, [10, 20, 40, 60])
    assert scan.plateau_detected and scan.verdict == "bounded" and scan.growth_rate is None
    assert scan.norms[-1] == pytest.approx(abs(c) * math.exp(abs(a) ** 2 / 2), rel=1e-8)


@pytest.mark.parametrize("orders", [(1, 1, 1), (2, 1, 2), (2, 2, 2), (3, 2, 3), (3, 1, 2)])
def test_plateau_dominates_berezin_supremum(orders):
    m, p, n = orders
    c = 1.5
    scan = norm_scan(*exp_pair(0.4, c), m, p, n, [8, 16, 32])
    assert scan.plateau_detected
    assert scan.norms[-1] >= c * p / n * (1 - 1e-9)


@pytest.mark.parametrize("kappa", [0.2, 0.3, 0.3j, 0.15 + 0.15j])
def test_quadratic_pairs_grow(kappa):
    # D = 80 at |kappa| = 0.3 is past the float64 cancellation floor of the entries
    f, g = SymbolExpr.exponential(z2=kappa), SymbolExpr.exponential(z2=-kappa)
    scan = norm_scan(f, g, 1, 1, 1, [10, 20, 40, 60])
    assert all(b > a for a, b in zip(scan.norms, scan.norms[1:]))
    assert not scan.plateau_detected and scan.growth_rate > 0 and scan.verdict == "unbounded"


def test_rotation_invariance_of_norms():
    # z -> e^{i t} z is unitary on F^2_1 and maps e^{kap z^2} to e^{kap e^{2it} z^2}
    kappa = 0.22
    norms = []
    for rot in (1, 1j, np.exp(0.7j)):
        f, g = SymbolExpr.exponential(z2=kappa * rot), SymbolExpr.exponential(z2=-kappa * rot)
        norms.append(operator_norm(toeplitz_product(f, g, 1, 1, 1, 30)))
    assert np.allclose(norms, norms[0], rtol=1e-8)


def test_analyse_norms_synthetic():
    s = analyse_norms([10, 20, 40, 80], [1.0, 1.5, 1.51, 1.511])
    assert s.plateau_detected and s.increments[-1] == pytest.approx(1.511 / 1.51 - 1)
    s = analyse_norms([10, 20, 30, 40], list(np.exp(0.1 * np.array([10, 20, 30, 40]))))
    assert not s.plateau_detected and s.growth_rate == pytest.approx(0.1)
    with pytest.raises(ValueError):
        norm_scan(ONE, ONE, 1, 1, 1, [10, 5, 20])
    with pytest.raises(ValueError):
        norm_scan(ONE, ONE, 1, 1, 1, [10, 20])


def test_adjoint_residual():
    assert adjoint_residual(ONE, ONE, 2, 1, 2, 20) < 1e-14
    f, g = exp_pair(0.3)
    assert adjoint_residual(f, g, 1, 1, 1, 40, guard=20) < 1e-6
    assert adjoint_residual(f, g, 1, 1, 1, 80) < 1e-6
    assert adjoint_residual(Z, ONE, 1, 1, 2, 30) < 1e-9
    # (z, zbar) satisfies the hypotheses one way round only
    with pytest.raises(OrderConstraintError):
        adjoint_residual(ONE, ZB, 1, 1, 2, 30)


def test_interior_indices():
    b = TruncatedBasis(3, 10)
    idx = interior_indices(b, 4, 2)
    assert all(b.ps[i] <= 4 and b.qs[i] < 2 for i in idx) and len(idx) == 10


def test_matrix_quadrature_failure_reports_entry():
    b = TruncatedBasis(1, 4)
    with pytest.raises(MatrixQuadratureError) as exc:
        toeplitz_matrix(lambda w: np.abs(w) ** 0.5, b, b, tol=1e-15, max_level=1)
    i, j = exc.value.entry
    assert 0 <= i < b.size and 0 <= j < b.size and exc.value.estimated_error > 0
