import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyfock.fock import (
    FockVector,
    TruncatedBasis,
    basis_function,
    kernel,
    kernel_from_basis,
    normalized_kernel,
    pointwise_bound_report,
    project,
)
from polyfock.quadrature import build_rule, integrate
from polyfock.specialfn import complex_hermite, factorial

Z = np.array([0.0, 0.4 - 0.3j, -1.2 + 0.5j, 1.9j, -2.0 - 1.0j])


def test_basis_layout():
    b = TruncatedBasis(3, 4)
    assert b.size == 15 and len(b.index_list) == 15
    assert b.index_list[:6] == ((0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (0, 1))
    for i, (p, q) in enumerate(b.index_list):
        assert b.position(p, q) == i and b.ps[i] == p and b.qs[i] == q
    with pytest.raises(IndexError):
        b.position(5, 0)
    with pytest.raises(IndexError):
        b.position(0, 3)
    with pytest.raises(ValueError):
        TruncatedBasis(0, 3)
    with pytest.raises(ValueError):
        TruncatedBasis(1, -1)


def test_basis_matches_hermite_normalisation():
    b = TruncatedBasis(4, 12)
    vals = b.values(Z)
    for i, (p, q) in enumerate(b.index_list):
        want = complex_hermite(p, q, Z) / np.sqrt(factorial(p) * factorial(q))
        assert np.allclose(vals[:, i], want, rtol=1e-11, atol=1e-13)
    assert basis_function(b, 7, Z[1]) == pytest.approx(vals[1, 7])
    with pytest.raises(IndexError):
        basis_function(b, b.size, 0.0)


def test_basis_is_orthonormal():
    b = TruncatedBasis(3, 15)
    rule = build_rule(80, 128)
    V = b.values(rule.nodes)  # (R, A, size)
    # radial-major reduction of V_i conj(V_j)
    G = np.einsum("r,raj,rai->ij", rule.radial_weights, V.conj(), V) / rule.angular_count
    assert np.allclose(G, np.eye(b.size), atol=1e-11)


def test_high_degree_values_are_finite():
    b = TruncatedBasis(2, 300)
    r = np.array([0.0, 5.0, 15.0, 25.0])
    diag = np.sum(np.abs(b.values(r)) ** 2, axis=-1)
    assert np.all(np.isfinite(diag))
    # truncated kernel diagonal never exceeds n e^{|z|^2}
    assert np.all(diag <= 2 * np.exp(r**2) * (1 + 1e-12))


def test_kernel_diagonal_and_symmetry():
    for n in (1, 2, 4):
        assert np.allclose(kernel(n, Z, Z), n * np.exp(np.abs(Z) ** 2))
        w = Z[::-1]
        assert np.allclose(kernel(n, Z, w), np.conj(kernel(n, w, Z)))
    assert kernel(1, 0.3 + 0.1j, -0.7j) == pytest.approx(np.exp((0.3 + 0.1j) * np.conj(-0.7j)))


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(1, 4),
    zr=st.floats(-1.5, 1.5), zi=st.floats(-1.5, 1.5),
    wr=st.floats(-1.5, 1.5), wi=st.floats(-1.5, 1.5),
)
def test_kernel_equals_basis_sum(n, zr, zi, wr, wi):
    z, w = complex(zr, zi), complex(wr, wi)
    got = kernel_from_basis(TruncatedBasis(n, 50), z, w)
    scale = n * np.exp((abs(z) ** 2 + abs(w) ** 2) / 2)
    assert abs(got - kernel(n, z, w)) < 1e-12 * scale


def test_normalized_kernel_is_unit_and_peaks():
    rule = build_rule(80, 128)
    for n in (1, 3):
        z = 0.7 - 0.4j
        nrm = integrate(lambda w: np.abs(normalized_kernel(n, z, w)) ** 2, rule)
        assert nrm == pytest.approx(1.0, rel=1e-11)
        assert normalized_kernel(n, z, z) == pytest.approx(np.sqrt(n) * np.exp(abs(z) ** 2 / 2))


def test_parseval(rng):
    b = TruncatedBasis(3, 10)
    vec = FockVector.random(b, rng)
    rule = build_rule(60, 64)
    assert integrate(lambda w: np.abs(vec(w)) ** 2, rule).real == pytest.approx(vec.norm() ** 2, rel=1e-11)


def test_projection_reproduces_and_annihilates(rng):
    vec = FockVector.random(TruncatedBasis(2, 6), rng)
    z = 0.5 + 0.9j
    assert project(2, vec, z) == pytest.approx(vec(z), abs=1e-9)
    # zbar is orthogonal to the analytic space but lies in F^2_2
    assert abs(project(1, np.conj, z)) < 1e-9
    assert project(2, np.conj, z) == pytest.approx(np.conj(z), abs=1e-9)
    # P_1 |w|^2 = 1 (the analytic part of |w|^2 = H_{1,1} + 1)
    assert project(1, lambda w: np.abs(w) ** 2, z) == pytest.approx(1.0, abs=1e-9)


def test_pointwise_bound_sharp_for_kernel():
    n, z0, D = 2, 1.1 - 0.3j, 60
    b = TruncatedBasis(n, D)
    vec = FockVector(b, b.values(z0).conj())  # truncated K_n(., z0)
    ratio = pointwise_bound_report(vec, [z0]).values[0]
    assert ratio == pytest.approx(1.0, abs=1e-12)
    assert ratio <= 1 + 1e-12


def test_pointwise_bound_random(rng):
    vec = FockVector.random(TruncatedBasis(3, 15), rng)
    rep = pointwise_bound_report(vec, Z * 2)
    assert rep.values.shape == Z.shape and np.all(rep.values <= 1 + 1e-10)


def test_fock_vector_validation():
    with pytest.raises(ValueError):
        FockVector(TruncatedBasis(1, 3), np.zeros(3))
