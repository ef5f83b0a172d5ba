"""Truncated orthonormal bases of F^2_n, reproducing kernels and projection."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .quadrature import integrate_adaptive
from .series import ScanSeries
from .specialfn import laguerre


@dataclass(frozen=True)
class TruncatedBasis:
    """Basis e_{p,q} = H_{p,q} / sqrt(p! q!) of F^2_n with q < n and p <= D.

    Indices are ordered q-major, then p.
    """

    order_n: int
    max_analytic_degree: int

    def __post_init__(self):
        if self.order_n < 1:
            raise ValueError("order_n must be >= 1")
        if self.max_analytic_degree < 0:
            raise ValueError("max_analytic_degree must be >= 0")

    @property
    def size(self) -> int:
        return self.order_n * (self.max_analytic_degree + 1)

    @cached_property
    def index_list(self) -> tuple:
        return tuple((p, q) for q in range(self.order_n) for p in range(self.max_analytic_degree + 1))

    @cached_property
    def ps(self) -> np.ndarray:
        return np.tile(np.arange(self.max_analytic_degree + 1), self.order_n)

    @cached_property
    def qs(self) -> np.ndarray:
        return np.repeat(np.arange(self.order_n), self.max_analytic_degree + 1)

    @property
    def frequencies(self) -> np.ndarray:
        """Angular frequency p - q of each basis function."""
        return self.ps - self.qs

    def position(self, p: int, q: int) -> int:
        if not (0 <= p <= self.max_analytic_degree and 0 <= q < self.order_n):
            raise IndexError(f"index ({p}, {q}) not in basis")
        return q * (self.max_analytic_degree + 1) + p

    def radial_values(self, r) -> np.ndarray:
        """Radial parts, shape (len(r), size)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        table = kernels.radial_table(r, self.order_n, self.max_analytic_degree)
        return table[:, self.qs, self.ps]

    def values(self, z) -> np.ndarray:
        """All basis functions at the points z, shape z.shape + (size,)."""
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        rad = self.radial_values(np.abs(flat))
        phase = np.exp(1j * np.outer(np.angle(flat), self.frequencies))
        return (rad * phase).reshape(z.shape + (self.size,))


def basis_function(basis: TruncatedBasis, i: int, z):
    if not 0 <= i < basis.size:
        raise IndexError(f"basis index {i} out of range (size {basis.size})")
    out = basis.values(z)[..., i]
    return out if out.ndim else complex(out)


def kernel(n: int, z, w):
    """K_n(z, w) = L^1_{n-1}(|z-w|^2) exp(z conj w)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    d = z - w
    out = laguerre(n - 1, (d * d.conj()).real, 1) * np.exp(z * w.conj())
    return out if np.ndim(out) else complex(out)


def kernel_from_basis(basis: TruncatedBasis, z, w):
    out = np.sum(basis.values(z) * basis.values(w).conj(), axis=-1)
    return out if np.ndim(out) else complex(out)


def normalized_kernel(n: int, z, w):
    """k_z(w) = K_n(w, z) / sqrt(K_n(z, z))."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    d = w - z
    # exp(w conj z - |z|^2/2) combined in one exponent
    expo = w * z.conj() - 0.5 * (z * z.conj()).real
    out = laguerre(n - 1, (d * d.conj()).real, 1) * np.exp(expo) / np.sqrt(n)
    return out if np.ndim(out) else complex(out)


def project(n: int, phi, z: complex, tol: float = 1e-10, max_level: int = 6) -> complex:
    """P_n phi(z) = int K_n(z, w) phi(w) dmu(w)."""
    def integrand(w):
        return kernel(n, z, w) * phi(w)

    return integrate_adaptive(integrand, 0.0, tol, max_level).value


@dataclass(frozen=True, eq=False)
class FockVector:
    basis: TruncatedBasis
    coefficients: np.ndarray

    def __post_init__(self):
        if len(self.coefficients) != self.basis.size:
            raise ValueError("coefficient length does not match basis size")

    @classmethod
    def random(cls, basis: TruncatedBasis, rng) -> "FockVector":
        c = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
        return cls(basis, c / np.sqrt(2 * basis.size))

    def __call__(self, z):
        out = self.basis.values(z) @ self.coefficients
        return out if np.ndim(out) else complex(out)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))


def pointwise_bound_report(vec: FockVector, sample_points) -> ScanSeries:
    """|f(z)| / (sqrt(n) ||f|| e^{|z|^2/2}) at each sample point (all <= 1 in F^2_n)."""
    z = np.asarray(sample_points, dtype=complex)
    n = vec.basis.order_n
    # scaling e^{-|z|^2/2} folded before the modulus to keep it finite
    ratio = np.abs(vec(z)) * np.exp(-0.5 * np.abs(z) ** 2) / (np.sqrt(n) * vec.norm())
    return ScanSeries(x=z, values=np.atleast_1d(ratio), name="pointwise bound ratio", meta={"n": n})
