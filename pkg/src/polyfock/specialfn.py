"""Laguerre and complex Hermite polynomials and the Gaussian tail integrals I_N(a)."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .quadrature import ConvergenceError
from .series import ScanSeries

_EPS = np.finfo(float).eps


def factorial(k: int) -> float:
    """k! as a float; exact up to 20!, log-gamma beyond."""
    if k < 0:
        raise ValueError("factorial of a negative integer")
    if k <= 20:
        return float(math.factorial(k))
    return math.exp(math.lgamma(k + 1))


def binom(n: int, k: int) -> float:
    if k < 0 or k > n:
        return 0.0
    if n <= 60:
        return float(math.comb(n, k))
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


@dataclass(frozen=True)
class LaguerreParams:
    degree: int
    beta: int = 1

    def __post_init__(self):
        if self.degree < 0 or self.beta < 0:
            raise ValueError("Laguerre degree and beta must be >= 0")

    def __call__(self, x):
        return laguerre(self.degree, x, self.beta)


@dataclass(frozen=True)
class HermiteIndex:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError("Hermite indices must be >= 0")


def laguerre_sum(k: int, x, beta: int = 1):
    """Explicit sum  sum_j (-1)^j C(k+beta, k-j) x^j / j!."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for j in range(k, -1, -1):  # Horner in x
        acc = acc * x + (-1) ** j * binom(k + beta, k - j) / factorial(j)
    return acc if acc.ndim else float(acc)


def laguerre(k: int, x, beta: int = 1):
    """Generalized Laguerre polynomial L^beta_k evaluated elementwise.

    Three-term recurrence; unlike the explicit sum it does not lose digits
    to cancellation for large x.
    """
    if k < 0 or beta < 0:
        raise ValueError("Laguerre degree and beta must be >= 0")
    x = np.asarray(x, dtype=float)
    if k == 0:
        out = np.ones_like(x)
        return out if out.ndim else float(out)
    prev = np.ones_like(x)
    cur = 1.0 + beta - x
    for j in range(1, k):
        prev, cur = cur, ((2 * j + beta + 1 - x) * cur - (j + beta) * prev) / (j + 1)
    return cur if cur.ndim else float(cur)


def complex_hermite(p: int, q: int, z):
    """Complex Hermite polynomial H_{p,q}(z, conj z) via its Laguerre closed form."""
    if p < 0 or q < 0:
        raise ValueError("Hermite indices must be >= 0")
    z = np.asarray(z, dtype=complex)
    if p < q:
        return np.conj(complex_hermite(q, p, z))
    t = (z * z.conj()).real
    out = (-1) ** q * factorial(q) * z ** (p - q) * laguerre(q, t, p - q)
    return out if out.ndim else complex(out)


def scaled_tail_integral(N: int, a):
    """I_N(a) * exp(-a^2/2), from the exact two-term recursion.

    Seeds: I_0 = e^{a^2/2} sqrt(pi/2) erfc(-a/sqrt 2) and I_1 = 1 + a I_0;
    then I_N = (N-1) I_{N-2} + a I_{N-1} (integration by parts).
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    a = np.asarray(a, dtype=float)
    j0 = np.sqrt(np.pi / 2) * erfc(-a / np.sqrt(2.0))
    if N == 0:
        return j0 if j0.ndim else float(j0)
    j1 = np.exp(-0.5 * a * a) + a * j0
    prev, cur = j0, j1
    for k in range(2, N + 1):
        prev, cur = cur, (k - 1) * prev + a * cur
    return cur if cur.ndim else float(cur)


def gaussian_tail_integral(N: int, a: float, tol: float = 1e-12) -> float:
    """I_N(a) = int_0^inf r^N exp(-r^2/2 + r a) dr for a >= 0.

    All recursion terms are positive for a >= 0, so the relative rounding
    error is bounded by about 4(N+1) ulp; a ``tol`` below that raises.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a < 0:
        raise ValueError("a must be >= 0")
    achievable = 4 * (N + 1) * _EPS
    if tol < achievable:
        raise ConvergenceError(
            f"relative tolerance {tol:g} below the recursion's accuracy {achievable:g}",
            value=None,
            estimated_error=achievable,
        )
    return float(scaled_tail_integral(N, a) * math.exp(0.5 * a * a))


def lemma21_ratio_scan(N: int, a_grid) -> ScanSeries:
    """Ratios I_N(a) / ((1+a)^N e^{a^2/2}) over ``a_grid``; ``.sup`` is an empirical A(N)."""
    a = np.asarray(a_grid, dtype=float)
    if a.size == 0 or np.any(a < 0):
        raise ValueError("a_grid must be nonempty with entries >= 0")
    ratio = scaled_tail_integral(N, a) / (1.0 + a) ** N
    return ScanSeries(x=a, values=np.atleast_1d(ratio), name=f"I_{N} ratio", meta={"N": N})
