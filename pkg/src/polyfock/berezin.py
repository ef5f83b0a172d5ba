"""Berezin transforms, the Sarason field, the map S(z, w), majoration and Schur-test fields."""
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_genlaguerre

from ._parallel import ordered_map
from .fock import TruncatedBasis, normalized_kernel
from .quadrature import integrate_adaptive
from .specialfn import binom, factorial, gaussian_tail_integral, laguerre
from .symbols import SymbolExpr, check_orders, membership
from .toeplitz import OperatorMatrix, toeplitz_product


@dataclass(frozen=True, eq=False)
class BerezinField:
    grid: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field has non-finite values")

    def spread(self) -> float:
        """max/min - 1 of |values|: relative deviation from a constant field."""
        a = np.abs(self.values)
        return float(a.max() / a.min() - 1)


@dataclass(frozen=True)
class GrowthFit:
    r: np.ndarray
    log_values: np.ndarray
    fitted_rate: float
    fit_residual: float

    def __post_init__(self):
        if len(self.r) < 4:
            raise ValueError("a growth fit needs at least 4 points")
        if self.fit_residual < 0:
            raise ValueError("fit_residual must be >= 0")


def square_grid(extent: float = 2.0, spacing: float = 0.25, radius=None) -> np.ndarray:
    """Points x + iy with |x|, |y| <= extent on a uniform lattice; optionally cut to |z| <= radius."""
    k = int(round(extent / spacing))
    axis = spacing * np.arange(-k, k + 1)
    z = (axis[None, :] + 1j * axis[:, None]).ravel()
    if radius is not None:
        z = z[np.abs(z) <= radius + 1e-12]
    return z


def _as_callable(phi):
    return phi if callable(phi) else (lambda w: phi)


# -- Berezin transform of functions ---------------------------------------------------


def berezin_function(phi, n: int, z: complex, tol: float = 1e-10, method: str = "centered", max_level: int = 6) -> complex:
    """B_n phi(z) = int phi |k_z|^2 dmu.

    ``centered``: (1/(n pi)) int phi(z+u) L^1_{n-1}(|u|^2)^2 e^{-|u|^2} dA(u) on the
    rule shifted to z.  ``direct``: the defining integral on the unshifted rule.
    """
    phi = _as_callable(phi)
    if method == "centered":
        def integrand(w):
            d = w - z
            return phi(w) * laguerre(n - 1, (d * d.conj()).real, 1) ** 2 / n

        return integrate_adaptive(integrand, z, tol, max_level).value
    if method == "direct":
        def integrand(w):
            return phi(w) * np.abs(normalized_kernel(n, z, w)) ** 2

        return integrate_adaptive(integrand, 0.0, tol, max_level).value
    raise ValueError(f"unknown method {method!r}")


def berezin_field(phi, n: int, grid, tol: float = 1e-10, threads=None, method: str = "centered") -> np.ndarray:
    grid = np.asarray(grid, dtype=complex)
    vals = ordered_map(lambda z: berezin_function(phi, n, z, tol, method), grid, threads)
    return np.asarray(vals)


# -- Berezin transform of operators --------------------------------------------------


def kernel_coefficients(basis: TruncatedBasis, n: int, z: complex) -> np.ndarray:
    """Coefficients of k^n_z in ``basis`` (zero on indices with q >= n)."""
    vals = basis.values(z) * np.exp(-0.5 * abs(z) ** 2) / np.sqrt(n)
    return np.where(basis.qs < n, vals.conj(), 0)


def berezin_operator(M: OperatorMatrix, n: int, z: complex) -> complex:
    """<M k_z, k_z> with k_z = k^n_z truncated to M's domain and codomain."""
    if M.domain.order_n != n:
        raise ValueError(f"domain has order {M.domain.order_n}, expected {n}")
    v_dom = kernel_coefficients(M.domain, n, z)
    v_cod = kernel_coefficients(M.codomain, n, z)
    return complex(v_cod.conj() @ M.entries @ v_dom)


def berezin_identity_residual(f, g, m, p, n, D, grid, tol: float = 1e-10) -> float:
    """max over grid |B_n T(z) - (p/n) f(z) conj g(z)| for T = T^m_f T^p_{conj g}."""
    T = toeplitz_product(f, g, m, p, n, D, tol)
    grid = np.asarray(grid, dtype=complex)
    got = np.array([berezin_operator(T, n, z) for z in grid])
    want = (p / n) * f(grid) * np.conj(g(grid))
    return float(np.abs(got - want).max())


# -- Sarason field ---------------------------------------------------------------------


def sarason_field(f: SymbolExpr, g: SymbolExpr, p: int, grid, tol: float = 1e-10, threads=None) -> BerezinField:
    """B_p(|f|^2) B_p(|g|^2) on the grid."""
    grid = np.asarray(grid, dtype=complex)
    bf = berezin_field(f.abs_squared(), p, grid, tol, threads).real
    bg = berezin_field(g.abs_squared(), p, grid, tol, threads).real
    values = bf * bg
    meta = {"p": p, "f": repr(f), "g": repr(g)}
    orders = (membership(f).min_order, membership(g).min_order)
    if all(o is not None and o <= p for o in orders):
        # pointwise floor from the majoration inequality with m = n = p
        floor = np.abs(f(grid) * g(grid)) ** 2 * (p / (2 * p - 1)) ** 2
        meta["majoration_floor_ok"] = bool(np.all(values >= floor * (1 - 1e-9)))
    return BerezinField(grid, values, meta)


# -- the map S(z, w) ---------------------------------------------------------------------


def s_map(f: SymbolExpr, g: SymbolExpr, m: int, p: int, n: int, z, w):
    """S(z, w) = <T k^n_z, k^n_w> = sqrt(p/n) f(w) conj g(z) K_p(w,z) / sqrt(K_p(z,z) K_n(w,w))."""
    check_orders(f, g, m, p, n)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    d = w - z
    # K_p(w,z)/sqrt(K_p(z,z)K_n(w,w)) with the exponentials merged
    expo = w * z.conj() - 0.5 * (np.abs(z) ** 2 + np.abs(w) ** 2)
    ratio = laguerre(p - 1, (d * d.conj()).real, 1) * np.exp(expo) / np.sqrt(p * n)
    out = np.sqrt(p / n) * f(w) * np.conj(g(z)) * ratio
    return out if np.ndim(out) else complex(out)


def s_growth_fit(f, g, m, p, n, a2: complex, r_range=None) -> GrowthFit:
    """Log-linear fit of |S(r, r + conj a2)| over the upper half of ``r_range``."""
    r = np.linspace(2.0, 8.0, 25) if r_range is None else np.asarray(r_range, dtype=float)
    if len(r) < 8 or np.ptp(r) == 0:
        raise ValueError("degenerate fit: need at least 8 distinct r values")
    logs = np.log(np.abs(s_map(f, g, m, p, n, r.astype(complex), r + np.conj(a2))))
    half = len(r) // 2
    x, y = r[half:], logs[half:]
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    resid = float(np.sqrt(res[0] / len(x))) if len(res) else 0.0
    return GrowthFit(x, y, float(coef[0]), resid)


# -- majoration ----------------------------------------------------------------------------


def majoration_slack(h: SymbolExpr, m: int, n: int, grid, tol: float = 1e-10, threads=None) -> float:
    """min over grid of ((m+n-1)/m) B_m(|h|^2)(z) - |h(z)|^2."""
    v = membership(h)
    if not v.is_polyanalytic or v.min_order > n:
        raise ValueError(f"h must be polyanalytic of order <= {n}")
    if not v.square_integrable:
        raise ValueError("h must be square-integrable")
    grid = np.asarray(grid, dtype=complex)
    b = berezin_field(h.abs_squared(), m, grid, tol, threads).real
    return float(np.min((m + n - 1) / m * b - np.abs(h(grid)) ** 2))


# -- Schur test kernel ------------------------------------------------------------------------


def _laguerre_roots(p: int) -> np.ndarray:
    if p <= 1:
        return np.array([])
    return roots_genlaguerre(p - 1, 1)[0]


def schur_value(c: complex, p: int, z: complex, tol: float = 1e-10, max_level: int = 5) -> float:
    """H_c(z) = (1/pi) int |K_p(z,w)| e^{Re c(z-w)} e^{-(|z|^2+|w|^2)/2} dA(w).

    Integrated on a rule centred at z with Gaussian width sqrt(2), with radial
    breakpoints at the zeros of L^1_{p-1}(|w-z|^2).
    """
    width2 = 2.0

    def integrand(w):
        d = w - z
        t = (d * d.conj()).real
        # log of |K_p| e^{Re c(z-w)} e^{-(|z|^2+|w|^2)/2} e^{|w-z|^2/2}, then exponentiated once
        expo = (z.conjugate() * w).real + (c * (z - w)).real - 0.5 * (abs(z) ** 2 + np.abs(w) ** 2) + 0.5 * t
        return width2 * np.abs(laguerre(p - 1, t, 1)) * np.exp(expo)

    bps = tuple(_laguerre_roots(p) / width2)
    rep = integrate_adaptive(integrand, complex(z), tol, max_level, width=np.sqrt(width2), breakpoints=bps)
    return float(rep.value.real)


def schur_field(c: complex, p: int, grid, tol: float = 1e-10, threads=None) -> BerezinField:
    grid = np.asarray(grid, dtype=complex)
    vals = np.asarray(ordered_map(lambda z: schur_value(complex(c), p, z, tol), grid, threads))
    return BerezinField(grid, vals, {"c": complex(c), "p": p})


def schur_bound_estimate(c: complex, p: int) -> float:
    """sum_{j<p} (2/j!) C(p, p-1-j) I_{2j+1}(|c|)."""
    a = abs(c)
    return float(sum(2 / factorial(j) * binom(p, p - 1 - j) * gaussian_tail_integral(2 * j + 1, a) for j in range(p)))
