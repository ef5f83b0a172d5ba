"""Polar product rules for integrals against dmu(z) = (1/pi) e^{-|z|^2} dA(z).

With t = |z|^2 the measure factors as e^{-t} dt x dtheta/(2 pi).  The radial
factor uses Gauss-Laguerre nodes (optionally split at breakpoints into
Gauss-Legendre panels plus a shifted Laguerre tail), the angular factor the
uniform grid, which is exact for trigonometric polynomials of degree < A.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

_RESCALE = 1e100


class QuadratureError(RuntimeError):
    pass


class NodeEvaluationError(QuadratureError):
    """The integrand returned a non-finite value at a quadrature node."""

    def __init__(self, node, value):
        super().__init__(f"integrand is not finite at node {node!r} (value {value!r})")
        self.node = node
        self.value = value


class ConvergenceError(QuadratureError):
    """Refinement budget exhausted; carries the best value and error estimate."""

    def __init__(self, message, value=None, estimated_error=None):
        super().__init__(message)
        self.value = value
        self.estimated_error = estimated_error


def _laguerre_recurrence(t, n, collect_sum=False):
    # Rescaled L_0..L_n recurrence; returns (L_n, L_{n-1}) up to a common
    # factor, or log(sum_{k<n} L_k^2) when collect_sum is set.
    prev = np.zeros_like(t)
    cur = np.ones_like(t)
    acc = np.ones_like(t)
    log_scale = np.zeros_like(t)
    for j in range(n - 1 if collect_sum else n):
        prev, cur = cur, ((2 * j + 1 - t) * cur - j * prev) / (j + 1)
        if collect_sum:
            acc += cur * cur
        big = np.abs(cur) > _RESCALE
        if big.any():
            prev[big] /= _RESCALE
            cur[big] /= _RESCALE
            if collect_sum:
                acc[big] /= _RESCALE**2
                log_scale[big] += np.log(_RESCALE)
    if collect_sum:
        return np.log(acc) + 2 * log_scale
    return cur, prev


@lru_cache(maxsize=64)
def gauss_laguerre(n: int):
    """Nodes and weights for int_0^inf g(t) e^{-t} dt (Golub-Welsch + Newton polish).

    Weights come from the Christoffel function 1 / sum_k L_k(t)^2; nodes whose
    weight underflows to zero are dropped.
    """
    if n < 1:
        raise ValueError("need at least one node")
    k = np.arange(n, dtype=float)
    t = eigvalsh_tridiagonal(2 * k + 1, np.arange(1, n, dtype=float))
    for _ in range(2):
        ln, lnm1 = _laguerre_recurrence(t, n)
        t = t - ln * t / (n * (ln - lnm1))
    if not np.all(np.isfinite(t)) or np.any(np.diff(t) <= 0):
        raise ConvergenceError(f"Gauss-Laguerre node computation failed for n={n}")
    w = np.exp(-_laguerre_recurrence(t, n, collect_sum=True))
    keep = w > 0
    t, w = t[keep], w[keep]
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


def _split_radial(n: int, breakpoints):
    # Gauss-Legendre panels on [0, b1], [b1, b2], ... plus Laguerre tail on [b_k, inf).
    x, wx = np.polynomial.legendre.leggauss(n)
    nodes, weights = [], []
    lo = 0.0
    for hi in breakpoints:
        tt = 0.5 * (hi - lo) * (x + 1) + lo
        nodes.append(tt)
        weights.append(0.5 * (hi - lo) * wx * np.exp(-tt))
        lo = hi
    tl, wl = gauss_laguerre(n)
    nodes.append(tl + lo)
    weights.append(wl * np.exp(-lo))
    t = np.concatenate(nodes)
    w = np.concatenate(weights)
    keep = w > 0
    return t[keep], w[keep]


@dataclass(frozen=True)
class QuadratureRule:
    """Radial nodes t_i with weights for e^{-t} dt, times a uniform angular grid."""

    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    angular_count: int
    level: int = 0

    def __post_init__(self):
        if self.angular_count < 4 or self.angular_count % 2:
            raise ValueError("angular_count must be even and >= 4")
        if np.any(self.radial_weights <= 0):
            raise ValueError("radial weights must be positive")
        if np.any(np.diff(self.radial_nodes) <= 0):
            raise ValueError("radial nodes must be strictly increasing")

    @property
    def radii(self) -> np.ndarray:
        return np.sqrt(self.radial_nodes)

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.angular_count) / self.angular_count

    @property
    def nodes(self) -> np.ndarray:
        """Complex nodes, shape (radial, angular)."""
        return self.radii[:, None] * np.exp(1j * self.angles)[None, :]

    @property
    def size(self) -> int:
        return self.radial_nodes.size * self.angular_count


@lru_cache(maxsize=128)
def _cached_rule(radial_points, angular_points, breakpoints, level):
    if breakpoints:
        t, w = _split_radial(radial_points, breakpoints)
    else:
        t, w = gauss_laguerre(radial_points)
    return QuadratureRule(t, w, angular_points, level)


def build_rule(radial_points: int, angular_points: int, breakpoints=(), level: int = 0) -> QuadratureRule:
    """Product rule; ``breakpoints`` are points in t = |z|^2 where the integrand has kinks."""
    if radial_points < 2:
        raise ValueError("radial_points must be >= 2")
    if angular_points < 4 or angular_points % 2:
        raise ValueError("angular_points must be even and >= 4")
    bps = tuple(sorted(float(b) for b in breakpoints if b > 0))
    return _cached_rule(int(radial_points), int(angular_points), bps, int(level))


Integrand = Callable[[np.ndarray], np.ndarray]


def _evaluate(F, nodes, shift=0.0, width=1.0):
    pts = nodes if (shift == 0 and width == 1) else shift + width * nodes
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.broadcast_to(np.asarray(F(pts), dtype=complex), pts.shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = np.argwhere(bad)[0]
        raise NodeEvaluationError(complex(pts[tuple(i)]), complex(vals[tuple(i)]))
    return vals


def _reduce(vals, rule):
    # radial-major, ascending: angular mean per radius, then weighted radial sum
    return complex(np.dot(rule.radial_weights, vals.mean(axis=1)))


def integrate(F: Integrand, rule: QuadratureRule) -> complex:
    """Approximate int F dmu with the product rule; F must accept complex arrays."""
    return _reduce(_evaluate(F, rule.nodes), rule)


def integrate_shifted(F: Integrand, center: complex, rule: QuadratureRule, width: float = 1.0) -> complex:
    """(1/(pi s^2)) int F(center + u) exp(-|u|^2/s^2) dA(u) with s = ``width``."""
    if center == 0 and width == 1:
        return integrate(F, rule)
    return _reduce(_evaluate(F, rule.nodes, complex(center), float(width)), rule)


@dataclass(frozen=True)
class IntegrationReport:
    value: complex
    estimated_error: float
    levels_used: int


def integrate_adaptive(
    F: Integrand,
    center: complex = 0.0,
    tol: float = 1e-10,
    max_level: int = 6,
    start=(40, 64),
    width: float = 1.0,
    breakpoints=(),
) -> IntegrationReport:
    """Shifted integral with radial and angular counts doubled until two successive
    values agree to ``tol * (1 + |value|)``.

    ``levels_used`` is the level of the first rule confirmed by its refinement.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    r0, a0 = start
    prev = integrate_shifted(F, center, build_rule(r0, a0, breakpoints, 0), width)
    diff = np.inf
    for level in range(1, max_level + 1):
        rule = build_rule(r0 * 2**level, a0 * 2**level, breakpoints, level)
        cur = integrate_shifted(F, center, rule, width)
        diff = abs(cur - prev)
        if diff < tol * (1 + abs(cur)):
            return IntegrationReport(cur, float(diff), level - 1)
        prev = cur
    raise ConvergenceError(
        f"no convergence to tol={tol:g} within {max_level} refinements (last change {diff:.3g})",
        value=prev,
        estimated_error=float(diff),
    )
