"""Truncated Toeplitz operators T^n_phi h = P_n(phi h) as matrices between truncated bases."""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .fock import TruncatedBasis
from .quadrature import ConvergenceError, build_rule, _evaluate
from .symbols import SymbolExpr, check_orders

SVD_MAX_SIZE = 2000
PLATEAU_THRESHOLD = 0.02


class BasisMismatchError(ValueError):
    pass


class MatrixQuadratureError(ConvergenceError):
    def __init__(self, message, entry, value=None, estimated_error=None):
        super().__init__(message, value, estimated_error)
        self.entry = entry


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix of an operator from span(domain) into span(codomain)."""

    domain: TruncatedBasis
    codomain: TruncatedBasis
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (self.codomain.size, self.domain.size):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match "
                f"({self.codomain.size}, {self.domain.size})"
            )
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("operator matrix has non-finite entries")

    @property
    def shape(self):
        return self.entries.shape

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.codomain, self.domain, self.entries.conj().T)

    @classmethod
    def identity(cls, basis: TruncatedBasis) -> "OperatorMatrix":
        return cls(basis, basis, np.eye(basis.size, dtype=complex))


def _start_sizes(phi, domain, codomain):
    # Exact for polynomial symbols: the integrand is a polynomial of |z|-degree
    # P and angular frequency <= P, so R > P/4 radial and A > P angular nodes suffice.
    sym_deg = phi.polynomial_degree if isinstance(phi, SymbolExpr) else 0
    P = (
        domain.max_analytic_degree + domain.order_n - 1
        + codomain.max_analytic_degree + codomain.order_n - 1
        + sym_deg
    )
    radial = max(32, P // 4 + 16)
    angular = max(64, 1 << math.ceil(math.log2(P + 17)))
    return radial, angular


def _assemble(phi, domain, codomain, rule):
    r = rule.radii
    sw = np.sqrt(rule.radial_weights)
    n_q = max(domain.order_n, codomain.order_n)
    p_max = max(domain.max_analytic_degree, codomain.max_analytic_degree)
    table = kernels.radial_table(r, n_q, p_max) * sw[:, None, None]
    b_dom = np.ascontiguousarray(table[:, domain.qs, domain.ps])
    b_cod = np.ascontiguousarray(table[:, codomain.qs, codomain.ps])
    values = _evaluate(phi, rule.nodes)
    phi_hat = np.fft.fft(values, axis=1) / rule.angular_count
    return kernels.assemble(b_cod, b_dom, codomain.frequencies, domain.frequencies, phi_hat)


def toeplitz_matrix(
    phi,
    domain: TruncatedBasis,
    codomain: TruncatedBasis,
    tol: float = 1e-10,
    max_level: int = 4,
) -> OperatorMatrix:
    """Entries <phi e_i, e_j> = int phi e_i conj(e_j) dmu, for e_i in domain, e_j in codomain.

    The whole matrix is recomputed with doubled radial and angular node counts
    until the largest entry change is below tol * max(1, max |entry|).
    """
    r0, a0 = _start_sizes(phi, domain, codomain)
    prev = _assemble(phi, domain, codomain, build_rule(r0, a0))
    for level in range(1, max_level + 1):
        cur = _assemble(phi, domain, codomain, build_rule(r0 * 2**level, a0 * 2**level, level=level))
        delta = np.abs(cur - prev)
        scale = max(1.0, float(np.abs(cur).max()))
        if delta.max() <= tol * scale:
            return OperatorMatrix(domain, codomain, cur)
        prev = cur
    j, i = np.unravel_index(int(np.argmax(delta)), delta.shape)
    raise MatrixQuadratureError(
        f"entry (i={i}, j={j}) did not converge to tol={tol:g} "
        f"(last change {delta[j, i]:.3g}, scale {scale:.3g})",
        entry=(int(i), int(j)),
        value=prev,
        estimated_error=float(delta.max()),
    )


def compose(F: OperatorMatrix, G: OperatorMatrix) -> OperatorMatrix:
    """F after G."""
    if F.domain != G.codomain:
        raise BasisMismatchError(f"cannot compose: {F.domain} != {G.codomain}")
    return OperatorMatrix(G.domain, F.codomain, F.entries @ G.entries)


def guard_degree(D: int) -> int:
    return math.ceil(D / 2)


def toeplitz_product(
    f: SymbolExpr,
    g: SymbolExpr,
    m: int,
    p: int,
    n: int,
    D: int,
    tol: float = 1e-10,
    buffer: Optional[int] = None,
    check: bool = True,
) -> OperatorMatrix:
    """T^m_f T^p_{conj g} restricted to basis(n, D), landing in basis(m, D + buffer).

    The intermediate F^2_p truncation carries ``buffer`` (default ceil(D/2))
    extra degrees so the inner projection does not bias the product.
    ``check=False`` skips the order hypotheses (the matrices are still defined).
    """
    if check:
        check_orders(f, g, m, p, n)
    b = guard_degree(D) if buffer is None else buffer
    mid = TruncatedBasis(p, D + b)
    inner = toeplitz_matrix(g.conjugate(), TruncatedBasis(n, D), mid, tol)
    outer = toeplitz_matrix(f, mid, TruncatedBasis(m, D + b), tol)
    return compose(outer, inner)


def power_iteration(A: np.ndarray, tol: float = 1e-12, max_iter: int = 10000, seed: int = 0) -> float:
    """Largest singular value of A from power iteration on A^* A."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        w = A.conj().T @ (A @ v)
        lam = np.linalg.norm(w)
        if lam == 0:
            return 0.0
        v = w / lam
        new = math.sqrt(lam)
        if abs(new - sigma) <= tol * new:
            return new
        sigma = new
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps", value=sigma)


def operator_norm(M, tol: float = 1e-12, method: str = "auto") -> float:
    """Spectral norm; full SVD up to SVD_MAX_SIZE, power iteration beyond."""
    A = M.entries if isinstance(M, OperatorMatrix) else np.asarray(M)
    if A.size == 0:
        return 0.0
    if method == "auto":
        method = "svd" if max(A.shape) <= SVD_MAX_SIZE else "power"
    if method == "svd":
        return float(np.linalg.svd(A, compute_uv=False)[0])
    if method == "power":
        return power_iteration(A, tol)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class NormScan:
    degrees: list
    norms: list
    plateau_detected: bool
    growth_rate: Optional[float]

    def __post_init__(self):
        if len(self.degrees) != len(self.norms):
            raise ValueError("degrees and norms must have equal length")

    @property
    def increments(self) -> list:
        return [b / a - 1 for a, b in zip(self.norms, self.norms[1:])]

    @property
    def verdict(self) -> str:
        return "bounded" if self.plateau_detected else "unbounded"


def analyse_norms(degrees, norms, plateau_threshold: float = PLATEAU_THRESHOLD) -> NormScan:
    inc = [abs(b / a - 1) for a, b in zip(norms, norms[1:])]
    plateau = len(inc) >= 2 and all(x < plateau_threshold for x in inc[-2:])
    rate = None
    if not plateau:
        half = max(2, len(degrees) // 2)
        x = np.asarray(degrees[-half:], dtype=float)
        y = np.log(np.asarray(norms[-half:], dtype=float))
        rate = float(np.polyfit(x, y, 1)[0])
    return NormScan(list(degrees), list(norms), plateau, rate)


def norm_scan(
    f: SymbolExpr,
    g: SymbolExpr,
    m: int,
    p: int,
    n: int,
    D_list,
    tol: float = 1e-10,
    plateau_threshold: float = PLATEAU_THRESHOLD,
    check: bool = True,
) -> NormScan:
    """Norms of the truncated product over ascending D; plateau vs log-linear growth."""
    D_list = list(D_list)
    if len(D_list) < 3 or any(b <= a for a, b in zip(D_list, D_list[1:])):
        raise ValueError("D_list must be ascending with at least 3 entries")
    if check:
        check_orders(f, g, m, p, n)
    norms = [operator_norm(toeplitz_product(f, g, m, p, n, D, tol, check=False)) for D in D_list]
    return analyse_norms(D_list, norms, plateau_threshold)


def interior_indices(basis: TruncatedBasis, max_p: int, max_q: int) -> np.ndarray:
    return np.flatnonzero((basis.ps <= max_p) & (basis.qs < max_q))


def adjoint_residual(
    f: SymbolExpr,
    g: SymbolExpr,
    m: int,
    p: int,
    n: int,
    D: int,
    tol: float = 1e-10,
    guard: Optional[int] = None,
) -> float:
    """Interior defect of (T^m_f T^p_{conj g})^* = T^m_g T^p_{conj f} on the truncation.

    Compares <T e_i, e_j> with conj(<T' e_j, e_i>) for indices with p-degree
    <= D/2 and q < min(m, n), where both sides are free of truncation effects.
    """
    # both orderings must satisfy the hypotheses before anything is computed
    check_orders(f, g, m, p, n)
    check_orders(g, f, m, p, n)
    T = toeplitz_product(f, g, m, p, n, D, tol, guard)
    Tp = toeplitz_product(g, f, m, p, n, D, tol, guard)
    qmax = min(m, n)
    dom = interior_indices(T.domain, D // 2, qmax)
    # map the same (p, q) labels between the n- and m-bases
    labels = [T.domain.index_list[i] for i in dom]
    cod_pos = [T.codomain.position(*lab) for lab in labels]
    dom_pos_p = [Tp.domain.position(*lab) for lab in labels]
    cod_pos_p = [Tp.codomain.position(*lab) for lab in labels]
    lhs = T.entries[np.ix_(cod_pos, dom)]
    rhs = Tp.entries[np.ix_(cod_pos_p, dom_pos_p)].conj().T
    return float(np.abs(lhs - rhs).max())
