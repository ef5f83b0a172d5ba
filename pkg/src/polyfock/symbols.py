"""Symbols c z^a zbar^b exp(lam z + kap z^2 + mu zbar + nu zbar^2) and their sums.

The grammar is closed under products and conjugation, which is enough to
build f, g, |f|^2 and every integrand used for Toeplitz and Berezin
computations.
"""
import cmath
import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class SymbolTerm:
    coeff: complex
    pow_z: int = 0
    pow_zbar: int = 0
    exp_z: complex = 0j
    exp_z2: complex = 0j
    exp_zbar: complex = 0j
    exp_zbar2: complex = 0j

    def __post_init__(self):
        if self.pow_z < 0 or self.pow_zbar < 0:
            raise ValueError("powers must be >= 0")
        for name in ("coeff", "exp_z", "exp_z2", "exp_zbar", "exp_zbar2"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def key(self) -> tuple:
        return (self.pow_z, self.pow_zbar, self.exp_z, self.exp_z2, self.exp_zbar, self.exp_zbar2)

    @property
    def has_exponential(self) -> bool:
        return any((self.exp_z, self.exp_z2, self.exp_zbar, self.exp_zbar2))

    def exponent(self, z, zb):
        return self.exp_z * z + self.exp_z2 * z * z + self.exp_zbar * zb + self.exp_zbar2 * zb * zb

    def __call__(self, z):
        zb = np.conj(z)
        out = self.coeff * z**self.pow_z * zb**self.pow_zbar
        if self.has_exponential:
            out = out * np.exp(self.exponent(z, zb))
        return out

    def conjugate(self) -> "SymbolTerm":
        return SymbolTerm(
            self.coeff.conjugate(),
            self.pow_zbar,
            self.pow_z,
            self.exp_zbar.conjugate(),
            self.exp_zbar2.conjugate(),
            self.exp_z.conjugate(),
            self.exp_z2.conjugate(),
        )

    def __mul__(self, other: "SymbolTerm") -> "SymbolTerm":
        return SymbolTerm(
            self.coeff * other.coeff,
            self.pow_z + other.pow_z,
            self.pow_zbar + other.pow_zbar,
            self.exp_z + other.exp_z,
            self.exp_z2 + other.exp_z2,
            self.exp_zbar + other.exp_zbar,
            self.exp_zbar2 + other.exp_zbar2,
        )


class SymbolExpr:
    """Finite sum of SymbolTerms, collected on the full key; no terms means zero."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        collected = {}
        for t in terms:
            collected[t.key] = collected.get(t.key, 0j) + t.coeff
        self.terms = tuple(
            SymbolTerm(c, *key) for key, c in collected.items() if c != 0
        )

    # constructors
    @classmethod
    def constant(cls, c=1.0) -> "SymbolExpr":
        return cls([SymbolTerm(c)])

    @classmethod
    def monomial(cls, pow_z=0, pow_zbar=0, coeff=1.0) -> "SymbolExpr":
        return cls([SymbolTerm(coeff, pow_z, pow_zbar)])

    @classmethod
    def exponential(cls, z=0j, z2=0j, zbar=0j, zbar2=0j, coeff=1.0) -> "SymbolExpr":
        """coeff * exp(z*Z + z2*Z^2 + zbar*conj(Z) + zbar2*conj(Z)^2)."""
        return cls([SymbolTerm(coeff, 0, 0, z, z2, zbar, zbar2)])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for t in self.terms:
            out = out + t(z)
        return out if out.ndim else complex(out)

    def conjugate(self) -> "SymbolExpr":
        return SymbolExpr(t.conjugate() for t in self.terms)

    def __mul__(self, other):
        if not isinstance(other, SymbolExpr):
            other = SymbolExpr.constant(other)
        return SymbolExpr(a * b for a in self.terms for b in other.terms)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, SymbolExpr):
            other = SymbolExpr.constant(other)
        return SymbolExpr(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, SymbolExpr) else -complex(other))

    def __eq__(self, other):
        return isinstance(other, SymbolExpr) and set(self.terms) == set(other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms))

    def abs_squared(self) -> "SymbolExpr":
        return self * self.conjugate()

    @property
    def polynomial_degree(self) -> int:
        """Largest total power a + b (ignores exponential factors)."""
        return max((t.pow_z + t.pow_zbar for t in self.terms), default=0)

    @property
    def has_exponential(self) -> bool:
        return any(t.has_exponential for t in self.terms)

    def is_constant(self, tol: float = 0.0) -> bool:
        nonconst = [
            t for t in self.terms if t.pow_z or t.pow_zbar or t.has_exponential
        ]
        return all(abs(t.coeff) <= tol for t in nonconst)

    def __repr__(self):
        if not self.terms:
            return "SymbolExpr(0)"
        return " + ".join(_term_str(t) for t in self.terms)


def _term_str(t: SymbolTerm) -> str:
    parts = [f"({t.coeff:.6g})"]
    if t.pow_z:
        parts.append(f"z^{t.pow_z}")
    if t.pow_zbar:
        parts.append(f"zbar^{t.pow_zbar}")
    exps = [
        f"({c:.6g}){v}"
        for c, v in ((t.exp_z, "z"), (t.exp_z2, "z^2"), (t.exp_zbar, "zbar"), (t.exp_zbar2, "zbar^2"))
        if c
    ]
    if exps:
        parts.append("exp(" + " + ".join(exps) + ")")
    return "*".join(parts)


def conjugate(s: SymbolExpr) -> SymbolExpr:
    return s.conjugate()


def multiply(s1: SymbolExpr, s2: SymbolExpr) -> SymbolExpr:
    return s1 * s2


def abs_squared(s: SymbolExpr) -> SymbolExpr:
    return s.abs_squared()


def evaluate(s: SymbolExpr, z):
    return s(z)


# -- membership -----------------------------------------------------------------


@dataclass(frozen=True)
class MembershipVerdict:
    is_polyanalytic: bool
    min_order: Optional[int]
    square_integrable: bool
    gaussian_margin: float

    def __post_init__(self):
        if (self.min_order is not None) != self.is_polyanalytic:
            raise ValueError("min_order must be present iff is_polyanalytic")


def membership(s: SymbolExpr) -> MembershipVerdict:
    """Polyanalytic order and Gaussian square-integrability of a symbol.

    |exp(kap z^2 + nu zbar^2)| = exp(Re((kap + conj nu) z^2)), so |s|^2 e^{-|z|^2}
    is integrable iff |kap + conj nu| < 1/2 for every term; linear exponents and
    polynomial factors never obstruct integrability.
    """
    poly = all(t.exp_zbar == 0 and t.exp_zbar2 == 0 for t in s.terms)
    order = 1 + max((t.pow_zbar for t in s.terms), default=0) if poly else None
    quad = max((abs(t.exp_z2 + t.exp_zbar2.conjugate()) for t in s.terms), default=0.0)
    margin = 0.5 - quad
    return MembershipVerdict(poly, order, margin > 0, float(margin))


# -- order hypotheses -------------------------------------------------------------


class OrderConstraintError(ValueError):
    pass


def validate_orders(m: int, p: int, n: int, M: int = 1, N: int = 1) -> Optional[str]:
    """Return the first violated hypothesis by name, or None when all hold."""
    for name, v in (("m", m), ("p", p), ("n", n), ("M", M), ("N", N)):
        if v < 1:
            return f"{name} >= 1"
    if p > min(m, n):
        return "p <= min(m,n)"
    if M > min(m - p + 1, n - p + 1):
        return "M <= min(m-p+1, n-p+1)"
    if N > n - p + 1:
        return "N <= n-p+1"
    return None


def symbol_orders(f: SymbolExpr, g: SymbolExpr):
    """Membership orders (M, N) of f and g; raises OrderConstraintError when undefined."""
    out = []
    for name, s in (("f", f), ("g", g)):
        v = membership(s)
        if not v.is_polyanalytic:
            raise OrderConstraintError(f"{name} is not polyanalytic of any finite order")
        if not v.square_integrable:
            raise OrderConstraintError(f"{name} is not square-integrable (margin {v.gaussian_margin:.3g})")
        out.append(v.min_order)
    return tuple(out)


def check_orders(f: SymbolExpr, g: SymbolExpr, m: int, p: int, n: int):
    """Raise OrderConstraintError unless (m, p, n) and the orders of f, g are admissible."""
    M, N = symbol_orders(f, g)
    bad = validate_orders(m, p, n, M, N)
    if bad:
        raise OrderConstraintError(f"order hypothesis violated: {bad} (m={m}, p={p}, n={n}, M={M}, N={N})")
    return M, N


# -- Sarason classification --------------------------------------------------------


class SarasonReason(str, enum.Enum):
    OK = "OK"
    F_NOT_PURE_EXPONENTIAL = "F_NOT_PURE_EXPONENTIAL"
    G_NOT_PURE_EXPONENTIAL = "G_NOT_PURE_EXPONENTIAL"
    PRODUCT_NOT_CONSTANT = "PRODUCT_NOT_CONSTANT"
    QUADRATIC_EXPONENT = "QUADRATIC_EXPONENT"
    ANTIANALYTIC_EXPONENT = "ANTIANALYTIC_EXPONENT"
    ORDER_CONSTRAINT_VIOLATED = "ORDER_CONSTRAINT_VIOLATED"

    @property
    def within_hypotheses(self) -> bool:
        """False for codes outside the scope of the boundedness classification."""
        return self not in (SarasonReason.ANTIANALYTIC_EXPONENT, SarasonReason.ORDER_CONSTRAINT_VIOLATED)


@dataclass(frozen=True)
class SarasonVerdict:
    bounded: bool
    reason: SarasonReason
    q_linear: Optional[tuple] = None
    c: Optional[complex] = None

    def __post_init__(self):
        if self.bounded and (self.reason is not SarasonReason.OK or self.q_linear is None or self.c is None):
            raise ValueError("a bounded verdict needs reason OK, q and c")

    @property
    def expectation(self) -> str:
        """'bounded', 'unbounded', or 'outside-hypotheses'."""
        if self.bounded:
            return "bounded"
        return "unbounded" if self.reason.within_hypotheses else "outside-hypotheses"


def _is_pure_exponential(s: SymbolExpr) -> bool:
    return len(s.terms) == 1 and s.terms[0].pow_z == 0 and s.terms[0].pow_zbar == 0


def _close(a: complex, b: complex, tol: float) -> bool:
    return a == b if tol == 0 else abs(a - b) <= tol


def classify_sarason(f: SymbolExpr, g: SymbolExpr, orders=None, tol: float = 0.0) -> SarasonVerdict:
    """Decide whether T^m_f T^p_{conj g} is bounded, by the form f = e^q, g = c e^{-q}, deg q <= 1.

    Checks run in the order of ``SarasonReason`` and the first failure is
    reported.  ``orders`` = (m, p, n) enables the order-hypothesis check.
    Exponent matching is exact unless ``tol`` > 0.
    """
    if f.is_zero or g.is_zero:
        raise ValueError("classify_sarason needs nonzero symbols")
    for name, s in (("f", f), ("g", g)):
        if not membership(s).square_integrable:
            raise ValueError(f"{name} is not square-integrable against the Gaussian")
    R = SarasonReason
    if not _is_pure_exponential(f):
        return SarasonVerdict(False, R.F_NOT_PURE_EXPONENTIAL)
    if not _is_pure_exponential(g):
        return SarasonVerdict(False, R.G_NOT_PURE_EXPONENTIAL)
    tf, tg = f.terms[0], g.terms[0]
    cancels = all(
        _close(a, -b, tol)
        for a, b in ((tf.exp_z, tg.exp_z), (tf.exp_z2, tg.exp_z2), (tf.exp_zbar, tg.exp_zbar), (tf.exp_zbar2, tg.exp_zbar2))
    )
    if not cancels:
        return SarasonVerdict(False, R.PRODUCT_NOT_CONSTANT)
    if tf.exp_z2 != 0 or tf.exp_zbar2 != 0:
        return SarasonVerdict(False, R.QUADRATIC_EXPONENT)
    if tf.exp_zbar != 0:
        return SarasonVerdict(False, R.ANTIANALYTIC_EXPONENT)
    if orders is not None:
        m, p, n = orders
        if validate_orders(m, p, n, 1, 1):
            return SarasonVerdict(False, R.ORDER_CONSTRAINT_VIOLATED)
    a0 = cmath.log(tf.coeff)
    c = tf.coeff * tg.coeff
    return SarasonVerdict(True, R.OK, (a0, tf.exp_z), c)


def random_polyanalytic(rng, order: int, degree: int = 3, exp_scale: float = 0.0) -> SymbolExpr:
    """Random polynomial in z, zbar with zbar-degree < order, optionally times exp(lam z)."""
    terms = []
    for b in range(order):
        for a in range(degree + 1):
            c = complex(rng.standard_normal(), rng.standard_normal()) / (1 + a + b)
            terms.append(SymbolTerm(c, a, b))
    s = SymbolExpr(terms)
    if exp_scale:
        lam = exp_scale * complex(rng.standard_normal(), rng.standard_normal())
        s = s * SymbolExpr.exponential(z=lam)
    return s


# -- text schema --------------------------------------------------------------------

_COMPLEX_FIELDS = ("coeff", "exp_z", "exp_z2", "exp_zbar", "exp_zbar2")
_INT_FIELDS = ("pow_z", "pow_zbar")


class SymbolParseError(ValueError):
    pass


def _complex_field(value, where):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise SymbolParseError(f"{where}: expected [re, im], got {value!r}")


def parse_symbol(record) -> SymbolExpr:
    """Build a SymbolExpr from ``{"terms": [{coeff: [re, im], pow_z: 0, ...}, ...]}``.

    Omitted fields default to zero (coeff to 1); zero-coefficient terms are dropped.
    """
    if isinstance(record, list):
        record = {"terms": record}
    if not isinstance(record, dict) or set(record) != {"terms"}:
        raise SymbolParseError("symbol record must be a mapping with exactly the key 'terms'")
    terms = record["terms"]
    if not isinstance(terms, list):
        raise SymbolParseError("'terms' must be a list")
    out = []
    for i, rec in enumerate(terms):
        where = f"terms[{i}]"
        if not isinstance(rec, dict):
            raise SymbolParseError(f"{where}: term must be a mapping")
        unknown = set(rec) - set(_COMPLEX_FIELDS) - set(_INT_FIELDS)
        if unknown:
            raise SymbolParseError(f"{where}: unknown field(s) {sorted(unknown)}")
        kw = {}
        for name in _COMPLEX_FIELDS:
            default = 1.0 if name == "coeff" else 0.0
            kw[name] = _complex_field(rec.get(name, default), f"{where}.{name}")
        for name in _INT_FIELDS:
            v = rec.get(name, 0)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise SymbolParseError(f"{where}.{name}: expected a nonnegative integer, got {v!r}")
            kw[name] = v
        out.append(SymbolTerm(**kw))
    return SymbolExpr(out)


def serialize_symbol(s: SymbolExpr) -> dict:
    terms = []
    for t in s.terms:
        rec = {"coeff": [t.coeff.real, t.coeff.imag]}
        for name in _INT_FIELDS:
            if getattr(t, name):
                rec[name] = getattr(t, name)
        for name in _COMPLEX_FIELDS[1:]:
            v = getattr(t, name)
            if v:
                rec[name] = [v.real, v.imag]
        terms.append(rec)
    return {"terms": terms}
