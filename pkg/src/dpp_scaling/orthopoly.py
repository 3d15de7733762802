"""Orthonormal weighted functions and Gauss rules for the classical weights.

The functions ``phi_j(x) = w(x)**0.5 P_j(x)`` are generated by the
orthonormal three-term recurrence

    b_{j+1} phi_{j+1} = (x - a_j) phi_j - b_j phi_{j-1},

carried out on mantissas with a separate integer binary exponent.  That way
``phi_0 = (w / mu_0)**0.5`` may be far below the double range (Laguerre at
``x ~ 4n``, Hermite at ``x ~ sqrt(2n)``) while the ``phi_j`` that matter are
O(1).

Jacobi lives on (0, 1) with ``w(x) = x**alpha (1 - x)**beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

HERMITE = "hermite"
LAGUERRE = "laguerre"
JACOBI = "jacobi"
LEGENDRE = "legendre"

MAX_DEGREE = 2000


@dataclass(frozen=True)
class WeightFamily:
    """A classical weight ``w`` together with its support interval."""

    tag: str
    alpha: float = 0.0
    beta: float = 0.0
    a: float = -1.0  # Legendre interval
    b: float = 1.0

    def __post_init__(self):
        if self.tag not in (HERMITE, LAGUERRE, JACOBI, LEGENDRE):
            raise ValueError(f"unsupported weight family {self.tag!r}")
        if self.tag in (LAGUERRE, JACOBI) and self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.tag == JACOBI and self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.tag == LEGENDRE and not self.a < self.b:
            raise ValueError("Legendre interval must have a < b")

    @classmethod
    def hermite(cls):
        return cls(HERMITE)

    @classmethod
    def laguerre(cls, alpha=0.0):
        return cls(LAGUERRE, alpha=float(alpha))

    @classmethod
    def jacobi(cls, alpha=0.0, beta=0.0):
        return cls(JACOBI, alpha=float(alpha), beta=float(beta))

    @classmethod
    def legendre(cls, a=-1.0, b=1.0):
        return cls(LEGENDRE, a=float(a), b=float(b))

    @property
    def support(self):
        if self.tag == HERMITE:
            return (-math.inf, math.inf)
        if self.tag == LAGUERRE:
            return (0.0, math.inf)
        if self.tag == JACOBI:
            return (0.0, 1.0)
        return (self.a, self.b)

    @property
    def zeroth_moment(self):
        if self.tag == HERMITE:
            return math.sqrt(math.pi)
        if self.tag == LAGUERRE:
            return math.gamma(self.alpha + 1.0)
        if self.tag == JACOBI:
            return math.exp(self.log_zeroth_moment)
        return self.b - self.a

    @property
    def log_zeroth_moment(self):
        if self.tag == LAGUERRE:
            return math.lgamma(self.alpha + 1.0)
        if self.tag == JACOBI:
            a, b = self.alpha, self.beta
            return math.lgamma(a + 1) + math.lgamma(b + 1) - math.lgamma(a + b + 2)
        return math.log(self.zeroth_moment)

    def contains(self, x):
        """Mask of points where ``w`` is finite (closed end if exponent is 0)."""
        x = np.asarray(x, dtype=float)
        if self.tag == HERMITE:
            return np.isfinite(x)
        if self.tag == LAGUERRE:
            return (x >= 0) & np.isfinite(x)
        if self.tag == JACOBI:
            return (x >= 0) & (x <= 1)
        return (x >= self.a) & (x <= self.b)

    def log_weight(self, x):
        """``log w(x)``; ``-inf`` where w vanishes (endpoint, positive exponent)."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            if self.tag == HERMITE:
                return -x * x
            if self.tag == LAGUERRE:
                return _xlogy(self.alpha, x) - x
            if self.tag == JACOBI:
                return _xlogy(self.alpha, x) + _xlogy(self.beta, 1.0 - x)
            return np.zeros_like(x)

    def weight(self, x):
        return np.exp(self.log_weight(x))


def _xlogy(c, x):
    if c == 0:
        return np.zeros_like(x)
    return c * np.log(x)


# ----------------------------------------------------------- recurrences


def _jacobi_sym(j, big_a, big_b):
    """Orthonormal coefficients on (-1, 1) for weight (1-u)^A (1+u)^B."""
    s = 2 * j + big_a + big_b
    if j == 0:
        a_j = (big_b - big_a) / (big_a + big_b + 2.0)
    else:
        a_j = (big_b**2 - big_a**2) / (s * (s + 2.0))
    if j == 0:
        b_j = 0.0
    elif j == 1:
        # s - 1 may vanish for A + B = 0 only at j = 0, handled above
        b_j = math.sqrt(
            4.0 * (1 + big_a) * (1 + big_b) / ((2 + big_a + big_b) ** 2 * (3 + big_a + big_b))
        )
    else:
        b_j = math.sqrt(
            4.0 * j * (j + big_a) * (j + big_b) * (j + big_a + big_b)
            / (s * s * (s + 1.0) * (s - 1.0))
        )
    return a_j, b_j


def recurrence_coeffs(family: WeightFamily, j: int):
    """Coefficients ``(a_j, b_j)`` of the orthonormal recurrence (``b_0 = 0``)."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    if family.tag == HERMITE:
        return 0.0, math.sqrt(j / 2.0)
    if family.tag == LAGUERRE:
        return 2.0 * j + family.alpha + 1.0, math.sqrt(j * (j + family.alpha))
    if family.tag == JACOBI:
        # x = (1 + u)/2 turns x^alpha (1-x)^beta into (1+u)^alpha (1-u)^beta
        a_u, b_u = _jacobi_sym(j, family.beta, family.alpha)
        return 0.5 * (1.0 + a_u), 0.5 * b_u
    if family.tag == LEGENDRE:
        centre = 0.5 * (family.a + family.b)
        half = 0.5 * (family.b - family.a)
        b_u = j / math.sqrt(4.0 * j * j - 1.0) if j > 0 else 0.0
        return centre, half * b_u
    raise ValueError(f"unsupported weight family {family.tag!r}")


def recurrence_arrays(family: WeightFamily, m: int):
    """``a[0:m]`` and ``b[0:m+1]`` (``b[0] = 0``)."""
    a = np.empty(m)
    b = np.empty(m + 1)
    for j in range(m + 1):
        aj, bj = recurrence_coeffs(family, j)
        if j < m:
            a[j] = aj
        b[j] = bj
    return a, b


# ---------------------------------------------------------------- phi


def _check_support(family, x):
    if np.any(~family.contains(x)):
        lo, hi = family.support
        bad = np.asarray(x)[~family.contains(x)]
        raise ValueError(
            f"points outside the support [{lo}, {hi}] of {family.tag}: {bad[:3]}"
        )


def _phi0_frexp(family, x):
    log_phi0 = 0.5 * (family.log_weight(x) - family.log_zeroth_moment)
    finite = np.isfinite(log_phi0)
    log2 = np.where(finite, log_phi0, 0.0) / math.log(2.0)
    exponent = np.floor(log2).astype(np.int64)
    mantissa = np.where(finite, np.exp2(log2 - exponent), 0.0)
    return mantissa, exponent


def phi_table(family: WeightFamily, n: int, x, with_flags=False):
    """All ``phi_j(x)`` for ``j < n``; shape ``(n,) + x.shape``.

    With ``with_flags`` also return a boolean array of the same shape marking
    entries that underflowed to exactly 0 although the true value is not 0.
    """
    x = np.asarray(x, dtype=float)
    if n < 0 or n > MAX_DEGREE + 1:
        raise ValueError(f"n must lie in [0, {MAX_DEGREE + 1}]")
    _check_support(family, x)
    a, b = recurrence_arrays(family, max(n, 1))
    out = np.empty((n,) + x.shape)
    flags = np.zeros((n,) + x.shape, dtype=bool) if with_flags else None
    cur, expo = _phi0_frexp(family, x)
    prev = np.zeros_like(cur)
    for j in range(n):
        with np.errstate(under="ignore"):
            out[j] = np.ldexp(cur, expo)
        if with_flags:
            flags[j] = (out[j] == 0) & (cur != 0)
        if j == n - 1:
            break
        nxt = ((x - a[j]) * cur - b[j] * prev) / b[j + 1]
        prev, cur = cur, nxt
        _, shift = np.frexp(cur)
        shift = np.where(cur == 0, 0, shift)
        cur = np.ldexp(cur, -shift)
        prev = np.ldexp(prev, -shift)
        expo = expo + shift
    if with_flags:
        return out, flags
    return out


def phi(family: WeightFamily, j: int, x, with_flag=False):
    """Orthonormal weighted function ``phi_j(x) = w(x)**0.5 P_j(x)``.

    Underflow to 0 can happen far out in the tail; ``with_flag=True`` returns
    ``(value, underflowed)``.
    """
    if not 0 <= j <= MAX_DEGREE:
        raise ValueError(f"degree must lie in [0, {MAX_DEGREE}]")
    arr = np.asarray(x, dtype=float)
    vals, flags = phi_table(family, j + 1, arr, with_flags=True)
    value, flag = vals[j], flags[j]
    if arr.ndim == 0:
        value, flag = float(value), bool(flag)
    return (value, flag) if with_flag else value


# ---------------------------------------------------------- Gauss rules


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for ``integral f(x) w(x) dx``.

    ``compensated_weights`` are ``weights / w(nodes)``: with them the rule
    integrates ``f(x) dx`` where ``f = w * polynomial``, e.g. products of
    ``phi_j``.  They stay representable where ``weights`` underflow.
    """

    nodes: np.ndarray
    weights: np.ndarray
    compensated_weights: np.ndarray
    family: WeightFamily
    order: int = field(default=0)

    def integrate(self, f):
        return float(np.sum(self.weights * f(self.nodes)))


def _newton_polish(family, m, nodes, a, b):
    x = nodes.copy()
    for _ in range(2):
        p_prev = np.zeros_like(x)
        p_cur = np.ones_like(x)
        d_prev = np.zeros_like(x)
        d_cur = np.zeros_like(x)
        for j in range(m):
            p_next = ((x - a[j]) * p_cur - b[j] * p_prev) / b[j + 1]
            d_next = (p_cur + (x - a[j]) * d_cur - b[j] * d_prev) / b[j + 1]
            p_prev, p_cur, d_prev, d_cur = p_cur, p_next, d_cur, d_next
            big = np.abs(p_cur) + np.abs(d_cur) > 1e200
            if np.any(big):
                s = np.where(big, 1e-200, 1.0)
                p_prev, p_cur, d_prev, d_cur = p_prev * s, p_cur * s, d_prev * s, d_cur * s
        x = x - p_cur / d_cur
    return x


def gauss_rule(family: WeightFamily, m: int) -> QuadratureRule:
    """m-point Gauss rule by Golub-Welsch.

    Nodes are the eigenvalues of the Jacobi matrix, polished by two Newton
    steps on ``P_m``.  Weights come from the Christoffel numbers
    ``1 / sum_j P_j(x_k)**2``, evaluated through ``phi`` so that no
    intermediate overflows.
    """
    if not 1 <= m <= MAX_DEGREE:
        raise ValueError(f"order must lie in [1, {MAX_DEGREE}]")
    a, b = recurrence_arrays(family, m)
    try:
        nodes = eigh_tridiagonal(a, b[1:m], eigvals_only=True)
    except Exception as exc:  # LinAlgError and friends
        raise ArithmeticError(f"Jacobi-matrix eigensolve failed: {exc}") from exc
    nodes = np.sort(_newton_polish(family, m, nodes, a, b))
    table = phi_table(family, m, nodes)
    compensated = 1.0 / np.sum(table * table, axis=0)
    # weights leave double range for large exponents (Gamma(alpha + 1) > 1e308
    # once alpha > 170); compensated weights stay representable
    with np.errstate(under="ignore", over="ignore", divide="ignore"):
        weights = np.exp(family.log_weight(nodes) + np.log(compensated))
    return QuadratureRule(nodes, weights, compensated, family, m)


def legendre_rule(a: float, b: float, m: int) -> QuadratureRule:
    """Gauss-Legendre rule on ``[a, b]``."""
    return gauss_rule(WeightFamily.legendre(a, b), m)
