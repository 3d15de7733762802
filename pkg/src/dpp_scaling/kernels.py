"""Finite-n projection kernels and the Dyson, Airy and Bessel limit kernels.

Every kernel object offers the same three calls, which is all that the
Fredholm code relies on:

* ``k(x, y)`` elementwise with numpy broadcasting,
* ``k.diagonal(x)``,
* ``k.matrix(x)``, the symmetric matrix ``K(x_i, x_j)``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from . import specfun
from .ensemble import BULK, HARD, SOFT, EnsembleSpec, ScalingMap, scaling_data
from .orthopoly import WeightFamily, gauss_rule, legendre_rule, phi_table

AIRY_TRUNCATION = 40.0
_NEAR_DIAG = 1e-5


def _bcast(x, y):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    scalar = x.ndim == 0
    return np.atleast_1d(x).copy(), np.atleast_1d(y).copy(), scalar


def _ret(arr, scalar):
    return float(np.asarray(arr).reshape(-1)[0]) if scalar else arr


# ------------------------------------------------------------ finite n


class FiniteKernel:
    """``K_n(x, y) = sum_{j<n} phi_j(x) phi_j(y)``, optionally rescaled.

    With a scaling map the kernel is evaluated in the zoomed variables,
    ``K~_n(xi, eta) = |sigma| K_n(sigma xi + mu, sigma eta + mu)``; the
    absolute value keeps the kernel positive for maps that flip orientation
    (lower soft edge, upper hard edge).
    """

    def __init__(self, spec: EnsembleSpec, scaling: Optional[ScalingMap] = None):
        self.spec = spec
        self.n = spec.n
        self.family: WeightFamily = spec.family
        self.scaling = scaling

    def __repr__(self):
        return f"FiniteKernel({self.spec.config()}, scaling={self.scaling})"

    def _to_x(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.scaling is None:
            x = xi
        else:
            x = self.scaling.to_x(xi)
        inside = self.family.contains(x)
        if np.any(~inside):
            bad = np.atleast_1d(xi)[np.atleast_1d(~inside)][0]
            raise ValueError(
                f"coordinate {bad!r} maps outside the support {self.family.support}"
            )
        return x

    @property
    def edge_exponent(self) -> float:
        """Power ``a`` with ``K ~ (xi eta)^(a/2)`` at ``xi = 0`` (hard edge only)."""
        if self.scaling is not None and self.scaling.regime == HARD:
            return float(self.scaling.bessel_index)
        return 0.0

    @property
    def _jacobian(self):
        return 1.0 if self.scaling is None else abs(self.scaling.sigma)

    def phi(self, xi):
        """``phi_j`` at the (mapped) points, shape ``(n,) + xi.shape``."""
        return phi_table(self.family, self.n, self._to_x(xi))

    def __call__(self, xi, eta):
        xi, eta, scalar = _bcast(xi, eta)
        px = self.phi(xi.ravel())
        py = self.phi(eta.ravel())
        vals = self._jacobian * np.sum(px * py, axis=0)
        return _ret(vals.reshape(xi.shape), scalar)

    def diagonal(self, xi):
        xi = np.asarray(xi, dtype=float)
        p = self.phi(xi.ravel())
        vals = self._jacobian * np.sum(p * p, axis=0)
        return _ret(vals.reshape(xi.shape), xi.ndim == 0)

    def matrix(self, xi):
        p = self.phi(np.asarray(xi, dtype=float).ravel())
        k = p.T @ p
        return self._jacobian * 0.5 * (k + k.T)


def finite_eval(kernel: FiniteKernel, x, y):
    """Unscaled ``K_n(x, y)``, whatever map ``kernel`` carries."""
    return FiniteKernel(kernel.spec)(x, y)


def scaled_eval(kernel: FiniteKernel, xi, eta):
    """``K~_n(xi, eta)``; requires a kernel with a scaling map."""
    if kernel.scaling is None:
        raise ValueError("scaled_eval needs a kernel with a scaling map")
    return kernel(xi, eta)


def density(kernel: FiniteKernel, t):
    """Mean counting density in the macroscopic variable ``x = n**kappa t``.

    ``n**(kappa - 1) K_n(n**kappa t, n**kappa t)``.
    """
    kappa = scaling_data(kernel.spec).kappa
    n = kernel.n
    t = np.asarray(t, dtype=float)
    base = FiniteKernel(kernel.spec)
    return n ** (kappa - 1.0) * base.diagonal(n**kappa * t)


def density_mass(kernel: FiniteKernel, extra: int = 16) -> float:
    """``(1/n) int K_n(x, x) dx`` by the family's Gauss rule with ``n + extra`` nodes.

    The integrand is ``w`` times a polynomial of degree ``2n - 2``, so the
    rule is exact up to rounding; the value is also the mass of the rescaled
    density, which differs by a change of variables only.
    """
    rule = gauss_rule(kernel.family, kernel.n + extra)
    base = FiniteKernel(kernel.spec)
    return float(np.dot(rule.compensated_weights, base.diagonal(rule.nodes)) / kernel.n)


# ---------------------------------------------------------------- Dyson


def dyson_eval(x, y):
    """``sin(pi (x - y)) / (pi (x - y))``, Taylor branch for ``|x-y| < 1e-4``."""
    x, y, scalar = _bcast(x, y)
    d = math.pi * (x - y)
    small = np.abs(x - y) < 1e-4
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(small, 1.0 - d * d / 6.0 + d**4 / 120.0, np.sin(d) / d)
    return _ret(out, scalar)


def dyson_integral(x, y):
    """``(2 pi)^-1 int_0^{pi^2} cos((x-y) sqrt(l)) / sqrt(l) dl``.

    Computed as ``pi^-1 int_0^pi cos((x-y) s) ds`` by Gauss-Legendre.
    """
    x, y, scalar = _bcast(x, y)
    d = np.abs(x - y)
    m = 30 + int(math.ceil(float(np.max(d, initial=0.0)) * math.pi))
    rule = legendre_rule(0.0, math.pi, m)
    vals = np.cos(d[..., None] * rule.nodes) @ rule.weights / math.pi
    return _ret(vals, scalar)


class DysonKernel:
    name = "dyson"

    def __call__(self, x, y):
        return dyson_eval(x, y)

    def diagonal(self, x):
        x = np.asarray(x, dtype=float)
        return _ret(np.ones_like(x), x.ndim == 0)

    def matrix(self, x):
        x = np.asarray(x, dtype=float).ravel()
        return dyson_eval(x[:, None], x[None, :])

    integral_form = staticmethod(dyson_integral)


# ----------------------------------------------------------------- Airy


def airy_trace(s):
    """``tau(s) = int_s^inf K_Airy(x, x) dx`` in closed form."""
    s = np.asarray(s, dtype=float)
    ai, aip = specfun.airy_pair(s)
    out = (2 * s * s * ai * ai - 2 * s * aip * aip - ai * aip) / 3.0
    return _ret(out, s.ndim == 0)


def _airy_diag(ai, aip, x):
    return aip * aip - x * ai * ai


def _airy_from_values(x, y, ax, apx, ay, apy):
    x, y, ax, apx, ay, apy = np.broadcast_arrays(x, y, ax, apx, ay, apy)
    d = x - y
    near = np.abs(d) < _NEAR_DIAG
    with np.errstate(invalid="ignore", divide="ignore"):
        off = (ax * apy - apx * ay) / d
    if np.any(near):
        m = 0.5 * (x + y)[near]
        am, apm = specfun.airy_pair(m)
        h = 0.5 * d[near]
        # K(m+h, m-h) = D(m) - tau(m) h^2 + O(h^4)
        tau = (2 * m * m * am * am - 2 * m * apm * apm - am * apm) / 3.0
        off[near] = _airy_diag(am, apm, m) - tau * h * h
    return off


def airy_eval(x, y):
    """``(Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)``, diagonal ``Ai'^2 - x Ai^2``."""
    x, y, scalar = _bcast(x, y)
    ax, apx = specfun.airy_pair(x)
    ay, apy = specfun.airy_pair(y)
    return _ret(_airy_from_values(x, y, ax, apx, ay, apy), scalar)


def _composite_legendre(a, b, panel, order):
    edges = np.linspace(a, b, max(1, int(math.ceil((b - a) / panel))) + 1)
    base = legendre_rule(-1.0, 1.0, order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * base.nodes).ravel()
    weights = (half[:, None] * base.weights).ravel()
    return nodes, weights


def airy_integral(x, y):
    """``int_0^L Ai(x + l) Ai(y + l) dl`` with ``L = max(40, 40 - x - y)``.

    The neglected tail has both arguments averaging at least 40, where
    ``Ai**2 < 1e-145``.
    """
    x, y, scalar = _bcast(x, y)
    xf, yf = x.ravel(), y.ravel()
    out = np.empty(xf.shape)
    for i, (xv, yv) in enumerate(zip(xf, yf)):
        top = max(AIRY_TRUNCATION, AIRY_TRUNCATION - xv - yv)
        nodes, weights = _composite_legendre(0.0, top, 1.0, 20)
        out[i] = np.dot(weights, specfun.airy_ai(xv + nodes) * specfun.airy_ai(yv + nodes))
    return _ret(out.reshape(x.shape), scalar)


class AiryKernel:
    name = "airy"

    def __call__(self, x, y):
        return airy_eval(x, y)

    def diagonal(self, x):
        x = np.asarray(x, dtype=float)
        ai, aip = specfun.airy_pair(x)
        return _ret(_airy_diag(ai, aip, x), x.ndim == 0)

    def matrix(self, x):
        x = np.asarray(x, dtype=float).ravel()
        ai, aip = specfun.airy_pair(x)
        xx, yy = x[:, None], x[None, :]
        k = _airy_from_values(xx, yy, ai[:, None], aip[:, None], ai[None, :], aip[None, :])
        return 0.5 * (k + k.T)

    integral_form = staticmethod(airy_integral)


# --------------------------------------------------------------- Bessel


@lru_cache(maxsize=64)
def _jacobi_rule(alpha, m):
    rule = gauss_rule(WeightFamily.jacobi(alpha, 0.0), m)
    return rule.nodes, rule.weights


def _bessel_diag(alpha, x, j, j1):
    u = np.sqrt(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        d = 0.25 * (j * j + j1 * j1 - 2.0 * alpha / u * j * j1)
    at_zero = 0.25 if alpha == 0 else 0.0
    return np.where(x == 0, at_zero, d)


def bessel_integral(alpha, x, y):
    """``(1/4) int_0^1 J_a(sqrt(x l)) J_a(sqrt(y l)) dl`` by Gauss-Jacobi.

    The integrand is ``l**alpha`` times an entire function of ``l``, so the
    rule with weight ``l**alpha`` on (0, 1) converges geometrically.
    """
    x, y, scalar = _bcast(x, y)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("Bessel kernel needs x, y >= 0")
    xf, yf = x.ravel(), y.ravel()
    top = float(max(np.max(xf, initial=0.0), np.max(yf, initial=0.0)))
    m = 24 + 2 * int(math.ceil(math.sqrt(top)))
    nodes, weights = _jacobi_rule(float(alpha), m)
    jx = specfun.bessel_j(alpha, np.sqrt(np.outer(xf, nodes)))
    jy = specfun.bessel_j(alpha, np.sqrt(np.outer(yf, nodes)))
    vals = 0.25 * (jx * jy / nodes**alpha) @ weights
    return _ret(vals.reshape(x.shape), scalar)


def _bessel_from_values(alpha, x, y, jx, j1x, jy, j1y):
    x, y, jx, j1x, jy, j1y = np.broadcast_arrays(x, y, jx, j1x, jy, j1y)
    d = x - y
    near = np.abs(d) < _NEAR_DIAG * np.maximum(np.maximum(x, y), 1e-300)
    with np.errstate(invalid="ignore", divide="ignore"):
        num = np.sqrt(x) * j1x * jy - np.sqrt(y) * jx * j1y
        off = num / (2.0 * d)
    if np.any(near):
        diag = near & (d == 0)
        off[diag] = _bessel_diag(alpha, x[diag], jx[diag], j1x[diag])
        close = near & ~diag
        if np.any(close):
            off[close] = bessel_integral(alpha, x[close], y[close])
    return off


def bessel_eval(alpha, x, y):
    """Hard-edge kernel of index ``alpha >= 0`` for ``x, y >= 0``.

    Closed form ``(J(sqrt x) sqrt y J'(sqrt y) - sqrt x J'(sqrt x) J(sqrt y))
    / (2 (x - y))``, written with ``u J'(u) = alpha J(u) - u J_{alpha+1}(u)``.
    The diagonal is ``(J^2 + J_{a+1}^2 - (2a/u) J J_{a+1}) / 4``.
    """
    if alpha < 0:
        raise ValueError("Bessel index must be >= 0")
    x, y, scalar = _bcast(x, y)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("Bessel kernel needs x, y >= 0")
    jx, j1x = specfun.bessel_j_and_next(alpha, np.sqrt(x))
    jy, j1y = specfun.bessel_j_and_next(alpha, np.sqrt(y))
    out = _bessel_from_values(alpha, x, y, np.asarray(jx), np.asarray(j1x), np.asarray(jy), np.asarray(j1y))
    return _ret(out, scalar)


def bessel_trace(alpha, s, rtol=1e-13, max_order=512):
    """``tau_alpha(s) = (1/4) int_0^s int_0^1 J_a(sqrt(x l))^2 dl dx``.

    Tensor Gauss-Jacobi in both variables (weight ``l**alpha`` inside,
    ``x**alpha`` outside), doubling the order until two successive values
    agree to ``rtol``.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    if s == 0:
        return 0.0
    alpha = float(alpha)
    m = 16 + 2 * int(math.ceil(math.sqrt(s)))
    previous = None
    while m <= max_order:
        lam, wl = _jacobi_rule(alpha, m)
        v, wv = _jacobi_rule(alpha, m)
        x = s * v
        j = specfun.bessel_j(alpha, np.sqrt(np.outer(x, lam)))
        inner = 0.25 * (j * j / lam**alpha) @ wl
        value = float(s * np.dot(wv, inner / v**alpha))
        if previous is not None and abs(value - previous) <= rtol * abs(value):
            return value
        previous = value
        m *= 2
    raise ArithmeticError(f"bessel_trace did not converge for alpha={alpha}, s={s}")


class BesselKernel:
    name = "bessel"

    def __init__(self, alpha: float):
        if alpha < 0:
            raise ValueError("Bessel index must be >= 0")
        self.alpha = float(alpha)

    def __repr__(self):
        return f"BesselKernel({self.alpha})"

    @property
    def edge_exponent(self) -> float:
        return self.alpha

    def __call__(self, x, y):
        return bessel_eval(self.alpha, x, y)

    def diagonal(self, x):
        x = np.asarray(x, dtype=float)
        j, j1 = specfun.bessel_j_and_next(self.alpha, np.sqrt(x))
        return _ret(_bessel_diag(self.alpha, x, np.asarray(j), np.asarray(j1)), x.ndim == 0)

    def matrix(self, x):
        x = np.asarray(x, dtype=float).ravel()
        j, j1 = specfun.bessel_j_and_next(self.alpha, np.sqrt(x))
        k = _bessel_from_values(
            self.alpha, x[:, None], x[None, :], j[:, None], j1[:, None], j[None, :], j1[None, :]
        )
        return 0.5 * (k + k.T)

    def integral_form(self, x, y):
        return bessel_integral(self.alpha, x, y)


def limit_kernel_for(scaling: ScalingMap):
    """Limit kernel that a scaling regime converges to."""
    if scaling.regime == BULK:
        return DysonKernel()
    if scaling.regime == SOFT:
        return AiryKernel()
    if scaling.regime == HARD:
        return BesselKernel(scaling.bessel_index)
    raise ValueError(f"no limit kernel for regime {scaling.regime!r}")


# ------------------------------------------------------------ criterion T


class TraceReport(NamedTuple):
    trace_n: float
    trace_limit: float
    gap: float


def criterion_T_report(kernel: FiniteKernel, interval, limit, quad_order: int = 64):
    """Traces of ``K~_n`` and of the limit kernel over ``J`` by Gauss-Legendre."""
    a, b = interval
    rule = legendre_rule(a, b, quad_order)
    trace_n = float(np.dot(rule.weights, kernel.diagonal(rule.nodes)))
    trace_limit = float(np.dot(rule.weights, limit.diagonal(rule.nodes)))
    return TraceReport(trace_n, trace_limit, trace_n - trace_limit)
