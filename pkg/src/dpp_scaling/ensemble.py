"""Classical unitary ensembles as Sturm-Liouville problems, and their scalings.

Given only the weight, Tricomi's correspondence ``w'/w = r/p`` with ``p``
quadratic and ``r`` linear produces

    q(x) = r(x)**2 / (4 p(x)) + r'(x) / 2,
    lambda_n = -n (r' + (n + 1) p'' / 2),

so that ``phi_j = w**0.5 P_j`` solves ``-(p phi')' + q phi = lambda_j phi``.
With ``x = n**kappa t`` the coefficients have the limits
``n**(-2 kappa') lambda_n -> omega``, ``n**(-2 kappa') q(n**kappa t) ->
q~(t)`` and ``n**(2 kappa'') p(n**kappa t) -> p~(t)``, from which every
scaling map below is read off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .orthopoly import HERMITE, JACOBI, LAGUERRE, WeightFamily, legendre_rule

GUE = "gue"
LUE = "lue"
JUE = "jue"

FIXED = "fixed"
RATIO = "ratio"

BULK = "bulk"
SOFT = "soft"
HARD = "hard"

_EDGE_TOL = 1e-12


class ScalingError(ValueError):
    """Raised when a scaling regime does not apply to the requested point."""

    tag = "scaling"


class DegenerateEdgeError(ScalingError):
    """A soft edge collides with a hard edge (``t_* = 0`` or ``t_* = 1``)."""

    tag = "hard-edge-collision"


class NoHardEdgeError(ScalingError):
    tag = "no-hard-edge"


# ------------------------------------------------------------------ specs


@dataclass(frozen=True)
class EnsembleSpec:
    """Weight family at size ``n`` plus the n-dependence of its parameters.

    ``mode == "fixed"`` keeps alpha, beta constant (limit theta = 1 for LUE,
    theta = tau = 1/2 for JUE).  ``mode == "ratio"`` derives them from
    theta (and tau) and rounds to integers:

    * LUE: ``alpha = round((theta - 1) n)``
    * JUE: ``m1 + m2 = n / tau``, ``m1 = theta (m1 + m2)``,
      ``alpha = round(m1 - n)``, ``beta = round(m2 - n)``
    """

    name: str
    n: int
    mode: str = FIXED
    alpha: float = 0.0
    beta: float = 0.0
    theta: Optional[float] = None
    tau: Optional[float] = None

    def __post_init__(self):
        if self.name not in (GUE, LUE, JUE):
            raise ValueError(f"unknown ensemble {self.name!r}")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValueError("n must be a positive integer")
        if self.mode not in (FIXED, RATIO):
            raise ValueError(f"unknown parameter mode {self.mode!r}")
        if self.name == LUE and self.mode == RATIO:
            if self.theta is None or not self.theta >= 1:
                raise ValueError("LUE requires theta >= 1")
        if self.name == JUE and self.mode == RATIO:
            if self.theta is None or not 0 < self.theta < 1:
                raise ValueError("JUE requires 0 < theta < 1")
            if self.tau is None or not 0 < self.tau <= 0.5:
                raise ValueError("JUE requires 0 < tau <= 1/2")
        alpha, beta = self.parameters
        if alpha < 0 or beta < 0:
            raise ValueError(f"derived parameters must be >= 0, got alpha={alpha}, beta={beta}")

    @classmethod
    def gue(cls, n):
        return cls(GUE, n)

    @classmethod
    def lue(cls, n, alpha=None, theta=None):
        if theta is not None:
            return cls(LUE, n, RATIO, theta=float(theta))
        return cls(LUE, n, FIXED, alpha=float(alpha or 0.0))

    @classmethod
    def jue(cls, n, alpha=None, beta=None, theta=None, tau=None):
        if theta is not None or tau is not None:
            return cls(JUE, n, RATIO, theta=theta, tau=tau)
        return cls(JUE, n, FIXED, alpha=float(alpha or 0.0), beta=float(beta or 0.0))

    def with_n(self, n):
        return replace(self, n=int(n))

    @property
    def parameters(self):
        """The (alpha, beta) actually used at this n."""
        if self.mode == FIXED or self.name == GUE:
            return float(self.alpha), float(self.beta)
        n = self.n
        if self.name == LUE:
            return float(round((self.theta - 1.0) * n)), 0.0
        total = n / self.tau
        m1 = self.theta * total
        return float(round(m1 - n)), float(round(total - m1 - n))

    @property
    def family(self) -> WeightFamily:
        alpha, beta = self.parameters
        if self.name == GUE:
            return WeightFamily.hermite()
        if self.name == LUE:
            return WeightFamily.laguerre(alpha)
        return WeightFamily.jacobi(alpha, beta)

    @property
    def limit_theta(self):
        if self.name == GUE:
            return None
        if self.mode == RATIO:
            return float(self.theta)
        return 1.0 if self.name == LUE else 0.5

    @property
    def limit_tau(self):
        if self.name != JUE:
            return None
        return float(self.tau) if self.mode == RATIO else 0.5

    def config(self):
        alpha, beta = self.parameters
        out = {"ensemble": self.name, "n": self.n, "mode": self.mode}
        if self.name != GUE:
            out.update(alpha=alpha, theta=self.limit_theta)
        if self.name == JUE:
            out.update(beta=beta, tau=self.limit_tau)
        return out


# -------------------------------------------------------- Sturm-Liouville


@dataclass(frozen=True)
class SturmLiouvilleData:
    """``p`` (quadratic) and ``r`` (linear) as ascending coefficient tuples."""

    p: tuple
    r: tuple
    family: WeightFamily

    def p_eval(self, x):
        c0, c1, c2 = self.p
        return c0 + c1 * np.asarray(x, dtype=float) + c2 * np.asarray(x, dtype=float) ** 2

    def r_eval(self, x):
        return self.r[0] + self.r[1] * np.asarray(x, dtype=float)

    def q(self, x):
        x = np.asarray(x, dtype=float)
        return self.r_eval(x) ** 2 / (4.0 * self.p_eval(x)) + self.r[1] / 2.0

    def lam(self, n):
        r_prime = self.r[1]
        p_second = 2.0 * self.p[2]
        return -n * (r_prime + 0.5 * (n + 1) * p_second)

    @property
    def p_prime_0(self):
        return self.p[1]


def tricomi_map(family: WeightFamily) -> SturmLiouvilleData:
    """Sturm-Liouville coefficients from the weight, via ``r = p w'/w``."""
    if family.tag == HERMITE:
        p = (1.0, 0.0, 0.0)  # w'/w = -2x
        r = (0.0, -2.0)
    elif family.tag == LAGUERRE:
        p = (0.0, 1.0, 0.0)  # w'/w = alpha/x - 1
        r = (family.alpha, -1.0)
    elif family.tag == JACOBI:
        p = (0.0, 1.0, -1.0)  # w'/w = alpha/x - beta/(1-x)
        r = (family.alpha, -(family.alpha + family.beta))
    else:
        raise ValueError(f"no Sturm-Liouville data for family {family.tag!r}")
    return SturmLiouvilleData(p, r, family)


# ------------------------------------------------------------ scaling data


@dataclass(frozen=True)
class HardEdge:
    side: str  # "lower" or "upper"
    location: float
    gamma: float
    p_prime_0: float

    @property
    def alpha_index(self):
        return 2.0 * self.gamma / math.sqrt(self.p_prime_0)


@dataclass(frozen=True)
class ScalingData:
    kappa: float
    kappa_prime: float
    kappa_dprime: float
    omega: float
    p_tilde: Callable
    q_tilde: Callable
    q_tilde_prime: Callable
    t_minus: float
    t_plus: float
    support: tuple
    hard_edges: dict = field(default_factory=dict)

    def bulk_gap(self, t):
        """``omega - q~(t)``; positive exactly in the bulk."""
        return self.omega - self.q_tilde(t)


def _lue_q(theta):
    def q(t):
        t = np.asarray(t, dtype=float)
        return (theta - 1.0 - t) ** 2 / (4.0 * t)

    def dq(t):
        t = np.asarray(t, dtype=float)
        return (t * t - (theta - 1.0) ** 2) / (4.0 * t * t)

    return q, dq


def _jue_q(theta, tau):
    slope = 1.0 - 2.0 * tau

    def q(t):
        t = np.asarray(t, dtype=float)
        return (theta - tau - slope * t) ** 2 / (4.0 * tau**2 * t * (1.0 - t))

    def dq(t):
        t = np.asarray(t, dtype=float)
        num = theta - tau - slope * t
        den = t * (1.0 - t)
        return (-2.0 * slope * num * den - num**2 * (1.0 - 2.0 * t)) / (4.0 * tau**2 * den**2)

    return q, dq


def scaling_data(spec: EnsembleSpec) -> ScalingData:
    """Exponents, limit coefficients and edges for the ensemble."""
    alpha, beta = spec.parameters
    if spec.name == GUE:
        root2 = math.sqrt(2.0)
        return ScalingData(
            0.5, 0.5, 0.0, 2.0,
            p_tilde=lambda t: np.ones_like(np.asarray(t, dtype=float)),
            q_tilde=lambda t: np.asarray(t, dtype=float) ** 2,
            q_tilde_prime=lambda t: 2.0 * np.asarray(t, dtype=float),
            t_minus=-root2, t_plus=root2,
            support=(-math.inf, math.inf),
        )
    if spec.name == LUE:
        theta = spec.limit_theta
        q, dq = _lue_q(theta)
        t_minus = (math.sqrt(theta) - 1.0) ** 2
        t_plus = (math.sqrt(theta) + 1.0) ** 2
        hard = {}
        if abs(t_minus) <= _EDGE_TOL:
            # q(x) = alpha^2/(4x) + O(1), p(x) = x
            hard["lower"] = HardEdge("lower", 0.0, alpha / 2.0, 1.0)
        return ScalingData(
            1.0, 0.5, -0.5, 1.0,
            p_tilde=lambda t: np.asarray(t, dtype=float),
            q_tilde=q, q_tilde_prime=dq,
            t_minus=t_minus, t_plus=t_plus,
            support=(0.0, math.inf), hard_edges=hard,
        )
    theta, tau = spec.limit_theta, spec.limit_tau
    q, dq = _jue_q(theta, tau)
    t_minus = (math.sqrt(theta * (1 - tau)) - math.sqrt(tau * (1 - theta))) ** 2
    t_plus = (math.sqrt(theta * (1 - tau)) + math.sqrt(tau * (1 - theta))) ** 2
    hard = {}
    if abs(t_minus) <= _EDGE_TOL:
        hard["lower"] = HardEdge("lower", 0.0, alpha / 2.0, 1.0)
    if abs(t_plus - 1.0) <= _EDGE_TOL:
        # reflection x -> 1 - x swaps alpha and beta
        hard["upper"] = HardEdge("upper", 1.0, beta / 2.0, 1.0)
    return ScalingData(
        0.0, 1.0, 0.0, (1.0 - tau) / tau,
        p_tilde=lambda t: np.asarray(t, dtype=float) * (1.0 - np.asarray(t, dtype=float)),
        q_tilde=q, q_tilde_prime=dq,
        t_minus=t_minus, t_plus=t_plus,
        support=(0.0, 1.0), hard_edges=hard,
    )


# ------------------------------------------------------------ scaling maps


@dataclass(frozen=True)
class ScalingMap:
    """``x = sigma * xi + mu`` at size n."""

    sigma: float
    mu: float
    regime: str
    n: int
    t: Optional[float] = None
    side: Optional[str] = None
    bessel_index: Optional[float] = None

    def __post_init__(self):
        if self.sigma == 0:
            raise ValueError("sigma must be nonzero")

    def to_x(self, xi):
        return self.sigma * np.asarray(xi, dtype=float) + self.mu

    def to_xi(self, x):
        return (np.asarray(x, dtype=float) - self.mu) / self.sigma

    @classmethod
    def identity(cls, n=1):
        return cls(1.0, 0.0, "identity", n)


def limit_density(spec: EnsembleSpec, t):
    """``(1/pi) sqrt((omega - q~(t))_+ / p~(t))``, zero outside the support."""
    data = scaling_data(spec)
    t_arr = np.asarray(t, dtype=float)
    lo, hi = data.support
    inside = (t_arr > lo) & (t_arr < hi)
    safe = np.where(inside, t_arr, 0.5 if spec.name == JUE else 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        gap = np.maximum(data.omega - data.q_tilde(safe), 0.0)
        rho = np.sqrt(gap / data.p_tilde(safe)) / math.pi
    rho = np.where(inside, rho, 0.0)
    return float(rho) if t_arr.ndim == 0 else rho


def limit_mass(spec: EnsembleSpec, m: int = 200) -> float:
    """Total mass of the limit law on ``[t_-, t_+]``.

    Substituting ``t = c - h cos(phi)`` removes the square-root endpoint
    behaviour (and the ``t**-1/2`` pole of a hard edge), so Gauss-Legendre
    in ``phi`` converges geometrically.
    """
    data = scaling_data(spec)
    c = 0.5 * (data.t_plus + data.t_minus)
    h = 0.5 * (data.t_plus - data.t_minus)
    rule = legendre_rule(0.0, math.pi, m)
    t = c - h * np.cos(rule.nodes)
    f = h * np.sin(rule.nodes) * limit_density(spec, t)
    return float(np.dot(rule.weights, f))


def bulk_map(spec: EnsembleSpec, t: float) -> ScalingMap:
    """Bulk zoom at ``t``: ``mu = n**kappa t``, ``sigma = n**(kappa-1) / rho~(t)``."""
    data = scaling_data(spec)
    lo, hi = data.support
    if not lo < t < hi or not data.bulk_gap(t) > 0:
        raise ScalingError(
            f"t={t} is not strictly inside the bulk ({data.t_minus}, {data.t_plus})"
        )
    n = spec.n
    rho = limit_density(spec, t)
    return ScalingMap(n ** (data.kappa - 1.0) / rho, n**data.kappa * t, BULK, n, t=float(t))


def soft_map(spec: EnsembleSpec, side: str) -> ScalingMap:
    """Soft-edge zoom at ``t_+`` (side "+") or ``t_-`` (side "-").

    The real cube root of ``p~/q~'`` carries the sign, so the lower edge gets
    ``sigma < 0`` and the Airy variable points into the bulk on both sides.
    """
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    data = scaling_data(spec)
    t_star = data.t_plus if side == "+" else data.t_minus
    lo, hi = data.support
    if abs(t_star - lo) <= _EDGE_TOL or abs(t_star - hi) <= _EDGE_TOL:
        raise DegenerateEdgeError(
            f"soft edge t={t_star} coincides with a hard edge; use the hard-edge scaling"
        )
    slope = float(data.q_tilde_prime(t_star))
    if slope == 0:
        raise ScalingError("q~'(t_*) vanishes; the edge root is not simple")
    n = spec.n
    sigma = n ** (data.kappa - 2.0 / 3.0) * np.cbrt(float(data.p_tilde(t_star)) / slope)
    return ScalingMap(float(sigma), n**data.kappa * t_star, SOFT, n, t=t_star, side=side)


def hard_map(spec: EnsembleSpec, side: str = "lower") -> ScalingMap:
    """Hard-edge zoom ``x = sigma xi`` (lower) or ``x = 1 - |sigma| xi`` (upper)."""
    if spec.name == GUE:
        raise NoHardEdgeError("GUE has no hard edge")
    data = scaling_data(spec)
    edge = data.hard_edges.get(side)
    if edge is None:
        raise NoHardEdgeError(f"no hard edge on the {side} side for {spec.config()}")
    n = spec.n
    sigma = edge.p_prime_0 / (4.0 * data.omega * n ** (2.0 * data.kappa_prime))
    if side == "upper":
        return ScalingMap(-sigma, 1.0, HARD, n, side=side, bessel_index=edge.alpha_index)
    return ScalingMap(sigma, 0.0, HARD, n, side=side, bessel_index=edge.alpha_index)


def make_map(spec: EnsembleSpec, regime: str, t=None, side=None) -> ScalingMap:
    """Dispatch on the regime name."""
    if regime == BULK:
        if t is None:
            raise ValueError("bulk scaling needs t")
        return bulk_map(spec, t)
    if regime == SOFT:
        return soft_map(spec, side or "+")
    if regime == HARD:
        return hard_map(spec, side or "lower")
    raise ValueError(f"unknown regime {regime!r}")


def coefficient_convergence_report(spec: EnsembleSpec, t: float, n_list):
    """Rows ``(n, lambda error, q error, p error)`` of the coefficient limits.

    In ratio mode each n uses its own rounded parameters.
    """
    rows = []
    for n in n_list:
        sn = spec.with_n(n)
        data = scaling_data(sn)
        sl = tricomi_map(sn.family)
        x = n**data.kappa * t
        lam_err = abs(n ** (-2 * data.kappa_prime) * sl.lam(n) - data.omega)
        q_err = abs(n ** (-2 * data.kappa_prime) * float(sl.q(x)) - float(data.q_tilde(t)))
        p_err = abs(n ** (2 * data.kappa_dprime) * float(sl.p_eval(x)) - float(data.p_tilde(t)))
        rows.append((int(n), float(lam_err), float(q_err), float(p_err)))
    return rows
