"""Gap probabilities ``det(I - K|_J)`` and traces by Nystrom discretization.

Gauss-Legendre nodes ``x_i`` and weights ``w_i`` on ``J`` give the symmetric
matrix ``A_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j)``; then
``det(I - A) = prod_i (1 - lambda_i)`` over its eigenvalues.  For kernels
analytic on a neighbourhood of ``J`` the error decays exponentially in the
order ``m``.

When ``J`` starts at a hard edge ``0`` where the kernel behaves like
``(x y)^(a/2)`` (attribute ``edge_exponent``), Gauss-Jacobi nodes for the
weight ``x^a`` are used instead and the factor is divided back out of the
weights, which restores exponential convergence for non-even ``a``.

A half-line ``(s, inf)`` is truncated to ``(s, s + 40)``; for the Airy
kernel the dropped part carries trace below ``1e-70``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .ensemble import EnsembleSpec, make_map
from .kernels import FiniteKernel, limit_kernel_for
from .orthopoly import WeightFamily, gauss_rule, legendre_rule

TRUNCATION = 40.0


def _interval(interval):
    a, b = float(interval[0]), float(interval[1])
    if math.isinf(b):
        b = a + TRUNCATION
    if not (math.isfinite(a) and a <= b):
        raise ValueError(f"bad interval {interval!r}")
    return a, b


def _nodes_weights(kernel, a, b, m):
    expo = float(getattr(kernel, "edge_exponent", 0.0) or 0.0)
    if a == 0.0 and expo > 0.0:
        rule = gauss_rule(WeightFamily.jacobi(expo, 0.0), m)
        return b * rule.nodes, b * rule.weights / rule.nodes ** expo
    rule = legendre_rule(a, b, m)
    return rule.nodes, rule.weights


def _kernel_matrix(kernel, nodes):
    if hasattr(kernel, "matrix"):
        k = np.asarray(kernel.matrix(nodes), dtype=float)
    else:
        k = np.asarray(kernel(nodes[:, None], nodes[None, :]), dtype=float)
    if not np.all(np.isfinite(k)):
        raise ArithmeticError("kernel returned non-finite values on the Nystrom nodes")
    return k


def _kernel_diagonal(kernel, nodes):
    if hasattr(kernel, "diagonal"):
        return np.asarray(kernel.diagonal(nodes), dtype=float)
    return np.asarray(kernel(nodes, nodes), dtype=float)


@dataclass(frozen=True)
class NystromDiscretization:
    interval: tuple
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray

    def eigenvalues(self):
        try:
            return scipy.linalg.eigvalsh(self.matrix)
        except np.linalg.LinAlgError as exc:
            raise ArithmeticError(f"Nystrom eigensolve failed: {exc}") from exc

    def det_eig(self):
        return float(np.prod(1.0 - self.eigenvalues()))

    def det_lu(self):
        lu, piv = scipy.linalg.lu_factor(np.eye(self.order) - self.matrix)
        sign = (-1.0) ** np.count_nonzero(piv != np.arange(self.order))
        return float(sign * np.prod(np.diag(lu)))


def discretize(kernel, interval, m: int) -> NystromDiscretization:
    a, b = _interval(interval)
    if m < 1:
        raise ValueError("order must be positive")
    if a == b:
        return NystromDiscretization((a, b), 0, np.empty(0), np.empty(0), np.empty((0, 0)))
    nodes, weights = _nodes_weights(kernel, a, b, m)
    root = np.sqrt(weights)
    k = _kernel_matrix(kernel, nodes)
    mat = root[:, None] * k * root[None, :]
    mat = 0.5 * (mat + mat.T)
    return NystromDiscretization((a, b), m, nodes, weights, mat)


def gap_probability(kernel, interval, m: int = 64, method: str = "eig") -> float:
    """``det(I - K)`` on ``J``: probability that ``J`` holds no point."""
    disc = discretize(kernel, interval, m)
    if disc.order == 0:
        return 1.0
    if method == "eig":
        return disc.det_eig()
    if method == "lu":
        return disc.det_lu()
    raise ValueError(f"unknown method {method!r}")


def trace(kernel, interval, m: int = 64) -> float:
    """``sum_i w_i K(x_i, x_i)`` over Gauss-Legendre nodes on ``J``."""
    a, b = _interval(interval)
    if a == b:
        return 0.0
    nodes, weights = _nodes_weights(kernel, a, b, m)
    return float(np.dot(weights, _kernel_diagonal(kernel, nodes)))


def doubling_error(kernel, interval, m: int) -> float:
    """``|E(m) - E(2m)|`` as an a-posteriori error estimate."""
    return abs(gap_probability(kernel, interval, m) - gap_probability(kernel, interval, 2 * m))


class GapRow(NamedTuple):
    n: int
    gap_n: float
    gap_limit: float
    difference: float


def gap_convergence_report(spec: EnsembleSpec, regime: str, interval, n_list, m: int = 48,
                           t=None, side=None):
    """Rows ``(n, E~_n(J), E~(J), |difference|)`` along ``n_list``."""
    rows = []
    limit_value = None
    for n in n_list:
        scaling = make_map(spec.with_n(n), regime, t=t, side=side)
        kernel = FiniteKernel(spec.with_n(n), scaling)
        if limit_value is None:
            limit_value = gap_probability(limit_kernel_for(scaling), interval, m)
        value = gap_probability(kernel, interval, m)
        rows.append(GapRow(int(n), value, limit_value, abs(value - limit_value)))
    return rows
